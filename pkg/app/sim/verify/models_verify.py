from pydantic import BaseModel, Field


class CheckResult(BaseModel):
    """One measured quantity against its acceptance limit"""

    name: str
    value: float
    limit: float | None = Field(None, description="None for recorded-only values")
    lower: float | None = Field(None, description="Lower limit for ratio checks")
    passed: bool
    detail: str = ""

    @classmethod
    def at_most(cls, name: str, value: float, limit: float, detail: str = ""):
        return cls(
            name=name, value=value, limit=limit, passed=value <= limit, detail=detail
        )

    @classmethod
    def within(
        cls, name: str, value: float, lower: float, upper: float, detail: str = ""
    ):
        return cls(
            name=name,
            value=value,
            lower=lower,
            limit=upper,
            passed=lower <= value <= upper,
            detail=detail,
        )

    @classmethod
    def recorded(cls, name: str, value: float, detail: str = ""):
        return cls(name=name, value=value, passed=True, detail=detail)

    @classmethod
    def holds(cls, name: str, ok: bool, value: float = 0.0, detail: str = ""):
        return cls(name=name, value=value, passed=ok, detail=detail)


class SuiteReport(BaseModel):
    suite: str
    checks: list[CheckResult] = Field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
