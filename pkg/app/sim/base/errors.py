class SimulationError(Exception):
    """Base class for every error raised by the simulation suite"""


class StructuralError(SimulationError, ValueError):
    """Array shapes or component counts do not match the grid"""


class DivergedStateError(SimulationError):
    """State became non-finite or tripped a divergence guard"""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t
        self.reason = message


class ConfigError(SimulationError, ValueError):
    """Invalid run or solver configuration"""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class SnapshotFormatError(SimulationError):
    """Snapshot file with bad magic, version or payload length"""


class PostShockQueryError(SimulationError):
    """Characteristic query at or beyond the shock time"""


class DomainError(SimulationError, ValueError):
    """Input outside the mathematical domain of an operation"""
