import os
from pathlib import Path

DEV = "dev"
TEST = "test"
PROD = "prod"

# ENVs that run on a workstation
LOCAL_ENVS = {DEV, TEST}

DEFAULT_FFT_WORKERS = 1
DEFAULT_SWEEP_CONCURRENCY = 2


def get_env() -> str:
    """
    Returns the current environment, defaulting to dev
    """
    return os.environ.get("ENVIRONMENT", DEV)


def is_prod() -> bool:
    """
    Returns True if the current environment is prod
    """
    return get_env() == PROD


def get_log_level() -> str:
    """
    Returns the configured logging level name, defaulting to INFO
    """
    return os.environ.get("LOGGING_LEVEL", "INFO").upper()


def get_fft_workers() -> int:
    """
    Returns the number of worker threads handed to scipy.fft
    """
    try:
        return max(1, int(os.environ.get("FFT_WORKERS", DEFAULT_FFT_WORKERS)))
    except ValueError:
        return DEFAULT_FFT_WORKERS


def get_sweep_concurrency() -> int:
    """
    Returns how many sweep entries `run` may execute at once
    """
    try:
        return max(
            1, int(os.environ.get("SWEEP_CONCURRENCY", DEFAULT_SWEEP_CONCURRENCY))
        )
    except ValueError:
        return DEFAULT_SWEEP_CONCURRENCY


def resolve_output_dir(output_dir: str | Path) -> Path:
    """
    Resolves a relative output directory under ROTBURGERS_OUTPUT_ROOT when set
    """
    path = Path(output_dir)
    root = os.environ.get("ROTBURGERS_OUTPUT_ROOT")
    if root and not path.is_absolute():
        return Path(root) / path
    return path
