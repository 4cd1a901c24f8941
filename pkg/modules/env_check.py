import os
from typing import Dict, Optional

from modules.logging_setup import setup_logger

DEFAULT_BIT_BUDGET = 100_000
DEFAULT_TERM_BUDGET = 1_000_000
DEFAULT_DEGREE = 3

# env key -> default
NUMERIC_KEYS: Dict[str, int] = {
    "FRIEZE_BUDGET_BITS": DEFAULT_BIT_BUDGET,
    "FRIEZE_TERM_BUDGET": DEFAULT_TERM_BUDGET,
    "FRIEZE_DEGREE": DEFAULT_DEGREE,
}


def _positive_int(raw: Optional[str]) -> Optional[int]:
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw.strip())
    except ValueError:
        return None
    return value if value > 0 else None


def env_int(key: str) -> int:
    """Positive integer from the environment, else the documented default."""
    value = _positive_int(os.getenv(key))
    return NUMERIC_KEYS[key] if value is None else value


def assert_env():
    logger = setup_logger("env")
    bad = [k for k in NUMERIC_KEYS if os.getenv(k) not in (None, "") and _positive_int(os.getenv(k)) is None]
    if bad:
        logger.warning(f"Ignoring non-positive or non-integer env keys: {bad}")
    return not bad
