"""
Runtime configuration for the toric Chern character engine.

Values come from the environment, optionally seeded from config/.env.
Command-line flags override everything here.
"""
import os
import logging

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv(os.path.join('config', '.env'))

logger = logging.getLogger(__name__)


def _int_setting(name: str, default: int) -> int:
    """Read an integer setting, falling back to the default on bad input."""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer value {raw!r} for {name}; using {default}")
        return default


LOG_LEVEL = os.getenv("TORIC_LOG_LEVEL", "INFO").upper()
LOG_FORMAT = os.getenv("TORIC_LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s")

WORKERS = max(1, _int_setting("TORIC_WORKERS", 1))
# verify-paper spreads its per-fan suites over this many processes
VERIFY_WORKERS = max(1, _int_setting("TORIC_VERIFY_WORKERS", os.cpu_count() or 1))

# Completeness audit
AUDIT_SEED = _int_setting("TORIC_AUDIT_SEED", 20240601)
AUDIT_SAMPLES = _int_setting("TORIC_AUDIT_SAMPLES", 100)
AUDIT_RADIUS = max(1, _int_setting("TORIC_AUDIT_RADIUS", 50))

# Randomized property suite (principal divisors, permutations, transforms)
PROPERTY_SEED = _int_setting("TORIC_PROPERTY_SEED", 7)


def configure_logging(verbose: bool = False) -> None:
    """Set up root logging once for command-line entry points."""
    level = logging.DEBUG if verbose else getattr(logging, LOG_LEVEL, logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT)
