import os
import copy
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

PROJECT_ROOT = Path(__file__).resolve().parent.parent

DEFAULT_CONFIG: Dict[str, Any] = {
    "data": {
        "iris_path": str(PROJECT_ROOT / "data" / "iris.csv"),
    },
    "logging": {
        "level": "INFO",
        "format": "%(asctime)s - %(levelname)s - %(message)s",
    },
    "experiment": {
        "workers": 1,
        "runs": 20,
        "checkpoints": 20,
    },
    "slice": {
        "initial_width": 1.0,
        "max_stepout_doublings": 60,
        "max_shrink_iters": 1000,
    },
}

logger = logging.getLogger(__name__)


def get_config(overrides: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Build the effective configuration.

    Environment variables take precedence over DEFAULT_CONFIG, and explicit
    overrides take precedence over both.

    Args:
        overrides: Optional nested dictionary merged on top of the result.

    Returns:
        A fresh configuration dictionary.
    """
    config = copy.deepcopy(DEFAULT_CONFIG)

    if os.getenv("IRIS_PATH"):
        config["data"]["iris_path"] = os.environ["IRIS_PATH"]
    if os.getenv("SLICETRACE_LOG_LEVEL"):
        config["logging"]["level"] = os.environ["SLICETRACE_LOG_LEVEL"].upper()
    if os.getenv("SLICETRACE_WORKERS"):
        config["experiment"]["workers"] = _read_int("SLICETRACE_WORKERS", config["experiment"]["workers"])
    if os.getenv("SLICETRACE_INITIAL_WIDTH"):
        try:
            config["slice"]["initial_width"] = float(os.environ["SLICETRACE_INITIAL_WIDTH"])
        except ValueError:
            logger.warning(f"Ignoring non-numeric SLICETRACE_INITIAL_WIDTH={os.environ['SLICETRACE_INITIAL_WIDTH']!r}")

    for section, values in (overrides or {}).items():
        if isinstance(values, dict):
            config.setdefault(section, {}).update(values)
        else:
            config[section] = values

    return config


def _read_int(name: str, default: int) -> int:
    try:
        return int(os.environ[name])
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={os.environ[name]!r}")
        return default


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging for an entry point."""
    config = get_config()
    logging.basicConfig(
        level=getattr(logging, (level or config["logging"]["level"]).upper(), logging.INFO),
        format=config["logging"]["format"],
    )
