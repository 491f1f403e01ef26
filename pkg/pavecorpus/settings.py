import pathlib
import os
import logging
import logging.handlers
from logging.config import dictConfig
from dotenv import load_dotenv # type: ignore

load_dotenv()

PROVIDER_URL = os.getenv("PROVIDER_URL")
PROVIDER_API_KEY = os.getenv("PROVIDER_API_KEY")
PROVIDER_MODEL = os.getenv("PROVIDER_MODEL", "gpt-4o")
PROVIDER_TIMEOUT = float(os.getenv("PROVIDER_TIMEOUT", 60))

BASE_DIR = pathlib.Path(__file__).parent
DATA_DIR = BASE_DIR / "data"

LOG_LEVEL = os.getenv("PAVECORPUS_LOG_LEVEL", "INFO").upper()
LOG_DIR = pathlib.Path(os.getenv("PAVECORPUS_LOG_DIR", "logs"))

SCHEMA_VERSION = 1

LOGGING_CONFIG = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "%(levelname)-10s - %(asctime)s - %(module)-15s : %(message)s"
        },
    },
    "handlers": {
        "console": {
            "level": LOG_LEVEL,
            "class": "logging.StreamHandler",
            "formatter": "verbose",
            "stream": "ext://sys.stdout",
        },
        "file": {
            "level": "INFO",
            "class": "logging.handlers.RotatingFileHandler",
            "filename": str(LOG_DIR / "infos.log"),
            "maxBytes": 10485760,  # 10MB per file
            "backupCount": 5,
            "formatter": "verbose",
            "encoding": "utf-8",
        },
        "error_file": {
            "level": "ERROR",
            "class": "logging.handlers.RotatingFileHandler",
            "filename": str(LOG_DIR / "errors.log"),
            "maxBytes": 5242880,  # 5MB per file
            "backupCount": 10,
            "formatter": "verbose",
            "encoding": "utf-8",
        },
    },
    "loggers": {
        "pavecorpus": {
            "handlers": ["console", "file", "error_file"],
            "level": LOG_LEVEL,
            "propagate": False,
        },
        "aiohttp": {
            "handlers": ["console", "error_file"],
            "level": "WARNING",
            "propagate": False,
        },
        "": {
            "handlers": ["console"],
            "level": "WARNING",
        },
    },
}


def setup_logging() -> None:
    """Create the log directory and apply LOGGING_CONFIG (called once by the CLI)."""
    LOG_DIR.mkdir(parents=True, exist_ok=True)
    dictConfig(LOGGING_CONFIG)
