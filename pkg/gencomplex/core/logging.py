import json
import logging
import sys
from collections.abc import Mapping
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any

from .config import BASE_DIR, get_settings
from .observability import get_correlation_id


SERVICE_NAME = "gencomplex"

_STANDARD_ATTRS = frozenset(logging.LogRecord("", 0, "", 0, "", None, None).__dict__) | {
    "message",
    "asctime",
    "correlation_id",
    "service",
}


def _plain(value: Any) -> Any:
    """Render exact scalars and nested report values as JSON-safe data."""

    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Mapping):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_plain(item) for item in value]
    return str(value)


class CorrelationIdFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        record.correlation_id = get_correlation_id() or "-"
        record.service = SERVICE_NAME
        return True


class JsonFormatter(logging.Formatter):
    """One JSON object per record; `extra` fields are carried at top level."""

    def format(self, record: logging.LogRecord) -> str:
        payload: dict[str, Any] = {
            "timestamp": self.formatTime(record, self.datefmt),
            "level": record.levelname,
            "service": getattr(record, "service", SERVICE_NAME),
            "logger": record.name,
            "correlation_id": getattr(record, "correlation_id", "-"),
            "message": record.getMessage(),
        }
        for key, value in record.__dict__.items():
            if key not in _STANDARD_ATTRS and key not in payload:
                payload[key] = _plain(value)
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False)


def build_handlers(log_file: str | None, *, stream=None) -> list[logging.Handler]:
    formatter = JsonFormatter(datefmt="%Y-%m-%dT%H:%M:%S%z")
    correlation = CorrelationIdFilter()

    # stdout carries reports
    console = logging.StreamHandler(stream or sys.stderr)
    handlers: list[logging.Handler] = [console]

    if log_file:
        path = Path(log_file)
        if not path.is_absolute():
            path = BASE_DIR / path
        path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(RotatingFileHandler(path, maxBytes=10 * 1024 * 1024, backupCount=5, encoding="utf-8"))

    for handler in handlers:
        handler.setFormatter(formatter)
        handler.addFilter(correlation)
    return handlers


def configure_logging(level: str | None = None, *, stream=None) -> None:
    """
    Route JSON log records to stderr (and to LOG_FILE_PATH when set).

    `level` overrides LOG_LEVEL for a single run.
    """
    settings = get_settings()
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        handlers=build_handlers(settings.LOG_FILE_PATH, stream=stream),
        force=True,
    )
    logging.getLogger("anyio").setLevel(logging.WARNING)
