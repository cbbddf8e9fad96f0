"""JSON-lines logging on stderr, shared by the CLI and sweep worker processes."""

from __future__ import annotations

import logging
import os
import sys
from typing import Any

import numpy as np
import orjson

_DEFAULT_LEVEL = os.environ.get("RANDTOMO_LOG_LEVEL", "INFO")
_NOISY_LOGGERS = ("matplotlib", "PIL")

_active: dict[str, Any] = {"level": _DEFAULT_LEVEL, "json": True}


def _to_json(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (set, frozenset, tuple)):
        return list(value)
    return str(value)


class JsonFormatter(logging.Formatter):
    """One JSON object per record; ``ctx_*`` extras are copied under their own keys."""

    def format(self, record: logging.LogRecord) -> str:  # pragma: no cover - thin wrapper
        payload: dict[str, Any] = {
            "timestamp": self.formatTime(record, "%Y-%m-%dT%H:%M:%S"),
            "level": record.levelname,
            "name": record.name,
            "message": record.getMessage(),
        }
        if record.processName != "MainProcess":
            payload["worker"] = record.process
        if record.exc_info:
            payload["exc_info"] = self.formatException(record.exc_info)
        for key, value in record.__dict__.items():
            if key.startswith("ctx_"):
                payload[key] = value
        return orjson.dumps(
            payload, default=_to_json, option=orjson.OPT_SERIALIZE_NUMPY
        ).decode("utf-8")


def configure_logging(level: str | int = _DEFAULT_LEVEL, use_json: bool = True) -> None:
    """Route the root logger to stderr so stdout carries only command results."""
    logging.captureWarnings(True)
    root = logging.getLogger()
    root.setLevel(level)
    handler = logging.StreamHandler(sys.stderr)
    if use_json:
        handler.setFormatter(JsonFormatter())
    else:
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    root.handlers = [handler]
    for name in _NOISY_LOGGERS:
        logging.getLogger(name).setLevel(max(logging.WARNING, root.level))
    _active.update(level=level, json=use_json)


def logging_state() -> tuple[str | int, bool]:
    """Arguments that reproduce the current setup, for process-pool initializers."""
    return _active["level"], _active["json"]


def get_logger(name: str = "randtomo") -> logging.Logger:
    """Return configured logger, configuring root on first call."""
    if not logging.getLogger().handlers:
        configure_logging()
    return logging.getLogger(name)


__all__ = ["JsonFormatter", "configure_logging", "get_logger", "logging_state"]
