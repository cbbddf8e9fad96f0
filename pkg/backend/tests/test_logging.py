from __future__ import annotations

import logging

import numpy as np
import orjson

from randtomo.core.logging import JsonFormatter, configure_logging, logging_state


def test_json_formatter_keeps_context_fields() -> None:
    record = logging.LogRecord("randtomo.test", logging.INFO, __file__, 1, "solved", None, None)
    record.ctx_iterations = np.int64(42)
    record.ctx_objective = np.float64(0.5)
    record.ctx_angles = (1, 4, 9)
    payload = orjson.loads(JsonFormatter().format(record))
    assert payload["message"] == "solved"
    assert payload["ctx_iterations"] == 42
    assert payload["ctx_objective"] == 0.5
    assert payload["ctx_angles"] == [1, 4, 9]
    assert "worker" not in payload


def test_configure_logging_is_reusable_by_workers() -> None:
    configure_logging("DEBUG", use_json=False)
    assert logging_state() == ("DEBUG", False)
    assert logging.getLogger("matplotlib").level == logging.WARNING
    configure_logging(*logging_state())
    assert len(logging.getLogger().handlers) == 1
