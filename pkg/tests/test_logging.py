import io
import json
import logging
from fractions import Fraction

import pytest

from gencomplex.core.logging import configure_logging
from gencomplex.core.observability import correlation_context


@pytest.fixture()
def log_stream():
    root = logging.getLogger()
    saved_handlers, saved_level = root.handlers[:], root.level
    stream = io.StringIO()
    configure_logging("info", stream=stream)
    yield stream
    root.handlers[:] = saved_handlers
    root.setLevel(saved_level)


def test_records_are_json_with_correlation_and_extras(log_stream):
    with correlation_context(prefix="betti") as correlation_id:
        logging.getLogger("gencomplex.services.cohomology").info(
            "cohomology_computed",
            extra={"betti": [1, 2, 2, 1], "coefficient": Fraction(1, 2), "levels": {1: Fraction(-3)}},
        )
    record = json.loads(log_stream.getvalue().splitlines()[-1])
    assert record["message"] == "cohomology_computed"
    assert record["level"] == "INFO"
    assert record["service"] == "gencomplex"
    assert record["correlation_id"] == correlation_id
    assert correlation_id.startswith("betti-")
    assert record["betti"] == [1, 2, 2, 1]
    assert record["coefficient"] == "1/2"
    assert record["levels"] == {"1": "-3"}


def test_level_override_filters_debug_records(log_stream):
    logging.getLogger("gencomplex.test").debug("hidden")
    logging.getLogger("gencomplex.test").warning("shown")
    events = [json.loads(line)["message"] for line in log_stream.getvalue().splitlines()]
    assert events == ["shown"]
    assert json.loads(log_stream.getvalue().splitlines()[0])["correlation_id"] == "-"
