import uuid
from contextlib import contextmanager
from contextvars import ContextVar


_correlation_id: ContextVar[str | None] = ContextVar("correlation_id", default=None)


def get_correlation_id() -> str | None:
    return _correlation_id.get()


@contextmanager
def correlation_context(correlation_id: str | None = None, *, prefix: str | None = None):
    """Run a block under its own correlation id (a table row, a CLI command)."""

    if correlation_id is None:
        correlation_id = f"{prefix or 'run'}-{uuid.uuid4().hex[:12]}"
    token = _correlation_id.set(correlation_id)
    try:
        yield correlation_id
    finally:
        _correlation_id.reset(token)
