__all__ = ["TableWorker"]


def __getattr__(name: str):
    if name == "TableWorker":
        from .table_worker import TableWorker

        return TableWorker
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
