from . import exceptions

__all__ = ["exceptions"]
