import logging
import threading
from functools import wraps
from typing import Any, Callable, Hashable, Optional, Protocol

from cachetools import LRUCache

from .config import get_settings

logger = logging.getLogger(__name__)

MISSING = object()


class CacheBackend(Protocol):
    def get(self, namespace: str, key: Hashable) -> Any:
        ...

    def set(self, namespace: str, key: Hashable, value: Any) -> None:
        ...

    def delete(self, namespace: str, key: Hashable) -> None:
        ...

    def clear_namespace(self, namespace: str) -> None:
        ...


class LRUCacheBackend:
    """One bounded LRU per namespace. Values are kept as live objects."""

    def __init__(self, maxsize: int) -> None:
        self.maxsize = maxsize
        self._caches: dict[str, LRUCache] = {}
        self._lock = threading.Lock()

    def _namespace(self, namespace: str) -> LRUCache:
        cache = self._caches.get(namespace)
        if cache is None:
            cache = LRUCache(maxsize=self.maxsize)
            self._caches[namespace] = cache
        return cache

    def get(self, namespace: str, key: Hashable) -> Any:
        with self._lock:
            return self._namespace(namespace).get(key, MISSING)

    def set(self, namespace: str, key: Hashable, value: Any) -> None:
        with self._lock:
            self._namespace(namespace)[key] = value

    def delete(self, namespace: str, key: Hashable) -> None:
        with self._lock:
            self._namespace(namespace).pop(key, None)

    def clear_namespace(self, namespace: str) -> None:
        with self._lock:
            cache = self._caches.get(namespace)
            if cache is not None:
                cache.clear()

    def size(self, namespace: str) -> int:
        with self._lock:
            cache = self._caches.get(namespace)
            return 0 if cache is None else len(cache)


class CacheManager:
    def __init__(self) -> None:
        self.backend: LRUCacheBackend | None = None
        self._namespaces: set[str] = set()

    def init_backend(self) -> None:
        if self.backend is not None:
            return
        settings = get_settings()
        self.backend = LRUCacheBackend(settings.OPERATOR_CACHE_SIZE)
        logger.debug("operator_cache_ready", extra={"maxsize": settings.OPERATOR_CACHE_SIZE})

    def get_backend(self) -> LRUCacheBackend:
        if self.backend is None:
            self.init_backend()
        assert self.backend is not None
        return self.backend

    def register(self, namespace: str) -> None:
        self._namespaces.add(namespace)

    @property
    def namespaces(self) -> frozenset[str]:
        return frozenset(self._namespaces)

    def invalidate_namespace(self, namespace: str) -> None:
        self.get_backend().clear_namespace(namespace)

    def reset(self) -> None:
        for namespace in self._namespaces:
            self.invalidate_namespace(namespace)
        self.backend = None


cache_manager = CacheManager()


CallableType = Callable[..., Any]


def _build_cache_key(namespace: str, identifier: Hashable) -> tuple:
    return (namespace, identifier)


def memoize(namespace: str, key_builder: Optional[Callable[..., Hashable]] = None):
    """
    Decorator memoising a pure computation in the namespaced LRU.

    Parameters:
        namespace: logical namespace used for invalidation
        key_builder: receives the same args/kwargs and returns a hashable key; it
            should be structural (model fingerprint plus operator name)
    """

    cache_manager.register(namespace)

    def decorator(func: CallableType) -> CallableType:
        @wraps(func)
        def wrapper(*args, **kwargs):
            identifier = key_builder(*args, **kwargs) if key_builder else (args, tuple(sorted(kwargs.items())))
            key = _build_cache_key(namespace, identifier)
            backend = cache_manager.get_backend()
            cached_value = backend.get(namespace, key)
            if cached_value is not MISSING:
                return cached_value
            result = func(*args, **kwargs)
            backend.set(namespace, key, result)
            return result

        return wrapper

    return decorator
