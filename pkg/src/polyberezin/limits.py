"""Resource ceilings for materialized (non-structured) arrays."""

from __future__ import annotations

import contextlib
import contextvars

DEFAULT_MAX_FLAT = 4_000_000

_max_flat: contextvars.ContextVar[int] = contextvars.ContextVar("max_flat", default=DEFAULT_MAX_FLAT)


class ResourceLimitExceeded(RuntimeError):
    pass


def max_flat_size() -> int:
    return _max_flat.get()


def check_flat_size(n: int, what: str = "array"):
    limit = _max_flat.get()
    if n > limit:
        raise ResourceLimitExceeded(f"{what} with {n} entries exceeds the flat-size ceiling {limit}")


@contextlib.contextmanager
def flat_size_limit(n: int):
    token = _max_flat.set(int(n))
    try:
        yield
    finally:
        _max_flat.reset(token)
