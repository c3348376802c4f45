"""Finitely supported probability distributions."""

from __future__ import annotations

from collections.abc import Mapping
from typing import Callable, Hashable, Iterable

from .metric import EPS, _order_key

# Decimal digits kept in the hashing key.  Two distributions whose weights agree
# after rounding are treated as the same state; arithmetic always uses the
# unrounded weights.
KEY_DIGITS = 12


class FinDist(Mapping):
    """Immutable distribution stored on its support, in canonical element order.

    Behaves as a read-only mapping ``element -> weight``; ``dist.prob(x)``
    returns 0 outside the support.  Equality and hashing go through
    :meth:`key`, so equal distributions collide regardless of input order.
    """

    __slots__ = ("_items", "_map", "_key")

    def __init__(self, weights: Mapping | Iterable[tuple[Hashable, float]], tol: float = EPS):
        pairs = weights.items() if isinstance(weights, Mapping) else weights
        acc: dict = {}
        for x, w in pairs:
            w = float(w)
            if w < 0 or w != w:
                raise ValueError(f"negative or nan weight {w} for {x!r}")
            if w > 0:
                acc[x] = acc.get(x, 0.0) + w
        total = sum(acc.values())
        if abs(total - 1.0) > tol:
            raise ValueError(f"distribution mass is {total!r}, expected 1")
        items = tuple(sorted(acc.items(), key=lambda kv: _order_key(kv[0])))
        self._items = items
        self._map = dict(items)
        self._key = tuple((x, round(w, KEY_DIGITS)) for x, w in items)

    @classmethod
    def dirac(cls, x: Hashable) -> "FinDist":
        return cls({x: 1.0})

    @classmethod
    def uniform(cls, xs: Iterable[Hashable]) -> "FinDist":
        xs = list(dict.fromkeys(xs))
        if not xs:
            raise ValueError("uniform distribution over empty set")
        return cls({x: 1.0 / len(xs) for x in xs})

    def __getitem__(self, x):
        return self._map[x]

    def __iter__(self):
        return (x for x, _ in self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, x) -> bool:
        return x in self._map

    def prob(self, x) -> float:
        return self._map.get(x, 0.0)

    @property
    def support(self) -> tuple:
        return tuple(x for x, _ in self._items)

    def key(self) -> tuple:
        return self._key

    def order_key(self) -> tuple:
        return tuple((_order_key(x), w) for x, w in self._key)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinDist):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        body = ", ".join(f"{x!r}: {w:.6g}" for x, w in self._items)
        return f"FinDist({{{body}}})"

    def pushforward(self, f: Callable) -> "FinDist":
        out: dict = {}
        for x, w in self._items:
            y = f(x)
            out[y] = out.get(y, 0.0) + w
        return FinDist(out)

    def expectation(self, f: Callable[[Hashable], float] | None = None) -> float:
        if f is None:
            return sum(float(x) * w for x, w in self._items)
        return sum(f(x) * w for x, w in self._items)
