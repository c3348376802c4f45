"""Finite pseudometric spaces over extended nonnegative reals.

Distances live in ``[0, top]`` where ``top`` may be ``math.inf``.  Addition
follows the extended convention ``x + inf = inf``, which numpy floats already
implement.
"""

from __future__ import annotations

import math
from typing import Any, Callable, Hashable, Iterable, NamedTuple, Sequence

import numpy as np

EPS = 1e-9
INF = math.inf


def euclid(a: float, b: float) -> float:
    """Euclidean distance on ``[0, inf]``: ``d(x, inf) = inf`` for finite x."""
    if a == b:
        return 0.0
    return abs(a - b)


def _order_key(x: Any):
    # Total order over the mixed identifiers we store (strings, numbers, tuples,
    # frozensets, distributions).  Only used to make layouts reproducible.
    if isinstance(x, str):
        return (0, x)
    if isinstance(x, bool):
        return (1, int(x))
    if isinstance(x, (int, float)):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(_order_key(v) for v in x))
    if isinstance(x, frozenset):
        return (3, len(x), tuple(sorted(_order_key(v) for v in x)))
    key = getattr(x, "order_key", None)
    if key is not None:
        return (4, key())
    return (5, repr(x))


def canonical_sorted(items: Iterable[Any]) -> list:
    return sorted(items, key=_order_key)


class PseudometricSpace:
    """A finite carrier with a dense distance matrix bounded by ``top``.

    Construction does not check the axioms; use :func:`validate_pseudometric`.
    The matrix is copied and frozen, so instances are safe to share.
    """

    __slots__ = ("elements", "top", "dist", "_index")

    def __init__(self, elements: Sequence[Hashable], dist, top: float = 1.0):
        elements = tuple(elements)
        dist = np.array(dist, dtype=float, copy=True)
        if dist.ndim != 2 or dist.shape != (len(elements), len(elements)):
            raise ValueError(
                f"distance matrix shape {dist.shape} does not match "
                f"{len(elements)} elements"
            )
        if not top > 0:
            raise ValueError(f"top must be positive, got {top}")
        index = {x: i for i, x in enumerate(elements)}
        if len(index) != len(elements):
            raise ValueError("duplicate elements in carrier")
        dist.setflags(write=False)
        self.elements = elements
        self.top = float(top)
        self.dist = dist
        self._index = index

    @classmethod
    def from_function(
        cls,
        elements: Iterable[Hashable],
        fn: Callable[[Any, Any], float],
        top: float = 1.0,
    ) -> "PseudometricSpace":
        """Tabulate a symmetric distance function; ``fn`` is called once per pair."""
        elements = tuple(elements)
        n = len(elements)
        dist = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                dist[i, j] = dist[j, i] = fn(elements[i], elements[j])
        return cls(elements, dist, top)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._index

    def __repr__(self) -> str:
        return f"PseudometricSpace({len(self)} elements, top={self.top})"

    def index(self, x) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise KeyError(f"element {x!r} not in carrier") from None

    def indices(self, xs: Iterable) -> list[int]:
        return [self.index(x) for x in xs]

    def d(self, x, y) -> float:
        return float(self.dist[self.index(x), self.index(y)])

    def restrict(self, xs: Iterable) -> "PseudometricSpace":
        xs = tuple(xs)
        idx = self.indices(xs)
        return PseudometricSpace(xs, self.dist[np.ix_(idx, idx)], self.top)


def discrete_metric(elements: Sequence[Hashable], top: float = 1.0) -> PseudometricSpace:
    """``d(x, y) = top`` for ``x != y``."""
    elements = tuple(elements)
    if not elements:
        raise ValueError("discrete metric needs at least one element")
    if not top > 0:
        raise ValueError(f"top must be positive, got {top}")
    n = len(elements)
    dist = np.full((n, n), float(top))
    np.fill_diagonal(dist, 0.0)
    return PseudometricSpace(elements, dist, top)


def euclidean_interval_metric(points: Sequence[float], top: float = 1.0) -> PseudometricSpace:
    """The Euclidean metric restricted to the given points of ``[0, top]``.

    Repeated points are collapsed, so the result is a metric.
    """
    pts = []
    for p in points:
        p = float(p)
        if not (0.0 <= p <= top) or math.isnan(p):
            raise ValueError(f"point {p} outside [0, {top}]")
        if p not in pts:
            pts.append(p)
    pts.sort()
    return PseudometricSpace.from_function(pts, euclid, top)


def metric_closure(weights, top: float = 1.0) -> np.ndarray:
    """Shortest-path closure of a symmetric nonnegative weight matrix, capped at ``top``."""
    d = np.minimum(np.array(weights, dtype=float), top)
    d = np.minimum(d, d.T)
    np.fill_diagonal(d, 0.0)
    for k in range(d.shape[0]):
        d = np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :])
    return d


class Violation(NamedTuple):
    axiom: str
    witness: tuple
    detail: str = ""


def validate_pseudometric(space: PseudometricSpace, tol: float = EPS, limit: int = 20) -> list[Violation]:
    """Check reflexivity, symmetry, bounds and the triangle inequality.

    Returns at most ``limit`` witnesses per axiom; empty list means valid.
    Infinite entries compare exactly.
    """
    D = np.asarray(space.dist)
    n = len(space.elements)
    if D.shape != (n, n):
        raise ValueError(f"matrix shape {D.shape} does not match {n} elements")
    el = space.elements
    out: list[Violation] = []

    def add(axiom, idx_rows, detail_fn):
        for row in idx_rows[:limit]:
            row = tuple(int(i) for i in row)
            out.append(Violation(axiom, tuple(el[i] for i in row), detail_fn(row)))

    if np.isnan(D).any():
        add("nan", np.argwhere(np.isnan(D)), lambda r: "nan entry")
    diag = np.diag(D)
    bad = np.nonzero(~(np.abs(diag) <= tol))[0]
    add("reflexivity", [(i, i) for i in bad], lambda r: f"d={D[r[0], r[1]]}")

    both_inf = np.isinf(D) & np.isinf(D.T)
    with np.errstate(invalid="ignore"):
        asym = ~(both_inf | (np.abs(D - D.T) <= tol))
    add("symmetry", np.argwhere(np.triu(asym, 1)),
        lambda r: f"d(x,y)={D[r[0], r[1]]} d(y,x)={D[r[1], r[0]]}")

    neg = np.argwhere(D < -tol)
    add("nonnegativity", neg, lambda r: f"d={D[r[0], r[1]]}")
    if math.isfinite(space.top):
        above = np.argwhere(D > space.top + tol)
        add("bounded", above, lambda r: f"d={D[r[0], r[1]]} > top={space.top}")

    # d[i, j] <= d[i, k] + d[k, j] for all k, vectorised over (i, k, j).
    via = D[:, :, None] + D[None, :, :]
    tri = D[:, None, :] > via + tol
    hits = np.argwhere(tri)
    add("triangle", [(i, k, j) for i, k, j in hits],
        lambda r: f"d(x,z)={D[r[0], r[2]]} > d(x,y)+d(y,z)={D[r[0], r[1]] + D[r[1], r[2]]}")
    return out
