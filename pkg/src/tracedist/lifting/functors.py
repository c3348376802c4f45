"""Wasserstein and Kantorovich liftings for the concrete functors in use.

Finite powerset with ``max`` (Hausdorff), finitely supported distributions
with expectation (optimal transport), the input functor ``X^A``, the product
bifunctor, and their composite, the machine bifunctor ``B x X^A``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Hashable, Iterable, Mapping

import numpy as np

from ..findist import FinDist
from ..metric import EPS, PseudometricSpace
from ..transport import TransportProblem, min_cost_transport, solve_dense_lp, solve_transportation


class EvalKind(enum.Enum):
    MAX = "max"
    CONVEX = "convex"


@dataclass(frozen=True)
class LiftParams:
    """Evaluation convention and constants for product-shaped liftings.

    ``c`` discounts the successor part of the endofunctor ``2 x X^A``;
    ``c1``/``c2`` weight output and successors in the machine bifunctor.
    """

    eval_kind: EvalKind = EvalKind.MAX
    c: float = 0.5
    c1: float = 0.5
    c2: float = 0.5
    top: float = 1.0

    def __post_init__(self):
        if isinstance(self.eval_kind, str):
            object.__setattr__(self, "eval_kind", EvalKind(self.eval_kind))
        if not self.top > 0:
            raise ValueError(f"top must be positive, got {self.top}")
        if not 0 < self.c <= 1:
            raise ValueError(f"c must lie in (0, 1], got {self.c}")
        if not (self.c1 > 0 and self.c2 > 0):
            raise ValueError("c1 and c2 must be positive")
        if math.isfinite(self.top):
            if self.c1 > 1 or self.c2 > 1:
                raise ValueError("c1, c2 must lie in (0, 1] when top is finite")
            if self.eval_kind is EvalKind.CONVEX and self.c1 + self.c2 > 1 + EPS:
                raise ValueError("convex convention needs c1 + c2 <= 1 when top is finite")

    @classmethod
    def total_variation(cls, alphabet_size: int) -> "LiftParams":
        """Undiscounted preset: top = inf, c1 = 1/2, c2 = |A|."""
        return cls(EvalKind.CONVEX, c=0.5, c1=0.5, c2=float(alphabet_size), top=math.inf)

    def with_(self, **kw) -> "LiftParams":
        return replace(self, **kw)


# --- finite powerset -------------------------------------------------------

def hausdorff_lift(space: PseudometricSpace, s1: Iterable[Hashable], s2: Iterable[Hashable]) -> float:
    """Hausdorff distance between finite subsets.

    ``d(emptyset, emptyset) = 0``; an empty set against a nonempty one has no
    coupling and is at distance ``space.top``.
    """
    i1 = space.indices(set(s1))
    i2 = space.indices(set(s2))
    if not i1 and not i2:
        return 0.0
    if not i1 or not i2:
        return space.top
    sub = space.dist[np.ix_(i1, i2)]
    return float(max(sub.min(axis=1).max(), sub.min(axis=0).max()))


# --- distributions ---------------------------------------------------------

def _joint(space: PseudometricSpace, p1: FinDist, p2: FinDist):
    for p in (p1, p2):
        if not isinstance(p, FinDist):
            raise TypeError(f"expected FinDist, got {type(p).__name__}")
    i1 = space.indices(p1.support)
    i2 = space.indices(p2.support)
    cost = space.dist[np.ix_(i1, i2)]
    w1 = np.array([p1[x] for x in p1.support])
    w2 = np.array([p2[x] for x in p2.support])
    return cost, w1, w2


def wasserstein_dist_lift(space: PseudometricSpace, p1: FinDist, p2: FinDist) -> float:
    """Optimal transport cost between two distributions over the carrier."""
    if p1 == p2:
        return 0.0
    cost, w1, w2 = _joint(space, p1, p2)
    # The marginals may carry float drift up to EPS; renormalise for the solver.
    w1 = w1 / w1.sum()
    w2 = w2 / w2.sum()
    if np.isfinite(cost).all():
        return solve_transportation(TransportProblem(cost, w1, w2)).objective
    _, objective, shipped = min_cost_transport(cost, w1, w2)
    if shipped < 1.0 - 1e-9:
        return space.top
    return objective


def kantorovich_dist_lift(space: PseudometricSpace, p1: FinDist, p2: FinDist) -> float:
    """Supremum of ``E_p1 f - E_p2 f`` over nonexpansive ``f: X -> [0, top]``.

    Solved as an LP over the joint support; any nonexpansive function there
    extends to the whole carrier without leaving ``[0, top]``.
    """
    if not math.isfinite(space.top):
        raise ValueError("Kantorovich lifting needs a finite top; use the Wasserstein lifting")
    support = list(dict.fromkeys(list(p1.support) + list(p2.support)))
    idx = space.indices(support)
    n = len(support)
    diff = np.array([p1.prob(x) - p2.prob(x) for x in support])
    if np.abs(diff).max() == 0.0:
        return 0.0
    D = space.dist[np.ix_(idx, idx)]
    constraints = []
    for i in range(n):
        for j in range(n):
            if i != j and math.isfinite(D[i, j]):
                row = np.zeros(n)
                row[i], row[j] = 1.0, -1.0
                constraints.append((row, "<=", D[i, j]))
    res = solve_dense_lp(diff, constraints, [(0.0, space.top)] * n, sense="max")
    return max(res.value, 0.0)


def kantorovich_candidate_bound(space: PseudometricSpace, t1, t2, evaluate, sets=()) -> float:
    """Lower bound on a Kantorovich distance from explicit nonexpansive witnesses.

    The witnesses are ``f = d(x, .)`` for every carrier point plus, for each
    subset ``S`` in ``sets``, the distance to the set ``d(S, .)`` (constantly
    ``top`` for the empty set).  All are clipped to ``[0, top]``.  For finite
    powersets the point witnesses alone can fall short of the Hausdorff
    distance; passing ``sets=(t1, t2)`` closes the gap.

    ``evaluate(f, t)`` must return the evaluated functor image of ``t`` under ``f``.
    """
    rows = [space.dist[space.index(x)] for x in space.elements]
    for S in sets:
        idx = space.indices(set(S))
        rows.append(space.dist[idx].min(axis=0) if idx else np.full(len(space), space.top))
    best = 0.0
    for row in rows:
        row = np.minimum(row, space.top)
        f = lambda y, row=row: float(row[space.index(y)])
        a, b = evaluate(f, t1), evaluate(f, t2)
        gap = 0.0 if a == b else abs(a - b)
        best = max(best, gap)
    return best


# --- input functor, product and machine bifunctors ---------------------------

def _check_alphabet(s1: Mapping, s2: Mapping) -> list:
    if set(s1) != set(s2):
        raise ValueError(f"alphabet mismatch: {sorted(map(str, s1))} vs {sorted(map(str, s2))}")
    return list(s1)


def input_lift(params: LiftParams, space: PseudometricSpace, s1: Mapping, s2: Mapping) -> float:
    """Distance between two maps ``A -> X``: max or (top-truncated) sum over symbols."""
    alphabet = _check_alphabet(s1, s2)
    ds = [space.d(s1[a], s2[a]) for a in alphabet]
    if not ds:
        return 0.0
    if params.eval_kind is EvalKind.MAX:
        return max(ds)
    return min(sum(ds), space.top)


def product_eval(params: LiftParams, r1: float, r2: float) -> float:
    if params.eval_kind is EvalKind.MAX:
        return max(params.c1 * r1, params.c2 * r2)
    return params.c1 * r1 + params.c2 * r2


def successor_eval(params: LiftParams, values: list[float]) -> float:
    """Input-functor evaluation as used inside the machine functor (max or mean)."""
    if not values:
        return 0.0
    if params.eval_kind is EvalKind.MAX:
        return max(values)
    return sum(values) / len(values)


def machine_lift(
    params: LiftParams,
    d_B: PseudometricSpace,
    d_X: PseudometricSpace,
    t1: tuple,
    t2: tuple,
) -> float:
    """Distance on ``B x X^A`` for elements ``(output, {symbol: successor})``.

    The coupling is unique, so this is the product evaluation of the output
    distance and the evaluated per-symbol successor distances.
    """
    (b1, s1), (b2, s2) = t1, t2
    alphabet = _check_alphabet(s1, s2)
    succ = successor_eval(params, [d_X.d(s1[a], s2[a]) for a in alphabet])
    value = product_eval(params, d_B.d(b1, b2), succ)
    return min(value, params.top)


def m2_lift(params: LiftParams, d_X: PseudometricSpace, t1: tuple, t2: tuple) -> float:
    """Endofunctor lifting of ``2 x X^A``: ``top`` if outputs differ, else ``c * ev(successors)``."""
    (o1, s1), (o2, s2) = t1, t2
    alphabet = _check_alphabet(s1, s2)
    if o1 != o2:
        return params.top
    return min(params.c * successor_eval(params, [d_X.d(s1[a], s2[a]) for a in alphabet]),
               params.top)
