"""Direct lifting of a composite functor versus the nested two-stage lifting.

The direct side optimizes over couplings of the composite: a single LP for
two distribution layers, exhaustive enumeration for powerset layers.
"""

from __future__ import annotations

import enum
import itertools

import numpy as np

from ..findist import FinDist
from ..metric import PseudometricSpace
from ..oracle import enumerate_couplings
from ..report import CheckReport
from ..sampling import random_dist, random_subset
from ..transport import solve_dense_lp
from .functors import EvalKind, LiftParams, hausdorff_lift, m2_lift, wasserstein_dist_lift

TOL = 1e-6


class CompositePair(enum.Enum):
    DIST_DIST = "DistDist"
    POW_POW = "PowPow"
    POW_M2 = "PowM2"


def direct_dist_dist(space: PseudometricSpace, t1: FinDist, t2: FinDist) -> float:
    """Optimal coupling in ``DD(X x X)`` as one LP.

    Variables ``w[i,j]`` couple the outer atoms ``P_i``, ``Q_j``; ``z[i,j,x,y]``
    is the mass that the inner coupling of ``(P_i, Q_j)`` puts on ``(x, y)``,
    already scaled by ``w[i,j]``.
    """
    P, Q = list(t1.support), list(t2.support)
    xs = list(dict.fromkeys(x for p in P + Q for x in p.support))
    D = space.dist[np.ix_(space.indices(xs), space.indices(xs))]
    m, n, k = len(P), len(Q), len(xs)
    nw = m * n
    nvar = nw + nw * k * k

    def w(i, j):
        return i * n + j

    def z(i, j, a, b):
        return nw + ((i * n + j) * k + a) * k + b

    cons = []
    for i in range(m):
        row = np.zeros(nvar)
        for j in range(n):
            row[w(i, j)] = 1.0
        cons.append((row, "=", t1[P[i]]))
    for j in range(n):
        row = np.zeros(nvar)
        for i in range(m):
            row[w(i, j)] = 1.0
        cons.append((row, "=", t2[Q[j]]))
    for i in range(m):
        for j in range(n):
            for a in range(k):
                row = np.zeros(nvar)
                for b in range(k):
                    row[z(i, j, a, b)] = 1.0
                row[w(i, j)] = -P[i].prob(xs[a])
                cons.append((row, "=", 0.0))
            for b in range(k):
                row = np.zeros(nvar)
                for a in range(k):
                    row[z(i, j, a, b)] = 1.0
                row[w(i, j)] = -Q[j].prob(xs[b])
                cons.append((row, "=", 0.0))
    cost = np.zeros(nvar)
    cost[nw:] = np.tile(D.reshape(-1), nw)
    return solve_dense_lp(cost, cons, [(0.0, None)] * nvar).value


def _direct_pow(t1, t2, top, inner_min, allowed=lambda a, b: True):
    """Minimize ``max`` over pair sets ``J`` with full projections onto ``t1``, ``t2``."""
    t1, t2 = list(t1), list(t2)
    if not t1 and not t2:
        return 0.0
    cells = []
    for i, a in enumerate(t1):
        for j, b in enumerate(t2):
            if allowed(a, b):
                value = inner_min(a, b)
                if value is not None:
                    cells.append((i, j, value))
    rows, cols = set(range(len(t1))), set(range(len(t2)))
    best = top
    for r in range(1, len(cells) + 1):
        for J in itertools.combinations(cells, r):
            if {i for i, _, _ in J} == rows and {j for _, j, _ in J} == cols:
                best = min(best, max(v for _, _, v in J))
    return best


def direct_pow_pow(space: PseudometricSpace, t1, t2) -> float:
    def inner(a, b):
        value, witness = enumerate_couplings("PowersetMaxEval", space, a, b)
        return None if witness is None else value

    return _direct_pow(t1, t2, space.top, inner)


def direct_pow_m2(params: LiftParams, space: PseudometricSpace, t1, t2) -> float:
    # An element of M2(X x X) carries one output bit, so it only couples
    # elements with equal outputs; the successor coupling is then unique.
    return _direct_pow(t1, t2, params.top,
                       lambda a, b: m2_lift(params, space, a, b),
                       allowed=lambda a, b: a[0] == b[0])


def compositionality_check(pair, space: PseudometricSpace, instances: int = 50,
                           rng_seed: int = 0, params: LiftParams | None = None) -> CheckReport:
    """Compare direct and nested liftings on random nested structures."""
    which = CompositePair(pair)
    if which is CompositePair.POW_POW and len(space) > 5:
        raise ValueError("carrier too large for powerset enumeration (max 5 elements)")
    if which is CompositePair.POW_M2 and len(space) > 6:
        raise ValueError("carrier too large for powerset enumeration (max 6 elements)")
    params = params or LiftParams(EvalKind.MAX, c=0.5, top=space.top)
    rng = np.random.default_rng(rng_seed)
    el = list(space.elements)
    rep = CheckReport(f"compositionality[{which.value}]", instances=instances)
    rep.require("direct_equals_nested")

    for _ in range(instances):
        if which is CompositePair.DIST_DIST:
            pool = list(dict.fromkeys(random_dist(rng, el, 3) for _ in range(4)))
            t1, t2 = random_dist(rng, pool, 3), random_dist(rng, pool, 3)
            inner = list(dict.fromkeys(list(t1.support) + list(t2.support)))
            lifted = PseudometricSpace.from_function(
                inner, lambda a, b: wasserstein_dist_lift(space, a, b), space.top)
            nested = wasserstein_dist_lift(lifted, t1, t2)
            direct = direct_dist_dist(space, t1, t2)
        elif which is CompositePair.POW_POW:
            pool = list(dict.fromkeys(random_subset(rng, el, 3) for _ in range(4)))
            t1, t2 = random_subset(rng, pool, 3), random_subset(rng, pool, 3)
            inner = list(t1 | t2)
            lifted = PseudometricSpace.from_function(
                inner, lambda a, b: hausdorff_lift(space, a, b), space.top)
            nested = hausdorff_lift(lifted, t1, t2)
            direct = direct_pow_pow(space, t1, t2)
        else:
            k = int(rng.integers(1, 3))

            def element():
                return (int(rng.integers(0, 2)), {i: el[j] for i, j in enumerate(rng.integers(0, len(el), k))})

            pool = [element() for _ in range(4)]
            t1 = [pool[i] for i in sorted(set(rng.integers(0, 4, int(rng.integers(0, 4)))))]
            t2 = [pool[i] for i in sorted(set(rng.integers(0, 4, int(rng.integers(0, 4)))))]
            keyed = {(o, tuple(sorted(s.items()))): (o, s) for o, s in pool}
            key = lambda e: (e[0], tuple(sorted(e[1].items())))
            lifted = PseudometricSpace.from_function(
                list(keyed), lambda a, b: m2_lift(params, space, keyed[a], keyed[b]), params.top)
            nested = hausdorff_lift(lifted, {key(e) for e in t1}, {key(e) for e in t2})
            direct = direct_pow_m2(params, space, t1, t2)
        diff = abs(direct - nested) if direct != nested else 0.0
        rep.gap(diff)
        if diff > TOL:
            rep.fail("direct_equals_nested", t1=t1, t2=t2, direct=direct, nested=nested)
    return rep
