"""Randomized checks of the well-behavedness conditions W1-W3.

W1: the evaluation is monotone, ``f <= g`` implies ``ev(Ff t) <= ev(Fg t)``.
W2: for ``t`` in ``F([0,top]^2)``, ``|ev(F pi1 t) - ev(F pi2 t)| <= ev(F d_e t)``.
W3: ``ev(t) = 0`` exactly when ``t`` lies in the image of ``F{0}``.

Each functor is described by how to sample, map and evaluate its elements
over an arbitrary pool of carrier values.
"""

from __future__ import annotations

import enum
import math
from typing import Callable

import numpy as np

from ..findist import FinDist
from ..metric import euclid
from ..report import CheckReport
from ..sampling import random_dist, random_subset

TOL = 1e-9


class FunctorId(enum.Enum):
    POW_FIN_MAX = "PowFinMax"
    DIST_EXPECTATION = "DistExpectation"
    INPUT_MAX = "InputMax"
    INPUT_SUM = "InputSum"
    PRODUCT_MAX = "ProductMax"
    PRODUCT_CONVEX = "ProductConvex"


class _Functor:
    """A functor together with its evaluation; elements hold carrier values in slots."""

    top = 1.0

    def sample(self, rng, pool):
        raise NotImplementedError

    def fmap(self, f: Callable, t):
        raise NotImplementedError

    def slots(self, t) -> list:
        raise NotImplementedError

    def ev(self, t) -> float:
        raise NotImplementedError

    def is_zero_image(self, t) -> bool:
        return all(v == 0 for v in self.slots(t))


class _PowFinMax(_Functor):
    top = math.inf

    def sample(self, rng, pool):
        return random_subset(rng, pool, 4)

    def fmap(self, f, t):
        return frozenset(f(x) for x in t)

    def slots(self, t):
        return list(t)

    def ev(self, t):
        return max(t, default=0.0)


class _DistExpectation(_Functor):
    def sample(self, rng, pool):
        return random_dist(rng, pool, 4)

    def fmap(self, f, t):
        return t.pushforward(f)

    def slots(self, t):
        return list(t.support)

    def ev(self, t):
        return t.expectation()


class _Input(_Functor):
    def __init__(self, summed: bool):
        self.summed = summed
        self.top = math.inf if summed else 1.0

    def sample(self, rng, pool):
        k = int(rng.integers(1, 4))
        return tuple(pool[i] for i in rng.integers(0, len(pool), k))

    def fmap(self, f, t):
        return tuple(f(x) for x in t)

    def slots(self, t):
        return list(t)

    def ev(self, t):
        if self.summed:
            return min(sum(t), self.top)
        return max(t)


class _Product(_Functor):
    """``[0,top] x [0,top]`` with weights drawn per sample."""

    def __init__(self, convex: bool):
        self.convex = convex
        self.c1 = self.c2 = 1.0

    def sample(self, rng, pool):
        c1, c2 = rng.uniform(0.05, 1.0, 2)
        if self.convex and c1 + c2 > 1:
            c1, c2 = c1 / (c1 + c2), c2 / (c1 + c2)
        i, j = rng.integers(0, len(pool), 2)
        return (float(c1), float(c2), pool[i], pool[j])

    def fmap(self, f, t):
        return (t[0], t[1], f(t[2]), f(t[3]))

    def slots(self, t):
        return [t[2], t[3]]

    def ev(self, t):
        c1, c2, r1, r2 = t
        return c1 * r1 + c2 * r2 if self.convex else max(c1 * r1, c2 * r2)


_FUNCTORS = {
    FunctorId.POW_FIN_MAX: _PowFinMax,
    FunctorId.DIST_EXPECTATION: _DistExpectation,
    FunctorId.INPUT_MAX: lambda: _Input(False),
    FunctorId.INPUT_SUM: lambda: _Input(True),
    FunctorId.PRODUCT_MAX: lambda: _Product(False),
    FunctorId.PRODUCT_CONVEX: lambda: _Product(True),
}


def _random_value(rng, top: float) -> float:
    u = rng.random()
    if u < 0.1:
        return 0.0
    if u < 0.15:
        return top
    scale = 1.0 if math.isfinite(top) else 5.0
    v = float(rng.random() * scale)
    return float(np.round(v, 1)) if u < 0.4 else v


def check_well_behaved(functor_id, samples: int = 1000, rng_seed: int = 0,
                       evaluation: Callable[[float], float] | None = None) -> CheckReport:
    """Sample W1, W2 and W3 for one functor.

    ``evaluation`` post-composes the evaluation with a map on ``[0, top]``;
    it exists to check that a broken evaluation is caught.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    fid = FunctorId(functor_id)
    F = _FUNCTORS[fid]()
    ev = F.ev if evaluation is None else (lambda t: evaluation(F.ev(t)))
    top = F.top
    rng = np.random.default_rng(rng_seed)
    rep = CheckReport(f"well-behaved[{fid.value}]", instances=samples)
    for cond in ("W1", "W2", "W3"):
        rep.require(cond)

    for _ in range(samples):
        # W1 on a random carrier {0..n-1} with f <= g.
        n = int(rng.integers(1, 6))
        f = [_random_value(rng, top) for _ in range(n)]
        g = [min(v + _random_value(rng, top), top) if rng.random() < 0.7 else v for v in f]
        t = F.sample(rng, list(range(n)))
        lo, hi = ev(F.fmap(f.__getitem__, t)), ev(F.fmap(g.__getitem__, t))
        if not lo <= hi + TOL:
            rep.fail("W1", t=t, f=f, g=g, ev_f=lo, ev_g=hi)

        # W2 on an element of F([0,top]^2).
        pool = [(_random_value(rng, top), _random_value(rng, top)) for _ in range(int(rng.integers(1, 5)))]
        t = F.sample(rng, pool)
        lhs = euclid(ev(F.fmap(lambda p: p[0], t)), ev(F.fmap(lambda p: p[1], t)))
        rhs = ev(F.fmap(lambda p: euclid(p[0], p[1]), t))
        if not lhs <= rhs + TOL:
            rep.fail("W2", t=t, lhs=lhs, rhs=rhs)
        if math.isfinite(lhs) and math.isfinite(rhs):
            rep.gap(lhs - rhs)

        # W3 both ways: images of F{0} evaluate to 0, anything else to a positive value.
        zero = F.sample(rng, [0.0])
        if ev(zero) != 0:
            rep.fail("W3", t=zero, ev=ev(zero), reason="image of F{0} evaluates nonzero")
        pool = [_random_value(rng, top) for _ in range(int(rng.integers(1, 4)))]
        t = F.sample(rng, pool)
        value = ev(t)
        if F.is_zero_image(t) != (value == 0):
            rep.fail("W3", t=t, ev=value,
                     reason="zero evaluation outside F{0}" if value == 0 else "image of F{0} evaluates nonzero")
    return rep
