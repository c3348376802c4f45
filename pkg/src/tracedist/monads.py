"""Powerset and distribution monads, their EM-laws, and generalized determinization.

Determinization is fused: :func:`determinize_step_nfa` and
:func:`determinize_step_pa` compute ``F mu . lambda . T c`` directly on a
subset or a distribution of states.  The laws themselves are available as
:func:`nfa_law` and :func:`pa_law` so they can be checked on their own.
"""

from __future__ import annotations

import enum
from typing import Hashable, Iterable

import numpy as np

from .automata import NfaCoalgebra, PaCoalgebra
from .findist import FinDist
from .lifting.functors import (
    EvalKind,
    LiftParams,
    hausdorff_lift,
    m2_lift,
    machine_lift,
    wasserstein_dist_lift,
)
from .metric import PseudometricSpace, euclidean_interval_metric
from .report import CheckReport
from .sampling import random_dist, random_subset

TOL = 1e-6


# --- monad structure -------------------------------------------------------

def pow_unit(x: Hashable) -> frozenset:
    return frozenset((x,))


def pow_mult(family: Iterable[Iterable[Hashable]]) -> frozenset:
    out: frozenset = frozenset()
    for s in family:
        out = out | frozenset(s)
    return out


def dist_unit(x: Hashable) -> FinDist:
    return FinDist.dirac(x)


def dist_mult(meta: FinDist) -> FinDist:
    """Flatten a distribution over distributions: ``x -> sum_q P(q) * q(x)``."""
    out: dict = {}
    for q, w in meta.items():
        if not isinstance(q, FinDist):
            q = FinDist(q)  # raises on mass != 1
        for x, v in q.items():
            out[x] = out.get(x, 0.0) + w * v
    return FinDist(out)


# --- EM-laws ---------------------------------------------------------------

def nfa_law(S: Iterable[tuple], alphabet_size: int) -> tuple:
    """``P(2 x X^A) -> 2 x P(X)^A``; successor maps are tuples indexed by symbol."""
    S = list(S)
    o = 1 if any(oi == 1 for oi, _ in S) else 0
    succ = tuple(frozenset(s[k] for _, s in S) for k in range(alphabet_size))
    return o, succ


def pa_law(P: FinDist, alphabet_size: int) -> tuple:
    """``D([0,1] x X^A) -> [0,1] x D(X)^A``: expected output, per-symbol marginals."""
    o = sum(w * r for (r, _), w in P.items())
    succ = tuple(P.pushforward(lambda t, k=k: t[1][k]) for k in range(alphabet_size))
    return o, succ


# --- determinization -------------------------------------------------------

def determinize_step_nfa(nfa: NfaCoalgebra, s: Iterable[Hashable]) -> tuple[int, dict]:
    """Subset construction step: accepting iff some member accepts; per-symbol union."""
    s = frozenset(s)
    for q in s - set(nfa.states):
        raise ValueError(f"undeclared state {q!r}")
    out = 1 if any(q in nfa.accepting for q in s) else 0
    succ = {a: pow_mult(nfa.succ(q, a) for q in s) for a in nfa.alphabet}
    return out, succ


def determinize_step_pa(pa: PaCoalgebra, p: FinDist) -> tuple[float, dict]:
    """Expected output and per-symbol successor mixture of a state distribution."""
    if not isinstance(p, FinDist):
        p = FinDist(p)
    known = set(pa.states)
    for q in p.support:
        if q not in known:
            raise ValueError(f"undeclared state {q!r}")
    out = sum(w * pa.output(q) for q, w in p.items())
    # Pairs, not a dict: several states may share a successor distribution.
    succ = {a: dist_mult(FinDist([(pa.succ(q, a), w) for q, w in p.items()]))
            for a in pa.alphabet}
    return out, succ


# --- metric checks ---------------------------------------------------------

class Monad(enum.Enum):
    POWFIN = "PowFin"
    DIST = "Dist"


class LawSystem(enum.Enum):
    NFA = "Nfa"
    PA = "Pa"


def _lift_for(monad: Monad):
    return hausdorff_lift if monad is Monad.POWFIN else wasserstein_dist_lift


def _nested_distance(monad: Monad, space: PseudometricSpace, t1, t2) -> float:
    """Two-level lifting: lift ``space`` once, then lift the result again."""
    lift = _lift_for(monad)
    inner = list(dict.fromkeys(list(t1) + list(t2)))
    inner_space = PseudometricSpace.from_function(inner, lambda a, b: lift(space, a, b), space.top)
    return lift(inner_space, t1, t2)


def check_monad_metric_laws(monad_id, space: PseudometricSpace, instances: int = 500,
                            rng_seed: int = 0) -> CheckReport:
    """Unit isometry, multiplication nonexpansiveness and the monad equations."""
    monad = Monad(monad_id)
    if monad is Monad.POWFIN and len(space) > 6:
        raise ValueError("carrier too large for nested powerset lifting (max 6 elements)")
    rng = np.random.default_rng(rng_seed)
    el = list(space.elements)
    lift = _lift_for(monad)
    unit = pow_unit if monad is Monad.POWFIN else dist_unit
    mult = pow_mult if monad is Monad.POWFIN else dist_mult
    rep = CheckReport(f"monad-laws[{monad.value}]", instances=instances)
    for cond in ("unit_isometry", "mult_nonexpansive", "left_unit", "right_unit", "associativity"):
        rep.require(cond)

    for x in el:
        for y in el:
            lifted = lift(space, unit(x), unit(y))
            if lifted != space.d(x, y):
                rep.fail("unit_isometry", x=x, y=y, lifted=lifted, base=space.d(x, y))

    def sample(level_el):
        if monad is Monad.POWFIN:
            return random_subset(rng, level_el, 3)
        return random_dist(rng, level_el, 3)

    def sample_nested():
        pool = [sample(el) for _ in range(4)]
        return sample(pool)

    for _ in range(instances):
        t1, t2 = sample_nested(), sample_nested()
        flat = lift(space, mult(t1), mult(t2))
        nested = _nested_distance(monad, space, t1, t2)
        rep.gap(flat - nested)
        if flat > nested + TOL:
            rep.fail("mult_nonexpansive", t1=t1, t2=t2, flat=flat, nested=nested)

        base = sample(el)
        if monad is Monad.POWFIN:
            eta_T = frozenset((base,))
            T_eta = frozenset(unit(x) for x in base)
        else:
            eta_T = FinDist.dirac(base)
            T_eta = base.pushforward(unit)
        if mult(eta_T) != base:
            rep.fail("left_unit", value=base)
        if mult(T_eta) != base:
            rep.fail("right_unit", value=base)

        pool2 = [sample_nested() for _ in range(3)]
        ttt = sample(pool2)
        if monad is Monad.POWFIN:
            lhs = mult(mult(ttt))  # mu . mu_T
            rhs = mult(frozenset(mult(s) for s in ttt))  # mu . T mu
        else:
            lhs = mult(mult(ttt))
            rhs = mult(ttt.pushforward(mult))
        if lhs != rhs:
            rep.fail("associativity", lhs=lhs, rhs=rhs)
    return rep


def _random_alphabet_size(rng) -> int:
    return int(rng.integers(1, 3))


def check_em_law_nonexpansive(system_id, space: PseudometricSpace, params: LiftParams,
                              instances: int = 500, rng_seed: int = 0) -> CheckReport:
    """Evaluation inequality and direct nonexpansiveness of an EM-law on random inputs."""
    system = LawSystem(system_id)
    rng = np.random.default_rng(rng_seed)
    el = list(space.elements)
    rep = CheckReport(f"em-law[{system.value}]", instances=instances)
    for cond in ("evaluation_inequality", "metric_nonexpansive"):
        rep.require(cond)

    if system is LawSystem.NFA:
        if params.eval_kind is not EvalKind.MAX:
            raise ValueError("the powerset law is only nonexpansive under the max convention")
        if len(space) > 6:
            raise ValueError("carrier too large for powerset-layer lifting (max 6 elements)")
        rep.require("evaluation_equality")
        c = params.c
        for _ in range(instances):
            k = _random_alphabet_size(rng)
            S = [(int(rng.integers(0, 2)), tuple(rng.random(k).round(int(rng.integers(1, 4)))))
                 for _ in range(int(rng.integers(0, 4)))]
            ev_F = max((c * max(s) for _, s in S), default=0.0)
            o, succ = nfa_law(S, k)
            ev_G = c * max(max(sa, default=0.0) for sa in succ)
            if ev_G > ev_F + 1e-12:
                rep.fail("evaluation_inequality", S=S, lhs=ev_G, rhs=ev_F)
            if ev_G != ev_F:
                rep.fail("evaluation_equality", S=S, lhs=ev_G, rhs=ev_F)

            def element():
                return (int(rng.integers(0, 2)), tuple(el[i] for i in rng.integers(0, len(el), k)))

            t1 = frozenset(element() for _ in range(int(rng.integers(0, 4))))
            t2 = frozenset(element() for _ in range(int(rng.integers(0, 4))))
            alpha = {i: i for i in range(k)}
            as_map = lambda s: {i: s[i] for i in alpha}
            ground = list(t1 | t2)
            m2_space = PseudometricSpace.from_function(
                ground, lambda u, v: m2_lift(params, space, (u[0], as_map(u[1])), (v[0], as_map(v[1]))),
                params.top)
            fg = hausdorff_lift(m2_space, t1, t2)
            (o1, s1), (o2, s2) = nfa_law(t1, k), nfa_law(t2, k)
            if o1 != o2:
                gf = params.top
            else:
                gf = min(c * max(hausdorff_lift(space, s1[i], s2[i]) for i in range(k)), params.top)
            rep.gap(gf - fg)
            if gf > fg + TOL:
                rep.fail("metric_nonexpansive", t1=t1, t2=t2, gf=gf, fg=fg)
        return rep

    if params.eval_kind is not EvalKind.CONVEX:
        raise ValueError("the distribution law is checked under the convex convention")
    c1, c2 = params.c1, params.c2
    for _ in range(instances):
        k = _random_alphabet_size(rng)
        atoms = [(float(rng.random()), tuple(rng.random(k))) for _ in range(int(rng.integers(1, 4)))]
        P = FinDist({a: float(w) for a, w in zip(atoms, rng.dirichlet(np.ones(len(atoms))))})
        ev_FG = sum(w * (c1 * o + c2 / k * sum(s)) for (o, s), w in P.items())
        o, succ = pa_law(P, k)
        ev_GF = c1 * o + c2 / k * sum(d.expectation() for d in succ)
        rep.gap(ev_GF - ev_FG)
        if ev_GF > ev_FG + 1e-9:
            rep.fail("evaluation_inequality", P=P, lhs=ev_GF, rhs=ev_FG)

        def element():
            return (float(np.round(rng.random(), 2)), tuple(el[i] for i in rng.integers(0, len(el), k)))

        t1 = random_dist(rng, list({element() for _ in range(3)}), 3)
        t2 = random_dist(rng, list({element() for _ in range(3)}), 3)
        ground = list(dict.fromkeys(list(t1.support) + list(t2.support)))
        outputs = euclidean_interval_metric([g[0] for g in ground], 1.0)
        as_map = lambda s: {i: s[i] for i in range(k)}
        mspace = PseudometricSpace.from_function(
            ground, lambda u, v: machine_lift(params, outputs, space, (u[0], as_map(u[1])),
                                              (v[0], as_map(v[1]))),
            params.top)
        fg = wasserstein_dist_lift(mspace, t1, t2)
        (o1, s1), (o2, s2) = pa_law(t1, k), pa_law(t2, k)
        gf = c1 * abs(o1 - o2) + c2 / k * sum(wasserstein_dist_lift(space, s1[i], s2[i]) for i in range(k))
        gf = min(gf, params.top)
        rep.gap(gf - fg)
        if gf > fg + TOL:
            rep.fail("metric_nonexpansive", t1=t1, t2=t2, gf=gf, fg=fg)
    return rep
