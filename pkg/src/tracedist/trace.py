"""Trace and branching distances as fixed points iterated from the zero pseudometric.

Trace distances live on the determinized system: reachable subsets for NFAs,
word-tree frontiers of state distributions for PAs.  Branching distances are
computed on the original states.  Every result carries a certified bound on
the distance to the true fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, NamedTuple, Sequence

import numpy as np

from .automata import NfaCoalgebra, PaCoalgebra
from .findist import KEY_DIGITS, FinDist
from .lifting.functors import EvalKind, LiftParams, wasserstein_dist_lift
from .metric import PseudometricSpace
from .monads import determinize_step_nfa
from .report import CheckReport


class _AllSingletons:
    def __repr__(self) -> str:
        return "ALL_SINGLETONS"


ALL_SINGLETONS = _AllSingletons()


@dataclass
class DistTable:
    """Distance matrix over ``states`` after ``depth`` iterations.

    ``embed`` maps an original state to its row (for determinized tables the
    row of the singleton ``{x}``).
    """

    states: list
    values: np.ndarray
    depth: int
    error_bound: float
    converged: bool
    top: float = 1.0
    embed: dict = field(default_factory=dict)
    history: list | None = None

    def distance(self, x, y) -> float:
        try:
            i, j = self.embed[x], self.embed[y]
        except KeyError as e:
            raise KeyError(f"state {e.args[0]!r} is not in the table") from None
        return float(self.values[i, j])

    def space(self) -> PseudometricSpace:
        return PseudometricSpace(self.states, self.values, self.top)


class TraceValue(NamedTuple):
    value: float
    error_bound: float
    depth: int
    exact: bool


def _check_discount(c: float):
    if not 0 < c < 1:
        raise ValueError(f"discount c must lie in (0, 1), got {c}")


def _check_states(states, xs):
    known = set(states)
    for x in xs:
        if x not in known:
            raise ValueError(f"undeclared state {x!r}")


# --- NFA trace -------------------------------------------------------------

def _reachable_subsets(nfa: NfaCoalgebra, seeds: list) -> tuple[list, dict, list]:
    """Breadth-first subset construction from the given singleton seeds."""
    order: list = []
    index: dict = {}
    steps: list = []
    queue = [frozenset((x,)) for x in seeds]
    for s in queue:
        if s not in index:
            index[s] = len(order)
            order.append(s)
    head = 0
    while head < len(order):
        s = order[head]
        head += 1
        out, succ = determinize_step_nfa(nfa, s)
        steps.append((out, succ))
        for a in nfa.alphabet:
            t = succ[a]
            if t not in index:
                index[t] = len(order)
                order.append(t)
    return order, index, steps


def nfa_trace_distance(nfa: NfaCoalgebra, params: LiftParams, seeds=ALL_SINGLETONS,
                       keep_history: bool = False) -> DistTable:
    """Language distance ``c^k`` (``k`` = shortest distinguishing word) on reachable subsets."""
    if params.eval_kind is not EvalKind.MAX:
        raise ValueError("the NFA trace distance uses the max convention")
    _check_discount(params.c)
    if seeds is ALL_SINGLETONS:
        roots = list(nfa.states)
    else:
        roots = list(dict.fromkeys(x for pair in seeds for x in pair))
    _check_states(nfa.states, roots)

    order, index, steps = _reachable_subsets(nfa, roots)
    n = len(order)
    out = np.array([o for o, _ in steps])
    succ = [np.array([index[s[a]] for _, s in steps], dtype=np.intp) for a in nfa.alphabet]
    split = np.where(out[:, None] != out[None, :], params.top, 0.0)
    c = params.c

    d = np.zeros((n, n))
    history = [d] if keep_history else None
    depth = 0
    # Each iteration either fixes the table or moves some entry up the finite
    # grid {0} u {c^k}; n^2 + 1 rounds always suffice.
    for depth in range(1, n * n + 2):
        nxt = split
        for ix in succ:
            nxt = np.maximum(nxt, c * d[np.ix_(ix, ix)])
        if keep_history:
            history.append(nxt)
        if np.array_equal(nxt, d):
            break
        d = nxt
    else:
        raise RuntimeError("NFA trace iteration did not stabilize")
    embed = {x: index[frozenset((x,))] for x in roots}
    return DistTable(order, d, depth, 0.0, True, params.top, embed, history)


# --- PA trace --------------------------------------------------------------

def _zero_future(pa: PaCoalgebra) -> np.ndarray:
    """Mask of states from which every reachable state has output 0."""
    reach = np.eye(len(pa.states), dtype=bool)
    for m in pa.transition_matrices.values():
        reach |= m > 0
    while True:
        nxt = reach | ((reach.astype(np.int32) @ reach.astype(np.int32)) > 0)
        if np.array_equal(nxt, reach):
            break
        reach = nxt
    positive = pa.output_vector > 0
    return ~(reach & positive[None, :]).any(axis=1)


def pa_trace_distance(pa: PaCoalgebra, params: LiftParams, x, y, epsilon: float | None = None,
                      max_depth: int = 64) -> TraceValue:
    """``c1 * sum_w (c2/|A|)^|w| |p_x(w) - p_y(w)|`` with a certified tail bound.

    The sum is evaluated level by level over the word tree.  Each frontier row
    holds the pair of state distributions reached by some words; rows with the
    same pair are merged and counted, rows whose two distributions coincide or
    can never again produce a positive output are dropped, as every word below
    them contributes 0.  An empty frontier makes the value exact.

    With ``epsilon`` the tree is expanded until the tail bound drops below it
    (``max_depth`` is ignored); otherwise ``max_depth`` levels are summed.
    """
    if params.eval_kind is not EvalKind.CONVEX:
        raise ValueError("the PA trace distance uses the convex convention")
    if epsilon is not None:
        if not epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {epsilon}")
        if params.c2 >= 1:
            raise ValueError("a tail bound for epsilon needs c2 < 1")
    if max_depth < 0:
        raise ValueError("max_depth must be nonnegative")
    _check_states(pa.states, (x, y))
    if x == y:
        return TraceValue(0.0, 0.0, 0, True)

    n, k = len(pa.states), len(pa.alphabet)
    c1, c2 = params.c1, params.c2
    ratio = c2 / k if k else 0.0
    out = pa.output_vector
    mats = [pa.transition_matrices[a] for a in pa.alphabet]
    dead = _zero_future(pa)
    pos = {q: i for i, q in enumerate(pa.states)}
    U = np.zeros((1, n)); U[0, pos[x]] = 1.0
    V = np.zeros((1, n)); V[0, pos[y]] = 1.0
    mult = np.ones(1)

    def tail(level_scale, mult):
        if mult.size == 0:
            return 0.0
        if c2 >= 1:
            return math.inf
        return c1 * level_scale * float(mult.sum()) / (1 - c2)

    value, scale, depth = 0.0, 1.0, 0
    while True:
        if epsilon is None and depth >= max_depth:
            break
        if epsilon is not None and tail(scale, mult) <= epsilon:
            break
        diff = np.abs(U @ out - V @ out)
        value += c1 * scale * float(mult @ diff)
        depth += 1
        scale *= ratio
        live = ((U > 0) & ~dead).any(axis=1) | ((V > 0) & ~dead).any(axis=1)
        keep = live & ~np.all(U == V, axis=1)
        U, V, mult = U[keep], V[keep], mult[keep]
        if mult.size == 0 or k == 0:
            mult = mult[:0]
            break
        U = np.stack([U @ m for m in mats], axis=1).reshape(-1, n)
        V = np.stack([V @ m for m in mats], axis=1).reshape(-1, n)
        mult = np.repeat(mult, k)
        keys = np.round(np.hstack([U, V]), KEY_DIGITS)
        _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
        mult = np.bincount(inverse.reshape(-1), weights=mult)
        U, V = U[first], V[first]
    bound = tail(scale, mult)
    return TraceValue(value, bound, depth, bound == 0.0)


# --- branching distances ---------------------------------------------------

def _hausdorff_step(d: np.ndarray, adj: np.ndarray, top: float) -> np.ndarray:
    """Hausdorff distance under ``d`` between all successor sets of one symbol."""
    inf = np.inf
    # m[u, y] = min over successors v of y of d[u, v]
    m = np.where(adj[None, :, :], d[:, None, :], inf).min(axis=2)
    # h[x, y] = max over successors u of x of m[u, y]
    h = np.where(adj[:, :, None], m[None, :, :], -inf).max(axis=1)
    h = np.maximum(h, h.T)
    empty = ~adj.any(axis=1)
    h = np.where(empty[:, None] & empty[None, :], 0.0, h)
    h = np.where(empty[:, None] ^ empty[None, :], top, h)
    return np.minimum(h, top)


def nfa_branching_distance(nfa: NfaCoalgebra, params: LiftParams, epsilon: float = 1e-6) -> DistTable:
    """Fixed point of ``max{out mismatch, c * max_a Hausdorff(succ_a)}`` on the original states."""
    _check_discount(params.c)
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    n, c, top = len(nfa.states), params.c, params.top
    out = np.array([nfa.output(q) for q in nfa.states])
    split = np.where(out[:, None] != out[None, :], top, 0.0)
    adjs = [nfa.adjacency[a] for a in nfa.alphabet]
    d = np.zeros((n, n))
    depth, converged, bound = 0, False, top
    while True:
        nxt = split
        for adj in adjs:
            nxt = np.maximum(nxt, c * _hausdorff_step(d, adj, top))
        depth += 1
        if np.array_equal(nxt, d):
            converged, bound = True, 0.0
            break
        d = nxt
        bound = c ** depth * top
        if bound <= epsilon:
            break
    return DistTable(list(nfa.states), d, depth, bound, converged, top,
                     {q: i for i, q in enumerate(nfa.states)})


def pa_branching_distance(pa: PaCoalgebra, params: LiftParams, epsilon: float = 1e-6) -> DistTable:
    """Fixed point of ``c1 |o_x - o_y| + c2/|A| sum_a W(succ_x, succ_y)``; contraction factor ``c2``."""
    if params.eval_kind is not EvalKind.CONVEX:
        raise ValueError("the PA branching distance uses the convex convention")
    if params.c2 >= 1:
        raise ValueError("the PA branching distance needs c2 < 1")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    states = list(pa.states)
    n, k = len(states), len(pa.alphabet)
    c1, c2, top = params.c1, params.c2, params.top
    out = pa.output_vector
    base = c1 * np.abs(out[:, None] - out[None, :])
    radius = min(top, c1 / (1 - c2))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    # Pairs whose successor distributions agree on every symbol never get a transport term.
    moving = [(i, j) for i, j in pairs
              if any(pa.succ(states[i], a) != pa.succ(states[j], a) for a in pa.alphabet)]
    d = np.zeros((n, n))
    depth, converged, bound = 0, False, radius
    while True:
        space = PseudometricSpace(states, d, top)
        nxt = base.copy()
        for i, j in moving:
            w = sum(wasserstein_dist_lift(space, pa.succ(states[i], a), pa.succ(states[j], a))
                    for a in pa.alphabet)
            nxt[i, j] = nxt[j, i] = min(base[i, j] + c2 / k * w, top)
        depth += 1
        if np.array_equal(nxt, d):
            converged, bound = True, 0.0
            break
        d = nxt
        bound = c2 ** depth * radius
        if bound <= epsilon:
            break
    return DistTable(states, d, depth, bound, converged, top, {q: i for i, q in enumerate(states)})


def compare_branching_trace(system, params: LiftParams, epsilon: float = 1e-6) -> CheckReport:
    """Check ``branching >= trace - (both error bounds)`` on every pair of states."""
    rep = CheckReport("branching-vs-trace")
    rep.require("branching_bounds_trace")
    pairs = []
    if isinstance(system, NfaCoalgebra):
        br = nfa_branching_distance(system, params, epsilon)
        tr = nfa_trace_distance(system, params)
        states = list(system.states)
        trace = {(x, y): (tr.distance(x, y), tr.error_bound) for x in states for y in states}
    elif isinstance(system, PaCoalgebra):
        br = pa_branching_distance(system, params, epsilon)
        states = list(system.states)
        trace = {}
        for i, x in enumerate(states):
            for y in states[i:]:
                r = pa_trace_distance(system, params, x, y, epsilon=epsilon)
                trace[x, y] = trace[y, x] = (r.value, r.error_bound)
    else:
        raise TypeError(f"expected an NFA or PA coalgebra, got {type(system).__name__}")
    for i, x in enumerate(states):
        for y in states[i + 1:]:
            b = br.distance(x, y)
            t, t_err = trace[x, y]
            violation = b < t - (br.error_bound + t_err) - 1e-9
            pairs.append({"x": x, "y": y, "branching": b, "trace": t,
                          "branching_error": br.error_bound, "trace_error": t_err,
                          "violation": violation})
            if violation:
                rep.fail("branching_bounds_trace", x=x, y=y, branching=b, trace=t)
    rep.instances = len(pairs)
    rep.info["pairs"] = pairs
    return rep
