"""Exact solvers for small transportation problems and dense LPs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .metric import EPS

# Residual capacities below this are treated as exhausted.
_FLOW_TOL = 1e-13


class InfeasibleError(ValueError):
    pass


class UnboundedError(ValueError):
    pass


@dataclass(frozen=True)
class TransportProblem:
    cost: np.ndarray
    supply: np.ndarray
    demand: np.ndarray

    def __post_init__(self):
        cost = np.atleast_2d(np.asarray(self.cost, dtype=float))
        supply = np.asarray(self.supply, dtype=float).ravel()
        demand = np.asarray(self.demand, dtype=float).ravel()
        if cost.shape != (supply.size, demand.size):
            raise ValueError(f"cost shape {cost.shape} does not match marginals "
                             f"({supply.size}, {demand.size})")
        if (supply < 0).any() or (demand < 0).any():
            raise ValueError("marginals must be nonnegative")
        if abs(supply.sum() - 1.0) > EPS or abs(demand.sum() - 1.0) > EPS:
            raise InfeasibleError(
                f"marginals must each sum to 1 (got {supply.sum()!r}, {demand.sum()!r})")
        if (cost < 0).any() or np.isnan(cost).any():
            raise ValueError("costs must be nonnegative")
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "supply", supply)
        object.__setattr__(self, "demand", demand)


@dataclass(frozen=True)
class TransportPlan:
    flow: np.ndarray
    objective: float


def _shortest_paths(cost, x, rem_s, rem_d, finite):
    """Bellman-Ford on the residual bipartite graph.

    Every row with remaining supply is a source at distance 0.  Forward arcs
    row->col exist wherever the cost is finite; backward arcs col->row exist
    wherever flow is positive.  Returns row/col distances and predecessors.
    """
    n, m = cost.shape
    dr = np.where(rem_s > _FLOW_TOL, 0.0, math.inf)
    dc = np.full(m, math.inf)
    pred_col = np.full(m, -1)  # row feeding each column
    pred_row = np.full(n, -1)  # column feeding each row (via a backward arc)
    fwd = np.where(finite, cost, math.inf)
    back = np.where(x > _FLOW_TOL, -cost, math.inf)
    for _ in range(n + m + 1):
        cand = dr[:, None] + fwd
        best_r = np.argmin(cand, axis=0)
        best = cand[best_r, np.arange(m)]
        upd_c = best < dc - 1e-12
        dc = np.where(upd_c, best, dc)
        pred_col = np.where(upd_c, best_r, pred_col)

        cand = dc[None, :] + back
        best_c = np.argmin(cand, axis=1)
        best = cand[np.arange(n), best_c]
        upd_r = best < dr - 1e-12
        dr = np.where(upd_r, best, dr)
        pred_row = np.where(upd_r, best_c, pred_row)
        if not upd_c.any() and not upd_r.any():
            break
    return dr, dc, pred_row, pred_col


def min_cost_transport(cost, supply, demand):
    """Successive shortest augmenting paths on the supply/demand bipartite graph.

    Infinite costs are treated as missing arcs.  Returns ``(flow, objective,
    shipped)``; ``shipped`` falls short of the total mass when the finite arcs
    cannot carry it.  Zero-mass rows and columns are skipped.
    """
    cost = np.asarray(cost, dtype=float)
    supply = np.asarray(supply, dtype=float)
    demand = np.asarray(demand, dtype=float)
    rows = np.nonzero(supply > 0)[0]
    cols = np.nonzero(demand > 0)[0]
    flow = np.zeros(cost.shape)
    if rows.size == 0 or cols.size == 0:
        return flow, 0.0, 0.0

    c = cost[np.ix_(rows, cols)]
    finite = np.isfinite(c)
    rem_s = supply[rows].copy()
    rem_d = demand[cols].copy()
    x = np.zeros(c.shape)
    total = min(rem_s.sum(), rem_d.sum())
    shipped = 0.0
    # Each augmentation exhausts a supply, a demand or a backward arc.
    for _ in range(4 * (c.size + rows.size + cols.size) + 16):
        if total - shipped <= _FLOW_TOL:
            break
        dr, dc, pred_row, pred_col = _shortest_paths(c, x, rem_s, rem_d, finite)
        open_cols = np.nonzero(rem_d > _FLOW_TOL)[0]
        if open_cols.size == 0:
            break
        j = open_cols[np.argmin(dc[open_cols])]
        if not math.isfinite(dc[j]):
            break
        # Walk back col -> row -> col ... to a source row.
        path = []
        col = j
        while True:
            row = pred_col[col]
            path.append((row, col, +1))
            col_back = pred_row[row]
            if col_back < 0:
                break
            path.append((row, col_back, -1))
            col = col_back
            if len(path) > 2 * (c.size + 1):
                raise RuntimeError("cycle while tracing augmenting path")
        src = path[-1][0]
        delta = min(rem_s[src], rem_d[j])
        for r, cc, sign in path:
            if sign < 0:
                delta = min(delta, x[r, cc])
        for r, cc, sign in path:
            x[r, cc] += sign * delta
        x[x < _FLOW_TOL] = 0.0
        rem_s[src] -= delta
        rem_d[j] -= delta
        shipped += delta

    flow[np.ix_(rows, cols)] = x
    objective = float(np.sum(np.where(x > 0, c, 0.0) * x))
    return flow, objective, shipped


def solve_transportation(problem: TransportProblem) -> TransportPlan:
    """Minimum-cost coupling of ``supply`` and ``demand`` under finite costs."""
    if not np.isfinite(problem.cost).all():
        raise ValueError("infinite costs are not supported; handle top=inf before calling")
    flow, objective, shipped = min_cost_transport(problem.cost, problem.supply, problem.demand)
    if abs(shipped - min(problem.supply.sum(), problem.demand.sum())) > 1e-9:
        raise RuntimeError(f"transport solver shipped {shipped}, expected full mass")
    return TransportPlan(flow=flow, objective=objective)


@dataclass(frozen=True)
class LPResult:
    value: float
    x: np.ndarray


def solve_dense_lp(
    objective: Sequence[float],
    constraints: Sequence[tuple[Sequence[float], str, float]],
    bounds: Sequence[tuple[float | None, float | None]],
    sense: str = "min",
) -> LPResult:
    """Solve a dense LP with the dual simplex method.

    ``constraints`` holds ``(row, relation, rhs)`` triples with relation one of
    ``"<="``, ``"="``, ``">="``.  ``sense`` is ``"min"`` or ``"max"``.
    """
    c = np.asarray(objective, dtype=float)
    nvar = c.size
    if len(bounds) != nvar:
        raise ValueError(f"{len(bounds)} bounds for {nvar} variables")
    if sense not in ("min", "max"):
        raise ValueError(f"unknown sense {sense!r}")
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for row, rel, rhs in constraints:
        row = np.asarray(row, dtype=float)
        if row.size != nvar:
            raise ValueError(f"constraint row has {row.size} entries, expected {nvar}")
        if rel == "<=":
            A_ub.append(row); b_ub.append(rhs)
        elif rel == ">=":
            A_ub.append(-row); b_ub.append(-rhs)
        elif rel == "=":
            A_eq.append(row); b_eq.append(rhs)
        else:
            raise ValueError(f"unknown relation {rel!r}")
    sign = -1.0 if sense == "max" else 1.0
    res = linprog(
        sign * c,
        A_ub=np.array(A_ub) if A_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(A_eq) if A_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=list(bounds),
        method="highs-ds",
    )
    if res.status == 2:
        raise InfeasibleError(res.message)
    if res.status == 3:
        raise UnboundedError(res.message)
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    return LPResult(value=float(sign * res.fun), x=np.asarray(res.x))
