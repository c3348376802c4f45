"""Seeded random generators for spaces, nested structures and automata."""

from __future__ import annotations

import numpy as np

from .automata import NfaCoalgebra, PaCoalgebra
from .findist import FinDist
from .metric import PseudometricSpace, metric_closure


def random_space(rng: np.random.Generator, n: int, top: float = 1.0, prefix: str = "x") -> PseudometricSpace:
    """Metric closure of a random symmetric matrix; some ties and zero distances appear."""
    w = rng.uniform(0.05, 1.0, size=(n, n))
    if rng.random() < 0.3:
        w = np.round(w, 1)
    if n > 2 and rng.random() < 0.2:
        i, j = rng.choice(n, 2, replace=False)
        w[i, j] = 0.0
    w = np.minimum(w, w.T)
    scale = top if np.isfinite(top) else 3.0
    return PseudometricSpace([f"{prefix}{i}" for i in range(n)], metric_closure(w * scale, top), top)


def random_subset(rng, elements, max_size: int, allow_empty: bool = True) -> frozenset:
    lo = 0 if allow_empty else 1
    k = int(rng.integers(lo, min(max_size, len(elements)) + 1))
    if k == 0:
        return frozenset()
    return frozenset(elements[i] for i in rng.choice(len(elements), k, replace=False))


def random_dist(rng, elements, max_support: int = 3) -> FinDist:
    k = int(rng.integers(1, min(max_support, len(elements)) + 1))
    idx = rng.choice(len(elements), k, replace=False)
    w = rng.dirichlet(np.ones(k))
    if rng.random() < 0.3:
        # Rational-ish weights exercise ties in the transport solver.
        w = np.round(w * 4) + 1
        w = w / w.sum()
    return FinDist([(elements[i], float(p)) for i, p in zip(idx, w)])


def random_nfa(rng, max_states: int = 6, max_symbols: int = 3, density: float | None = None) -> NfaCoalgebra:
    n = int(rng.integers(1, max_states + 1))
    k = int(rng.integers(1, max_symbols + 1))
    states = [f"q{i}" for i in range(n)]
    alphabet = "abc"[:k] if k <= 3 else [f"a{i}" for i in range(k)]
    p = density if density is not None else float(rng.uniform(0.1, 0.5))
    trans = {}
    for q in states:
        for a in alphabet:
            targets = {t for t in states if rng.random() < p}
            if targets:
                trans[q, a] = targets
    accepting = [q for q in states if rng.random() < 0.4]
    return NfaCoalgebra(states, list(alphabet), accepting, trans)


def random_pa(rng, max_states: int = 6, max_symbols: int = 2, acyclic: bool = False,
              max_support: int = 3) -> PaCoalgebra:
    """Random PA.  With ``acyclic=True`` states form a DAG ending in one absorbing
    sink with output 0, so every word-weight function has finite support."""
    n = int(rng.integers(2 if acyclic else 1, max_states + 1))
    k = int(rng.integers(1, max_symbols + 1))
    states = [f"q{i}" for i in range(n)]
    alphabet = list("ab"[:k]) if k <= 2 else [f"a{i}" for i in range(k)]
    output, trans = {}, {}
    for i, q in enumerate(states):
        output[q] = float(np.round(rng.random(), 2)) if rng.random() < 0.5 else float(rng.random())
        for a in alphabet:
            if acyclic:
                if i == n - 1:
                    trans[q, a] = FinDist.dirac(q)
                else:
                    trans[q, a] = random_dist(rng, states[i + 1:], max_support)
            else:
                trans[q, a] = random_dist(rng, states, max_support)
    if acyclic:
        output[states[-1]] = 0.0
    return PaCoalgebra(states, alphabet, output, trans)
