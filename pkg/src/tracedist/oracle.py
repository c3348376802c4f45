"""Brute-force ground truth: word semantics, closed-form trace distances and
exhaustive coupling enumeration.

Nothing here reuses the fixed-point engine.  Word semantics are recomputed
level by level from the transition matrices, so agreement with the engine
is evidence rather than a tautology.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Hashable, Iterable

import numpy as np

from .automata import NfaCoalgebra, PaCoalgebra
from .findist import FinDist
from .metric import PseudometricSpace


@dataclass(frozen=True)
class WordSemantics:
    """Valuation of every word up to ``max_len``.

    ``levels[k]`` holds the values of all words of length ``k`` in
    length-lexicographic order: the word ``a_{i1} ... a_{ik}`` sits at index
    ``i1 * |A|^(k-1) + ... + ik``.
    """

    alphabet: tuple
    max_len: int
    levels: tuple

    def index(self, word: Iterable[Hashable]) -> tuple[int, int]:
        pos = {a: i for i, a in enumerate(self.alphabet)}
        k, idx = 0, 0
        for a in word:
            idx = idx * len(self.alphabet) + pos[a]
            k += 1
        return k, idx

    def valuation(self, word: Iterable[Hashable]) -> float:
        k, idx = self.index(word)
        if k > self.max_len:
            raise ValueError(f"word of length {k} exceeds bound {self.max_len}")
        return float(self.levels[k][idx])

    __getitem__ = valuation

    def word(self, k: int, idx: int) -> tuple:
        out = []
        for _ in range(k):
            idx, r = divmod(idx, len(self.alphabet))
            out.append(self.alphabet[r])
        return tuple(reversed(out))

    def words(self):
        """All ``(word, value)`` pairs in length-lexicographic order."""
        for k, level in enumerate(self.levels):
            for idx, v in enumerate(level):
                yield self.word(k, idx), float(v)


def _check_seed(states, seed):
    known = set(states)
    for q in seed:
        if q not in known:
            raise ValueError(f"undeclared state {q!r}")


def nfa_language(nfa: NfaCoalgebra, seed: Iterable[Hashable], max_len: int) -> WordSemantics:
    """Acceptance (0/1) of every word from the subset ``seed``."""
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    seed = frozenset(seed)
    _check_seed(nfa.states, seed)
    pos = {q: i for i, q in enumerate(nfa.states)}
    n, k = len(nfa.states), len(nfa.alphabet)
    acc = np.zeros(n, dtype=np.float32)
    for q in nfa.accepting:
        acc[pos[q]] = 1.0
    mats = [nfa.adjacency[a].astype(np.float32) for a in nfa.alphabet]
    cur = np.zeros((1, n), dtype=np.float32)
    for q in seed:
        cur[0, pos[q]] = 1.0
    levels = []
    for length in range(max_len + 1):
        levels.append(((cur @ acc) > 0).astype(np.int8))
        if length == max_len:
            break
        if k == 0:
            cur = np.zeros((0, n), dtype=np.float32)
            continue
        nxt = np.stack([(cur @ m > 0).astype(np.float32) for m in mats], axis=1)
        cur = nxt.reshape(-1, n)
    return WordSemantics(tuple(nfa.alphabet), max_len, tuple(levels))


def pa_word_weights(pa: PaCoalgebra, seed: FinDist, max_len: int) -> WordSemantics:
    """Expected output after reading each word from the distribution ``seed``."""
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    if not isinstance(seed, FinDist):
        seed = FinDist(seed)
    _check_seed(pa.states, seed.support)
    pos = {q: i for i, q in enumerate(pa.states)}
    n = len(pa.states)
    out = pa.output_vector
    mats = [pa.transition_matrices[a] for a in pa.alphabet]
    cur = np.zeros((1, n))
    for q, w in seed.items():
        cur[0, pos[q]] = w
    levels = []
    for length in range(max_len + 1):
        levels.append(cur @ out)
        if length == max_len:
            break
        cur = np.stack([cur @ m for m in mats], axis=1).reshape(-1, n)
    return WordSemantics(tuple(pa.alphabet), max_len, tuple(levels))


def _check_compatible(sem1: WordSemantics, sem2: WordSemantics):
    if sem1.alphabet != sem2.alphabet:
        raise ValueError("semantics over different alphabets")
    if sem1.max_len != sem2.max_len:
        raise ValueError(f"mismatched bounds {sem1.max_len} and {sem2.max_len}")


def closed_form_nfa_distance(sem1: WordSemantics, sem2: WordSemantics, c: float) -> tuple[float, bool]:
    """``c^k`` for the shortest disagreement length ``k``; ``(0, False)`` if none within the bound."""
    _check_compatible(sem1, sem2)
    value = 1.0
    for l1, l2 in zip(sem1.levels, sem2.levels):
        if not np.array_equal(l1, l2):
            return value, True
        value = c * value
    return 0.0, False


def closed_form_pa_distance(sem1: WordSemantics, sem2: WordSemantics, c1: float, c2: float,
                            alphabet_size: int) -> tuple[float, float]:
    """Truncated ``c1 * sum_w (c2/|A|)^|w| |p1(w) - p2(w)|`` and a bound on the rest.

    Word weights lie in [0, 1], so every omitted term is at most
    ``c1 (c2/|A|)^|w|``; the tail is ``inf`` when ``c2 >= 1``.
    """
    _check_compatible(sem1, sem2)
    if alphabet_size != len(sem1.alphabet):
        raise ValueError(f"alphabet size {alphabet_size} does not match {len(sem1.alphabet)}")
    ratio = c2 / alphabet_size if alphabet_size else 0.0
    total, scale = 0.0, 1.0
    for l1, l2 in zip(sem1.levels, sem2.levels):
        total += scale * float(np.abs(l1 - l2).sum())
        scale *= ratio
    value = c1 * total
    if alphabet_size == 0:
        return value, 0.0
    tail = c1 * c2 ** (sem1.max_len + 1) / (1 - c2) if c2 < 1 else math.inf
    return value, tail


# --- coupling enumeration --------------------------------------------------

class CouplingKind(enum.Enum):
    POWERSET_MAX = "PowersetMaxEval"
    DISTRIBUTION_VERTEX = "DistributionVertexEval"


def _powerset_couplings(space: PseudometricSpace, lhs, rhs):
    lhs, rhs = frozenset(lhs), frozenset(rhs)
    if len(lhs) > 3 or len(rhs) > 3 or len(space) > 5:
        raise ValueError("instance too large: sets of size <= 3 over carriers of <= 5 elements")
    space.indices(lhs | rhs)  # carrier check
    if not lhs and not rhs:
        return 0.0, frozenset()
    cells = [(x, y) for x in sorted(lhs, key=repr) for y in sorted(rhs, key=repr)]
    best, witness = space.top, None
    for mask in range(1, 1 << len(cells)):
        rel = [cells[i] for i in range(len(cells)) if mask >> i & 1]
        if {x for x, _ in rel} != lhs or {y for _, y in rel} != rhs:
            continue
        value = max(space.d(x, y) for x, y in rel)
        if witness is None or value < best:
            best, witness = value, frozenset(rel)
    return best, witness


def _vertex_couplings(space: PseudometricSpace, lhs: FinDist, rhs: FinDist):
    if len(lhs) > 3 or len(rhs) > 3:
        raise ValueError("instance too large: supports of size <= 3")
    xs, ys = list(lhs.support), list(rhs.support)
    m, n = len(xs), len(ys)
    cost = space.dist[np.ix_(space.indices(xs), space.indices(ys))]
    b = np.array([lhs[x] for x in xs] + [rhs[y] for y in ys])
    cells = [(i, j) for i in range(m) for j in range(n) if math.isfinite(cost[i, j])]
    best, witness = space.top, None
    # A vertex of the transportation polytope has linearly independent support
    # columns, at most m + n - 1 of them.
    for size in range(1, m + n):
        for sub in itertools.combinations(cells, size):
            A = np.zeros((m + n, size))
            for k, (i, j) in enumerate(sub):
                A[i, k] = A[m + j, k] = 1.0
            if np.linalg.matrix_rank(A) < size:
                continue
            x, *_ = np.linalg.lstsq(A, b, rcond=None)
            if np.abs(A @ x - b).max() > 1e-9 or x.min() < -1e-12:
                continue
            value = float(sum(cost[i, j] * max(v, 0.0) for (i, j), v in zip(sub, x)))
            if witness is None or value < best:
                best = value
                witness = {(xs[i], ys[j]): float(v) for (i, j), v in zip(sub, x) if v > 1e-15}
    return best, witness


def enumerate_couplings(kind, space: PseudometricSpace, lhs, rhs):
    """Exhaustive minimum of the evaluated couplings; ``(top, None)`` if none exist."""
    kind = CouplingKind(kind)
    if kind is CouplingKind.POWERSET_MAX:
        return _powerset_couplings(space, lhs, rhs)
    return _vertex_couplings(space, lhs, rhs)
