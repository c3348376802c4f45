"""Nondeterministic and probabilistic automata as coalgebras.

An NFA maps each state to ``(accepting?, symbol -> set of successors)``; a PA
maps each state to ``(output in [0, 1], symbol -> distribution of successors)``.
"""

from __future__ import annotations

from functools import cached_property
from typing import Hashable, Iterable, Mapping

import numpy as np

from .findist import FinDist


class NfaCoalgebra:
    """Coalgebra ``X -> 2 x P(X)^A``.  Missing transitions mean the empty set."""

    def __init__(
        self,
        states: Iterable[Hashable],
        alphabet: Iterable[Hashable],
        accepting: Iterable[Hashable],
        transitions: Mapping[tuple, Iterable[Hashable]],
    ):
        self.states = tuple(states)
        self.alphabet = tuple(alphabet)
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("duplicate symbols")
        known = set(self.states)
        self.accepting = frozenset(accepting)
        for q in self.accepting - known:
            raise ValueError(f"accepting state {q!r} is not declared")
        self._succ: dict = {}
        for (q, a), targets in transitions.items():
            if q not in known:
                raise ValueError(f"transition from undeclared state {q!r}")
            if a not in self.alphabet:
                raise ValueError(f"transition on undeclared symbol {a!r}")
            targets = frozenset(targets)
            for t in targets - known:
                raise ValueError(f"transition {q!r} --{a}--> undeclared state {t!r}")
            self._succ[q, a] = self._succ.get((q, a), frozenset()) | targets

    def output(self, q) -> int:
        return 1 if q in self.accepting else 0

    def succ(self, q, a) -> frozenset:
        return self._succ.get((q, a), frozenset())

    def __eq__(self, other) -> bool:
        if not isinstance(other, NfaCoalgebra):
            return NotImplemented
        return (self.states == other.states and self.alphabet == other.alphabet
                and self.accepting == other.accepting
                and {k: v for k, v in self._succ.items() if v}
                == {k: v for k, v in other._succ.items() if v})

    def __repr__(self) -> str:
        return f"NfaCoalgebra({len(self.states)} states, alphabet={list(self.alphabet)})"

    @cached_property
    def adjacency(self) -> dict:
        """Boolean transition matrices per symbol, indexed by state position."""
        pos = {q: i for i, q in enumerate(self.states)}
        out = {}
        for a in self.alphabet:
            m = np.zeros((len(self.states), len(self.states)), dtype=bool)
            for q in self.states:
                for t in self.succ(q, a):
                    m[pos[q], pos[t]] = True
            out[a] = m
        return out


class PaCoalgebra:
    """Coalgebra ``X -> [0, 1] x D(X)^A``.  Every (state, symbol) needs a full distribution."""

    def __init__(
        self,
        states: Iterable[Hashable],
        alphabet: Iterable[Hashable],
        output: Mapping[Hashable, float],
        transitions: Mapping[tuple, FinDist | Mapping],
    ):
        self.states = tuple(states)
        self.alphabet = tuple(alphabet)
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError("duplicate symbols")
        known = set(self.states)
        self._output = {}
        for q in self.states:
            if q not in output:
                raise ValueError(f"no output for state {q!r}")
            r = float(output[q])
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"output {r} of state {q!r} outside [0, 1]")
            self._output[q] = r
        for q in output:
            if q not in known:
                raise ValueError(f"output given for undeclared state {q!r}")
        self._succ: dict = {}
        for (q, a), dist in transitions.items():
            if q not in known:
                raise ValueError(f"transition from undeclared state {q!r}")
            if a not in self.alphabet:
                raise ValueError(f"transition on undeclared symbol {a!r}")
            if not isinstance(dist, FinDist):
                total = sum(float(w) for w in dist.values())
                try:
                    dist = FinDist(dist)
                except ValueError:
                    raise ValueError(
                        f"weights of {q!r} on {a!r} sum to {total!r}, expected 1") from None
            for t in dist.support:
                if t not in known:
                    raise ValueError(f"transition {q!r} --{a}--> undeclared state {t!r}")
            self._succ[q, a] = dist
        for q in self.states:
            for a in self.alphabet:
                if (q, a) not in self._succ:
                    raise ValueError(f"missing distribution for state {q!r} on {a!r}")

    def output(self, q) -> float:
        return self._output[q]

    def succ(self, q, a) -> FinDist:
        return self._succ[q, a]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PaCoalgebra):
            return NotImplemented
        return (self.states == other.states and self.alphabet == other.alphabet
                and self._output == other._output and self._succ == other._succ)

    def __repr__(self) -> str:
        return f"PaCoalgebra({len(self.states)} states, alphabet={list(self.alphabet)})"

    @cached_property
    def output_vector(self) -> np.ndarray:
        return np.array([self._output[q] for q in self.states])

    @cached_property
    def transition_matrices(self) -> dict:
        """Row-stochastic matrices per symbol: ``M[a][i, j] = succ(state_i, a)(state_j)``."""
        pos = {q: i for i, q in enumerate(self.states)}
        out = {}
        for a in self.alphabet:
            m = np.zeros((len(self.states), len(self.states)))
            for q in self.states:
                for t, w in self._succ[q, a].items():
                    m[pos[q], pos[t]] = w
            out[a] = m
        return out


def disjoint_union(first, second):
    """Merge two automata of the same kind, prefixing states with ``1:`` and ``2:``."""
    if type(first) is not type(second):
        raise ValueError("cannot merge an NFA with a PA")
    p1 = {q: f"1:{q}" for q in first.states}
    p2 = {q: f"2:{q}" for q in second.states}
    states = list(p1.values()) + list(p2.values())
    if isinstance(first, NfaCoalgebra):
        alphabet = list(dict.fromkeys(first.alphabet + second.alphabet))
        trans = {}
        for aut, ren in ((first, p1), (second, p2)):
            for q in aut.states:
                for a in aut.alphabet:
                    if aut.succ(q, a):
                        trans[ren[q], a] = {ren[t] for t in aut.succ(q, a)}
        accepting = [p1[q] for q in first.accepting] + [p2[q] for q in second.accepting]
        return NfaCoalgebra(states, alphabet, accepting, trans)
    if set(first.alphabet) != set(second.alphabet):
        raise ValueError("probabilistic automata must share an alphabet to be merged")
    output, trans = {}, {}
    for aut, ren in ((first, p1), (second, p2)):
        for q in aut.states:
            output[ren[q]] = aut.output(q)
            for a in aut.alphabet:
                trans[ren[q], a] = aut.succ(q, a).pushforward(ren.__getitem__)
    return PaCoalgebra(states, first.alphabet, output, trans)
