import math

import numpy as np
import pytest

from tracedist.findist import FinDist
from tracedist.monads import determinize_step_nfa, determinize_step_pa
from tracedist.oracle import (
    closed_form_nfa_distance,
    closed_form_pa_distance,
    nfa_language,
    pa_word_weights,
)
from tracedist.sampling import random_nfa, random_pa


def test_nfa_language_examples(aa_nfa):
    empty = nfa_language(aa_nfa, set(), 4)
    assert all(v == 0 for _, v in empty.words())
    z = nfa_language(aa_nfa, {"z"}, 4)
    assert all(v == 1 for _, v in z.words())
    u = nfa_language(aa_nfa, {"u"}, 4)
    assert [w for w, v in u.words() if v] == [("a", "a")]
    with pytest.raises(ValueError):
        nfa_language(aa_nfa, {"nope"}, 2)


def test_word_order_is_length_lexicographic():
    nfa = random_nfa(np.random.default_rng(0), 2, 2)
    sem = nfa_language(nfa, set(nfa.states), 2)
    assert [w for w, _ in sem.words()] == [(), ("a",), ("b",), ("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]


def test_nfa_language_matches_subset_walk():
    rng = np.random.default_rng(1)
    for _ in range(30):
        nfa = random_nfa(rng)
        seed = frozenset(q for q in nfa.states if rng.random() < 0.5)
        sem = nfa_language(nfa, seed, 4)
        for word, value in sem.words():
            s = seed
            for a in word:
                s = determinize_step_nfa(nfa, s)[1][a]
            assert value == determinize_step_nfa(nfa, s)[0]


def test_pa_word_weights_examples(chain_pa):
    sem = pa_word_weights(chain_pa, FinDist.dirac("q0"), 3)
    assert [v for _, v in sem.words()] == [0.0, 1.0, 0.0, 0.0]
    mix = pa_word_weights(chain_pa, FinDist({"q0": 0.5, "q1": 0.5}), 0)
    assert mix[()] == 0.5
    with pytest.raises(ValueError):
        pa_word_weights(chain_pa, FinDist.dirac("nope"), 1)


def test_pa_weights_match_incremental_determinization():
    rng = np.random.default_rng(2)
    for _ in range(30):
        pa = random_pa(rng)
        seed = FinDist(dict(zip(pa.states, rng.dirichlet(np.ones(len(pa.states))))))
        sem = pa_word_weights(pa, seed, 4)
        for word, value in sem.words():
            p = seed
            for a in word:
                p = determinize_step_pa(pa, p)[1][a]
            assert value == pytest.approx(determinize_step_pa(pa, p)[0], abs=1e-12)


def test_closed_form_nfa(aa_nfa):
    sem = {q: nfa_language(aa_nfa, {q}, 5) for q in ("u", "v", "z")}
    assert closed_form_nfa_distance(sem["u"], sem["u"], 0.5) == (0.0, False)
    assert closed_form_nfa_distance(sem["u"], sem["v"], 0.5) == (0.25, True)
    assert closed_form_nfa_distance(sem["v"], sem["z"], 0.5) == (1.0, True)
    with pytest.raises(ValueError):
        closed_form_nfa_distance(sem["u"], nfa_language(aa_nfa, {"v"}, 4), 0.5)


def test_closed_form_pa(chain_pa):
    s0 = pa_word_weights(chain_pa, FinDist.dirac("q0"), 10)
    s1 = pa_word_weights(chain_pa, FinDist.dirac("q1"), 10)
    value, tail = closed_form_pa_distance(s0, s1, 0.5, 1.0, 1)
    assert value == 1.0 and tail == math.inf
    value, tail = closed_form_pa_distance(s0, s0, 0.5, 0.5, 1)
    assert value == 0.0 and tail == pytest.approx(0.5 * 0.5 ** 11 / 0.5)


def test_closed_form_pa_single_term():
    from tracedist.automata import PaCoalgebra
    pa = PaCoalgebra(["x", "y", "s"], ["a"], {"x": 0.4, "y": 0.0, "s": 0.0},
                     {("x", "a"): FinDist.dirac("s"), ("y", "a"): FinDist.dirac("s"),
                      ("s", "a"): FinDist.dirac("s")})
    sx = pa_word_weights(pa, FinDist.dirac("x"), 6)
    sy = pa_word_weights(pa, FinDist.dirac("y"), 6)
    value, _ = closed_form_pa_distance(sx, sy, 0.5, 0.5, 1)
    assert value == pytest.approx(0.2)
