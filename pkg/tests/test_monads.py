import numpy as np
import pytest

from tracedist.automata import NfaCoalgebra, PaCoalgebra
from tracedist.findist import FinDist
from tracedist.monads import (
    determinize_step_nfa,
    determinize_step_pa,
    dist_mult,
    dist_unit,
    nfa_law,
    pa_law,
    pow_mult,
    pow_unit,
)
from tracedist.sampling import random_nfa, random_pa


def test_powerset_monad():
    assert pow_unit("x") == {"x"}
    assert pow_mult({frozenset({"x"}), frozenset({"y"})}) == {"x", "y"}
    assert pow_mult(set()) == frozenset()


def test_distribution_monad():
    assert dist_unit("x") == FinDist({"x": 1})
    x, y = FinDist.dirac("x"), FinDist.dirac("y")
    assert dist_mult(FinDist({x: 0.5, y: 0.5})) == FinDist({"x": 0.5, "y": 0.5})
    assert dist_mult(FinDist({x: 1.0})) == x
    with pytest.raises(ValueError):
        dist_mult(FinDist({"not-a-dist": 1.0}))


@pytest.fixture
def small_nfa():
    return NfaCoalgebra(["x", "y", "u", "v"], ["a"], ["x"],
                        {("x", "a"): ["u"], ("y", "a"): ["v"]})


def test_nfa_step_examples(small_nfa):
    assert determinize_step_nfa(small_nfa, {"y"}) == (0, {"a": frozenset({"v"})})
    assert determinize_step_nfa(small_nfa, {"x", "y"}) == (1, {"a": frozenset({"u", "v"})})
    assert determinize_step_nfa(small_nfa, set()) == (0, {"a": frozenset()})
    with pytest.raises(ValueError):
        determinize_step_nfa(small_nfa, {"nope"})


def test_nfa_step_reproduces_singletons():
    nfa = random_nfa(np.random.default_rng(0), 6, 3)
    for q in nfa.states:
        out, succ = determinize_step_nfa(nfa, {q})
        assert out == nfa.output(q)
        assert succ == {a: nfa.succ(q, a) for a in nfa.alphabet}


@pytest.fixture
def small_pa():
    d = FinDist.dirac
    return PaCoalgebra(["x", "y", "u", "v"], ["a"], {"x": 1.0, "y": 0.0, "u": 0.3, "v": 0.6},
                       {("x", "a"): d("u"), ("y", "a"): d("v"), ("u", "a"): d("u"), ("v", "a"): d("v")})


def test_pa_step_examples(small_pa):
    out, succ = determinize_step_pa(small_pa, FinDist.dirac("x"))
    assert out == 1.0 and succ == {"a": FinDist.dirac("u")}
    out, succ = determinize_step_pa(small_pa, FinDist({"x": 0.5, "y": 0.5}))
    assert out == 0.5
    assert succ["a"] == FinDist({"u": 0.5, "v": 0.5})
    with pytest.raises(ValueError):
        determinize_step_pa(small_pa, {"x": 0.5})


def test_nfa_step_is_an_algebra_morphism():
    rng = np.random.default_rng(1)
    for _ in range(50):
        nfa = random_nfa(rng)
        family = [frozenset(q for q in nfa.states if rng.random() < 0.4) for _ in range(3)]
        out, succ = determinize_step_nfa(nfa, pow_mult(family))
        parts = [determinize_step_nfa(nfa, s) for s in family]
        assert out == max((o for o, _ in parts), default=0)
        for a in nfa.alphabet:
            assert succ[a] == pow_mult(s[a] for _, s in parts)


def test_pa_step_is_an_algebra_morphism():
    rng = np.random.default_rng(2)
    for _ in range(50):
        pa = random_pa(rng)
        inner = [FinDist(dict(zip(pa.states, rng.dirichlet(np.ones(len(pa.states)))))) for _ in range(3)]
        meta = FinDist(list(zip(inner, rng.dirichlet(np.ones(3)))))
        out, succ = determinize_step_pa(pa, dist_mult(meta))
        parts = {p: determinize_step_pa(pa, p) for p in meta.support}
        assert out == pytest.approx(sum(meta[p] * parts[p][0] for p in meta.support))
        for a in pa.alphabet:
            mixed = dist_mult(FinDist([(parts[p][1][a], meta[p]) for p in meta.support]))
            assert succ[a] == mixed


def test_fused_steps_match_explicit_laws():
    rng = np.random.default_rng(3)
    for _ in range(30):
        nfa = random_nfa(rng)
        S = frozenset(q for q in nfa.states if rng.random() < 0.5)
        Tc = [(nfa.output(q), tuple(nfa.succ(q, a) for a in nfa.alphabet)) for q in S]
        o, succ = nfa_law(Tc, len(nfa.alphabet))
        assert determinize_step_nfa(nfa, S) == (o, {a: pow_mult(succ[i]) for i, a in enumerate(nfa.alphabet)})

        pa = random_pa(rng)
        p = FinDist(dict(zip(pa.states, rng.dirichlet(np.ones(len(pa.states))))))
        Tc = p.pushforward(lambda q: (pa.output(q), tuple(pa.succ(q, a) for a in pa.alphabet)))
        o, succ = pa_law(Tc, len(pa.alphabet))
        out, fused = determinize_step_pa(pa, p)
        assert out == pytest.approx(o)
        for i, a in enumerate(pa.alphabet):
            assert fused[a] == dist_mult(succ[i])
