import itertools

import numpy as np
import pytest

from tracedist.findist import FinDist


def test_rejects_bad_mass_and_weights():
    with pytest.raises(ValueError):
        FinDist({"a": 0.5, "b": 0.4})
    with pytest.raises(ValueError):
        FinDist({"a": 1.5, "b": -0.5})


def test_support_only_storage():
    d = FinDist({"a": 1.0, "b": 0.0})
    assert d.support == ("a",) and d.prob("b") == 0.0 and "b" not in d


def test_canonical_form_collides_across_orders():
    rng = np.random.default_rng(0)
    items = [("x", 0.2), ("y", 0.3), ("z", 0.5)]
    seen = set()
    for perm in itertools.permutations(items):
        d = FinDist(dict(perm))
        seen.add(d)
        assert d.support == ("x", "y", "z")
    assert len(seen) == 1
    # float drift below the key precision still collides
    w = rng.dirichlet(np.ones(3))
    a = FinDist(dict(zip("abc", w)))
    b = FinDist(dict(zip("cba", w[::-1] * (1 + 1e-15))))
    assert a == b and hash(a) == hash(b)


def test_pushforward_and_expectation():
    d = FinDist({1: 0.25, 2: 0.25, 3: 0.5})
    assert d.pushforward(lambda x: x % 2) == FinDist({0: 0.25, 1: 0.75})
    assert d.expectation() == pytest.approx(2.25)
    assert FinDist.uniform("ab") == FinDist({"a": 0.5, "b": 0.5})
