import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tracedist.findist import FinDist
from tracedist.lifting import (
    EvalKind,
    LiftParams,
    hausdorff_lift,
    input_lift,
    kantorovich_candidate_bound,
    kantorovich_dist_lift,
    m2_lift,
    machine_lift,
    wasserstein_dist_lift,
)
from tracedist.metric import (
    PseudometricSpace,
    discrete_metric,
    euclidean_interval_metric,
    validate_pseudometric,
)
from tracedist.oracle import enumerate_couplings
from tracedist.sampling import random_dist, random_space, random_subset

MAX = LiftParams(EvalKind.MAX, c=0.5, c1=1.0, c2=1.0)
SUM = LiftParams(EvalKind.CONVEX, c1=0.5, c2=0.5)


def _set_max(f, S):
    return max((f(x) for x in S), default=0.0)


# --- parameters --------------------------------------------------------------

def test_params_validation():
    with pytest.raises(ValueError):
        LiftParams(EvalKind.CONVEX, c1=0.7, c2=0.7)
    with pytest.raises(ValueError):
        LiftParams(c=0.0)
    with pytest.raises(ValueError):
        LiftParams(c1=1.5)
    # unbounded mode drops the (0, 1] constraints
    p = LiftParams(EvalKind.CONVEX, c1=0.5, c2=3.0, top=math.inf)
    assert p.c2 == 3.0
    tv = LiftParams.total_variation(2)
    assert (tv.top, tv.c1, tv.c2) == (math.inf, 0.5, 2.0)
    assert LiftParams(eval_kind="max").eval_kind is EvalKind.MAX


# --- Hausdorff ----------------------------------------------------------------

def test_hausdorff_examples(line_space):
    assert hausdorff_lift(line_space, {1, 2}, {2, 1}) == 0
    assert hausdorff_lift(discrete_metric(["x"]), set(), {"x"}) == 1
    assert hausdorff_lift(line_space, set(), set()) == 0
    assert hausdorff_lift(line_space, {1}, {2, 3}) == 2
    value, witness = enumerate_couplings("PowersetMaxEval", line_space, {1}, {2, 3})
    assert value == 2 and witness == {(1, 2), (1, 3)}


def test_hausdorff_rejects_foreign_elements(line_space):
    with pytest.raises(KeyError):
        hausdorff_lift(line_space, {1}, {9})


def test_hausdorff_matches_coupling_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(10):
        space = random_space(rng, 5)
        subsets = [frozenset(c) for k in range(4) for c in itertools.combinations(space.elements, k)]
        for s1 in subsets[::3]:
            for s2 in subsets[::4]:
                assert hausdorff_lift(space, s1, s2) == enumerate_couplings(
                    "PowersetMaxEval", space, s1, s2)[0]


def test_powerset_kantorovich_point_witnesses_are_a_lower_bound():
    rng = np.random.default_rng(5)
    strict = 0
    for _ in range(100):
        space = random_space(rng, 5)
        el = list(space.elements)
        s1, s2 = random_subset(rng, el, 3), random_subset(rng, el, 3)
        h = hausdorff_lift(space, s1, s2)
        points = kantorovich_candidate_bound(space, s1, s2, _set_max)
        assert points <= h + 1e-9
        strict += points < h - 1e-9
        with_sets = kantorovich_candidate_bound(space, s1, s2, _set_max, sets=(s1, s2))
        assert with_sets == pytest.approx(h, abs=1e-9)
    assert strict > 0  # the point family alone does not attain the supremum


def test_powerset_point_witness_gap_instance():
    # Every d(x, .) takes the same max on both sets, yet a is 0.5 away from {b, c}.
    space2 = PseudometricSpace(["a", "b", "c"], [[0, 0.5, 0.5], [0.5, 0, 1], [0.5, 1, 0]])
    s1, s2 = {"b", "c"}, {"a", "b", "c"}
    h = hausdorff_lift(space2, s1, s2)
    assert h == 0.5
    assert kantorovich_candidate_bound(space2, s1, s2, _set_max) == 0.0
    assert kantorovich_candidate_bound(space2, s1, s2, _set_max, sets=(s1, s2)) == 0.5


# --- distributions ----------------------------------------------------------------

def test_wasserstein_examples(two_point):
    a, half = FinDist({"a": 1}), FinDist({"a": 0.5, "b": 0.5})
    assert wasserstein_dist_lift(two_point, a, half) == pytest.approx(0.5)
    assert wasserstein_dist_lift(two_point, half, half) == 0
    sp = random_space(np.random.default_rng(0), 4)
    for x in sp.elements:
        for y in sp.elements:
            assert wasserstein_dist_lift(sp, FinDist.dirac(x), FinDist.dirac(y)) == sp.d(x, y)


def test_wasserstein_type_errors(two_point):
    with pytest.raises(TypeError):
        wasserstein_dist_lift(two_point, {"a": 1}, FinDist({"a": 1}))


def test_kantorovich_examples(two_point):
    a, half = FinDist({"a": 1}), FinDist({"a": 0.5, "b": 0.5})
    assert kantorovich_dist_lift(two_point, a, half) == pytest.approx(0.5)
    f = lambda y: two_point.d("a", y)
    assert abs(a.expectation(f) - half.expectation(f)) == pytest.approx(0.5)
    assert kantorovich_dist_lift(two_point, half, half) == 0
    d3 = discrete_metric(["x", "y", "z"])
    assert kantorovich_dist_lift(d3, FinDist.dirac("x"), FinDist.dirac("y")) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        kantorovich_dist_lift(discrete_metric(["x", "y"], math.inf), FinDist.dirac("x"), FinDist.dirac("y"))


def test_wasserstein_with_infinite_top():
    sp = discrete_metric(["x", "y", "z"], math.inf)
    p = FinDist({"x": 0.5, "y": 0.5})
    assert wasserstein_dist_lift(sp, p, FinDist({"x": 0.5, "y": 0.5})) == 0
    assert wasserstein_dist_lift(sp, p, FinDist({"x": 0.5, "z": 0.5})) == math.inf


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_kantorovich_below_wasserstein(seed):
    rng = np.random.default_rng(seed)
    space = random_space(rng, int(rng.integers(2, 7)))
    el = list(space.elements)
    p1, p2 = random_dist(rng, el), random_dist(rng, el)
    k, w = kantorovich_dist_lift(space, p1, p2), wasserstein_dist_lift(space, p1, p2)
    assert k <= w + 1e-9
    assert abs(k - w) <= 1e-6
    assert kantorovich_candidate_bound(space, p1, p2, lambda f, p: p.expectation(f)) <= k + 1e-9


def test_vertex_enumeration_matches_transport():
    rng = np.random.default_rng(2)
    for _ in range(100):
        space = random_space(rng, 5)
        el = list(space.elements)
        p1, p2 = random_dist(rng, el), random_dist(rng, el)
        v, plan = enumerate_couplings("DistributionVertexEval", space, p1, p2)
        assert v == pytest.approx(wasserstein_dist_lift(space, p1, p2), abs=1e-9)
        assert sum(plan.values()) == pytest.approx(1.0)


def test_enumeration_limits(line_space):
    with pytest.raises(ValueError):
        enumerate_couplings("PowersetMaxEval", line_space, {1, 2, 3, 4}, {1})
    assert enumerate_couplings("PowersetMaxEval", line_space, set(), {1}) == (math.inf, None)
    assert enumerate_couplings("PowersetMaxEval", line_space, {1}, {1}) == (0, frozenset({(1, 1)}))


def test_lifted_tables_are_pseudometrics():
    rng = np.random.default_rng(4)
    space = random_space(rng, 4)
    el = list(space.elements)
    sets = list({random_subset(rng, el, 3) for _ in range(8)})
    dists = list({random_dist(rng, el) for _ in range(8)})
    for elems, lift in ((sets, hausdorff_lift), (dists, wasserstein_dist_lift),
                        (dists, kantorovich_dist_lift)):
        table = PseudometricSpace.from_function(elems, lambda a, b: lift(space, a, b), space.top)
        assert validate_pseudometric(table, tol=1e-9) == []


# --- input, machine and M2 ---------------------------------------------------------

def _two_symbol_space():
    return PseudometricSpace(["x", "y", "u", "v"], [
        [0, 0.2, 0.5, 0.5], [0.2, 0, 0.5, 0.5], [0.5, 0.5, 0, 0.7], [0.5, 0.5, 0.7, 0]])


def test_input_lift_examples():
    sp = _two_symbol_space()
    s1, s2 = {"a": "x", "b": "u"}, {"a": "y", "b": "v"}
    assert input_lift(MAX, sp, s1, s1) == 0
    assert input_lift(MAX, sp, s1, s2) == 0.7
    assert input_lift(SUM, sp.restrict(sp.elements), s1, s2) == pytest.approx(0.9)
    with pytest.raises(ValueError):
        input_lift(MAX, sp, s1, {"a": "x"})


def test_input_sum_truncates_at_top():
    sp = discrete_metric(["x", "y"])
    assert input_lift(SUM, sp, {"a": "x", "b": "x"}, {"a": "y", "b": "y"}) == 1.0


def test_machine_lift_examples():
    d_B = discrete_metric([0, 1])
    sp = _two_symbol_space()
    t = (0, {"a": "x", "b": "u"})
    assert machine_lift(MAX, d_B, sp, t, t) == 0
    assert machine_lift(MAX, d_B, sp, (0, {"a": "x"}), (1, {"a": "x"})) == 1
    d_out = euclidean_interval_metric([0.1, 0.5])
    dx = PseudometricSpace(["x", "y", "u", "v"], [
        [0, 0.2, 1, 1], [0.2, 0, 1, 1], [1, 1, 0, 0.6], [1, 1, 0.6, 0]])
    value = machine_lift(SUM, d_out, dx, (0.1, {"a": "x", "b": "u"}), (0.5, {"a": "y", "b": "v"}))
    assert value == pytest.approx(0.5 * 0.4 + 0.25 * (0.2 + 0.6))


def test_m2_agrees_with_machine_on_discrete_outputs():
    rng = np.random.default_rng(8)
    d_B = discrete_metric([0, 1])
    for _ in range(200):
        c = float(rng.uniform(0.05, 1))
        params = LiftParams(EvalKind.MAX, c=c, c1=1.0, c2=c)
        sp = random_space(rng, 3)
        el = list(sp.elements)
        k = int(rng.integers(1, 4))
        t1 = (int(rng.integers(0, 2)), {a: el[rng.integers(3)] for a in range(k)})
        t2 = (int(rng.integers(0, 2)), {a: el[rng.integers(3)] for a in range(k)})
        assert m2_lift(params, sp, t1, t2) == machine_lift(params, d_B, sp, t1, t2)


def test_unit_interval_product_is_pointwise_max():
    rng = np.random.default_rng(9)
    for _ in range(100):
        pts = rng.random(3)
        d1 = euclidean_interval_metric(pts)
        d2 = random_space(rng, 3)
        b1, b2 = d1.elements[0], d1.elements[-1]
        x1, x2 = d2.elements[0], d2.elements[1]
        value = machine_lift(MAX, d1, d2, (b1, {"a": x1}), (b2, {"a": x2}))
        assert value == max(d1.d(b1, b2), d2.d(x1, x2))
