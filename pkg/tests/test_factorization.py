import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import fibration_square, random_presented, trivial_fibration_square
from conftest import ground_field, presented, sym, unit_map
from tatekit.dg import DGMorphism, SemifreeAlgebra, cohomology_slice
from tatekit.errors import InputError, PreconditionError
from tatekit.factorization import (
    free_factorize,
    induced_cohomology_map,
    is_surjective_on_slice,
    lift_against_fibration,
    lift_against_trivial_fibration,
    tate_factorize,
)
from tatekit.graded import GradedRing


def gens_of(alg):
    return {(g.name, g.degree, g.weight): str(alg.diff.get(g.name, "0")) for g in alg.gens}


def test_identity_adds_nothing():
    K = ground_field()
    fact = tate_factorize(DGMorphism(K, K, {}), 3, 6)
    assert fact.middle.gens == ()


def test_dual_numbers_resolution(dual_numbers):
    fact = tate_factorize(unit_map(dual_numbers), 2, 6)
    assert gens_of(fact.middle) == {("x", 0, 1): "0", ("T1_0", -1, 2): "x^2"}
    assert len(fact.certificate.verified) == 3 * 7


def test_node_resolution(node):
    fact = tate_factorize(unit_map(node), 2, 6)
    assert gens_of(fact.middle) == {("x", 0, 1): "0", ("y", 0, 1): "0", ("T1_0", -1, 2): "x*y"}
    assert all(fact.certificate.covers(d, w) for d in (0, -1, -2) for w in range(7))


def test_rejects_non_homogeneous_relation():
    X = sym("x")
    ring = GradedRing([X])
    from tatekit.dg import PresentedAlgebra

    with pytest.raises(InputError):
        PresentedAlgebra([X], [ring.gen("x") ** 2 - ring.gen("x")])


def test_free_factorize_examples():
    X, T = sym("x"), sym("T", -1, 2)
    B = SemifreeAlgebra([X, T], {"T": GradedRing([X, T]).gen("x") ** 2})
    empty = free_factorize(unit_map(B), [])
    assert empty.middle.gens == ()
    fact = free_factorize(unit_map(B), [B.gen("T")])
    pi = fact.projection
    assert pi.image("x_T") == B.gen("T")
    assert pi.image("dx_T") == B.gen("x") ** 2
    assert fact.middle.diff["x_T"] == fact.middle.gen("dx_T")
    S = SemifreeAlgebra([sym("m", -1, 1)])
    assert free_factorize(unit_map(S), [S.gen("m")]).projection.image("dx_m").is_zero()


def test_lift_against_identity_is_beta():
    rng = random.Random(5)
    i, g, alpha, beta = trivial_fibration_square(rng)
    S = beta.target
    ident = DGMorphism.identity(S)
    gamma = lift_against_trivial_fibration(i, ident, DGMorphism(i.source, S, {"a": beta.image("a")}), beta, 4)
    assert gamma == beta


def test_lift_examples():
    U, T = sym("u"), sym("T", -1, 2)
    C = SemifreeAlgebra([U, T], {"T": GradedRing([U, T]).gen("u") ** 2})
    D = presented([("u", 1)], [lambda g: g["u"] ** 2])
    g = DGMorphism(C, D, {"u": D.gen("u"), "T": D.zero()})
    K = ground_field()
    big = SemifreeAlgebra([sym("x")])
    i = DGMorphism(K, big, {})
    gamma = lift_against_trivial_fibration(i, g, DGMorphism(K, C, {}), DGMorphism(big, D, {"x": D.gen("u")}), 4)
    assert gamma.image("x") == C.gen("u")
    odd = SemifreeAlgebra([sym("s", -1, 2)])
    gamma = lift_against_trivial_fibration(DGMorphism(K, odd, {}), g, DGMorphism(K, C, {}), DGMorphism(odd, D, {"s": D.zero()}), 4)
    assert gamma.image("s").is_zero()


def test_lift_against_fibration_example():
    A_, B_ = sym("a", 0, 1), sym("b", -1, 2)
    C = SemifreeAlgebra([A_, B_], {"b": GradedRing([A_, B_]).gen("a") ** 2})
    D = SemifreeAlgebra([B_])
    g = DGMorphism(C, D, {"a": D.zero(), "b": D.gen("b")})
    K = ground_field()
    X, DX = sym("x", -1, 2), sym("dx", 0, 2)
    big = SemifreeAlgebra([X, DX], {"x": GradedRing([X, DX]).gen("dx")})
    h = lift_against_fibration(DGMorphism(K, big, {}), g, DGMorphism(K, C, {}), DGMorphism(big, D, {"x": D.gen("b"), "dx": D.zero()}))
    assert h.image("x") == C.gen("b")
    assert h.image("dx") == C.gen("a") ** 2


def test_surjectivity_failure_is_a_precondition_error():
    U = sym("u")
    C = SemifreeAlgebra([U])
    D = presented([("u", 1), ("v", 1)], [lambda g: g["u"] * g["v"]])
    g = DGMorphism(C, D, {"u": D.gen("u")})
    K = ground_field()
    big = SemifreeAlgebra([sym("x")])
    with pytest.raises(PreconditionError):
        lift_against_trivial_fibration(DGMorphism(K, big, {}), g, DGMorphism(K, C, {}), DGMorphism(big, D, {"x": D.gen("v")}), 4)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_factorization_invariants(seed):
    S = random_presented(random.Random(seed))
    f = unit_map(S)
    fact = tate_factorize(f, 2, 4)
    assert fact.projection.compose(fact.inclusion) == f
    for batch in fact.stages:
        assert {g.degree for g in batch.generators} <= {batch.degree}
    for d, w in fact.certificate.verified:
        a, b, r = induced_cohomology_map(fact.projection, d, w)
        assert a == b == r
    for w in range(5):
        assert is_surjective_on_slice(fact.projection, 0, w)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_cohomology_stabilizes_across_stages(seed):
    S = random_presented(random.Random(seed))
    shallow = tate_factorize(unit_map(S), 2, 4).middle
    deep = tate_factorize(unit_map(S), 3, 4).middle
    for i in (0, -1):  # i > -n + 1 for n = 2
        for w in range(5):
            assert cohomology_slice(shallow, i, w)[0] == cohomology_slice(deep, i, w)[0]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_left_lifting_property(seed):
    i, g, alpha, beta = trivial_fibration_square(random.Random(seed))
    gamma = lift_against_trivial_fibration(i, g, alpha, beta, 4)
    assert gamma.compose(i) == alpha
    assert g.compose(gamma) == beta


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_free_extensions_lift_against_fibrations(seed):
    i, g, alpha, beta, pairs = fibration_square(random.Random(seed))
    h = lift_against_fibration(i, g, alpha, beta, pairs)
    assert h.compose(i) == alpha
    assert g.compose(h) == beta
