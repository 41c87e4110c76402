import random

from hypothesis import given, settings
from hypothesis import strategies as st

from builders import random_semifree
from conftest import presented, sym, unit_map
from tatekit.dg import AlgebraModule, Cone, DirectSum, FreeModule, SemifreeAlgebra, Shift, cohomology_slice
from tatekit.derivations import (
    DerComplex,
    Derivation,
    der_differential,
    der_slice_basis,
    dgla_bracket,
    tangent_cohomology,
    tangent_complex,
)
from tatekit.factorization import tate_factorize


def node_resolution(node):
    fact = tate_factorize(unit_map(node), 3, 6)
    return fact, fact.middle, fact.projection


def test_der_slice_examples(node):
    fact, R, p = node_resolution(node)
    basis = der_slice_basis(R, node, 1, -2, p)
    assert len(basis) == 1
    assert basis[0].values == {"T1_0": node.one()}
    assert der_slice_basis(R, node, 2, -2, p) == []
    # x, y each to a weight-1 class of S; T to the degree -1 part of S, which is zero
    assert len(der_slice_basis(R, node, 0, 0, p)) == 4


def test_differential_example(node):
    fact, R, p = node_resolution(node)
    x, y = node.gen("x"), node.gen("y")
    s1, s2 = x.scale(3), y.scale(-2)
    alpha = Derivation(R, node, 0, 0, {"x": s1, "y": s2}, p)
    d_alpha = der_differential(alpha)
    assert d_alpha.value("T1_0") == node.normalize(-(s1 * y + x * s2))


def test_differential_vanishes_on_cocycle_values():
    R = SemifreeAlgebra([sym("x"), sym("y")])
    alpha = Derivation(R, R, 0, 0, {"x": R.gen("y")})
    assert not der_differential(alpha)


def test_bracket_examples():
    R = SemifreeAlgebra([sym("x")])
    euler = Derivation(R, R, 0, 0, {"x": R.gen("x")})
    shift = Derivation(R, R, 0, -1, {"x": R.one()})
    assert not dgla_bracket(euler, euler)
    assert dgla_bracket(euler, shift) == shift.scale(-1)


def test_tangent_cohomology_examples(node):
    fact = tate_factorize(unit_map(node), 3, 6)
    assert tangent_cohomology(fact, 1, range(-4, 4)) == {w: int(w == -2) for w in range(-4, 4)}
    assert sum(tangent_cohomology(fact, 2, range(-4, 4)).values()) == 0
    smooth = presented([("x", 1)], [])
    fact = tate_factorize(unit_map(smooth), 3, 6)
    assert sum(tangent_cohomology(fact, 1, range(-4, 4)).values()) == 0


def test_module_target_differentials_square_to_zero(node):
    fact, R, p = node_resolution(node)
    cx = tangent_complex(fact)
    for k in range(-1, 2):
        for w in range(-3, 3):
            assert cx.d_matrix(k + 1, w).matmul(cx.d_matrix(k, w)).is_zero()


def test_cone_targets_give_surjective_quasi_isomorphisms(node):
    """``M + Cone(P) -> M`` is a surjective quasi-isomorphism, so Der into the cone part is acyclic."""
    fact, R, _ = node_resolution(node)
    M = AlgebraModule(R)
    P = FreeModule(R, [("e", 0, 1), ("f", -1, 1)])
    total = DerComplex(R, DirectSum([M, Cone(P)]))
    kernel = DerComplex(R, Cone(P))
    image = DerComplex(R, M)
    for k in range(-1, 2):
        for w in range(-2, 3):
            assert cohomology_slice(kernel, k, w)[0] == 0
            assert total.dim(k, w) == kernel.dim(k, w) + image.dim(k, w)
            assert cohomology_slice(total, k, w)[0] == cohomology_slice(image, k, w)[0]


def test_shift_commutes_with_der(node):
    fact, R, _ = node_resolution(node)
    M = FreeModule(R, [("e", 0, 1)])
    for n in (-1, 1, 2):
        shifted = DerComplex(R, Shift(M, n))
        plain = DerComplex(R, M)
        for k in range(-1, 3):
            for w in range(-2, 3):
                assert shifted.dim(k, w) == plain.dim(k - n, w)
                assert cohomology_slice(shifted, k, w)[0] == cohomology_slice(plain, k - n, w)[0]


def _random_der(R, rng, k, w):
    cx = DerComplex(R, R)
    n = cx.dim(k, w)
    return cx.from_vector([rng.randint(-2, 2) for _ in range(n)], k, w)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_jacobi_identity(seed):
    rng = random.Random(seed)
    R = random_semifree(rng)
    a, b, c = (_random_der(R, rng, rng.randint(-1, 1), rng.randint(-1, 1)) for _ in range(3))

    def sgn(x, y):
        return -1 if (x.degree * y.degree) % 2 else 1

    lhs = dgla_bracket(a, dgla_bracket(b, c))
    rhs = dgla_bracket(dgla_bracket(a, b), c) + dgla_bracket(b, dgla_bracket(a, c)).scale(sgn(a, b))
    assert lhs == rhs


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_differential_is_a_bracket_derivation(seed):
    rng = random.Random(seed)
    R = random_semifree(rng)
    a = _random_der(R, rng, rng.randint(-1, 1), rng.randint(-1, 1))
    b = _random_der(R, rng, rng.randint(-1, 1), rng.randint(-1, 1))
    sign = -1 if a.degree % 2 else 1
    lhs = der_differential(dgla_bracket(a, b))
    rhs = dgla_bracket(der_differential(a), b) + dgla_bracket(a, der_differential(b)).scale(sign)
    assert lhs == rhs
