import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import idempotent_pair_diagram, presented, sym, unit_map
from tatekit.diagrams import (
    AlgebraDiagram,
    DiagramDerComplex,
    SimplexMorphism,
    SimplexObject,
    SmallCategory,
    constant_diagram,
    diagram_der_slice,
    epsilon_star,
    epsilon_tau_unit,
    factor_epi_mono,
    idempotent_category,
    is_anchor,
    latching_category,
    latching_object,
    level_counts,
    lift_graded_morphism,
    nerve_truncation,
    nondegenerate_direct_subcategory,
    reedy_cofibrant_replacement,
    tau,
)
from tatekit.dg import DGMorphism, SemifreeAlgebra, cohomology_slice
from tatekit.derivations import DerComplex
from tatekit.errors import InputError, UnsupportedIndexError
from tatekit.factorization import tate_factorize
from tatekit.graded import GradedRing


def monotone_maps(n, m):
    return [f for f in itertools.product(range(m + 1), repeat=n + 1) if all(a <= b for a, b in zip(f, f[1:]))]


def brute_idempotent_nerve(k):
    """Objects and morphisms of the truncated nerve of {id, alpha}, counted without tatekit."""

    def compose(arrows):
        return "alpha" if "alpha" in arrows else "id"

    objs = [s for n in range(k + 1) for s in itertools.product(["id", "alpha"], repeat=n)]
    count = 0
    for s in objs:
        for t in objs:
            for f in monotone_maps(len(s), len(t)):
                if all(s[i - 1] == compose(t[f[i - 1]:f[i]]) for i in range(1, len(s) + 1)):
                    count += 1
    return len(objs), count


def test_category_validation():
    with pytest.raises(InputError):
        SmallCategory.from_table(["a"], {"f": ("a", "a")}, {("f", "f"): "g"})
    with pytest.raises(InputError):
        SmallCategory(["a"], {"i": ("a", "a"), "f": ("a", "a")}, {("i", "i"): "i", ("i", "f"): "f", ("f", "i"): "i", ("f", "f"): "f"}, {"a": "i"})


def test_idempotent_nerve_counts():
    N = nerve_truncation(idempotent_category(), 2)
    assert level_counts(N) == [1, 2, 4]
    assert (len(N.objects), len(N.morphisms)) == brute_idempotent_nerve(2)
    assert all(N.is_identity(m) for m in N.isomorphisms())


def test_poset_nerve_counts():
    B = SmallCategory.poset(["a", "b", "c"], [("a", "b"), ("b", "c")])
    N = nerve_truncation(B, 2)
    assert level_counts(N) == [len(list(itertools.combinations_with_replacement("abc", n + 1))) for n in range(3)]


def test_truncation_level_must_be_at_least_two():
    with pytest.raises(InputError):
        nerve_truncation(idempotent_category(), 1)


def test_anchor_examples():
    B = SmallCategory.poset(["x", "y", "z"], [("x", "y"), ("y", "z")])
    z = SimplexObject(("z",), ())
    edge = SimplexObject(("x", "z"), ("x<z",))
    assert is_anchor(SimplexMorphism(z, z, (0,)))
    assert is_anchor(SimplexMorphism(z, edge, (1,)))
    x = SimplexObject(("x",), ())
    assert not is_anchor(SimplexMorphism(x, edge, (0,)))
    N = nerve_truncation(B, 2)
    into_edge = [m for m in N.hom(z, edge)]
    assert [m.f for m in into_edge if is_anchor(m)] == [(1,)]


def test_epsilon_star_examples():
    S = idempotent_pair_diagram()
    G = epsilon_star(S, 2)
    point = SimplexObject(("*",), ())
    edge = SimplexObject(("*", "*"), ("alpha",))
    assert G.objects[edge] is S.objects["*"]
    assert G.arrows[SimplexMorphism(point, edge, (0,))] == S.arrows["alpha"]
    for f in G.index.morphisms:
        if is_anchor(f):
            assert G.arrows[f].is_identity()
    node = presented([("x", 1), ("y", 1)], [lambda g: g["x"] * g["y"]])
    C = constant_diagram(idempotent_category(), node)
    EC = epsilon_star(C, 2)
    assert all(EC.arrows[f].is_identity() for f in EC.index.morphisms)
    assert tau(EC).same_as(C)


def test_tau_undoes_conjugation():
    S = idempotent_pair_diagram()
    G = epsilon_star(S, 2)
    A = S.objects["*"]
    scale = DGMorphism(A, A, {"x": A.gen("x").scale(3)})
    conj = G.conjugate({s: scale for s in G.index.objects})
    back = tau(conj)
    assert back.arrows["alpha"] == scale.compose(S.arrows["alpha"]).compose(scale.inverse())
    eta = epsilon_tau_unit(conj)
    assert all(eta[s].inverse() is not None for s in conj.index.objects)


def test_functoriality_error_names_arrow():
    A = presented([("x", 1)], [])
    bad = DGMorphism(A, A, {"x": A.gen("x").scale(2)})
    with pytest.raises(InputError, match="alpha"):
        AlgebraDiagram(idempotent_category(), {"*": A}, {"alpha": bad})


def test_latching_examples():
    node = presented([("x", 1), ("y", 1)], [lambda g: g["x"] * g["y"]])
    P = SmallCategory.poset(["0", "1"], [("0", "1")])
    rep = reedy_cofibrant_replacement(constant_diagram(P, node), 3, 4)
    L = latching_object(rep.diagram, "1")
    assert len(L.algebra.gens) == len(rep.diagram.objects["0"].gens)
    assert L.to_object.is_identity()
    assert latching_object(rep.diagram, "0").algebra.gens == ()
    # R_1 adds nothing over the latching object and the arrow is an isomorphism
    assert rep.new_generators("1") == []
    assert rep.diagram.arrows["0<1"].inverse() is not None


def test_non_poset_latching_category_is_rejected():
    C = SmallCategory.from_table(
        ["0", "1", "2"],
        {"f": ("0", "1"), "g": ("0", "1"), "h": ("1", "2"), "k": ("0", "2")},
        {("h", "f"): "k", ("h", "g"): "k"},
    )
    with pytest.raises(UnsupportedIndexError):
        latching_category(C, "2")


def test_latching_needs_semifree_objects():
    node = presented([("x", 1), ("y", 1)], [lambda g: g["x"] * g["y"]])
    P = SmallCategory.poset(["0", "1"], [("0", "1")])
    with pytest.raises(InputError):
        latching_object(constant_diagram(P, node), "1")


def test_discrete_replacement_is_objectwise():
    node = presented([("x", 1), ("y", 1)], [lambda g: g["x"] * g["y"]])
    dual = presented([("x", 1)], [lambda g: g["x"] ** 2])
    B = SmallCategory.discrete(["n", "d"])
    rep = reedy_cofibrant_replacement(AlgebraDiagram(B, {"n": node, "d": dual}, {}), 2, 4)
    for name, alg in (("n", node), ("d", dual)):
        alone = tate_factorize(unit_map(alg), 2, 4).middle
        assert rep.diagram.objects[name].gens == alone.gens


def test_idempotent_replacement_checks():
    S = idempotent_pair_diagram()
    N = nerve_truncation(S.index, 2)
    D = nondegenerate_direct_subcategory(N)
    assert (len(D.objects), len(D.morphisms)) == (3, 11)
    rep = reedy_cofibrant_replacement(epsilon_star(S, 2, N).restrict(D), 3, 4)
    assert rep.check() == {"semifree_latching": True, "certified": True, "functorial": True, "natural": True}


def test_idempotent_index_is_not_direct():
    with pytest.raises(UnsupportedIndexError):
        idempotent_category().direct_degrees()


def test_diagram_der_discrete_is_product():
    node = presented([("x", 1), ("y", 1)], [lambda g: g["x"] * g["y"]])
    B = SmallCategory.discrete(["a", "b"])
    rep = reedy_cofibrant_replacement(constant_diagram(B, node), 3, 4)
    R = rep.diagram
    single = DerComplex(R.objects["a"], R.objects["a"])
    for k in range(-1, 3):
        for w in range(-2, 3):
            assert len(diagram_der_slice(R, None, k, w)) == 2 * single.dim(k, w)
    S = AlgebraDiagram(B, {"a": node, "b": node}, {})
    cx = DiagramDerComplex(R, S, rep.projections)
    assert sum(cohomology_slice(cx, 1, w)[0] for w in range(-4, 3)) == 2


def test_diagram_der_along_isomorphism_matches_source():
    node = presented([("x", 1), ("y", 1)], [lambda g: g["x"] * g["y"]])
    P = SmallCategory.poset(["0", "1"], [("0", "1")])
    rep = reedy_cofibrant_replacement(constant_diagram(P, node), 3, 4)
    R0 = rep.diagram.objects["0"]
    for k in range(-1, 3):
        for w in range(-2, 3):
            assert len(diagram_der_slice(rep.diagram, None, k, w)) == DerComplex(R0, R0).dim(k, w)


def test_graded_lift_through_isomorphism_is_beta():
    node = presented([("x", 1), ("y", 1)], [lambda g: g["x"] * g["y"]])
    B = SmallCategory.discrete(["*"])
    rep = reedy_cofibrant_replacement(constant_diagram(B, node), 2, 4)
    R = rep.diagram.objects["*"]
    ident = DGMorphism.identity(R)
    lift = lift_graded_morphism(rep, {"*": R}, {"id_*": ident}, {"*": ident}, {"*": ident})
    assert lift.values["*"] == {g.name: R.gen(g.name) for g in R.gens}


def test_graded_lift_for_node_over_parameter():
    """Lift the identity of the node resolution through reduction ``t -> 0``."""
    node = presented([("x", 1), ("y", 1)], [lambda g: g["x"] * g["y"]])
    B = SmallCategory.discrete(["*"])
    rep = reedy_cofibrant_replacement(constant_diagram(B, node), 2, 4)
    R = rep.diagram.objects["*"]
    X, Y, T, P = sym("x"), sym("y"), sym("T1_0", -1, 2), sym("t", 0, 2)
    ring = GradedRing([X, Y, T, P])
    E = SemifreeAlgebra([X, Y, T, P], {"T1_0": ring.gen("x") * ring.gen("y") + ring.gen("t")})
    reduce = DGMorphism(E, R, {"x": R.gen("x"), "y": R.gen("y"), "T1_0": R.gen("T1_0"), "t": R.zero()})
    lift = lift_graded_morphism(rep, {"*": E}, {"id_*": DGMorphism.identity(E)}, {"*": reduce}, {"*": DGMorphism.identity(R)})
    vals = lift.values["*"]
    assert all(reduce(v) == R.gen(n) for n, v in vals.items())
    assert vals["T1_0"] == E.gen("T1_0")


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["idempotent", "poset", "z2"]), st.data())
def test_epi_mono_factorization_is_unique(kind, data):
    if kind == "idempotent":
        B = idempotent_category()
    elif kind == "poset":
        B = SmallCategory.poset(["a", "b", "c"], [("a", "b"), ("b", "c")])
    else:
        table = {("e", "e"): "e", ("e", "s"): "s", ("s", "e"): "s", ("s", "s"): "e"}
        B = SmallCategory.monoid(["e", "s"], table, "e")
    N = nerve_truncation(B, 2)
    f = data.draw(st.sampled_from(sorted(N.morphisms, key=str)))
    s, i = factor_epi_mono(N, f)
    assert s.is_surjective() and i.is_injective() and N.compose(i, s) == f
    others = [
        (s2, i2)
        for s2 in N.morphisms_from(f.source)
        for i2 in N.morphisms_into(f.target)
        if s2.is_surjective() and i2.is_injective() and s2.target == i2.source and N.compose(i2, s2) == f
    ]
    assert others == [(s, i)]
