"""Acceptance suite: one PASS/FAIL line per criterion, each with a pinned time limit.

Run ``pytest tests/test_acceptance.py -v`` and read the ``[criterion n]`` lines.
All comparisons are exact (rational arithmetic); the only tolerance is time.
"""
import itertools
import json
import random
import time
from fractions import Fraction

import sympy as sp

from builders import QuotientComplex, fibration_square, random_free_extension, random_semifree, trivial_fibration_square
from conftest import INPUTS, idempotent_pair_diagram, presented, single_object, unit_map
from oracles import hypersurface_first_order_dim, pair_first_order_dim, quotient_slice_dim
from tatekit.cli import run
from tatekit.deformation import (
    ControllingAlgebra,
    LieTensor,
    MCElement,
    artin_ring,
    first_order_space,
    gauge_action,
    gauge_equivalent,
    mc_solve,
    parse_base,
    realize,
)
from tatekit.diagrams import (
    AlgebraDiagram,
    CosimplicialGroup,
    SmallCategory,
    SymmetricGroup,
    TruncatedSimplicialSet,
    compatible_tuples,
    constant_diagram,
    cosimplicial_extend,
    epsilon_star,
    epsilon_tau_unit,
    is_natural,
    nerve_truncation,
    nondegenerate_direct_subcategory,
    reedy_cofibrant_replacement,
    tau,
)
from tatekit.dg import DGMorphism, cohomology_slice
from tatekit.factorization import (
    is_quasi_iso_on_slice,
    is_surjective_on_slice,
    lift_against_fibration,
    lift_against_trivial_fibration,
    tate_factorize,
)
from tatekit.linalg import rank_kernel

LIMITS = {1: 5, 2: 10, 3: 30, 4: 30, 5: 60, 6: 5, 7: 60, 8: 30, 9: 10, 10: 60}
TITLES = {
    1: "node tangent cohomology matches perturbation oracle",
    2: "Tate factorization is a resolution on every slice up to weight 8",
    3: "free extensions are quasi-isomorphisms (50 random)",
    4: "lifts satisfy both triangles (25 + 25 random squares)",
    5: "S3-valued cosimplicial extension, exhaustive for n <= 2",
    6: "epsilon*/tau round trip on 6 index categories",
    7: "first-order dimensions agree over B and over the truncated nerve",
    8: "MC differences are cocycles, classes biject, gauge keeps MC",
    9: "realizations are flat and reduce; node matches A[x,y]/(xy - t)",
    10: "idempotent Reedy replacement: latching, fibrations, functoriality",
}


def criterion(capsys, n, body):
    """Run ``body``, print the verdict line, then fail on a wrong answer or a blown time limit."""
    start = time.perf_counter()
    error = None
    try:
        detail = body()
    except Exception as exc:  # integrity errors count as failures too
        detail, error = f"{type(exc).__name__}: {exc}", exc
    elapsed = time.perf_counter() - start
    ok = error is None and elapsed < LIMITS[n]
    verdict = "PASS" if ok else "FAIL"
    with capsys.disabled():
        print(f"\n[criterion {n}] {verdict} {TITLES[n]} ({elapsed:.2f}s, limit {LIMITS[n]}s) {detail or ''}")
    if error is not None:
        raise error
    assert elapsed < LIMITS[n], f"took {elapsed:.2f}s, limit {LIMITS[n]}s"


def node():
    return presented([("x", 1), ("y", 1)], [lambda g: g["x"] * g["y"]])


def nerve_route(S, depth, weight):
    N = nerve_truncation(S.index, 2)
    return reedy_cofibrant_replacement(epsilon_star(S, 2, N).restrict(nondegenerate_direct_subcategory(N)), depth, weight)


def nonzero(table):
    return {w: d for w, d in table.items() if d}


def test_c1_node_tangent(capsys, tmp_path):
    def body():
        out = tmp_path / "tangent.json"
        assert run(["tangent", str(INPUTS / "node.json"), "--out", str(out)]) == 0
        report = json.loads(out.read_text())["report"]
        assert report["T1"] == {"by_weight": {"-2": 1}, "total": 1}
        assert report["T2"]["total"] == 0
        x, y = sp.symbols("x y")
        lo, hi = report["weight_range"]
        oracle = {w: hypersurface_first_order_dim(x * y, [x, y], [1, 1], w) for w in range(lo, hi + 1)}
        assert {str(w): d for w, d in oracle.items() if d} == report["T1"]["by_weight"]
        return f"T1={report['T1']['by_weight']} T2={report['T2']['total']}"

    criterion(capsys, 1, body)


def test_c2_tate_factorization(capsys):
    x, y = sp.symbols("x y")
    cases = [
        ("x^2", presented([("x", 1)], [lambda g: g["x"] ** 2]), [x**2], [x]),
        ("xy", node(), [x * y], [x, y]),
    ]
    depth, bound = 3, 8

    def body():
        checked = 0
        for _, S, rels, xs in cases:
            fact = tate_factorize(unit_map(S), depth, bound)
            R = fact.middle
            for w in range(bound + 1):
                assert is_quasi_iso_on_slice(fact.projection, 0, w)
                assert cohomology_slice(R, 0, w)[0] == quotient_slice_dim(rels, xs, [1] * len(xs), w)
                for i in range(-depth, 0):
                    assert cohomology_slice(R, i, w)[0] == 0, (i, w)
                    checked += 1
        return f"{checked} negative slices acyclic"

    criterion(capsys, 2, body)


def test_c3_free_extensions(capsys):
    def body():
        slices = 0
        for seed in range(50):
            rng = random.Random(seed)
            inc, pairs = random_free_extension(rng, random_semifree(rng))
            Q = QuotientComplex(inc.target, [n for p in pairs for n in p])
            for deg in range(-3, 1):
                for w in range(5):
                    assert cohomology_slice(Q, deg, w)[0] == 0, (seed, deg, w)
                    slices += 1
        return f"{slices} quotient slices acyclic"

    criterion(capsys, 3, body)


def test_c4_lifting(capsys):
    def body():
        for seed in range(25):
            i, g, alpha, beta = trivial_fibration_square(random.Random(seed))
            gamma = lift_against_trivial_fibration(i, g, alpha, beta, 4)
            assert gamma.compose(i) == alpha and g.compose(gamma) == beta, seed
        for seed in range(25):
            i, g, alpha, beta, pairs = fibration_square(random.Random(1000 + seed))
            h = lift_against_fibration(i, g, alpha, beta, pairs)
            assert h.compose(i) == alpha and g.compose(h) == beta, seed
        return "50 squares"

    criterion(capsys, 4, body)


def test_c5_cosimplicial_extension(capsys):
    X = TruncatedSimplicialSet.nerve(SmallCategory.poset(["0", "1"], [("0", "1")]), 3)
    G = CosimplicialGroup.of_functions(SymmetricGroup(3), X)

    def body():
        total = 0
        for n in (1, 2):
            upper = list(G.levels[n + 1].elements())
            for r in range(n + 2):
                for I in itertools.combinations(range(n + 1), r):
                    found = set()
                    for x in compatible_tuples(G, n, I):
                        z = cosimplicial_extend(G, n, x)
                        assert all(G.sigma(n, i, z) == x[i] for i in I), (n, I)
                        found.add(tuple(x[i] for i in I))
                    # every compatible family is hit by some z, and every z gives one
                    image = {tuple(G.sigma(n, i, z) for i in I) for z in upper}
                    assert found == image, (n, I)
                    total += len(found)
        return f"{total} compatible families extended"

    criterion(capsys, 5, body)


def scaling(A, c):
    """The automorphism multiplying each generator by ``c`` to the power of its weight."""
    return DGMorphism(A, A, {g.name: A.gen(g.name).scale(Fraction(c) ** g.weight) for g in A.gens})


def index_examples():
    n = node()
    dual = presented([("x", 1)], [lambda g: g["x"] ** 2])
    free = presented([("x", 1)], [])
    to_dual = DGMorphism(n, dual, {"x": dual.gen("x"), "y": dual.gen("x")})
    P3 = SmallCategory.poset(["a", "b", "c"], [("a", "b"), ("b", "c")])
    P2 = SmallCategory.poset(["0", "1"], [("0", "1")])
    flip_table = {("e", "e"): "e", ("e", "s"): "s", ("s", "e"): "s", ("s", "s"): "e"}
    Z2 = SmallCategory.monoid(["e", "s"], flip_table, "e")
    return {
        "trivial": single_object(n),
        "idempotent": idempotent_pair_diagram(),
        "poset a<b<c": AlgebraDiagram(
            P3,
            {"a": free, "b": free, "c": free},
            {"a<b": scaling(free, 2), "b<c": scaling(free, 3), "a<c": scaling(free, 6)},
        ),
        "poset 0<1": AlgebraDiagram(P2, {"0": n, "1": dual}, {"0<1": to_dual}),
        "discrete": AlgebraDiagram(SmallCategory.discrete(["p", "q"]), {"p": n, "q": dual}, {}),
        "Z/2 acting by x -> -x": AlgebraDiagram(
            Z2, {"*": n}, {"s": DGMorphism(n, n, {"x": n.gen("x").scale(-1), "y": n.gen("y")})}
        ),
    }


def test_c6_epsilon_tau(capsys):
    def body():
        names = []
        for name, S in index_examples().items():
            G = epsilon_star(S, 2)
            assert tau(G).same_as(S), name
            unit = epsilon_tau_unit(G)
            assert all(unit[s].is_identity() for s in G.index.objects), name
            # conjugate by automorphisms that differ from string to string
            isos = {s: scaling(G.objects[s], s.n + 2) for s in G.index.objects}
            H = G.conjugate(isos)
            eta = epsilon_tau_unit(H)
            assert is_natural(H, epsilon_star(tau(H), 2, H.index), eta), name
            assert all(eta[s].inverse() is not None for s in H.index.objects), name
            back = tau(H)
            points = {x: isos[next(s for s in G.index.objects if s.n == 0 and s.last == x)] for x in S.index.objects}
            assert is_natural(S, back, points), name
            names.append(name)
        return f"{len(names)} categories"

    criterion(capsys, 6, body)


def test_c7_deformation_equivalence(capsys):
    weights = range(-4, 3)

    def body():
        # node: the index is a point, so both routes are available to the package
        direct = ControllingAlgebra(reedy_cofibrant_replacement(single_object(node()), 3, 4))
        via_nerve = ControllingAlgebra(nerve_route(single_object(node()), 3, 4))
        h_direct, _ = first_order_space(direct, weights)
        h_nerve, _ = first_order_space(via_nerve, weights)
        assert h_direct == h_nerve and nonzero(h_direct) == {-2: 1}
        base = parse_base("t^2")
        assert mc_solve(direct, base, weights).orbit_dimension == mc_solve(via_nerve, base, weights).orbit_dimension == 1
        # idempotent pair: over B by structure constants, over the nerve by the package
        pair = ControllingAlgebra(nerve_route(idempotent_pair_diagram(), 3, 4))
        h_pair, _ = first_order_space(pair, weights)
        mult = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
        over_B = {w: pair_first_order_dim([0, 1], mult, [[1, 0], [0, 0]], w) for w in weights}
        assert h_pair == over_B
        assert mc_solve(pair, base, weights).orbit_dimension == sum(over_B.values()) == 1
        return f"node {nonzero(h_direct)}, idempotent pair {nonzero(over_B)}"

    criterion(capsys, 7, body)


def _random_family(L, degree, weight, rng):
    n = L.dim(degree, weight)
    return L.from_vector([rng.randint(-3, 3) for _ in range(n)], degree, weight) if n else None


def _cocycle_coefficients(L, reps, w, z):
    """Coordinates of ``[z]`` against ``reps`` modulo coboundaries, solved with sympy."""
    dim = L.dim(1, w)
    boundary = L.complex.d_matrix(0, w).to_dense()
    columns = [L.coords(r, 1, w) for r in reps] + [[boundary[i][j] for i in range(dim)] for j in range(L.dim(0, w))]
    M = sp.Matrix(dim, len(columns), lambda i, j: columns[j][i])
    sol, params = M.gauss_jordan_solve(sp.Matrix(L.coords(z, 1, w)))
    sol = sol.subs({p: 0 for p in params})
    return [Fraction(int(c.p), int(c.q)) for c in sol[: len(reps)]]


def test_c8_mc_and_gauge(capsys):
    weights = range(-4, 3)
    systems = {
        "node": single_object(node()),
        "two nodes": constant_diagram(SmallCategory.discrete(["a", "b"]), node()),
        "idempotent pair": idempotent_pair_diagram(),
    }
    rng = random.Random(8)

    def body():
        classes = samples = moved = 0
        for name, S in systems.items():
            rep = nerve_route(S, 3, 4) if name == "idempotent pair" else reedy_cofibrant_replacement(S, 3, 4)
            L = ControllingAlgebra(rep)
            sol = mc_solve(L, parse_base("t^2"), weights)
            A = sol.base
            (t,) = A.maximal_ideal
            w = -A.weight(t)
            reps = [r for _, r in sol.first_order]
            k = len(reps)
            coeff_grid = list(itertools.product(range(-1, 2), repeat=k))
            # differences of MC elements are cocycles
            for c1, c2 in itertools.combinations(coeff_grid, 2):
                x1, x2 = sol.element(c1), sol.element(c2)
                assert x1.is_mc() and x2.is_mc()
                assert not (x1.xi - x2.xi).d(), name
            # every cocycle is gauge equivalent to exactly one representative
            _, cocycles = rank_kernel(L.complex.d_matrix(1, w))
            for v in cocycles:
                z = L.from_vector(v, 1, w)
                x = MCElement(A, LieTensor(A, 1, {t: z}))
                assert x.is_mc()
                c = _cocycle_coefficients(L, reps, w, z)
                assert gauge_equivalent(L, x, sol.element(c)) is not None, name
                for other in coeff_grid:
                    if list(other) != c:
                        assert gauge_equivalent(L, x, sol.element(other)) is None, name
                classes += 1
            # the gauge action keeps MC; t of weight 1 makes degree-0 families available
            B = artin_ring(["t"], 2, weights=[1])
            (s,) = B.maximal_ideal
            for _ in range(50 if name != "two nodes" else 0):
                a0, b0 = _random_family(L, 0, -1, rng), _random_family(L, 0, -1, rng)
                assert a0 is not None and b0 is not None
                start = gauge_action(LieTensor(B, 0, {s: b0}), LieTensor(B, 1))
                y = gauge_action(LieTensor(B, 0, {s: a0}), start)
                assert MCElement(B, start).is_mc() and MCElement(B, y).is_mc(), name
                samples += 1
                moved += y != start
        assert samples >= 100 and moved > samples // 2
        return f"{classes} cocycles classified, {samples} gauge samples ({moved} moved)"

    criterion(capsys, 8, body)


def test_c9_realization(capsys):
    weights = range(-4, 3)
    x, y, t = sp.symbols("x y t")

    def body():
        outputs = 0
        node_rep = reedy_cofibrant_replacement(single_object(node()), 3, 6)
        node_sol = mc_solve(ControllingAlgebra(node_rep), parse_base("t^2"), weights)
        for c in (0, 1, 2, -1):
            D = realize(node_rep, node_sol.element([c]), 6)
            assert D.flat() and D.reduces()
            outputs += 1
        D = realize(node_rep, node_sol.representatives[0], 6)
        assert D.h0["*"] == ["x*y + t"]
        hand = [quotient_slice_dim([x * y - t, t**2], [x, y, t], [1, 1, 2], W) for W in range(7)]
        assert [r.h0_dim for r in D.slices["*"]] == hand
        assert sp.expand((x * y + t).subs(x, -x)) == -(x * y - t)
        two = reedy_cofibrant_replacement(constant_diagram(SmallCategory.discrete(["a", "b"]), node()), 3, 4)
        two_sol = mc_solve(ControllingAlgebra(two), parse_base("t^2"), weights)
        for c in itertools.product(range(-1, 2), repeat=2):
            D = realize(two, two_sol.element(c), 4)
            assert D.flat() and D.reduces()
            outputs += 1
        pair = nerve_route(idempotent_pair_diagram(), 3, 4)
        pair_sol = mc_solve(ControllingAlgebra(pair), parse_base("t^2"), weights)
        for c in (0, 1):
            D = realize(pair, pair_sol.element([c]), 4)
            assert D.flat() and D.reduces() and D.anchors_checked > 0
            outputs += 1
        return f"{outputs} realizations flat and reducing; node H0 slices {hand}"

    criterion(capsys, 9, body)


def test_c10_reedy_replacement(capsys):
    def body():
        rep = nerve_route(idempotent_pair_diagram(), 3, 4)
        R, D = rep.diagram, rep.diagram.index
        assert rep.check() == {"semifree_latching": True, "certified": True, "functorial": True, "natural": True}
        for a in D.objects:
            L, Ra, inc = rep.latching[a].algebra, R.objects[a], rep.inclusions[a]
            # (a) generators of L_a R go to generators of R_a with the same differential
            for g in L.gens:
                assert inc.image(g.name) == Ra.gen(g.name)
                assert Ra.diff.get(g.name, Ra.zero()) == inc(L.diff.get(g.name, L.zero()))
            assert {g.name for g in Ra.gens} >= {g.name for g in L.gens}
            for f, leg in rep.latching[a].legs.items():
                assert inc.compose(leg) == R.arrows[f]
            # (b) R_a -> S_a is surjective and a quasi-isomorphism on the certified slices
            p = rep.projections[a]
            for deg, w in rep.certified_slices():
                assert is_surjective_on_slice(p, deg, w) and is_quasi_iso_on_slice(p, deg, w), (a, deg, w)
        # (c) functoriality on every composable pair
        pairs = 0
        for g, f in D.composable_pairs():
            assert R.arrows[D.compose(g, f)] == R.arrows[g].compose(R.arrows[f])
            pairs += 1
        return f"{len(D.objects)} objects, {pairs} composable pairs"

    criterion(capsys, 10, body)
