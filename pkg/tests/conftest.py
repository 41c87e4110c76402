import sys
from pathlib import Path

import pytest

from tatekit.diagrams import AlgebraDiagram, SmallCategory, idempotent_category
from tatekit.dg import DGMorphism, PresentedAlgebra, SemifreeAlgebra
from tatekit.graded import GeneratorSymbol, GradedRing

sys.path.insert(0, str(Path(__file__).parent))

INPUTS = Path(__file__).resolve().parent.parent / "inputs"


def sym(name, degree=0, weight=1):
    return GeneratorSymbol(name, degree, weight)


def presented(names_weights, relations):
    """``K[vars]/(relations)``; relations are callables of the ring's generator dict."""
    syms = [sym(n, 0, w) for n, w in names_weights]
    ring = GradedRing(syms)
    gens = {s.name: ring.gen(s.name) for s in syms}
    return PresentedAlgebra(syms, [r(gens) for r in relations])


def ground_field():
    return SemifreeAlgebra([])


def unit_map(target):
    return DGMorphism(ground_field(), target, {})


@pytest.fixture
def node():
    return presented([("x", 1), ("y", 1)], [lambda g: g["x"] * g["y"]])


@pytest.fixture
def dual_numbers():
    return presented([("x", 1)], [lambda g: g["x"] ** 2])


def idempotent_pair_diagram():
    S = presented([("x", 1)], [lambda g: g["x"] ** 2])
    e = DGMorphism(S, S, {"x": S.zero()})
    return AlgebraDiagram(idempotent_category(), {"*": S}, {"alpha": e})


def single_object(alg):
    return AlgebraDiagram(SmallCategory.discrete(["*"]), {"*": alg}, {})
