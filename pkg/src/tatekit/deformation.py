"""Artin base rings, Maurer-Cartan elements and gauge action, and realization of deformed diagrams.

The controlling DG-Lie algebra is the complex of compatible endomorphism
derivations of a Reedy cofibrant diagram ``R``.  Elements of ``L (x) m_A``
are kept homogeneous of total weight zero: the coefficient of a monomial
``a`` of the base ring lives in derivation weight ``-wt(a)``.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .dg import cohomology_slice, coboundary_basis
from .diagrams import DiagramDerComplex, DiagramDerivation, ReedyReplacement, diagram_bracket, is_anchor
from .errors import InputError, IntegrityError, TruncationError
from .linalg import EchelonBasis, solve

Mono = tuple  # exponent vector of the base ring


# ---------------------------------------------------------------------------
# Artin rings


class ArtinRing:
    """``K[t_1..t_m]`` modulo all monomials of total degree ``order`` and extra monomial relations.

    ``weights`` assigns each parameter a weight so that deformations stay
    weight-homogeneous; it may be left unset and fixed later with
    ``with_weights``.
    """

    def __init__(self, params: Sequence[str], order: int, relations: Iterable[Mono] = (), weights: Sequence[int] | None = None):
        if order < 1:
            raise InputError(f"order must be at least 1, got {order}")
        self.params = list(params)
        if len(set(self.params)) != len(self.params) or not all(self.params):
            raise InputError("parameter names must be distinct and non-empty")
        self.order = order
        self.relations = [tuple(r) for r in relations]
        for r in self.relations:
            if len(r) != len(self.params) or any(e < 0 for e in r) or sum(r) == 0:
                raise InputError(f"bad monomial relation {r}")
        self.weights = list(weights) if weights is not None else None
        if self.weights is not None and len(self.weights) != len(self.params):
            raise InputError("one weight per parameter is needed")
        m = len(self.params)
        basis = [
            e
            for e in itertools.product(range(order), repeat=m)
            if sum(e) < order and not self._killed(e)
        ]
        self.basis = sorted(basis, key=lambda e: (sum(e), tuple(-x for x in e)))
        self.one = (0,) * m

    def _killed(self, e: Mono) -> bool:
        if sum(e) >= self.order:
            return True
        return any(all(x >= y for x, y in zip(e, r)) for r in self.relations)

    @property
    def maximal_ideal(self) -> list[Mono]:
        return [e for e in self.basis if e != self.one]

    def dim(self) -> int:
        return len(self.basis)

    def mul(self, a: Mono, b: Mono) -> Mono | None:
        c = tuple(x + y for x, y in zip(a, b))
        return None if self._killed(c) else c

    def degree(self, a: Mono) -> int:
        return sum(a)

    def weight(self, a: Mono) -> int:
        if self.weights is None:
            raise InputError("parameter weights are not set")
        return sum(e * w for e, w in zip(a, self.weights))

    def with_weights(self, weights: Sequence[int]) -> "ArtinRing":
        return ArtinRing(self.params, self.order, self.relations, weights)

    def format(self, a: Mono) -> str:
        parts = [p if e == 1 else f"{p}^{e}" for p, e in zip(self.params, a) if e]
        return "*".join(parts) if parts else "1"

    def parse_monomial(self, text: str) -> Mono:
        exps = [0] * len(self.params)
        for factor in text.replace(" ", "").split("*"):
            m = re.fullmatch(r"([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?", factor)
            if not m or m.group(1) not in self.params:
                raise InputError(f"relation {text!r} is not a monomial in {self.params}")
            exps[self.params.index(m.group(1))] += int(m.group(2) or 1)
        return tuple(exps)

    def __repr__(self):
        rels = [self.format(r) for r in self.relations]
        extra = f", {', '.join(rels)}" if rels else ""
        return f"ArtinRing(K[{', '.join(self.params)}]/(m^{self.order}{extra}))"


def artin_ring(params: Sequence[str], order: int, extra: Iterable[str] = (), weights: Sequence[int] | None = None) -> ArtinRing:
    """Build an Artin ring; ``extra`` holds monomials such as ``"t1*t2"``."""
    probe = ArtinRing(params, order)
    return ArtinRing(params, order, [probe.parse_monomial(r) for r in extra], weights)


def parse_base(spec: str) -> ArtinRing:
    """Parse ``"t^2"``, ``"t1,t2^2"`` or ``"t1,t2^3;t1*t2"`` (parameters, order, extra monomials)."""
    head, _, tail = spec.partition(";")
    m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z_0-9]*(?:\s*,\s*[A-Za-z_][A-Za-z_0-9]*)*)\s*\^\s*(\d+)\s*", head)
    if not m:
        raise InputError(f"cannot parse base ring {spec!r}; expected e.g. 't^2' or 't1,t2^2'")
    params = [p.strip() for p in m.group(1).split(",")]
    extra = [r for r in (x.strip() for x in tail.split(",")) if r]
    return artin_ring(params, int(m.group(2)), extra)


# ---------------------------------------------------------------------------
# L (x) m_A


class LieTensor:
    """An element of ``L (x) m_A`` of fixed degree: ``{monomial: compatible family}``."""

    __slots__ = ("base", "degree", "terms")

    def __init__(self, base: ArtinRing, degree: int, terms: Mapping[Mono, DiagramDerivation] | None = None):
        self.base = base
        self.degree = degree
        self.terms = {a: v for a, v in (terms or {}).items() if v}
        for a in self.terms:
            if a == base.one or a not in base.basis:
                raise InputError(f"{a} is not a basis monomial of the maximal ideal")

    def __add__(self, other: "LieTensor") -> "LieTensor":
        terms = dict(self.terms)
        for a, v in other.terms.items():
            terms[a] = terms[a] + v if a in terms else v
        return LieTensor(self.base, self.degree, terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "LieTensor":
        c = Fraction(c)
        return LieTensor(self.base, self.degree, {a: v.scale(c) for a, v in self.terms.items()})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, LieTensor):
            return NotImplemented
        return not (self - other).terms

    def component(self, a: Mono) -> DiagramDerivation | None:
        return self.terms.get(a)

    def d(self) -> "LieTensor":
        return LieTensor(self.base, self.degree + 1, {a: v.d() for a, v in self.terms.items()})

    def truncate(self, max_order: int) -> "LieTensor":
        return LieTensor(self.base, self.degree, {a: v for a, v in self.terms.items() if sum(a) <= max_order})

    def __repr__(self):
        body = " + ".join(f"({v})*{self.base.format(a)}" for a, v in sorted(self.terms.items()))
        return f"LieTensor[{self.degree}]({body or '0'})"


def bracket(x: LieTensor, y: LieTensor) -> LieTensor:
    out = LieTensor(x.base, x.degree + y.degree)
    terms: dict = {}
    for a, u in x.terms.items():
        for b, v in y.terms.items():
            c = x.base.mul(a, b)
            if c is None:
                continue
            val = diagram_bracket(u, v)
            terms[c] = terms[c] + val if c in terms else val
    out.terms = {c: v for c, v in terms.items() if v}
    return out


def mc_residual(xi: LieTensor) -> LieTensor:
    """``d xi + 1/2 [xi, xi]``."""
    return xi.d() + bracket(xi, xi).scale(Fraction(1, 2))


def gauge_action(a: LieTensor, x: LieTensor) -> LieTensor:
    """``e^a * x = x + sum_n ad_a^n([a, x] - d a) / (n+1)!``; the sum is finite since ``m_A`` is nilpotent."""
    if a.degree != 0 or x.degree != 1:
        raise InputError("gauge action needs a of degree 0 and x of degree 1")
    out = x
    term = bracket(a, x) - a.d()
    n = 0
    while term:
        out = out + term.scale(Fraction(1, math.factorial(n + 1)))
        term = bracket(a, term)
        n += 1
    return out


# ---------------------------------------------------------------------------
# Controlling algebra and Maurer-Cartan solving


class ControllingAlgebra:
    """Compatible endomorphism derivations of a replacement, sliced by bidegree."""

    def __init__(self, replacement: ReedyReplacement):
        self.replacement = replacement
        self.complex = DiagramDerComplex(replacement.diagram)

    def cohomology(self, degree: int, weight: int):
        return cohomology_slice(self.complex, degree, weight)

    def zero(self, degree: int, weight: int) -> DiagramDerivation:
        return self.complex.zero(degree, weight)

    def coords(self, x: DiagramDerivation, degree: int, weight: int):
        return self.complex.coords(x, degree, weight)

    def from_vector(self, vec, degree: int, weight: int) -> DiagramDerivation:
        return self.complex.from_vector(vec, degree, weight)

    def dim(self, degree: int, weight: int) -> int:
        return self.complex.dim(degree, weight)

    def solve_d(self, target: DiagramDerivation, degree: int, weight: int) -> DiagramDerivation | None:
        """Canonical ``y`` of degree ``degree - 1`` with ``d y = target``, or ``None``."""
        if not target:
            return self.zero(degree - 1, weight)
        rhs = self.coords(target, degree, weight)
        m = self.complex.d_matrix(degree - 1, weight)
        if m.cols == 0:
            return None
        sol = solve(m, rhs)
        return None if sol is None else self.from_vector(sol, degree - 1, weight)


def first_order_space(L, weight_range: Iterable[int]) -> tuple[dict[int, int], dict[int, int]]:
    """``(dim H^1, dim H^2)`` of a slice complex (or controlling algebra) per weight."""
    cx = L.complex if isinstance(L, ControllingAlgebra) else L
    ws = list(weight_range)
    return (
        {w: cohomology_slice(cx, 1, w)[0] for w in ws},
        {w: cohomology_slice(cx, 2, w)[0] for w in ws},
    )


@dataclass
class Obstruction:
    """A nonzero class in ``H^2`` met while extending a solution to ``monomial``."""

    monomial: Mono
    weight: int
    order: int
    class_vector: list


@dataclass
class MCElement:
    base: ArtinRing
    xi: LieTensor

    def residual(self) -> LieTensor:
        return mc_residual(self.xi)

    def is_mc(self) -> bool:
        return not self.residual()


@dataclass
class MCSolution:
    """First-order classes, their extensions, and the obstructions met on the way.

    ``first_order`` lists ``(monomial, class representative)`` pairs; every
    first-order solution is a combination of them modulo gauge.
    ``higher_order_dims`` records, per monomial of order >= 2, the dimension
    of ``H^1`` in its weight: the affine freedom added at that order.
    """

    base: ArtinRing
    algebra: ControllingAlgebra
    first_order: list
    representatives: list  # MCElement per first-order basis vector that extends to full order
    obstructions: list  # (index of first-order vector, Obstruction)
    higher_order_dims: dict = field(default_factory=dict)

    @property
    def orbit_dimension(self) -> int:
        return len(self.first_order)

    def first_order_element(self, coefficients: Sequence) -> LieTensor:
        terms: dict = {}
        for c, (a, rep) in zip(coefficients, self.first_order):
            if c:
                v = rep.scale(c)
                terms[a] = terms[a] + v if a in terms else v
        return LieTensor(self.base, 1, terms)

    def element(self, coefficients: Sequence) -> MCElement | Obstruction:
        """Extend the first-order solution with these coefficients, or return the obstruction met."""
        return extend_solution(self.algebra, self.first_order_element(coefficients))


def _assign_weights(algebra: ControllingAlgebra, A: ArtinRing, weight_range: Sequence[int]) -> ArtinRing:
    if A.weights is not None:
        return A
    support = [w for w in weight_range if algebra.cohomology(1, w)[0]]
    if not support:
        return A.with_weights([0] * len(A.params))
    if len(support) > 1 or len(A.params) > 1:
        raise InputError(
            f"first-order classes live in weights {support}; give the base ring explicit parameter weights"
        )
    return A.with_weights([-support[0]])


def extend_solution(algebra: ControllingAlgebra, xi: LieTensor) -> MCElement | Obstruction:
    """Extend a first-order solution order by order; stop at the first nonzero obstruction class."""
    A = xi.base
    bad = [a for a in xi.terms if A.degree(a) != 1]
    if bad:
        raise InputError("only order-one terms may be given")
    if mc_residual(xi).truncate(1):
        raise InputError("the first-order part is not closed")
    for k in range(2, A.order):
        res = mc_residual(xi)
        corrections = {}
        for a in (b for b in A.basis if A.degree(b) == k):
            ob = res.component(a)
            if ob is None:
                continue
            w = -A.weight(a)
            fix = algebra.solve_d(ob.scale(-1), 2, w)
            if fix is None:
                vec = coboundary_basis(algebra.complex, 2, w).reduce(algebra.coords(ob, 2, w))
                return Obstruction(a, w, k, vec)
            corrections[a] = fix
        xi = xi + LieTensor(A, 1, corrections)
    if mc_residual(xi):
        raise IntegrityError("order-by-order solution fails the Maurer-Cartan identity")
    return MCElement(A, xi)


def mc_solve(algebra: ControllingAlgebra, A: ArtinRing, weight_range: Iterable[int]) -> MCSolution:
    """Maurer-Cartan data over ``A``: first-order classes, extensions, obstructions.

    Parameter weights, when unset, are taken from the unique weight carrying
    first-order classes.  A nonvanishing obstruction is returned, not raised.
    """
    ws = list(weight_range)
    cert = algebra.replacement
    if A.order > 2 and cert.depth < 3:
        raise TruncationError(f"obstructions need generators down to degree -3; the replacement stops at {-cert.depth}")
    A = _assign_weights(algebra, A, ws)
    first = []
    for a in (b for b in A.basis if A.degree(b) == 1):
        w = -A.weight(a)
        _, reps = algebra.cohomology(1, w)
        first.extend((a, r) for r in reps)
    higher = {}
    for a in (b for b in A.basis if A.degree(b) >= 2):
        higher[a] = algebra.cohomology(1, -A.weight(a))[0]
    sol = MCSolution(A, algebra, first, [], [], higher)
    for j in range(len(first)):
        coeffs = [0] * len(first)
        coeffs[j] = 1
        out = sol.element(coeffs)
        if isinstance(out, Obstruction):
            sol.obstructions.append((j, out))
        else:
            sol.representatives.append(out)
    return sol


def _solve_gauge_step(algebra: ControllingAlgebra, A: ArtinRing, diff: LieTensor, k: int) -> LieTensor | None:
    terms = {}
    for a in (b for b in A.basis if A.degree(b) == k):
        target = diff.component(a)
        if target is None:
            continue
        y = algebra.solve_d(target.scale(-1), 1, -A.weight(a))
        if y is None:
            return None
        terms[a] = y
    return LieTensor(A, 0, terms)


def gauge_equivalent(algebra: ControllingAlgebra, x: MCElement, y: MCElement) -> LieTensor | None:
    """A degree-0 ``a`` with ``e^a * x = y``, searched order by order, or ``None``.

    At each order the missing part of ``a`` solves ``-d a_k = (y - e^a * x)_k``.
    The search is exhaustive when ``m_A^2 = 0``.
    """
    A = x.base
    a = LieTensor(A, 0)
    for k in range(1, A.order):
        diff = (y.xi - gauge_action(a, x.xi)).truncate(k)
        step = _solve_gauge_step(algebra, A, diff, k)
        if step is None:
            return None
        a = a + step
    if gauge_action(a, x.xi) != y.xi:
        return None
    if not exponential_intertwines(algebra, a, x, y):
        raise IntegrityError("gauge witness does not exponentiate to an isomorphism of deformed diagrams")
    return a


# ---------------------------------------------------------------------------
# R (x) A with a perturbed differential


TensorElement = dict  # Mono -> Poly of one object's algebra


def _t_add(u: TensorElement, v: TensorElement) -> TensorElement:
    out = dict(u)
    for a, p in v.items():
        out[a] = out[a] + p if a in out else p
    return {a: p for a, p in out.items() if p}


def _apply_lie(A: ArtinRing, x: LieTensor, obj, u: TensorElement) -> TensorElement:
    out: TensorElement = {}
    for b, fam in x.terms.items():
        alpha = fam.components[obj]
        for c, p in u.items():
            bc = A.mul(b, c)
            if bc is None:
                continue
            v = alpha(p)
            if v:
                out = _t_add(out, {bc: v})
    return out


def perturbed_d(alg, A: ArtinRing, xi: LieTensor, obj, u: TensorElement) -> TensorElement:
    """``(d + xi)`` on ``R_obj (x) A``."""
    out = {c: alg.d(p) for c, p in u.items()}
    out = {c: p for c, p in out.items() if p}
    return _t_add(out, _apply_lie(A, xi, obj, u))


def exponential(A: ArtinRing, a: LieTensor, obj, u: TensorElement) -> TensorElement:
    """``e^a`` on ``R_obj (x) A``; ``a`` is nilpotent so the series stops."""
    out = dict(u)
    term = u
    n = 1
    while term:
        term = _apply_lie(A, a, obj, term)
        term = {c: p.scale(Fraction(1, n)) for c, p in term.items()}
        out = _t_add(out, term)
        n += 1
    return out


def exponential_intertwines(algebra: ControllingAlgebra, a: LieTensor, x: MCElement, y: MCElement) -> bool:
    """``e^a (d + x) = (d + y) e^a`` on every generator of every object."""
    A = x.base
    R = algebra.replacement.diagram
    for obj, alg in R.objects.items():
        for g in alg.gens:
            u = {A.one: alg.gen(g.name)}
            lhs = exponential(A, a, obj, perturbed_d(alg, A, x.xi, obj, u))
            rhs = perturbed_d(alg, A, y.xi, obj, exponential(A, a, obj, u))
            if lhs != rhs:
                return False
    return True


def _tensor_basis(alg, A: ArtinRing, degree: int, weight: int) -> list:
    out = []
    for c in A.basis:
        for m in alg.basis(degree, weight - A.weight(c)):
            out.append((c, m))
    return out


def _tensor_coords(alg, A: ArtinRing, u: TensorElement, degree: int, weight: int) -> list[Fraction]:
    out = []
    for c in A.basis:
        w = weight - A.weight(c)
        if not alg.basis(degree, w):
            if u.get(c):
                raise InputError("element outside the slice")
            continue
        p = u.get(c)
        out.extend(alg.coords(p if p is not None else alg.zero(), degree, w))
    return out


@dataclass
class SliceReport:
    weight: int
    h0_dim: int
    expected_dim: int
    reduction_dim: int
    target_dim: int


@dataclass
class DeformedDiagram:
    """``H^0(R (x) A, d + xi)`` per object, with flatness and reduction data per weight slice."""

    base: ArtinRing
    xi: LieTensor
    h0: dict  # object -> list of relation strings presenting H^0 over A
    slices: dict  # object -> list[SliceReport]
    anchors_checked: int = 0

    def flat(self) -> bool:
        return all(r.h0_dim == r.expected_dim for reps in self.slices.values() for r in reps)

    def reduces(self) -> bool:
        return all(r.reduction_dim == r.target_dim for reps in self.slices.values() for r in reps)


def _image_basis(alg, A, xi, obj, weight) -> tuple[list, EchelonBasis]:
    tgt = _tensor_basis(alg, A, 0, weight)
    img = EchelonBasis(len(tgt))
    for c, m in _tensor_basis(alg, A, -1, weight):
        v = perturbed_d(alg, A, xi, obj, {c: alg.element_of(m)})
        img.add(_tensor_coords(alg, A, v, 0, weight))
    return tgt, img


def format_tensor(A: ArtinRing, u: dict) -> str:
    """``x*y + t`` style text for an element of ``R (x) A`` given as monomial -> polynomial."""
    parts = []
    for c, p in sorted(u.items()):
        terms = p.sorted_terms()
        if c == A.one:
            parts.append(str(p))
        elif len(terms) == 1 and not terms[0][0] and abs(terms[0][1]) == 1:
            parts.append(("-" if terms[0][1] < 0 else "") + A.format(c))
        elif len(terms) == 1 and not terms[0][0]:
            parts.append(f"{terms[0][1]}*{A.format(c)}")
        else:
            parts.append(f"({p})*{A.format(c)}")
    return " + ".join(parts).replace("+ -", "- ") or "0"


def realize(replacement: ReedyReplacement, x: MCElement, weight_bound: int | None = None) -> DeformedDiagram:
    """Compute ``H^0(R_a (x) A, d + xi)`` slice by slice and check flatness and reduction.

    Flatness uses ``dim H^0_W = sum_c dim S_(W - wt c)`` over the base
    monomials ``c``; reduction mod ``m_A`` must recover ``S_W``.  Arrows that
    are anchors must induce isomorphisms on every slice.
    """
    A = x.base
    xi = x.xi
    R = replacement.diagram
    S = replacement.target
    W = replacement.weight_bound if weight_bound is None else weight_bound
    if W > replacement.weight_bound:
        raise TruncationError(f"weight {W} exceeds the replacement's bound {replacement.weight_bound}")
    for obj, alg in R.objects.items():
        for g in alg.gens:
            u = {A.one: alg.gen(g.name)}
            if perturbed_d(alg, A, xi, obj, perturbed_d(alg, A, xi, obj, u)):
                raise InputError(f"(d + xi)^2 is not zero on generator {g.name} of object {obj}")
    h0, slices, images = {}, {}, {}
    for obj, alg in R.objects.items():
        rels = []
        for g in alg.gens:
            if g.degree == -1:
                v = perturbed_d(alg, A, xi, obj, {A.one: alg.gen(g.name)})
                rels.append(format_tensor(A, v))
        h0[obj] = rels
        reports = []
        for w in range(0, W + 1):
            tgt, img = _image_basis(alg, A, xi, obj, w)
            images[(obj, w)] = (tgt, img)
            h0_dim = len(tgt) - len(img)
            expected = sum(S.objects[obj].dim(0, w - A.weight(c)) for c in A.basis)
            red = EchelonBasis(len(tgt))
            for p in img.pivots:
                red.add_sparse(img._rows[p])
            for i, (c, _) in enumerate(tgt):
                if c != A.one:
                    red.add_sparse({i: Fraction(1)})
            reports.append(SliceReport(w, h0_dim, expected, len(tgt) - len(red), S.objects[obj].dim(0, w)))
        slices[obj] = reports
    out = DeformedDiagram(A, xi, h0, slices)
    if not out.flat():
        raise IntegrityError("a deformed object fails the slice-dimension flatness test")
    if not out.reduces():
        raise IntegrityError("a deformed object does not reduce to the original algebra")
    idx = R.index
    for m in idx.non_identities():
        if not (hasattr(m, "f") and is_anchor(m)):
            continue
        a, b = idx.source(m), idx.target(m)
        for w in range(0, W + 1):
            tgt_b, img_b = images[(b, w)]
            tgt_a, _ = images[(a, w)]
            span = EchelonBasis(len(tgt_b))
            for p in img_b.pivots:
                span.add_sparse(img_b._rows[p])
            for c, mono in tgt_a:
                v = {c: R.arrows[m](R.objects[a].element_of(mono))}
                span.add(_tensor_coords(R.objects[b], A, v, 0, w))
            if len(span) != len(tgt_b) or len(tgt_a) - len(images[(a, w)][1]) != len(tgt_b) - len(img_b):
                raise IntegrityError(f"anchor {idx.label(m)} is not an isomorphism on weight {w}")
        out.anchors_checked += 1
    return out
