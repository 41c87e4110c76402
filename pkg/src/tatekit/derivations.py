"""Derivation complexes ``Der*(R, M)``, the Lie bracket on ``Der*(R, R)``, and tangent cohomology."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .dg import DGMorphism, SemifreeAlgebra, SliceComplex, cohomology_slice, derivation_eval
from .errors import InputError, TruncationError
from .graded import GeneratorSymbol, Poly
from .linalg import SparseMatrix


class Derivation:
    """A degree-``degree``, weight-``weight`` derivation ``R -> M`` along ``structure``.

    ``values`` maps generator names of ``R`` to elements of ``M``.  When
    ``structure`` is ``None`` the target's base algebra must be ``R`` itself.
    Evaluation uses ``alpha(ab) = alpha(a) f(b) + (-1)^(k deg a) f(a) alpha(b)``.
    """

    __slots__ = ("source", "target", "structure", "degree", "weight", "values")

    def __init__(self, source: SemifreeAlgebra, target, degree: int, weight: int, values: Mapping, structure: DGMorphism | None = None):
        self.source = source
        self.target = target
        self.structure = structure
        self.degree = degree
        self.weight = weight
        vals = {}
        for key, v in values.items():
            name = key.name if isinstance(key, GeneratorSymbol) else key
            source.ring.symbol(name)
            if v:
                vals[name] = v
        self.values = vals

    def value(self, name: str):
        v = self.values.get(name)
        return v if v is not None else self.target.zero()

    def _cofactor(self, m):
        if self.structure is None:
            return self.source.ring.monomial(m)
        return self.structure.image_of_monomial(m)

    def __call__(self, p: Poly):
        return derivation_eval(
            p.coerce(self.source.ring),
            self.degree,
            lambda s: self.values.get(s.name),
            self._cofactor,
            self.target.act,
            self.target.zero(),
        )

    def _like(self, values) -> "Derivation":
        return Derivation(self.source, self.target, self.degree, self.weight, values, self.structure)

    def _check(self, other: "Derivation"):
        if other.source is not self.source and other.source.ring != self.source.ring:
            raise InputError("derivations with different sources")
        if (other.degree, other.weight) != (self.degree, self.weight):
            raise InputError(
                f"cannot add derivations of bidegrees {(self.degree, self.weight)} and {(other.degree, other.weight)}"
            )

    def __add__(self, other: "Derivation") -> "Derivation":
        if not self:
            return other
        if not other:
            return self
        self._check(other)
        names = set(self.values) | set(other.values)
        return self._like({n: self.value(n) + other.value(n) for n in names})

    def __neg__(self):
        return self._like({n: -v for n, v in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Derivation":
        c = Fraction(c)
        return self._like({n: v * c for n, v in self.values.items()})

    def __mul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.values)

    def is_zero(self) -> bool:
        return not self.values

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.values == other.values and (not self.values or self.degree == other.degree)

    def __repr__(self):
        body = ", ".join(f"{n} -> {v}" for n, v in sorted(self.values.items()))
        return f"Derivation[{self.degree},{self.weight}]({body})"


def zero_derivation(source: SemifreeAlgebra, target, degree: int, weight: int, structure=None) -> Derivation:
    return Derivation(source, target, degree, weight, {}, structure)


def der_differential(alpha: Derivation) -> Derivation:
    """``(d alpha)(x) = d(alpha(x)) - (-1)^deg(alpha) alpha(dx)`` on every generator."""
    R, M = alpha.source, alpha.target
    sign = -1 if alpha.degree % 2 else 1
    values = {}
    for g in R.gens:
        term = M.d(alpha.value(g.name))
        dx = R.diff.get(g.name)
        if dx:
            term = term - alpha(dx) * sign
        if term:
            values[g.name] = term
    return Derivation(R, M, alpha.degree + 1, alpha.weight, values, alpha.structure)


def dgla_bracket(alpha: Derivation, beta: Derivation) -> Derivation:
    """Graded commutator ``[a, b] = a b - (-1)^(deg a deg b) b a`` of endomorphism derivations."""
    R = alpha.source
    if beta.source.ring != R.ring or alpha.target.base is not alpha.source or beta.target.base is not beta.source:
        raise InputError("bracket needs two derivations of one algebra into itself")
    if alpha.structure is not None or beta.structure is not None:
        raise InputError("bracket needs derivations along the identity")
    sign = -1 if (alpha.degree * beta.degree) % 2 else 1
    values = {}
    for g in R.gens:
        term = alpha(beta.value(g.name)) - beta(alpha.value(g.name)) * sign
        if term:
            values[g.name] = term
    return Derivation(R, alpha.target, alpha.degree + beta.degree, alpha.weight + beta.weight, values)


class DerComplex(SliceComplex):
    """``Der*(R, M)`` as a slice complex: slice ``(k, w)`` holds derivations of degree k, weight w.

    A basis element is a pair ``(generator name, target basis key)``: the
    derivation sending that generator to that basis element and every other
    generator to zero.
    """

    def __init__(self, source: SemifreeAlgebra, target, structure: DGMorphism | None = None):
        if structure is None and target.base is not source:
            raise InputError("a structure morphism is needed when the target is not over the source")
        self.source = source
        self.target = target
        self.structure = structure
        self._basis: dict[tuple[int, int], list] = {}

    def basis(self, degree: int, weight: int) -> list:
        key = (degree, weight)
        out = self._basis.get(key)
        if out is None:
            out = []
            for g in self.source.gens:
                for b in self.target.basis(g.degree + degree, g.weight + weight):
                    out.append((g.name, b))
            self._basis[key] = out
        return out

    def element_of(self, key) -> Derivation:
        raise NotImplementedError("use element_in to supply the bidegree")

    def element_in(self, key, degree: int, weight: int) -> Derivation:
        name, b = key
        return Derivation(self.source, self.target, degree, weight, {name: self.target.element_of(b)}, self.structure)

    def zero(self, degree: int = 0, weight: int = 0) -> Derivation:
        return zero_derivation(self.source, self.target, degree, weight, self.structure)

    def from_vector(self, vec, degree: int, weight: int) -> Derivation:
        values: dict[str, object] = {}
        for (name, b), c in zip(self.basis(degree, weight), vec):
            if c:
                term = self.target.element_of(b) * Fraction(c)
                values[name] = values[name] + term if name in values else term
        return Derivation(self.source, self.target, degree, weight, values, self.structure)

    def coords(self, alpha: Derivation, degree: int, weight: int) -> list[Fraction]:
        out: list[Fraction] = []
        for g in self.source.gens:
            keys = self.target.basis(g.degree + degree, g.weight + weight)
            if not keys:
                if alpha.values.get(g.name):
                    raise InputError(f"value on {g.name} lies outside slice ({degree}, {weight})")
                continue
            out.extend(self.target.coords(alpha.value(g.name), g.degree + degree, g.weight + weight))
        return out

    def d(self, alpha: Derivation) -> Derivation:
        return der_differential(alpha)

    def d_matrix(self, degree: int, weight: int) -> SparseMatrix:
        cache = self.__dict__.setdefault("_dmat_cache", {})
        key = (degree, weight)
        if key not in cache:
            src = self.basis(degree, weight)
            nrows = self.dim(degree + 1, weight)
            columns = [
                self.coords(der_differential(self.element_in(b, degree, weight)), degree + 1, weight) for b in src
            ]
            cache[key] = SparseMatrix.from_columns(nrows, columns)
        return cache[key]

    def slice(self, degree: int, weight: int) -> "DGLieSlice":
        basis = [self.element_in(b, degree, weight) for b in self.basis(degree, weight)]
        return DGLieSlice(degree, weight, basis, self.d_matrix(degree, weight))


@dataclass
class DGLieSlice:
    degree: int
    weight: int
    basis: list
    differential_matrix: SparseMatrix


def der_slice_basis(R: SemifreeAlgebra, M, k: int, w: int, structure: DGMorphism | None = None) -> list[Derivation]:
    """One derivation per generator ``g`` and basis element of ``M`` in bidegree ``(deg g + k, wt g + w)``."""
    cx = DerComplex(R, M, structure)
    return [cx.element_in(b, k, w) for b in cx.basis(k, w)]


def tangent_complex(fact) -> DerComplex:
    """``Der*(R, S)`` for the resolution ``R -> S`` recorded in a factorization result."""
    return DerComplex(fact.middle, fact.projection.target, fact.projection)


def meaningful_weights(R: SemifreeAlgebra, k: int, upper: int) -> range:
    """Derivation weights from the most negative one with a possibly nonzero slice up to ``upper``."""
    ws = [g.weight for g in R.gens if g.degree == -k]
    low = -max(ws) if ws else 0
    return range(low, upper + 1)


def tangent_cohomology(fact, i: int, weight_range: Iterable[int]) -> dict[int, int]:
    """``dim T^i`` of the target of ``fact`` in each derivation weight."""
    cert = fact.certificate
    if cert is not None and cert.degree_depth < i + 1:
        raise TruncationError(
            f"T^{i} needs generators down to degree {-(i + 1)}; the resolution stops at depth {cert.degree_depth}"
        )
    cx = tangent_complex(fact)
    return {w: cohomology_slice(cx, i, w)[0] for w in weight_range}
