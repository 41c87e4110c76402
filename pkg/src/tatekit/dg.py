"""Differential graded algebras, their morphisms and modules, computed slice by slice.

Every object here is a :class:`SliceComplex`: a cochain complex whose
``(degree, weight)`` pieces are finite-dimensional with an explicit,
deterministically ordered basis.  Cohomology is then rank arithmetic.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .errors import InputError
from .graded import (
    ONE,
    GeneratorSymbol,
    GradedRing,
    Monomial,
    Poly,
    mono_degree,
    mono_weight,
)
from .linalg import EchelonBasis, SparseMatrix, rank_kernel


class ModElement:
    """A finite linear combination of basis keys of a module."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict = {}
        if terms:
            for k, c in terms.items():
                if c:
                    self.terms[k] = c if isinstance(c, Fraction) else Fraction(c)

    def __add__(self, other: "ModElement") -> "ModElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            value = out.get(k, 0) + c
            if value:
                out[k] = value
            else:
                out.pop(k, None)
        return ModElement._raw(out)

    def __neg__(self):
        return ModElement._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ModElement":
        c = Fraction(c)
        if not c:
            return ModElement()
        return ModElement._raw({k: v * c for k, v in self.terms.items()})

    def __mul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    @classmethod
    def _raw(cls, terms):
        e = cls.__new__(cls)
        e.terms = terms
        return e

    def __eq__(self, other):
        if not isinstance(other, ModElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{k!r}" for k, c in self.terms.items())


class SliceComplex:
    """A cochain complex with finite ``(degree, weight)`` slices.

    Subclasses provide ``basis``, ``element_of``, ``coords``, ``d`` and
    ``zero``; matrices of the differential are derived and cached here.
    """

    def basis(self, degree: int, weight: int) -> list:
        raise NotImplementedError

    def element_of(self, key):
        raise NotImplementedError

    def coords(self, elem, degree: int, weight: int) -> list[Fraction]:
        raise NotImplementedError

    def d(self, elem):
        raise NotImplementedError

    def zero(self):
        raise NotImplementedError

    def dim(self, degree: int, weight: int) -> int:
        return len(self.basis(degree, weight))

    def from_vector(self, vec, degree: int, weight: int):
        out = self.zero()
        for key, c in zip(self.basis(degree, weight), vec):
            if c:
                out = out + self.element_of(key) * Fraction(c)
        return out

    def d_matrix(self, degree: int, weight: int) -> SparseMatrix:
        """Matrix of ``d`` from the ``(degree, weight)`` slice to ``(degree + 1, weight)``."""
        cache = self.__dict__.setdefault("_dmat_cache", {})
        key = (degree, weight)
        if key not in cache:
            src = self.basis(degree, weight)
            nrows = self.dim(degree + 1, weight)
            columns = [self.coords(self.d(self.element_of(b)), degree + 1, weight) for b in src]
            cache[key] = SparseMatrix.from_columns(nrows, columns)
        return cache[key]


def _index(keys: list) -> dict:
    return {k: i for i, k in enumerate(keys)}


# ---------------------------------------------------------------------------
# Leibniz expansion


@lru_cache(maxsize=1 << 16)
def leibniz_terms(m: Monomial, k: int) -> tuple:
    """Expansion of a degree-``k`` derivation on a monomial.

    Returns ``(coefficient, symbol, cofactor)`` triples meaning
    ``alpha(m) = sum coefficient * cofactor * alpha(symbol)`` with the
    cofactor acting on the left; the coefficient includes the exponent
    and the Koszul sign of moving ``alpha`` and ``alpha(symbol)`` into place.
    """
    total = mono_degree(m)
    out = []
    before = 0
    for i, (s, e) in enumerate(m):
        own = s.degree * e
        after = total - before - own
        sign = -1 if (k * before + (s.degree + k) * after) % 2 else 1
        rest = list(m)
        if e == 1:
            del rest[i]
        else:
            rest[i] = (s, e - 1)
        out.append((sign * e, s, tuple(rest)))
        before += own
    return tuple(out)


def derivation_eval(
    p: Poly,
    k: int,
    value_of: Callable[[GeneratorSymbol], object],
    cofactor_image: Callable[[Monomial], object],
    act: Callable[[object, object], object],
    zero,
):
    """Evaluate the degree-``k`` derivation determined by generator values on ``p``."""
    out = zero
    for m, c in p.terms.items():
        for coeff, s, rest in leibniz_terms(m, k):
            value = value_of(s)
            if not value:
                continue
            out = out + act(cofactor_image(rest), value) * (c * coeff)
    return out


# ---------------------------------------------------------------------------
# Algebras


class SemifreeAlgebra(SliceComplex):
    """K[gens] with a differential given on generators and extended by Leibniz."""

    def __init__(self, gens: Iterable[GeneratorSymbol], diff: Mapping | None = None, check: bool = True):
        self.ring = GradedRing(gens)
        self.gens = self.ring.gens
        self.diff: dict[str, Poly] = {}
        for key, value in (diff or {}).items():
            name = key.name if isinstance(key, GeneratorSymbol) else key
            g = self.ring.symbol(name)
            if not isinstance(value, Poly):
                raise InputError(f"differential of {name} must be a Poly")
            value = value.coerce(self.ring)
            if value:
                bd = value.bidegrees()
                if bd != {(g.degree + 1, g.weight)}:
                    raise InputError(
                        f"d({name}) must have degree {g.degree + 1} and weight {g.weight}, got {sorted(bd)}"
                    )
                self.diff[name] = value
        self._d_cache: dict[Monomial, Poly] = {}
        if check and not check_d_squared(self):
            bad = [g.name for g in self.gens if self.d(self.d(self.ring.gen(g.name)))]
            raise InputError(f"d^2 != 0 on generators {bad}")

    def __repr__(self):
        parts = [repr(g) for g in self.gens]
        ds = [f"d({n}) = {v}" for n, v in sorted(self.diff.items())]
        return f"SemifreeAlgebra({', '.join(parts)}; {'; '.join(ds)})"

    @property
    def base(self):
        return self

    def gen(self, name: str) -> Poly:
        return self.ring.gen(name)

    def zero(self) -> Poly:
        return self.ring.zero()

    def one(self) -> Poly:
        return self.ring.one()

    def basis(self, degree: int, weight: int) -> list[Monomial]:
        return self.ring.slice_basis(degree, weight)

    def element_of(self, key: Monomial) -> Poly:
        return self.ring.monomial(key)

    def coords(self, p: Poly, degree: int, weight: int) -> list[Fraction]:
        keys = self.basis(degree, weight)
        cache = self.__dict__.setdefault("_index_cache", {})
        idx = cache.get((degree, weight))
        if idx is None:
            idx = cache[(degree, weight)] = _index(keys)
        out = [Fraction(0)] * len(keys)
        for m, c in p.terms.items():
            try:
                out[idx[m]] = c
            except KeyError:
                raise InputError(f"{p} has a term outside slice ({degree}, {weight})") from None
        return out

    def normalize(self, p: Poly) -> Poly:
        return p

    def act(self, a: Poly, m: Poly) -> Poly:
        return a * m

    def _d_mono(self, m: Monomial) -> Poly:
        cached = self._d_cache.get(m)
        if cached is None:
            ring = self.ring
            cached = derivation_eval(
                ring.monomial(m),
                1,
                lambda s: self.diff.get(s.name),
                ring.monomial,
                lambda a, b: a * b,
                ring.zero(),
            )
            self._d_cache[m] = cached
        return cached

    def d(self, p: Poly) -> Poly:
        if p.ring != self.ring:
            p = p.coerce(self.ring)
        out = self.ring.zero()
        for m, c in p.terms.items():
            dm = self._d_mono(m)
            if dm:
                out = out + dm * c
        return out

    def extend(self, new_gens: Iterable[GeneratorSymbol], new_diff: Mapping[str, Poly], check: bool = True) -> "SemifreeAlgebra":
        """Semifree extension by ``new_gens``; old differentials are kept."""
        new_gens = list(new_gens)
        ring = self.ring.extend(new_gens)
        diff = {n: v.coerce(ring) for n, v in self.diff.items()}
        for n, v in new_diff.items():
            diff[n] = v.coerce(ring)
        return SemifreeAlgebra(ring.gens, diff, check=check)

    def generator_names(self) -> list[str]:
        return [g.name for g in self.gens]


def check_d_squared(alg: SemifreeAlgebra) -> bool:
    """``True`` iff ``d(d(g)) = 0`` for every generator (enough by Leibniz)."""
    return all(not alg.d(alg.d(alg.ring.gen(g.name))) for g in alg.gens)


def extend_leibniz(alg: SemifreeAlgebra, values: Mapping, k: int) -> Callable[[Poly], Poly]:
    """The unique degree-``k`` derivation of ``alg`` taking the given generator values.

    Missing generators map to zero.  All nonzero values must be homogeneous
    and shift weight by one common amount.
    """
    vals: dict[str, Poly] = {}
    weights = set()
    for key, value in values.items():
        name = key.name if isinstance(key, GeneratorSymbol) else key
        g = alg.ring.symbol(name)
        value = value.coerce(alg.ring)
        if not value:
            continue
        bd = value.bidegrees()
        if len(bd) != 1:
            raise InputError(f"value on {name} is not homogeneous: {value}")
        deg, wt = next(iter(bd))
        if deg != g.degree + k:
            raise InputError(f"value on {name} has degree {deg}, expected {g.degree + k}")
        weights.add(wt - g.weight)
        vals[name] = value
    if len(weights) > 1:
        raise InputError(f"values shift weight by different amounts {sorted(weights)}")
    ring = alg.ring

    def apply(p: Poly) -> Poly:
        return derivation_eval(
            p.coerce(ring), k, lambda s: vals.get(s.name), ring.monomial, lambda a, b: a * b, ring.zero()
        )

    return apply


class PresentedAlgebra(SliceComplex):
    """K[vars]/(relations) in degree 0, with weight-homogeneous relations.

    Equality is decided slice by slice: the weight-``w`` part of the ideal is
    the span of monomial multiples of relations, kept in echelon form over
    the monomial basis; its non-pivot monomials are the standard basis.
    """

    def __init__(self, vars: Iterable[GeneratorSymbol], relations: Iterable[Poly] = ()):
        vars = list(vars)
        for v in vars:
            if v.degree != 0:
                raise InputError(f"variable {v.name} must have degree 0, has {v.degree}")
        self.ring = GradedRing(vars)
        self.vars = self.ring.gens
        self.gens = self.vars
        rels = []
        for r in relations:
            r = r.coerce(self.ring)
            if not r:
                raise InputError("relations must be nonzero")
            weights = sorted({mono_weight(m) for m in r.terms})
            if len(weights) > 1:
                raise InputError(f"relation {r} is not weight-homogeneous: weights {weights}")
            rels.append(r)
        self.relations = rels
        self._ideal: dict[int, EchelonBasis] = {}
        self._standard: dict[int, list[Monomial]] = {}
        self._nf_cache: dict[Monomial, Poly] = {}

    def __repr__(self):
        return f"PresentedAlgebra({', '.join(repr(v) for v in self.vars)}; {', '.join(str(r) for r in self.relations)})"

    @property
    def base(self):
        return self

    def gen(self, name: str) -> Poly:
        return self.ring.gen(name)

    def zero(self) -> Poly:
        return self.ring.zero()

    def one(self) -> Poly:
        return self.ring.one()

    def ideal_slice(self, weight: int) -> EchelonBasis:
        basis = self._ideal.get(weight)
        if basis is None:
            monos = self.ring.slice_basis(0, weight)
            idx = _index(monos)
            basis = EchelonBasis(len(monos))
            for r in self.relations:
                rw = mono_weight(next(iter(r.terms)))
                if rw > weight:
                    continue
                for m in self.ring.slice_basis(0, weight - rw):
                    prod = self.ring.monomial(m) * r
                    basis.add_sparse({idx[mm]: c for mm, c in prod.terms.items()})
            self._ideal[weight] = basis
        return basis

    def basis(self, degree: int, weight: int) -> list[Monomial]:
        if degree != 0 or weight < 0:
            return []
        std = self._standard.get(weight)
        if std is None:
            monos = self.ring.slice_basis(0, weight)
            pivots = set(self.ideal_slice(weight).pivots)
            std = [m for i, m in enumerate(monos) if i not in pivots]
            self._standard[weight] = std
        return std

    def element_of(self, key: Monomial) -> Poly:
        return self.ring.monomial(key)

    def normal_form(self, p: Poly) -> Poly:
        """Canonical representative of ``p`` modulo the ideal, weight by weight."""
        p = p.coerce(self.ring)
        if not self.relations:
            return p
        out = {}
        for m, c in p.terms.items():
            nf = self._nf_cache.get(m)
            if nf is None:
                nf = self._normal_form_mono(m)
                self._nf_cache[m] = nf
            for mm, cc in nf.terms.items():
                value = out.get(mm, 0) + c * cc
                if value:
                    out[mm] = value
                else:
                    out.pop(mm, None)
        return Poly._raw(self.ring, out)

    def _normal_form_mono(self, m: Monomial) -> Poly:
        if mono_degree(m) != 0:
            return self.ring.zero()
        w = mono_weight(m)
        monos = self.ring.slice_basis(0, w)
        idx = _index(monos)
        rem = self.ideal_slice(w).reduce_sparse({idx[m]: Fraction(1)})
        return Poly(self.ring, {monos[i]: c for i, c in rem.items()})

    normalize = normal_form

    def coords(self, p: Poly, degree: int, weight: int) -> list[Fraction]:
        keys = self.basis(degree, weight)
        nf = self.normal_form(p)
        idx = _index(keys)
        out = [Fraction(0)] * len(keys)
        for m, c in nf.terms.items():
            try:
                out[idx[m]] = c
            except KeyError:
                raise InputError(f"{p} has a term outside slice ({degree}, {weight})") from None
        return out

    def d(self, p: Poly) -> Poly:
        return self.ring.zero()

    def act(self, a: Poly, m: Poly) -> Poly:
        return self.normal_form(a * m)

    def equal(self, p: Poly, q: Poly) -> bool:
        return not self.normal_form(p - q)


def normal_form(S: PresentedAlgebra, p: Poly) -> Poly:
    return S.normal_form(p)


# ---------------------------------------------------------------------------
# Morphisms


class DGMorphism:
    """An algebra map from a semifree algebra, given on generators.

    ``images`` maps generator names to elements of the target ring; missing
    generators go to zero.  Construction checks bidegrees and that the map
    commutes with the differentials on every generator.
    """

    def __init__(self, source, target, images: Mapping, check: bool = True):
        self.source = source
        self.target = target
        imgs: dict[str, Poly] = {}
        for key, value in images.items():
            name = key.name if isinstance(key, GeneratorSymbol) else key
            g = source.ring.symbol(name)
            value = target.normalize(value.coerce(target.ring))
            if value:
                bd = value.bidegrees()
                if bd != {(g.degree, g.weight)}:
                    raise InputError(
                        f"image of {name} must have degree {g.degree} and weight {g.weight}, got {sorted(bd)}"
                    )
                imgs[name] = value
        self.images = imgs
        self._mono_cache: dict[Monomial, Poly] = {}
        if check:
            if isinstance(source, PresentedAlgebra):
                for r in source.relations:
                    if self(r):
                        raise InputError(f"morphism does not kill the relation {r}")
            for g in source.gens:
                lhs = self(source.d(source.gen(g.name)))
                rhs = target.normalize(target.d(self.image(g.name)))
                if lhs != rhs:
                    raise InputError(f"morphism does not commute with d on generator {g.name}: {lhs} != {rhs}")

    @classmethod
    def identity(cls, alg) -> "DGMorphism":
        return cls(alg, alg, {g.name: alg.gen(g.name) for g in alg.gens}, check=False)

    def image(self, name: str) -> Poly:
        value = self.images.get(name)
        return value if value is not None else self.target.zero()

    def image_of_monomial(self, m: Monomial) -> Poly:
        cached = self._mono_cache.get(m)
        if cached is None:
            tgt = self.target
            if len(m) == 0:
                cached = tgt.one()
            elif len(m) == 1 and m[0][1] == 1:
                cached = self.image(m[0][0].name)
            else:
                out = tgt.one()
                for s, e in m:
                    img = self.image(s.name)
                    for _ in range(e):
                        out = tgt.normalize(out * img)
                        if not out:
                            break
                    if not out:
                        break
                cached = out
            self._mono_cache[m] = cached
        return cached

    def __call__(self, p: Poly) -> Poly:
        p = p.coerce(self.source.ring)
        out = self.target.zero()
        for m, c in p.terms.items():
            img = self.image_of_monomial(m)
            if img:
                out = out + img * c
        return out

    def compose(self, first: "DGMorphism") -> "DGMorphism":
        """``self`` after ``first``; images normalised eagerly."""
        if first.target.ring != self.source.ring:
            raise InputError("composition of morphisms with mismatched middle algebra")
        return DGMorphism(
            first.source,
            self.target,
            {g.name: self(first.image(g.name)) for g in first.source.gens},
            check=False,
        )

    def __mul__(self, other: "DGMorphism") -> "DGMorphism":
        return self.compose(other)

    def is_identity(self) -> bool:
        return self.source.ring == self.target.ring and all(
            self.image(g.name) == self.target.normalize(self.target.gen(g.name)) for g in self.source.gens
        )

    def __eq__(self, other):
        if not isinstance(other, DGMorphism):
            return NotImplemented
        if self is other:
            return True
        return (
            self.source.ring == other.source.ring
            and self.target.ring == other.target.ring
            and all(self.image(g.name) == other.image(g.name) for g in self.source.gens)
        )

    def inverse(self) -> "DGMorphism | None":
        """The inverse algebra map, or ``None`` when ``self`` is not invertible.

        Each target generator is pulled back by a slice solve; the candidate
        is accepted only if both composites are identities on generators.
        """
        from .linalg import solve

        src, tgt = self.source, self.target
        images = {}
        for g in tgt.gens:
            value = tgt.normalize(tgt.gen(g.name))
            pre = solve(self.slice_matrix(g.degree, g.weight), tgt.coords(value, g.degree, g.weight))
            if pre is None:
                return None
            images[g.name] = src.from_vector(pre, g.degree, g.weight)
        try:
            inv = DGMorphism(tgt, src, images, check=True)
        except InputError:
            return None
        if not self.compose(inv).is_identity() or not inv.compose(self).is_identity():
            return None
        return inv

    def slice_matrix(self, degree: int, weight: int) -> SparseMatrix:
        """Matrix of the map from the source slice to the target slice."""
        src = self.source.basis(degree, weight)
        nrows = self.target.dim(degree, weight)
        columns = [self.target.coords(self.image_of_monomial(m), degree, weight) for m in src]
        return SparseMatrix.from_columns(nrows, columns)

    def __repr__(self):
        body = ", ".join(f"{n} -> {v}" for n, v in sorted(self.images.items()))
        return f"DGMorphism({body})"


# ---------------------------------------------------------------------------
# Modules


class DGModule(SliceComplex):
    """A DG module over ``base`` (a semifree or presented algebra)."""

    base = None

    def zero(self) -> ModElement:
        return ModElement()

    def coords(self, elem: ModElement, degree: int, weight: int) -> list[Fraction]:
        keys = self.basis(degree, weight)
        idx = _index(keys)
        out = [Fraction(0)] * len(keys)
        for k, c in elem.terms.items():
            try:
                out[idx[k]] = c
            except KeyError:
                raise InputError(f"module element term {k!r} outside slice ({degree}, {weight})") from None
        return out

    def element_of(self, key) -> ModElement:
        return ModElement._raw({key: Fraction(1)})

    def act(self, a: Poly, m: ModElement) -> ModElement:
        raise NotImplementedError

    def key_bidegree(self, key) -> tuple[int, int]:
        raise NotImplementedError


class FreeModule(DGModule):
    """Free module on named generators ``(name, degree, weight)`` with a differential.

    Elements are combinations of keys ``(generator name, monomial)`` meaning
    ``monomial * generator``.  ``diff`` gives ``d`` of each module generator;
    ``d(a e) = d(a) e + (-1)^deg(a) a d(e)``.
    """

    def __init__(self, base, gens: Iterable[tuple[str, int, int]], diff: Mapping[str, ModElement] | None = None):
        self.base = base
        self.mod_gens = [(str(n), int(dg), int(wt)) for n, dg, wt in gens]
        self._gen_info = {n: (dg, wt) for n, dg, wt in self.mod_gens}
        if len(self._gen_info) != len(self.mod_gens):
            raise InputError("duplicate module generator names")
        self.diff = dict(diff or {})

    def generator(self, name: str) -> ModElement:
        return ModElement._raw({(name, ONE): Fraction(1)})

    def basis(self, degree: int, weight: int) -> list:
        out = []
        for n, dg, wt in self.mod_gens:
            for m in self.base.basis(degree - dg, weight - wt):
                out.append((n, m))
        return out

    def key_bidegree(self, key) -> tuple[int, int]:
        n, m = key
        dg, wt = self._gen_info[n]
        return dg + mono_degree(m), wt + mono_weight(m)

    def from_coefficients(self, coeffs: Mapping[str, Poly]) -> ModElement:
        out = {}
        for n, p in coeffs.items():
            for m, c in self.base.normalize(p).terms.items():
                out[(n, m)] = c
        return ModElement(out)

    def act(self, a: Poly, m: ModElement) -> ModElement:
        out = ModElement()
        base = self.base
        for (n, mono), c in m.terms.items():
            prod = base.normalize(a * base.ring.monomial(mono))
            for mm, cc in prod.terms.items():
                out = out + ModElement._raw({(n, mm): c * cc})
        return out

    def d(self, elem: ModElement) -> ModElement:
        base = self.base
        out = ModElement()
        for (n, mono), c in elem.terms.items():
            a = base.ring.monomial(mono)
            da = base.normalize(base.d(a))
            for mm, cc in da.terms.items():
                out = out + ModElement._raw({(n, mm): c * cc})
            de = self.diff.get(n)
            if de:
                sign = -1 if mono_degree(mono) % 2 else 1
                out = out + self.act(a, de).scale(c * sign)
        return out


class Shift(DGModule):
    """``M[-n]``: elements ``s^n x`` of degree ``deg(x) + n``.

    ``d(s^n x) = (-1)^n s^n d(x)`` and ``a (s^n x) = (-1)^(n deg a) s^n (a x)``;
    elements reuse the keys of ``M``.
    """

    def __init__(self, inner: DGModule, n: int):
        self.inner = inner
        self.n = n
        self.base = inner.base

    def basis(self, degree: int, weight: int) -> list:
        return self.inner.basis(degree - self.n, weight)

    def key_bidegree(self, key) -> tuple[int, int]:
        dg, wt = self.inner.key_bidegree(key)
        return dg + self.n, wt

    def d(self, elem: ModElement) -> ModElement:
        out = self.inner.d(elem)
        return -out if self.n % 2 else out

    def act(self, a: Poly, m: ModElement) -> ModElement:
        if not self.n % 2:
            return self.inner.act(a, m)
        even = Poly(a.ring, {mono: c for mono, c in a.terms.items() if mono_degree(mono) % 2 == 0})
        odd = a - even
        return self.inner.act(even, m) - self.inner.act(odd, m)


class Cone(DGModule):
    """Cone of the identity ``M + M[1]`` with ``d(x + s^-1 y) = dx + y - s^-1 dy``; acyclic.

    Keys are ``("x", k)`` for the ``M`` summand and ``("y", k)`` for ``s^-1 y``.
    """

    def __init__(self, inner: DGModule):
        self.inner = inner
        self.base = inner.base
        self._shifted = Shift(inner, -1)

    def basis(self, degree: int, weight: int) -> list:
        return [("x", k) for k in self.inner.basis(degree, weight)] + [
            ("y", k) for k in self._shifted.basis(degree, weight)
        ]

    def key_bidegree(self, key) -> tuple[int, int]:
        tag, k = key
        return (self.inner if tag == "x" else self._shifted).key_bidegree(k)

    @staticmethod
    def _split(elem: ModElement) -> tuple[ModElement, ModElement]:
        xs = {k: c for (tag, k), c in elem.terms.items() if tag == "x"}
        ys = {k: c for (tag, k), c in elem.terms.items() if tag == "y"}
        return ModElement._raw(xs), ModElement._raw(ys)

    @staticmethod
    def pack(x: ModElement, y: ModElement) -> ModElement:
        out = {("x", k): c for k, c in x.terms.items()}
        out.update({("y", k): c for k, c in y.terms.items()})
        return ModElement._raw(out)

    def d(self, elem: ModElement) -> ModElement:
        x, y = self._split(elem)
        return self.pack(self.inner.d(x) + y, -self.inner.d(y))

    def act(self, a: Poly, m: ModElement) -> ModElement:
        x, y = self._split(m)
        return self.pack(self.inner.act(a, x), self._shifted.act(a, y))


class AlgebraModule(DGModule):
    """An algebra regarded as a module over itself, with monomial keys."""

    def __init__(self, alg):
        self.alg = alg
        self.base = alg

    def basis(self, degree: int, weight: int) -> list:
        return self.alg.basis(degree, weight)

    def key_bidegree(self, key) -> tuple[int, int]:
        return mono_degree(key), mono_weight(key)

    def wrap(self, p: Poly) -> ModElement:
        return ModElement._raw(dict(self.alg.normalize(p).terms))

    def unwrap(self, m: ModElement) -> Poly:
        return Poly(self.alg.ring, m.terms)

    def d(self, elem: ModElement) -> ModElement:
        return self.wrap(self.alg.d(self.unwrap(elem)))

    def act(self, a: Poly, m: ModElement) -> ModElement:
        return self.wrap(a * self.unwrap(m))


class TrivialExtension(DGModule):
    """The square-zero extension ``A + M`` as a complex; keys ``("a", mono)`` and ``("m", k)``.

    Multiplication is ``(a + m)(b + n) = ab + a n + (-1)^(deg m deg b) b m``;
    a degree-0 derivation ``A -> M`` is the same as a section ``a -> a + alpha(a)``.
    """

    def __init__(self, alg: SemifreeAlgebra, module: DGModule):
        self.alg = alg
        self.module = module
        self.base = alg

    def basis(self, degree: int, weight: int) -> list:
        return [("a", m) for m in self.alg.basis(degree, weight)] + [
            ("m", k) for k in self.module.basis(degree, weight)
        ]

    def key_bidegree(self, key) -> tuple[int, int]:
        tag, k = key
        if tag == "a":
            return mono_degree(k), mono_weight(k)
        return self.module.key_bidegree(k)

    def pack(self, a: Poly, m: ModElement) -> ModElement:
        out = {("a", k): c for k, c in a.terms.items()}
        out.update({("m", k): c for k, c in m.terms.items()})
        return ModElement._raw(out)

    def split(self, elem: ModElement) -> tuple[Poly, ModElement]:
        a = Poly(self.alg.ring, {k: c for (tag, k), c in elem.terms.items() if tag == "a"})
        m = ModElement._raw({k: c for (tag, k), c in elem.terms.items() if tag == "m"})
        return a, m

    def multiply(self, u: ModElement, v: ModElement) -> ModElement:
        a, m = self.split(u)
        b, n = self.split(v)
        cross = self.module.act(a, n)
        for k, c in m.terms.items():
            deg_m = self.module.key_bidegree(k)[0]
            for mb, cb in b.terms.items():
                sign = -1 if (deg_m * mono_degree(mb)) % 2 else 1
                cross = cross + self.module.act(self.alg.ring.monomial(mb), ModElement._raw({k: c})).scale(cb * sign)
        return self.pack(a * b, cross)

    def d(self, elem: ModElement) -> ModElement:
        a, m = self.split(elem)
        return self.pack(self.alg.d(a), self.module.d(m))

    def act(self, a: Poly, elem: ModElement) -> ModElement:
        return self.multiply(self.pack(a, ModElement()), elem)


class DirectSum(DGModule):
    """Finite direct sum of modules over one base; keys are ``(summand index, key)``."""

    def __init__(self, summands: Iterable[DGModule]):
        self.summands = list(summands)
        if not self.summands:
            raise InputError("direct sum needs at least one summand")
        self.base = self.summands[0].base

    def basis(self, degree: int, weight: int) -> list:
        return [(i, k) for i, m in enumerate(self.summands) for k in m.basis(degree, weight)]

    def key_bidegree(self, key) -> tuple[int, int]:
        i, k = key
        return self.summands[i].key_bidegree(k)

    def inject(self, i: int, elem: ModElement) -> ModElement:
        return ModElement._raw({(i, k): c for k, c in elem.terms.items()})

    def component(self, i: int, elem: ModElement) -> ModElement:
        return ModElement._raw({k: c for (j, k), c in elem.terms.items() if j == i})

    def d(self, elem: ModElement) -> ModElement:
        out = ModElement()
        for i, m in enumerate(self.summands):
            out = out + self.inject(i, m.d(self.component(i, elem)))
        return out

    def act(self, a: Poly, elem: ModElement) -> ModElement:
        out = ModElement()
        for i, m in enumerate(self.summands):
            out = out + self.inject(i, m.act(a, self.component(i, elem)))
        return out


# ---------------------------------------------------------------------------
# Cohomology


def cohomology_slice(c: SliceComplex, degree: int, weight: int) -> tuple[int, list]:
    """``dim H^degree`` in the given weight and cocycle representatives of a basis.

    Representatives are kernel vectors added greedily to an echelon basis of
    the coboundaries, so the choice is reproducible.
    """
    n = c.dim(degree, weight)
    if n == 0:
        return 0, []
    _, kernel = rank_kernel(c.d_matrix(degree, weight))
    if not kernel:
        return 0, []
    boundaries = coboundary_basis(c, degree, weight)
    reps = []
    for v in kernel:
        if boundaries.add(v):
            reps.append(c.from_vector(v, degree, weight))
    return len(reps), reps


def coboundary_basis(c: SliceComplex, degree: int, weight: int) -> EchelonBasis:
    """Echelon basis of ``d(C^(degree-1))`` inside the ``(degree, weight)`` slice."""
    n = c.dim(degree, weight)
    basis = EchelonBasis(n)
    incoming = c.d_matrix(degree - 1, weight)
    columns: dict[int, dict[int, Fraction]] = {}
    for (r, col), v in incoming.entries.items():
        columns.setdefault(col, {})[r] = v
    for col in sorted(columns):
        basis.add_sparse(columns[col])
    return basis
