"""Graded-commutative polynomial algebras with Koszul signs.

Generators carry a cohomological degree <= 0 and a weight >= 1.  Monomials
are tuples of ``(symbol, exponent)`` pairs sorted by the global symbol
order (degree descending, then name); odd symbols appear with exponent 1.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple

from .errors import InputError


class _Symbol(NamedTuple):
    name: str
    degree: int
    weight: int


class GeneratorSymbol(_Symbol):
    """A free generator of cohomological ``degree`` <= 0 and ``weight`` >= 1."""

    __slots__ = ()

    def __new__(cls, name: str, degree: int, weight: int):
        if not isinstance(name, str) or not name:
            raise InputError(f"generator name must be a non-empty string, got {name!r}")
        if degree > 0:
            raise InputError(f"generator {name} has positive degree {degree}")
        if weight < 1:
            raise InputError(f"generator {name} has weight {weight}; weights must be >= 1")
        return super().__new__(cls, name, int(degree), int(weight))

    @property
    def odd(self) -> bool:
        return self.degree % 2 != 0

    def __repr__(self):
        return f"{self.name}[{self.degree},{self.weight}]"


def symbol_key(s: GeneratorSymbol) -> tuple[int, str]:
    return (-s.degree, s.name)


Monomial = tuple  # tuple[tuple[GeneratorSymbol, int], ...]
ONE: Monomial = ()


def mono_degree(m: Monomial) -> int:
    return sum(s.degree * e for s, e in m)


def mono_weight(m: Monomial) -> int:
    return sum(s.weight * e for s, e in m)


def mono_sort_key(m: Monomial):
    """Descending lexicographic order on exponent vectors in the global symbol order."""
    return tuple((0, -s.degree, s.name, -e) for s, e in m) + ((1,),)


def make_monomial(factors: Iterable[tuple[GeneratorSymbol, int]]) -> tuple[int, Monomial]:
    """Sort arbitrary factors into a monomial; return ``(sign, monomial)``.

    ``sign`` is 0 when an odd symbol occurs twice.
    """
    result: tuple[int, Monomial] = (1, ONE)
    for s, e in factors:
        if e < 0:
            raise InputError(f"negative exponent on {s.name}")
        if e == 0:
            continue
        if s.odd and e > 1:
            return 0, ONE
        sign, mono = mono_mul(result[1], ((s, e),))
        if sign == 0:
            return 0, ONE
        result = (result[0] * sign, mono)
    return result


@lru_cache(maxsize=1 << 18)
def mono_mul(a: Monomial, b: Monomial) -> tuple[int, Monomial]:
    """Product of two monomials as ``(sign, monomial)``; sign 0 means the product vanishes.

    The sign counts the odd symbols of ``b`` that must move past odd symbols
    of ``a`` that sort after them.
    """
    if not a:
        return 1, b
    if not b:
        return 1, a
    out = []
    i = j = 0
    odd_a_remaining = sum(1 for s, _ in a if s.odd)
    inversions = 0
    while i < len(a) and j < len(b):
        sa, ea = a[i]
        sb, eb = b[j]
        if sa == sb:
            if sa.odd:
                return 0, ONE
            out.append((sa, ea + eb))
            i += 1
            j += 1
        elif symbol_key(sa) < symbol_key(sb):
            out.append(a[i])
            if sa.odd:
                odd_a_remaining -= 1
            i += 1
        else:
            out.append(b[j])
            if sb.odd:
                inversions += odd_a_remaining
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return (-1 if inversions % 2 else 1), tuple(out)


class GradedRing:
    """The free graded-commutative algebra K[gens]."""

    __slots__ = ("gens", "_by_name", "_slices", "_hash")

    def __init__(self, gens: Iterable[GeneratorSymbol]):
        gens = list(gens)
        by_name: dict[str, GeneratorSymbol] = {}
        for g in gens:
            if not isinstance(g, GeneratorSymbol):
                raise InputError(f"expected a GeneratorSymbol, got {g!r}")
            if g.name in by_name:
                raise InputError(f"duplicate generator name {g.name}")
            by_name[g.name] = g
        self.gens: tuple[GeneratorSymbol, ...] = tuple(sorted(gens, key=symbol_key))
        self._by_name = by_name
        self._slices: dict[tuple[int, int], list[Monomial]] = {}
        self._hash = hash(self.gens)

    def __eq__(self, other):
        return isinstance(other, GradedRing) and self.gens == other.gens

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "K[" + ", ".join(repr(g) for g in self.gens) + "]"

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def symbol(self, name: str) -> GeneratorSymbol:
        try:
            return self._by_name[name]
        except KeyError:
            raise InputError(f"unknown generator {name}") from None

    def gen(self, name: str) -> "Poly":
        return Poly(self, {((self.symbol(name), 1),): Fraction(1)})

    def one(self) -> "Poly":
        return Poly(self, {ONE: Fraction(1)})

    def zero(self) -> "Poly":
        return Poly(self, {})

    def const(self, c) -> "Poly":
        return Poly(self, {ONE: Fraction(c)})

    def monomial(self, m: Monomial, coeff=1) -> "Poly":
        return Poly(self, {m: Fraction(coeff)})

    def extend(self, new_gens: Iterable[GeneratorSymbol]) -> "GradedRing":
        return GradedRing(list(self.gens) + list(new_gens))

    def is_subring_of(self, other: "GradedRing") -> bool:
        return all(other._by_name.get(g.name) == g for g in self.gens)

    def slice_basis(self, degree: int, weight: int) -> list[Monomial]:
        key = (degree, weight)
        cached = self._slices.get(key)
        if cached is None:
            cached = slice_basis(self.gens, degree, weight)
            self._slices[key] = cached
        return cached


class Poly:
    """A sparse element of a :class:`GradedRing` with rational coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: GradedRing, terms=None):
        self.ring = ring
        self.terms: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[m] = c if isinstance(c, Fraction) else Fraction(c)

    @classmethod
    def _raw(cls, ring: GradedRing, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        return p

    def _check(self, other: "Poly"):
        if other.ring != self.ring:
            raise InputError(f"polynomials over different generator sets: {self.ring} vs {other.ring}")

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in other.terms.items():
            value = terms.get(m, 0) + c
            if value:
                terms[m] = value
            else:
                terms.pop(m, None)
        return Poly._raw(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly._raw(self.ring, {})
        return Poly._raw(self.ring, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        out = self.ring.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def bidegrees(self) -> set[tuple[int, int]]:
        return {(mono_degree(m), mono_weight(m)) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.bidegrees()) <= 1

    def bidegree(self) -> tuple[int, int] | None:
        """``(degree, weight)`` of a homogeneous polynomial; ``None`` for zero."""
        degs = self.bidegrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise InputError(f"{self} is not homogeneous: bidegrees {sorted(degs)}")
        return next(iter(degs))

    @property
    def degree(self) -> int | None:
        bd = self.bidegree()
        return None if bd is None else bd[0]

    @property
    def weight(self) -> int | None:
        bd = self.bidegree()
        return None if bd is None else bd[1]

    def component(self, degree: int, weight: int) -> "Poly":
        return Poly._raw(
            self.ring,
            {m: c for m, c in self.terms.items() if mono_degree(m) == degree and mono_weight(m) == weight},
        )

    def coerce(self, ring: GradedRing) -> "Poly":
        """View ``self`` inside a ring whose generators include ours."""
        if ring == self.ring:
            return self
        if not self.ring.is_subring_of(ring):
            raise InputError(f"{self.ring} is not contained in {ring}")
        return Poly._raw(ring, dict(self.terms))

    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: (mono_weight(t[0]), mono_sort_key(t[0])))

    def __repr__(self):
        return format_poly(self)

    __str__ = __repr__


def format_monomial(m: Monomial) -> str:
    if not m:
        return "1"
    return "*".join(s.name if e == 1 else f"{s.name}^{e}" for s, e in m)


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for m, c in p.sorted_terms():
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not m:
            body = str(a)
        elif a == 1:
            body = format_monomial(m)
        else:
            body = f"{a}*{format_monomial(m)}"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def multiply(p: Poly, q: Poly) -> Poly:
    """Product in the graded-commutative algebra, with Koszul signs."""
    if p.ring != q.ring:
        raise InputError(f"polynomials over different generator sets: {p.ring} vs {q.ring}")
    terms: dict[Monomial, Fraction] = {}
    for ma, ca in p.terms.items():
        for mb, cb in q.terms.items():
            sign, m = mono_mul(ma, mb)
            if not sign:
                continue
            value = terms.get(m, 0) + (ca * cb if sign > 0 else -(ca * cb))
            if value:
                terms[m] = value
            else:
                terms.pop(m, None)
    return Poly._raw(p.ring, terms)


def slice_basis(gens: Iterable[GeneratorSymbol], degree: int, weight: int) -> list[Monomial]:
    """All monomials of exactly ``(degree, weight)``, in descending lex order."""
    ordered = sorted(gens, key=symbol_key)
    if weight < 0 or degree > 0:
        return []
    out: list[Monomial] = []

    def rec(i: int, deg_left: int, wt_left: int, acc: list):
        if deg_left > 0:
            return
        if wt_left == 0:
            if deg_left == 0:
                out.append(tuple(acc))
            return
        if i == len(ordered):
            return
        s = ordered[i]
        max_e = 1 if s.odd else wt_left // s.weight
        for e in range(max_e, -1, -1):
            if e:
                acc.append((s, e))
            rec(i + 1, deg_left - s.degree * e, wt_left - s.weight * e, acc)
            if e:
                acc.pop()

    rec(0, degree, weight, [])
    out.sort(key=mono_sort_key)
    return out
