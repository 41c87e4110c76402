"""Index categories, truncated nerves and diagrams of DG-algebras.

Covers finite small categories given by composition tables, the category
of strings ``N(B)_{<=k}`` with its forgetful functor to ``B`` and the
quasi-inverse ``tau``, latching objects and Reedy cofibrant replacement over
direct indices whose latching categories are posets, compatible families of
derivations, and the extension recursion for cosimplicial groups.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .derivations import DerComplex, der_differential, dgla_bracket
from .dg import DGMorphism, PresentedAlgebra, SemifreeAlgebra, SliceComplex
from .errors import InputError, IntegrityError, PreconditionError, UnsupportedIndexError
from .factorization import tate_factorize
from .graded import GeneratorSymbol
from .linalg import SparseMatrix, rank_kernel, solve


# ---------------------------------------------------------------------------
# Small categories


class SmallCategory:
    """A finite category given by an explicit composition table.

    ``composition[(g, f)]`` is ``g o f`` (apply ``f`` first) and must be
    present for every composable pair.  Objects and morphisms can be any
    hashable values; ``label`` gives each morphism a unique short string.
    """

    def __init__(
        self,
        objects: Sequence[Hashable],
        morphisms: Mapping[Hashable, tuple],
        composition: Mapping[tuple, Hashable],
        identities: Mapping[Hashable, Hashable],
        check: bool = True,
    ):
        self.objects = list(objects)
        self._object_set = set(self.objects)
        if len(self._object_set) != len(self.objects):
            raise InputError("repeated object in category")
        self.morphisms = list(morphisms)
        self._ends = {m: tuple(ends) for m, ends in morphisms.items()}
        self._comp = dict(composition)
        self.identities = dict(identities)
        self._hom: dict[tuple, list] = {}
        for m in self.morphisms:
            a, b = self._ends[m]
            if a not in self._object_set or b not in self._object_set:
                raise InputError(f"morphism {m} has an endpoint outside the object list")
            self._hom.setdefault((a, b), []).append(m)
        self._identity_set = set(self.identities.values())
        self._labels = self._make_labels()
        self._by_label = {v: k for k, v in self._labels.items()}
        if check:
            self.validate()

    def _make_labels(self) -> dict:
        seen: dict[str, int] = {}
        out = {}
        for m in self.morphisms:
            base = (m.short() if hasattr(m, "short") else str(m)).replace("@", "_")
            j = seen.get(base, 0)
            seen[base] = j + 1
            out[m] = base if j == 0 else f"{base}#{j}"
        return out

    def label(self, m) -> str:
        return self._labels[m]

    def by_label(self, label: str):
        return self._by_label[label]

    def source(self, m):
        return self._ends[m][0]

    def target(self, m):
        return self._ends[m][1]

    def hom(self, a, b) -> list:
        return list(self._hom.get((a, b), ()))

    def identity(self, a):
        return self.identities[a]

    def is_identity(self, m) -> bool:
        return m in self._identity_set

    def non_identities(self) -> list:
        return [m for m in self.morphisms if m not in self._identity_set]

    def compose(self, g, f):
        """``g o f``."""
        if self._ends[f][1] != self._ends[g][0]:
            raise InputError(f"cannot compose {g} after {f}")
        return self._comp[(g, f)]

    def composable_pairs(self) -> Iterable[tuple]:
        for f in self.morphisms:
            for g in self.morphisms_from(self._ends[f][1]):
                yield g, f

    def morphisms_from(self, a) -> list:
        out = []
        for b in self.objects:
            out.extend(self._hom.get((a, b), ()))
        return out

    def morphisms_into(self, a) -> list:
        out = []
        for b in self.objects:
            out.extend(self._hom.get((b, a), ()))
        return out

    def validate(self):
        for a in self.objects:
            i = self.identities.get(a)
            if i is None or self._ends.get(i) != (a, a):
                raise InputError(f"object {a} lacks an identity morphism")
        for g, f in self.composable_pairs():
            h = self._comp.get((g, f))
            if h is None:
                raise InputError(f"composition table has no entry for {g} o {f}")
            if self._ends.get(h) != (self._ends[f][0], self._ends[g][1]):
                raise InputError(f"{g} o {f} = {h} has the wrong source or target")
        for m in self.morphisms:
            a, b = self._ends[m]
            if self._comp[(m, self.identities[a])] != m or self._comp[(self.identities[b], m)] != m:
                raise InputError(f"identity law fails for {m}")
        for g, f in self.composable_pairs():
            gf = self._comp[(g, f)]
            for h in self.morphisms_from(self._ends[g][1]):
                if self._comp[(h, gf)] != self._comp[(self._comp[(h, g)], f)]:
                    raise InputError(f"associativity fails for {h}, {g}, {f}")

    def subcategory(self, objects: Iterable, keep: Callable[[Hashable], bool] = lambda m: True) -> "SmallCategory":
        """Subcategory on ``objects`` with the morphisms accepted by ``keep`` (identities always kept)."""
        objs = [a for a in self.objects if a in set(objects)]
        chosen = set(objs)
        morphs = {
            m: self._ends[m]
            for m in self.morphisms
            if self._ends[m][0] in chosen and self._ends[m][1] in chosen and (self.is_identity(m) or keep(m))
        }
        comp = {}
        for (g, f), h in self._comp.items():
            if g in morphs and f in morphs:
                if h not in morphs:
                    raise InputError(f"subcategory is not closed under composition: {g} o {f} = {h}")
                comp[(g, f)] = h
        sub = SmallCategory(objs, morphs, comp, {a: self.identities[a] for a in objs})
        sub.__dict__.update({k: v for k, v in self.__dict__.items() if k in ("base", "k")})
        return sub

    def isomorphisms(self) -> list:
        out = []
        for m in self.morphisms:
            a, b = self._ends[m]
            for n in self.hom(b, a):
                if self._comp[(n, m)] == self.identities[a] and self._comp[(m, n)] == self.identities[b]:
                    out.append(m)
                    break
        return out

    def direct_degrees(self) -> dict:
        """Degree of each object for a direct category: length of the longest chain of non-identity arrows into it.

        Raises ``UnsupportedIndexError`` when a non-identity endomorphism or a
        cycle makes the category non-direct.
        """
        preds: dict = {a: set() for a in self.objects}
        for m in self.non_identities():
            a, b = self._ends[m]
            if a == b:
                raise UnsupportedIndexError(f"non-identity endomorphism {m} of {a}: the index is not direct")
            preds[b].add(a)
        degree: dict = {}
        visiting: set = set()

        def visit(a):
            if a in degree:
                return degree[a]
            if a in visiting:
                raise UnsupportedIndexError(f"cycle of arrows through {a}: the index is not direct")
            visiting.add(a)
            degree[a] = 1 + max((visit(p) for p in preds[a]), default=-1)
            visiting.discard(a)
            return degree[a]

        for a in self.objects:
            visit(a)
        return degree

    def __repr__(self):
        return f"SmallCategory({len(self.objects)} objects, {len(self.morphisms)} morphisms)"

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_table(cls, objects, morphisms: Mapping, composition: Mapping, identities: Mapping | None = None):
        """Build from a table that may omit identities and compositions with them."""
        morphs = dict(morphisms)
        ids = dict(identities or {})
        for a in objects:
            if a not in ids:
                name = f"id_{a}"
                if name in morphs and morphs[name] != (a, a):
                    raise InputError(f"morphism name {name} is reserved for the identity of {a}")
                ids[a] = name
            morphs.setdefault(ids[a], (a, a))
        comp = dict(composition)
        for m, (a, b) in morphs.items():
            comp.setdefault((m, ids[a]), m)
            comp.setdefault((ids[b], m), m)
        return cls(list(objects), morphs, comp, ids)

    @classmethod
    def discrete(cls, objects) -> "SmallCategory":
        return cls.from_table(objects, {}, {})

    @classmethod
    def poset(cls, objects, relations: Iterable[tuple]) -> "SmallCategory":
        """The poset generated by ``a <= b`` for each pair; the arrow ``a -> b`` is named ``"a<b"``."""
        objs = list(objects)
        leq = {(a, a) for a in objs} | {tuple(r) for r in relations}
        changed = True
        while changed:
            changed = False
            for (a, b), (c, d) in list(itertools.product(leq, leq)):
                if b == c and (a, d) not in leq:
                    leq.add((a, d))
                    changed = True
        for a, b in leq:
            if a != b and (b, a) in leq:
                raise InputError(f"relations make {a} and {b} isomorphic; not a poset")
        name = {(a, b): (f"id_{a}" if a == b else f"{a}<{b}") for a, b in leq}
        morphs = {name[p]: p for p in sorted(leq, key=lambda p: (objs.index(p[0]), objs.index(p[1])))}
        comp = {}
        for (a, b) in leq:
            for (c, d) in leq:
                if b == c:
                    comp[(name[(c, d)], name[(a, b)])] = name[(a, d)]
        return cls(objs, morphs, comp, {a: name[(a, a)] for a in objs})

    @classmethod
    def monoid(cls, elements: Sequence[str], table: Mapping[tuple, str], unit: str, obj: str = "*") -> "SmallCategory":
        """One-object category; ``table[(g, f)]`` is the product ``g f``."""
        return cls([obj], {e: (obj, obj) for e in elements}, dict(table), {obj: unit})


def idempotent_category() -> SmallCategory:
    """One object with ``Id`` and ``alpha``, ``alpha o alpha = alpha``."""
    table = {("id", "id"): "id", ("id", "alpha"): "alpha", ("alpha", "id"): "alpha", ("alpha", "alpha"): "alpha"}
    return SmallCategory.monoid(["id", "alpha"], table, "id")


# ---------------------------------------------------------------------------
# Strings and the truncated nerve


@dataclass(frozen=True)
class SimplexObject:
    """A string ``x0 -a1-> x1 ... -an-> xn`` of composable arrows of the base category."""

    objects: tuple
    arrows: tuple

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.objects, self.arrows)))

    def __hash__(self):
        return self._hash

    @property
    def n(self) -> int:
        return len(self.arrows)

    @property
    def last(self):
        return self.objects[-1]

    def __str__(self):
        parts = [str(self.objects[0])]
        for a, x in zip(self.arrows, self.objects[1:]):
            parts.append(f"-{a}->{x}")
        return "[" + "".join(parts) + "]"


@dataclass(frozen=True)
class SimplexMorphism:
    """A monotone map ``f: [n] -> [m]`` between strings."""

    source: SimplexObject
    target: SimplexObject
    f: tuple

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.source, self.target, self.f)))

    def __hash__(self):
        return self._hash

    def is_injective(self) -> bool:
        return len(set(self.f)) == len(self.f)

    def is_surjective(self) -> bool:
        return set(self.f) == set(range(self.target.n + 1))

    def short(self) -> str:
        """``d`` followed by the skipped indices for injective maps, else ``f`` and the values."""
        if self.is_injective():
            missing = [str(j) for j in range(self.target.n + 1) if j not in self.f]
            return "d" + "".join(missing) if missing else "id"
        return "f" + "".join(map(str, self.f))

    def __str__(self):
        return f"{self.short()}:{self.source}>{self.target}"


def is_anchor(f: SimplexMorphism) -> bool:
    """An anchor hits the top index of its target."""
    return f.f[-1] == f.target.n


def _chain(B: SmallCategory, s: SimplexObject, lo: int, hi: int):
    """Composite of the arrows of ``s`` strictly after position ``lo`` up to ``hi``."""
    out = B.identity(s.objects[lo])
    for j in range(lo + 1, hi + 1):
        out = B.compose(s.arrows[j - 1], out)
    return out


def is_valid_simplex_morphism(B: SmallCategory, source: SimplexObject, target: SimplexObject, f: Sequence[int]) -> bool:
    n, m = source.n, target.n
    if len(f) != n + 1 or any(not 0 <= v <= m for v in f):
        return False
    if any(f[i] > f[i + 1] for i in range(n)):
        return False
    if any(target.objects[f[i]] != source.objects[i] for i in range(n + 1)):
        return False
    return all(_chain(B, target, f[i - 1], f[i]) == source.arrows[i - 1] for i in range(1, n + 1))


def strings(B: SmallCategory, k: int) -> list[SimplexObject]:
    """All strings of length at most ``k``, degenerate ones included."""
    level = [SimplexObject((a,), ()) for a in B.objects]
    out = list(level)
    for _ in range(k):
        nxt = []
        for s in level:
            for m in B.morphisms_from(s.last):
                nxt.append(SimplexObject(s.objects + (B.target(m),), s.arrows + (m,)))
        out.extend(nxt)
        level = nxt
    return out


def nerve_truncation(B: SmallCategory, k: int, check: bool = True) -> SmallCategory:
    """``N(B)_{<=k}``: strings of length <= k and all valid monotone maps between them."""
    if k < 2:
        raise InputError(f"truncation level k must be at least 2, got {k}")
    objs = strings(B, k)
    morphs: dict = {}
    for s in objs:
        for t in objs:
            for f in itertools.combinations_with_replacement(range(t.n + 1), s.n + 1):
                if is_valid_simplex_morphism(B, s, t, f):
                    morphs[SimplexMorphism(s, t, f)] = (s, t)
    comp = {}
    by_source: dict = {}
    for m in morphs:
        by_source.setdefault(m.source, []).append(m)
    for f in morphs:
        for g in by_source.get(f.target, ()):
            comp[(g, f)] = SimplexMorphism(f.source, g.target, tuple(g.f[i] for i in f.f))
    ids = {s: SimplexMorphism(s, s, tuple(range(s.n + 1))) for s in objs}
    N = SmallCategory(objs, morphs, comp, ids, check=check)
    N.base = B
    N.k = k
    return N


def level_counts(N: SmallCategory) -> list[int]:
    counts: dict[int, int] = {}
    for s in N.objects:
        counts[s.n] = counts.get(s.n, 0) + 1
    return [counts.get(i, 0) for i in range(max(counts) + 1)]


def factor_epi_mono(N: SmallCategory, f: SimplexMorphism) -> tuple[SimplexMorphism, SimplexMorphism]:
    image = sorted(set(f.f))
    t = f.target
    B = N.base
    mid = SimplexObject(
        tuple(t.objects[j] for j in image),
        tuple(_chain(B, t, image[r - 1], image[r]) for r in range(1, len(image))),
    )
    s = SimplexMorphism(f.source, mid, tuple(image.index(v) for v in f.f))
    i = SimplexMorphism(mid, t, tuple(image))
    return s, i


def nondegenerate_direct_subcategory(N: SmallCategory) -> SmallCategory:
    """Strings without identity arrows and the injective maps between them."""
    B = N.base
    objs = [s for s in N.objects if not any(B.is_identity(a) for a in s.arrows)]
    return N.subcategory(objs, keep=lambda m: m.is_injective())


# ---------------------------------------------------------------------------
# Diagrams of algebras


def _same_algebra(a, b) -> bool:
    if a is b:
        return True
    if type(a) is not type(b) or a.ring != b.ring:
        return False
    if isinstance(a, PresentedAlgebra):
        return [a.normal_form(r) for r in b.relations] == [a.zero()] * len(b.relations) and [
            b.normal_form(r) for r in a.relations
        ] == [b.zero()] * len(a.relations)
    return a.diff == b.diff


class AlgebraDiagram:
    """A functor from ``index`` to DG-algebras, checked for functoriality on the full table.

    ``arrows`` may omit identities; they are filled in with identity maps.
    """

    def __init__(self, index: SmallCategory, objects: Mapping, arrows: Mapping, check: bool = True):
        self.index = index
        self.objects = {a: objects[a] for a in index.objects}
        arr = dict(arrows)
        for a in index.objects:
            arr.setdefault(index.identity(a), DGMorphism.identity(self.objects[a]))
        missing = [m for m in index.morphisms if m not in arr]
        if missing:
            raise InputError(f"diagram has no map for arrow {index.label(missing[0])}")
        self.arrows = {m: arr[m] for m in index.morphisms}
        if check:
            self.check_functoriality()

    def __getitem__(self, a):
        return self.objects[a]

    def arrow(self, m) -> DGMorphism:
        return self.arrows[m]

    def check_functoriality(self):
        idx = self.index
        for m in idx.morphisms:
            f = self.arrows[m]
            if not _same_algebra(f.source, self.objects[idx.source(m)]) or not _same_algebra(
                f.target, self.objects[idx.target(m)]
            ):
                raise InputError(f"map for arrow {idx.label(m)} has the wrong source or target")
        for a in idx.objects:
            if not self.arrows[idx.identity(a)].is_identity():
                raise InputError(f"identity of {a} is not sent to an identity map")
        composites: dict = {}  # strings reuse the same maps many times over
        for g, f in idx.composable_pairs():
            key = (id(self.arrows[g]), id(self.arrows[f]))
            if key not in composites:
                composites[key] = self.arrows[g].compose(self.arrows[f])
            if self.arrows[idx.compose(g, f)] != composites[key]:
                raise InputError(f"functoriality fails for {idx.label(g)} o {idx.label(f)}")

    def same_as(self, other: "AlgebraDiagram") -> bool:
        if set(self.index.objects) != set(other.index.objects) or set(self.index.morphisms) != set(other.index.morphisms):
            return False
        return all(_same_algebra(self.objects[a], other.objects[a]) for a in self.index.objects) and all(
            self.arrows[m] == other.arrows[m] for m in self.index.morphisms
        )

    def restrict(self, sub: SmallCategory) -> "AlgebraDiagram":
        return AlgebraDiagram(sub, {a: self.objects[a] for a in sub.objects}, {m: self.arrows[m] for m in sub.morphisms})

    def conjugate(self, isos: Mapping) -> "AlgebraDiagram":
        """The diagram ``a -> target of isos[a]`` with arrows ``isos[b] o F(f) o isos[a]^-1``."""
        inverses = {}
        for a in self.index.objects:
            inv = isos[a].inverse()
            if inv is None:
                raise InputError(f"component at {a} is not invertible")
            inverses[a] = inv
        arrows = {
            m: isos[self.index.target(m)].compose(self.arrows[m].compose(inverses[self.index.source(m)]))
            for m in self.index.morphisms
        }
        return AlgebraDiagram(self.index, {a: isos[a].target for a in self.index.objects}, arrows)

    def __repr__(self):
        return f"AlgebraDiagram(over {self.index!r})"


def constant_diagram(index: SmallCategory, alg) -> AlgebraDiagram:
    ident = DGMorphism.identity(alg)
    return AlgebraDiagram(index, {a: alg for a in index.objects}, {m: ident for m in index.morphisms})


def is_natural(F: AlgebraDiagram, G: AlgebraDiagram, eta: Mapping) -> bool:
    """``G(f) o eta_a == eta_b o F(f)`` for every arrow ``f: a -> b``."""
    idx = F.index
    for m in idx.morphisms:
        a, b = idx.source(m), idx.target(m)
        if G.arrows[m].compose(eta[a]) != eta[b].compose(F.arrows[m]):
            return False
    return True


def epsilon_star(S: AlgebraDiagram, k: int, N: SmallCategory | None = None) -> AlgebraDiagram:
    """Pull ``S`` back along the forgetful functor ``N(B)_{<=k} -> B``.

    A string goes to ``S`` of its last object; ``f: [n] -> [m]`` goes to
    ``S`` of the composite of the target's arrows after position ``f(n)``.
    """
    B = S.index
    if N is None:
        N = nerve_truncation(B, k)
    objects = {s: S.objects[s.last] for s in N.objects}
    arrows = {f: S.arrows[_chain(B, f.target, f.f[-1], f.target.n)] for f in N.morphisms}
    return AlgebraDiagram(N, objects, arrows)


def _anchor_inverses(G: AlgebraDiagram) -> dict:
    out, seen = {}, {}
    for f in G.index.morphisms:
        if is_anchor(f):
            m = G.arrows[f]
            if id(m) not in seen:
                seen[id(m)] = m.inverse()
            inv = seen[id(m)]
            if inv is None:
                raise InputError(f"anchor {G.index.label(f)} is not sent to an isomorphism")
            out[f] = inv
    return out


def tau(G: AlgebraDiagram) -> AlgebraDiagram:
    """The diagram on ``B`` with ``x -> G([x])`` and ``alpha -> G(d0)^-1 G(d1)``."""
    N = G.index
    B = N.base
    inverses = _anchor_inverses(G)
    point = {x: SimplexObject((x,), ()) for x in B.objects}
    objects = {x: G.objects[point[x]] for x in B.objects}
    arrows = {}
    for m in B.morphisms:
        x, y = B.source(m), B.target(m)
        edge = SimplexObject((x, y), (m,))
        d1 = SimplexMorphism(point[x], edge, (0,))
        d0 = SimplexMorphism(point[y], edge, (1,))
        arrows[m] = inverses[d0].compose(G.arrows[d1])
    return AlgebraDiagram(B, objects, arrows)


def epsilon_tau_unit(G: AlgebraDiagram) -> dict:
    """Natural isomorphism ``G -> epsilon_star(tau(G))`` built from anchor maps.

    The component at ``s`` is the inverse of ``G`` applied to the anchor
    ``[x_n] -> s``.  Naturality and invertibility are checked.
    """
    N = G.index
    inverses = _anchor_inverses(G)
    TG = epsilon_star(tau(G), N.k, N)
    eta = {}
    for s in N.objects:
        anchor = SimplexMorphism(SimplexObject((s.last,), ()), s, (s.n,))
        eta[s] = inverses[anchor]
    if not is_natural(G, TG, eta):
        raise IntegrityError("anchor maps do not assemble into a natural transformation")
    return eta


# ---------------------------------------------------------------------------
# Latching objects and Reedy cofibrant replacement


def latching_category(D: SmallCategory, a) -> tuple[list, dict]:
    """Objects (non-identity arrows into ``a``) and the unique connecting arrow between pairs.

    Raises ``UnsupportedIndexError`` when two objects are joined by more
    than one arrow.
    """
    objs = [f for f in D.morphisms_into(a) if not D.is_identity(f)]
    links: dict = {}
    for f in objs:
        for f2 in objs:
            if f == f2:
                continue
            found = [g for g in D.hom(D.source(f), D.source(f2)) if D.compose(f2, g) == f]
            if len(found) > 1:
                raise UnsupportedIndexError(
                    f"latching category at {a} is not a poset: {len(found)} arrows from {D.label(f)} to {D.label(f2)}"
                )
            if found:
                links[(f, f2)] = found[0]
    return objs, links


@dataclass
class LatchingObject:
    algebra: SemifreeAlgebra
    to_object: DGMorphism | None  # canonical map to X_a, when X_a is known
    legs: dict  # arrow f: b -> a  ->  DGMorphism X_b -> L
    classes: dict  # generator name in L -> (f, generator name in X_b) representative


def _generator_image(m: DGMorphism, name: str) -> str:
    img = m.image(name)
    terms = img.sorted_terms()
    if len(terms) != 1 or terms[0][1] != 1 or len(terms[0][0]) != 1 or terms[0][0][0][1] != 1:
        raise InputError(f"latching leg sends generator {name} to {img}, not to a generator")
    return terms[0][0][0][0].name


def latching_object(X, a, name_for: Callable | None = None) -> LatchingObject:
    """Colimit of ``X`` over the latching category at ``a``.

    Every connecting map must send generators to generators; the colimit is
    then the semifree algebra on the colimit of generator sets.  ``X`` needs
    ``index``, ``objects`` and ``arrows`` for the objects below ``a``.
    """
    D = X.index
    objs, links = latching_category(D, a)
    for f in objs:
        if not isinstance(X.objects[D.source(f)], SemifreeAlgebra):
            raise InputError(f"latching objects need semifree algebras; object {D.source(f)} is not")
    parent: dict = {}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    order = {f: i for i, f in enumerate(objs)}
    for f in objs:
        for g in X.objects[D.source(f)].gens:
            parent[(f, g.name)] = (f, g.name)
    for (f, f2), link in links.items():
        alg = X.objects[D.source(f)]
        if not isinstance(alg, SemifreeAlgebra):
            raise InputError(f"object {D.source(f)} is not semifree")
        for g in alg.gens:
            ru, rv = find((f, g.name)), find((f2, _generator_image(X.arrows[link], g.name)))
            if ru != rv:
                lo, hi = sorted((ru, rv), key=lambda u: (order[u[0]], u[1]))
                parent[hi] = lo
    namer = name_for or (lambda f, n: f"{n}@{D.label(f)}")
    classes: dict = {}
    rep_name: dict = {}
    symbols = []
    for f in objs:
        for g in X.objects[D.source(f)].gens:
            root = find((f, g.name))
            if root in rep_name:
                continue
            name = namer(*root)
            if name in classes:
                raise InputError(f"latching generator name {name} is not unique")
            rep_name[root] = name
            classes[name] = root
            src_sym = X.objects[D.source(root[0])].ring.symbol(root[1])
            symbols.append(GeneratorSymbol(name, src_sym.degree, src_sym.weight))
    bare = SemifreeAlgebra(symbols, {}, check=False)
    legs = {}
    for f in objs:
        alg = X.objects[D.source(f)]
        legs[f] = DGMorphism(alg, bare, {g.name: bare.gen(rep_name[find((f, g.name))]) for g in alg.gens}, check=False)
    diff = {}
    for name, (f, n) in classes.items():
        dx = X.objects[D.source(f)].diff.get(n)
        if dx:
            diff[name] = legs[f](dx)
    L = SemifreeAlgebra(symbols, diff, check=True)
    legs = {f: DGMorphism(leg.source, L, {k: v.coerce(L.ring) for k, v in leg.images.items()}, check=True) for f, leg in legs.items()}
    to_object = None
    if a in X.objects:
        to_object = DGMorphism(
            L, X.objects[a], {name: X.arrows[f](X.objects[D.source(f)].gen(n)) for name, (f, n) in classes.items()}
        )
    return LatchingObject(L, to_object, legs, classes)


@dataclass
class _Partial:
    index: SmallCategory
    objects: dict = field(default_factory=dict)
    arrows: dict = field(default_factory=dict)


@dataclass
class ReedyReplacement:
    """A Reedy cofibrant diagram ``R`` with a map to ``S`` certified objectwise."""

    diagram: AlgebraDiagram
    projections: dict  # object -> DGMorphism R_a -> S_a
    latching: dict  # object -> LatchingObject
    inclusions: dict  # object -> DGMorphism L_a R -> R_a
    factorizations: dict  # object -> FactorizationResult
    degrees: dict
    depth: int
    weight_bound: int
    target: AlgebraDiagram

    def new_generators(self, a) -> list[str]:
        known = set(self.latching[a].classes)
        return [g.name for g in self.diagram.objects[a].gens if g.name not in known]

    def certified_slices(self) -> list[tuple[int, int]]:
        """Slices every projection must be a quasi-isomorphism on."""
        return [(deg, w) for deg in range(0, -self.depth, -1) for w in range(0, self.weight_bound + 1)]

    def check(self) -> dict[str, bool]:
        """Mechanical verification of the three structural properties and naturality of the projection."""
        R = self.diagram
        semifree = True
        for a, inc in self.inclusions.items():
            L = self.latching[a].algebra
            Ra = R.objects[a]
            for g in L.gens:
                if g.name not in Ra.ring or Ra.ring.symbol(g.name) != g:
                    semifree = False
                elif inc.image(g.name) != Ra.gen(g.name):
                    semifree = False
                elif Ra.diff.get(g.name, Ra.zero()) != L.diff.get(g.name, L.zero()).coerce(Ra.ring):
                    semifree = False
        needed = self.certified_slices()
        certified = all(
            all(fact.certificate.covers(*s) for s in needed) for fact in self.factorizations.values()
        )
        try:
            R.check_functoriality()
            functorial = True
        except InputError:
            functorial = False
        idx = R.index
        natural = True
        for m in idx.morphisms:
            a, b = idx.source(m), idx.target(m)
            lhs = self.projections[b].compose(R.arrows[m])
            rhs = self.target.arrows[m].compose(self.projections[a])
            if lhs != rhs:
                natural = False
        return {"semifree_latching": semifree, "certified": certified, "functorial": functorial, "natural": natural}


def _composite_namer(D: SmallCategory) -> Callable:
    def namer(f, n: str) -> str:
        if "@" in n:
            g, label = n.rsplit("@", 1)
            h = D.compose(f, D.by_label(label))
        else:
            g, h = n, f
        return f"{g}@{D.label(h)}"

    return namer


def reedy_cofibrant_replacement(S: AlgebraDiagram, depth: int, weight_bound: int) -> ReedyReplacement:
    """Build ``R -> S`` object by object in order of Reedy degree.

    At ``a`` the latching object ``L_a R`` is formed from the lower objects,
    and the induced map ``L_a R -> S_a`` is Tate-factorized; ``R_a`` is the
    middle algebra, so ``L_a R -> R_a`` is a semifree extension.  A
    generator copied from object ``c`` along ``h: c -> a`` is named
    ``name@label(h)``.
    """
    D = S.index
    degrees = D.direct_degrees()
    for a in D.objects:
        alg = S.objects[a]
        if not isinstance(alg, PresentedAlgebra):
            raise InputError(f"object {a} must be a presented algebra")
        if any("@" in g.name for g in alg.gens):
            raise InputError(f"variable names of object {a} may not contain '@'")
    order = sorted(D.objects, key=lambda a: (degrees[a], D.objects.index(a)))
    partial = _Partial(D)
    projections, latching, inclusions, facts = {}, {}, {}, {}
    namer = _composite_namer(D)
    for a in order:
        lat = latching_object(partial, a, name_for=namer)
        L = lat.algebra
        images = {}
        for name, (f, n) in lat.classes.items():
            b = D.source(f)
            images[name] = S.arrows[f](projections[b](partial.objects[b].gen(n)))
        to_target = DGMorphism(L, S.objects[a], images)
        fact = tate_factorize(to_target, depth, weight_bound)
        Ra = fact.middle
        partial.objects[a] = Ra
        projections[a] = fact.projection
        latching[a] = lat
        inclusions[a] = fact.inclusion
        facts[a] = fact
        for f, leg in lat.legs.items():
            partial.arrows[f] = fact.inclusion.compose(leg)
        partial.arrows[D.identity(a)] = DGMorphism.identity(Ra)
    R = AlgebraDiagram(D, partial.objects, partial.arrows)
    return ReedyReplacement(R, projections, latching, inclusions, facts, degrees, depth, weight_bound, S)


# ---------------------------------------------------------------------------
# Compatible families of derivations


class DiagramDerivation:
    """A family ``(alpha_a)`` of derivations, one per object, of common bidegree."""

    __slots__ = ("components", "degree", "weight")

    def __init__(self, components: Mapping, degree: int, weight: int):
        self.components = dict(components)
        self.degree = degree
        self.weight = weight

    def _zip(self, other, op):
        if (other.degree, other.weight) != (self.degree, self.weight) and other and self:
            raise InputError("families of different bidegree")
        return DiagramDerivation({a: op(c, other.components[a]) for a, c in self.components.items()}, self.degree, self.weight)

    def __add__(self, other):
        if not other:
            return self
        if not self:
            return other
        return self._zip(other, lambda u, v: u + v)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "DiagramDerivation":
        return DiagramDerivation({a: v.scale(c) for a, v in self.components.items()}, self.degree, self.weight)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __bool__(self):
        return any(bool(c) for c in self.components.values())

    def __eq__(self, other):
        if not isinstance(other, DiagramDerivation):
            return NotImplemented
        return all(self.components[a] == other.components[a] for a in self.components)

    def d(self) -> "DiagramDerivation":
        return DiagramDerivation({a: der_differential(c) for a, c in self.components.items()}, self.degree + 1, self.weight)

    def __repr__(self):
        body = "; ".join(f"{a}: {c}" for a, c in self.components.items())
        return f"DiagramDerivation[{self.degree},{self.weight}]({body})"


def diagram_bracket(x: DiagramDerivation, y: DiagramDerivation) -> DiagramDerivation:
    return DiagramDerivation(
        {a: dgla_bracket(c, y.components[a]) for a, c in x.components.items()}, x.degree + y.degree, x.weight + y.weight
    )


class DiagramDerComplex(SliceComplex):
    """Compatible families in ``prod_a Der(R_a, M_a)``.

    With ``M`` omitted the families are endomorphism derivations of ``R``
    satisfying ``alpha_b R_f = R_f alpha_a``; with ``M`` and objectwise
    ``structure`` maps ``R_a -> M_a`` the condition is
    ``alpha_b R_f = M_f alpha_a``.  Every non-identity arrow is imposed.
    """

    def __init__(self, R: AlgebraDiagram, M: AlgebraDiagram | None = None, structure: Mapping | None = None):
        self.R = R
        self.M = M if M is not None else R
        self.structure = dict(structure) if structure is not None else None
        if M is not None and structure is None:
            raise InputError("a target diagram needs objectwise structure maps")
        self.objects = list(R.index.objects)
        self.parts = {
            a: DerComplex(R.objects[a], self.M.objects[a], None if self.structure is None else self.structure[a])
            for a in self.objects
        }
        self._kernels: dict = {}

    def _offsets(self, k, w):
        out, pos = {}, 0
        for a in self.objects:
            out[a] = pos
            pos += self.parts[a].dim(k, w)
        return out, pos

    def system(self, k: int, w: int) -> SparseMatrix:
        """Rows: for each arrow ``f: a -> b`` and generator ``g`` of ``R_a``, the slice of ``alpha_b(R_f g) - M_f(alpha_a g)``."""
        idx = self.R.index
        offsets, total = self._offsets(k, w)
        row_blocks = []
        for m in idx.non_identities():
            a, b = idx.source(m), idx.target(m)
            for g in self.R.objects[a].gens:
                row_blocks.append((m, g, self.M.objects[b].dim(g.degree + k, g.weight + w)))
        row_start, r = [], 0
        for blk in row_blocks:
            row_start.append(r)
            r += blk[2]
        entries = {}
        for c in self.objects:
            part = self.parts[c]
            for j, key in enumerate(part.basis(k, w)):
                alpha = part.element_in(key, k, w)
                col = offsets[c] + j
                for (m, g, size), start in zip(row_blocks, row_start):
                    if size == 0:
                        continue
                    a, b = idx.source(m), idx.target(m)
                    value = None
                    if b == c:
                        value = alpha(self.R.arrows[m](self.R.objects[a].gen(g.name)))
                    if a == c:
                        pushed = self.M.arrows[m](alpha.value(g.name))
                        value = pushed.scale(-1) if value is None else value - pushed
                    if value is None or not value:
                        continue
                    vec = self.M.objects[b].coords(value, g.degree + k, g.weight + w)
                    for i, v in enumerate(vec):
                        if v:
                            entries[(start + i, col)] = entries.get((start + i, col), 0) + v
        return SparseMatrix(r, total, entries)

    def _kernel(self, k: int, w: int) -> list:
        key = (k, w)
        if key not in self._kernels:
            _, total = self._offsets(k, w)
            if total == 0:
                self._kernels[key] = []
            else:
                self._kernels[key] = rank_kernel(self.system(k, w))[1]
        return self._kernels[key]

    def basis(self, degree: int, weight: int) -> list:
        return list(range(len(self._kernel(degree, weight))))

    def zero(self, degree: int = 0, weight: int = 0) -> DiagramDerivation:
        return DiagramDerivation({a: self.parts[a].zero(degree, weight) for a in self.objects}, degree, weight)

    def _split(self, vec, k, w) -> DiagramDerivation:
        offsets, _ = self._offsets(k, w)
        comps = {}
        for a in self.objects:
            n = self.parts[a].dim(k, w)
            comps[a] = self.parts[a].from_vector(vec[offsets[a] : offsets[a] + n], k, w)
        return DiagramDerivation(comps, k, w)

    def product_coords(self, x: DiagramDerivation, k: int, w: int) -> list[Fraction]:
        out = []
        for a in self.objects:
            out.extend(self.parts[a].coords(x.components[a], k, w))
        return out

    def from_vector(self, vec, degree: int, weight: int) -> DiagramDerivation:
        kernel = self._kernel(degree, weight)
        _, total = self._offsets(degree, weight)
        acc = [Fraction(0)] * total
        for c, v in zip(vec, kernel):
            if c:
                for i, x in enumerate(v):
                    if x:
                        acc[i] += c * x
        return self._split(acc, degree, weight)

    def element(self, j: int, degree: int, weight: int) -> DiagramDerivation:
        return self._split(self._kernel(degree, weight)[j], degree, weight)

    def _free_columns(self, degree: int, weight: int) -> list[tuple[int, Fraction]]:
        # each kernel vector is the only one nonzero at its own free column
        cache = self.__dict__.setdefault("_free_cache", {})
        key = (degree, weight)
        if key not in cache:
            kernel = self._kernel(degree, weight)
            support = [sum(1 for v in kernel if v[i]) for i in range(len(kernel[0]))] if kernel else []
            cache[key] = [next((i, v[i]) for i in range(len(v)) if v[i] and support[i] == 1) for v in kernel]
        return cache[key]

    def coords(self, x: DiagramDerivation, degree: int, weight: int) -> list[Fraction]:
        kernel = self._kernel(degree, weight)
        if not kernel:
            if x:
                raise InputError(f"family is not in the (empty) compatible slice ({degree}, {weight})")
            return []
        vec = self.product_coords(x, degree, weight)
        sol = [vec[i] / scale for i, scale in self._free_columns(degree, weight)]
        check = [Fraction(0)] * len(vec)
        for c, v in zip(sol, kernel):
            if c:
                for i, value in enumerate(v):
                    if value:
                        check[i] += c * value
        if check != vec:
            raise InputError(f"family is not compatible with the diagram in slice ({degree}, {weight})")
        return sol

    def contains(self, x: DiagramDerivation, degree: int, weight: int) -> bool:
        try:
            self.coords(x, degree, weight)
            return True
        except InputError:
            return False

    def d(self, x: DiagramDerivation) -> DiagramDerivation:
        return x.d()

    def d_matrix(self, degree: int, weight: int) -> SparseMatrix:
        cache = self.__dict__.setdefault("_dmat_cache", {})
        key = (degree, weight)
        if key not in cache:
            cols = [
                self.coords(self.element(j, degree, weight).d(), degree + 1, weight)
                for j in range(self.dim(degree, weight))
            ]
            cache[key] = SparseMatrix.from_columns(self.dim(degree + 1, weight), cols)
        return cache[key]

    def slice_elements(self, degree: int, weight: int) -> list[DiagramDerivation]:
        return [self.element(j, degree, weight) for j in range(self.dim(degree, weight))]


def diagram_der_slice(R: AlgebraDiagram, M: AlgebraDiagram | None, k: int, w: int, structure: Mapping | None = None) -> list[DiagramDerivation]:
    """Basis of the compatible families of degree ``k`` and weight ``w``."""
    return DiagramDerComplex(R, M, structure).slice_elements(k, w)


# ---------------------------------------------------------------------------
# Graded lifting over a diagram


@dataclass
class GradedLift:
    """Generator values of a graded lift ``gamma_a: C_a -> E_a`` at every object."""

    values: dict  # object -> {generator name: element of E_a}


def lift_graded_morphism(
    replacement: ReedyReplacement,
    E: Mapping,
    E_arrows: Mapping,
    p: Mapping,
    beta: Mapping,
    alpha: Mapping | None = None,
) -> GradedLift:
    """Lift ``beta: C -> F`` through an objectwise surjection ``p: E -> F`` of graded algebras.

    ``C`` is the replacement diagram.  Generators copied from lower objects
    take the values forced by ``E_arrows``; a new generator gets its value
    from ``alpha`` when prescribed, otherwise the canonical preimage of its
    ``beta`` value.  Differentials are ignored.  Both triangles and the
    naturality of the lift are checked on generators before returning.
    """
    C = replacement.diagram
    D = C.index
    alpha = alpha or {}
    order = sorted(D.objects, key=lambda a: (replacement.degrees[a], D.objects.index(a)))
    values: dict = {}
    for a in order:
        Ca, Ea = C.objects[a], E[a]
        lat = replacement.latching[a]
        vals = {}
        for name, (f, n) in lat.classes.items():
            vals[name] = E_arrows[f](values[D.source(f)][n])
        prescribed = alpha.get(a, {})
        for name in replacement.new_generators(a):
            g = Ca.ring.symbol(name)
            target_value = beta[a](Ca.gen(name))
            if name in prescribed:
                vals[name] = prescribed[name]
                continue
            rhs = p[a].target.coords(target_value, g.degree, g.weight)
            pre = solve(p[a].slice_matrix(g.degree, g.weight), rhs) if rhs else []
            if pre is None:
                raise PreconditionError(
                    f"the map at object {a} is not surjective on slice ({g.degree}, {g.weight}) needed by {name}"
                )
            vals[name] = Ea.from_vector(pre, g.degree, g.weight)
        for name, v in vals.items():
            if p[a](v) != beta[a](Ca.gen(name)):
                raise IntegrityError(f"lift at {a} breaks the lower triangle on {name}")
        for name, v in prescribed.items():
            if vals.get(name) != v:
                raise PreconditionError(f"prescribed value on {name} at {a} conflicts with the diagram")
        values[a] = vals
    for m in D.non_identities():
        a, b = D.source(m), D.target(m)
        for g in C.objects[a].gens:
            image = _generator_image(C.arrows[m], g.name)
            if E_arrows[m](values[a][g.name]) != values[b][image]:
                raise IntegrityError(f"lift is not natural along {D.label(m)}")
    return GradedLift(values)


# ---------------------------------------------------------------------------
# Cosimplicial groups


class FiniteGroup:
    """Interface: ``elements()``, ``mul``, ``inv`` and ``identity``."""

    identity = None

    def elements(self) -> Iterable:
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError


class TableGroup(FiniteGroup):
    """Elements ``0..n-1`` with ``table[a][b] = a b``; group axioms are checked."""

    def __init__(self, table: Sequence[Sequence[int]], identity: int = 0):
        n = len(table)
        self.table = [list(r) for r in table]
        self.identity = identity
        if any(len(r) != n for r in self.table):
            raise InputError("multiplication table is not square")
        for a in range(n):
            if self.table[identity][a] != a or self.table[a][identity] != a:
                raise InputError(f"{identity} is not a two-sided identity")
        for a, b, c in itertools.product(range(n), repeat=3):
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise InputError("multiplication table is not associative")
        self._inv = []
        for a in range(n):
            inv = [b for b in range(n) if self.table[a][b] == identity]
            if len(inv) != 1:
                raise InputError(f"element {a} has no inverse")
            self._inv.append(inv[0])

    def elements(self):
        return range(len(self.table))

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self._inv[a]


class SymmetricGroup(FiniteGroup):
    """Permutations of ``0..n-1`` as tuples; ``mul(a, b)`` is ``a o b``."""

    def __init__(self, n: int):
        self.n = n
        self.identity = tuple(range(n))

    def elements(self):
        return itertools.permutations(range(self.n))

    def mul(self, a, b):
        return tuple(a[i] for i in b)

    def inv(self, a):
        out = [0] * self.n
        for i, v in enumerate(a):
            out[v] = i
        return tuple(out)


class PointwiseGroup(FiniteGroup):
    """Functions from ``size`` points to a group ``H``, multiplied pointwise."""

    def __init__(self, H: FiniteGroup, size: int):
        self.H = H
        self.size = size
        self.identity = (H.identity,) * size
        self._h_elements = list(H.elements())

    def elements(self):
        return itertools.product(self._h_elements, repeat=self.size)

    def mul(self, a, b):
        return tuple(self.H.mul(x, y) for x, y in zip(a, b))

    def inv(self, a):
        return tuple(self.H.inv(x) for x in a)


class TruncatedSimplicialSet:
    """Finite levels ``X_0..X_top`` with face and degeneracy maps as index tables.

    ``faces[n][i][p]`` is ``d_i`` of simplex ``p`` in ``X_n``;
    ``degeneracies[n][i][p]`` is ``s_i`` of ``p`` in ``X_n`` (for ``n < top``).
    """

    def __init__(self, levels: Sequence[Sequence], faces, degeneracies):
        self.levels = [list(l) for l in levels]
        self.faces = faces
        self.degeneracies = degeneracies
        self.top = len(self.levels) - 1
        self._check()

    def _check(self):
        d, s = self.faces, self.degeneracies
        for n in range(2, self.top + 1):
            for p in range(len(self.levels[n])):
                for j in range(n + 1):
                    for i in range(j):
                        if d[n - 1][i][d[n][j][p]] != d[n - 1][j - 1][d[n][i][p]]:
                            raise InputError("face identity fails")
        for n in range(self.top):
            for p in range(len(self.levels[n])):
                for i in range(n + 1):
                    q = s[n][i][p]
                    for j in range(n + 2):
                        got = d[n + 1][j][q]
                        if j in (i, i + 1):
                            want = p
                        elif j < i:
                            want = s[n - 1][i - 1][d[n][j][p]]
                        else:
                            want = s[n - 1][i][d[n][j - 1][p]]
                        if got != want:
                            raise InputError("mixed simplicial identity fails")

    @classmethod
    def nerve(cls, B: SmallCategory, top: int) -> "TruncatedSimplicialSet":
        levels = [[s for s in strings(B, n) if s.n == n] for n in range(top + 1)]
        index = [{s: i for i, s in enumerate(l)} for l in levels]
        faces: list = [[]]
        for n in range(1, top + 1):
            per = []
            for i in range(n + 1):
                col = []
                for s in levels[n]:
                    if i == 0:
                        t = SimplexObject(s.objects[1:], s.arrows[1:])
                    elif i == n:
                        t = SimplexObject(s.objects[:-1], s.arrows[:-1])
                    else:
                        joined = B.compose(s.arrows[i], s.arrows[i - 1])
                        t = SimplexObject(s.objects[:i] + s.objects[i + 1 :], s.arrows[: i - 1] + (joined,) + s.arrows[i + 1 :])
                    col.append(index[n - 1][t])
                per.append(col)
            faces.append(per)
        degens = []
        for n in range(top):
            per = []
            for i in range(n + 1):
                col = []
                for s in levels[n]:
                    t = SimplexObject(
                        s.objects[: i + 1] + s.objects[i:], s.arrows[:i] + (B.identity(s.objects[i]),) + s.arrows[i:]
                    )
                    col.append(index[n + 1][t])
                per.append(col)
            degens.append(per)
        return cls(levels, faces, degens)


class CosimplicialGroup:
    """Levels ``G_0..G_top`` with cofaces ``delta(n, i): G_n -> G_(n+1)`` and codegeneracies ``sigma(n, i): G_(n+1) -> G_n``.

    The cosimplicial identities are checked on every element at construction.
    """

    def __init__(self, levels: Sequence[FiniteGroup], coface: Callable, codegeneracy: Callable, check: bool = True):
        self.levels = list(levels)
        self.top = len(self.levels) - 1
        self._coface = coface
        self._codeg = codegeneracy
        if check:
            self.check_identities()

    def delta(self, n: int, i: int, x):
        if not 0 <= i <= n + 1 or n + 1 > self.top:
            raise InputError(f"no coface delta_{i} out of level {n}")
        return self._coface(n, i, x)

    def sigma(self, n: int, i: int, x):
        """``sigma_i: G_(n+1) -> G_n``."""
        if not 0 <= i <= n or n + 1 > self.top:
            raise InputError(f"no codegeneracy sigma_{i} into level {n}")
        return self._codeg(n, i, x)

    def check_identities(self):
        for n in range(self.top + 1):
            for x in self.levels[n].elements():
                self._check_element(n, x)

    def _check_element(self, n: int, x):
        top = self.top
        if n + 2 <= top:
            for j in range(n + 3):
                for i in range(j):
                    if self.delta(n + 1, j, self.delta(n, i, x)) != self.delta(n + 1, i, self.delta(n, j - 1, x)):
                        raise InputError(f"coface identity fails for i={i}, j={j} at level {n}")
        if n >= 2:
            m = n - 2
            for j in range(m + 1):
                for i in range(j + 1):
                    if self.sigma(m, j, self.sigma(m + 1, i, x)) != self.sigma(m, i, self.sigma(m + 1, j + 1, x)):
                        raise InputError(f"codegeneracy identity fails for i={i}, j={j} at level {n}")
        if n + 1 <= top:
            for i in range(n + 2):
                y = self.delta(n, i, x)
                for j in range(n + 1):
                    got = self.sigma(n, j, y)
                    if i in (j, j + 1):
                        want = x
                    elif i < j:
                        want = self.delta(n - 1, i, self.sigma(n - 1, j - 1, x))
                    else:
                        want = self.delta(n - 1, i - 1, self.sigma(n - 1, j, x))
                    if got != want:
                        raise InputError(f"mixed identity fails for delta_{i}, sigma_{j} at level {n}")

    @classmethod
    def of_functions(cls, H: FiniteGroup, X: TruncatedSimplicialSet, check: bool = True) -> "CosimplicialGroup":
        """``G_n = H^(X_n)`` with ``(delta_i g)(x) = g(d_i x)`` and ``(sigma_i g)(x) = g(s_i x)``."""
        levels = [PointwiseGroup(H, len(l)) for l in X.levels]

        def coface(n, i, g):
            return tuple(g[q] for q in X.faces[n + 1][i])

        def codeg(n, i, g):
            return tuple(g[q] for q in X.degeneracies[n][i])

        return cls(levels, coface, codeg, check=check)


def _incompatible_pair(G: CosimplicialGroup, n: int, x: Mapping) -> tuple[int, int] | None:
    keys = sorted(x)
    for i in keys:
        for j in keys:
            if i > j and G.sigma(n - 1, i - 1, x[j]) != G.sigma(n - 1, j, x[i]):
                return i, j
    return None


def cosimplicial_extend(G: CosimplicialGroup, n: int, x: Mapping):
    """An element ``z`` of ``G_(n+1)`` with ``sigma_i z = x[i]`` for every ``i`` in ``x``.

    ``x`` maps indices in ``[n]`` to elements of ``G_n`` satisfying
    ``sigma_(i-1) x_j = sigma_j x_i`` for ``i > j``.
    """
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    if any(not 0 <= i <= n for i in x):
        raise InputError(f"indices must lie in [0, {n}]")
    bad = _incompatible_pair(G, n, x)
    if bad is not None:
        raise PreconditionError(f"inputs at i={bad[0]}, j={bad[1]} are not compatible")
    grp = G.levels[n + 1]
    keys = sorted(x)
    if not keys:
        return grp.identity
    z = G.delta(n, keys[-1], x[keys[-1]])
    for p in range(len(keys) - 2, -1, -1):
        i = keys[p]
        correction = grp.inv(G.delta(n, i, G.sigma(n, i, z)))
        z = grp.mul(grp.mul(z, correction), G.delta(n, i, x[i]))
        for m in keys[p:]:
            if G.sigma(n, m, z) != x[m]:
                raise IntegrityError(f"recursion step for index {i} breaks sigma_{m}")
    return z


def compatible_tuples(G: CosimplicialGroup, n: int, indices: Sequence[int]) -> Iterable[dict]:
    """Every family ``(x_i)_(i in indices)`` in ``G_n`` with ``sigma_(i-1) x_j = sigma_j x_i`` for ``i > j``.

    This is the matching-type set the extension maps onto.  Candidates for
    each new index are drawn from an exact fiber of ``sigma_j`` for the
    smallest earlier index ``j``, so the enumeration is exhaustive.
    """
    keys = sorted(indices)
    elements = list(G.levels[n].elements())
    if not keys:
        yield {}
        return
    fibers: dict = {}
    for j in range(n):
        table: dict = {}
        for e in elements:
            table.setdefault(G.sigma(n - 1, j, e), []).append(e)
        fibers[j] = table

    def extend(pos: int, acc: dict):
        if pos == len(keys):
            yield dict(acc)
            return
        i = keys[pos]
        earlier = keys[:pos]
        if not earlier:
            candidates = elements
        else:
            j0 = earlier[0]
            candidates = fibers[j0].get(G.sigma(n - 1, i - 1, acc[j0]), [])
        for c in candidates:
            if all(G.sigma(n - 1, i - 1, acc[j]) == G.sigma(n - 1, j, c) for j in earlier):
                acc[i] = c
                yield from extend(pos + 1, acc)
                del acc[i]

    yield from extend(0, {})
