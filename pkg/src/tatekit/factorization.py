"""Factorizations of DG-algebra morphisms and the lifting algorithms.

``tate_factorize`` builds a semifree extension followed by a map that is a
quasi-isomorphism on every slice it certifies; ``free_factorize`` builds a
free extension followed by a map onto chosen elements; the two ``lift_*``
functions construct lifts in commuting squares generator by generator.
All constructions are truncated at a cohomological depth and a weight bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .dg import DGMorphism, PresentedAlgebra, SemifreeAlgebra, coboundary_basis
from .errors import InputError, PreconditionError, TruncationError
from .graded import GeneratorSymbol, Poly
from .linalg import EchelonBasis, SparseMatrix, rank, rank_kernel, solve


@dataclass
class StageBatch:
    """Generators adjoined in one step, all of the same cohomological degree."""

    degree: int
    generators: list  # list[GeneratorSymbol]
    differentials: dict  # name -> Poly in the middle algebra
    images: dict  # name -> Poly in the target
    purpose: str = ""


@dataclass
class DepthCertificate:
    """Slices ``(degree, weight)`` on which the projection was checked to be a quasi-isomorphism."""

    degree_depth: int
    weight_bound: int
    verified: list = field(default_factory=list)
    surjective: list = field(default_factory=list)

    def covers(self, degree: int, weight: int) -> bool:
        return (degree, weight) in set(self.verified)


@dataclass
class FactorizationResult:
    middle: SemifreeAlgebra
    inclusion: DGMorphism
    projection: DGMorphism
    stages: list = field(default_factory=list)
    certificate: DepthCertificate | None = None
    free_pairs: list = field(default_factory=list)  # (x name, dx name) of free-extension pairs


def _as_semifree_source(alg) -> SemifreeAlgebra:
    if not isinstance(alg, SemifreeAlgebra):
        raise InputError("the source of a morphism must be a SemifreeAlgebra")
    return alg


def _column(matrix: SparseMatrix, col: int) -> dict[int, Fraction]:
    return {r: v for (r, c), v in matrix.entries.items() if c == col}


def cycle_basis(alg, degree: int, weight: int) -> list[list[Fraction]]:
    _, kernel = rank_kernel(alg.d_matrix(degree, weight))
    return kernel


def induced_cohomology_map(f: DGMorphism, degree: int, weight: int) -> tuple[int, int, int]:
    """``(dim H(source), dim H(target), rank of H(f))`` on one slice."""
    src, tgt = f.source, f.target
    cycles = cycle_basis(src, degree, weight)
    src_bound = coboundary_basis(src, degree, weight)
    dim_src = len(cycles) - len(src_bound)
    tgt_cycles = cycle_basis(tgt, degree, weight)
    tgt_bound = coboundary_basis(tgt, degree, weight)
    dim_tgt = len(tgt_cycles) - len(tgt_bound)
    fm = f.slice_matrix(degree, weight)
    span = tgt_bound
    base = len(span)
    for z in cycles:
        span.add(fm.mul_vec(z))
    return dim_src, dim_tgt, len(span) - base


def is_surjective_on_slice(f: DGMorphism, degree: int, weight: int) -> bool:
    return rank(f.slice_matrix(degree, weight)) == f.target.dim(degree, weight)


def is_quasi_iso_on_slice(f: DGMorphism, degree: int, weight: int) -> bool:
    a, b, r = induced_cohomology_map(f, degree, weight)
    return a == b == r


class _Builder:
    """Mutable state of the recursion: current middle algebra and projection."""

    def __init__(self, source: SemifreeAlgebra, f: DGMorphism):
        self.source = source
        self.target = f.target
        self.middle = source
        self.images: dict[str, Poly] = dict(f.images)
        self.projection = f
        self.stages: list[StageBatch] = []
        self.counters: dict[int, int] = {}
        self.used_names = {g.name for g in source.gens}

    def fresh_name(self, degree: int, preferred: str | None = None) -> str:
        if preferred and preferred not in self.used_names:
            self.used_names.add(preferred)
            return preferred
        n = -degree
        while True:
            j = self.counters.get(n, 0)
            self.counters[n] = j + 1
            name = f"T{n}_{j}"
            if name not in self.used_names:
                self.used_names.add(name)
                return name

    def adjoin(self, batch: StageBatch):
        if not batch.generators:
            return
        self.middle = self.middle.extend(batch.generators, batch.differentials)
        ring = self.middle.ring
        batch.differentials = {n: v.coerce(ring) for n, v in batch.differentials.items()}
        self.images.update(batch.images)
        self.projection = DGMorphism(self.middle, self.target, self.images, check=False)
        self.stages.append(batch)


def tate_factorize(f: DGMorphism, depth: int, weight_bound: int, surjective: bool = True) -> FactorizationResult:
    """Factor ``f`` as a semifree extension followed by a slice-certified trivial fibration.

    Degree-0 generators hit algebra generators of the target's degree-0
    part; then for ``n = 1..depth`` degree ``-n`` generators are adjoined,
    first to surject onto ``Z^-n`` of the target and then to kill the kernel
    of ``H^(-n+1)`` of the middle algebra.  With ``surjective`` set, free
    pairs make the projection onto the target's negative-degree slices
    surjective up to the bounds as well.
    """
    source = _as_semifree_source(f.source)
    target = f.target
    if depth < 0 or weight_bound < 1:
        raise InputError(f"need depth >= 0 and weight bound >= 1, got {depth}, {weight_bound}")
    if isinstance(target, PresentedAlgebra):
        for r in target.relations:
            if not r.is_homogeneous():
                raise InputError(f"target relation {r} is not homogeneous")
    elif isinstance(target, SemifreeAlgebra):
        for n, v in target.diff.items():
            if not v.is_homogeneous():
                raise InputError(f"target differential of {n} is not homogeneous")
    b = _Builder(source, f)

    _stage_degree_zero(b)
    for n in range(1, depth + 1):
        _stage_cycles(b, n, weight_bound)
        _stage_kill(b, n, weight_bound)
    free_pairs = []
    if surjective and isinstance(target, SemifreeAlgebra):
        free_pairs = _stage_surject(b, depth, weight_bound)

    middle = b.middle
    inclusion = DGMorphism(source, middle, {g.name: middle.gen(g.name) for g in source.gens}, check=False)
    projection = DGMorphism(middle, target, b.images, check=True)
    cert = DepthCertificate(depth, weight_bound)
    for deg in range(0, -depth - 1, -1):
        for w in range(0, weight_bound + 1):
            if is_quasi_iso_on_slice(projection, deg, w):
                cert.verified.append((deg, w))
            if is_surjective_on_slice(projection, deg, w):
                cert.surjective.append((deg, w))
    return FactorizationResult(middle, inclusion, projection, b.stages, cert, free_pairs)


def _subalgebra_span(b: _Builder, weight: int) -> EchelonBasis:
    """Span of the image of the degree-0, weight-``weight`` slice of the middle algebra."""
    tgt = b.target
    span = EchelonBasis(tgt.dim(0, weight))
    for m in b.middle.basis(0, weight):
        span.add(tgt.coords(b.projection.image_of_monomial(m), 0, weight))
    return span


def _stage_degree_zero(b: _Builder):
    tgt = b.target
    candidates = sorted((g for g in tgt.gens if g.degree == 0), key=lambda g: (g.weight, g.name))
    for g in candidates:
        span = _subalgebra_span(b, g.weight)
        value = tgt.gen(g.name)
        if span.contains(tgt.coords(value, 0, g.weight)):
            continue
        name = b.fresh_name(0, preferred=g.name)
        sym = GeneratorSymbol(name, 0, g.weight)
        b.adjoin(StageBatch(0, [sym], {}, {name: value}, "generators of degree 0"))


def _stage_cycles(b: _Builder, n: int, bound: int):
    tgt = b.target
    for w in range(1, bound + 1):
        target_cycles = cycle_basis(tgt, -n, w)
        if not target_cycles:
            continue
        span = EchelonBasis(tgt.dim(-n, w))
        fm = b.projection.slice_matrix(-n, w)
        for z in cycle_basis(b.middle, -n, w):
            span.add(fm.mul_vec(z))
        gens, diffs, images = [], {}, {}
        for z in target_cycles:
            if span.add(z):
                name = b.fresh_name(-n)
                gens.append(GeneratorSymbol(name, -n, w))
                images[name] = tgt.from_vector(z, -n, w)
        b.adjoin(StageBatch(-n, gens, diffs, images, f"cycles of degree {-n}, weight {w}"))


def _stage_kill(b: _Builder, n: int, bound: int):
    tgt = b.target
    deg = -n + 1
    for w in range(1, bound + 1):
        mid = b.middle
        cycles = cycle_basis(mid, deg, w)
        if not cycles:
            continue
        fm = b.projection.slice_matrix(deg, w)
        images = [fm.mul_vec(z) for z in cycles]
        dtgt = tgt.d_matrix(deg - 1, w)
        # (a, e) with sum a_i f(z_i) + d_target(e) = 0: classes mapping to zero
        nrows = tgt.dim(deg, w)
        columns = images + [[v for v in _dense_col(dtgt, c, nrows)] for c in range(dtgt.cols)]
        _, ker = rank_kernel(SparseMatrix.from_columns(nrows, columns))
        killed = coboundary_basis(mid, deg, w)
        gens, diffs, imgs = [], {}, {}
        for vec in ker:
            coeffs = vec[: len(cycles)]
            c_vec = [Fraction(0)] * mid.dim(deg, w)
            for a, z in zip(coeffs, cycles):
                if a:
                    for i, x in enumerate(z):
                        if x:
                            c_vec[i] += a * x
            if not any(c_vec) or not killed.add(c_vec):
                continue
            c = mid.from_vector(c_vec, deg, w)
            g_c = fm.mul_vec(c_vec)
            pre = solve(dtgt, g_c) if dtgt.cols else ([] if not any(g_c) else None)
            if pre is None:
                raise PreconditionError(f"no target preimage for d in slice ({deg - 1}, {w})")
            name = b.fresh_name(-n)
            gens.append(GeneratorSymbol(name, -n, w))
            diffs[name] = c
            imgs[name] = tgt.from_vector(pre, deg - 1, w) if pre else tgt.zero()
        b.adjoin(StageBatch(-n, gens, diffs, imgs, f"kill kernel of H^{deg}, weight {w}"))


def _dense_col(matrix: SparseMatrix, col: int, nrows: int) -> list[Fraction]:
    out = [Fraction(0)] * nrows
    for r, v in _column(matrix, col).items():
        out[r] = v
    return out


def _stage_surject(b: _Builder, depth: int, bound: int) -> list[tuple[str, str]]:
    """Free pairs ``(x, dx)`` onto basis elements missed by the projection in negative degrees."""
    tgt = b.target
    pairs = []
    for deg in range(-1, -depth - 1, -1):
        for w in range(1, bound + 1):
            keys = tgt.basis(deg, w)
            if not keys:
                continue
            span = EchelonBasis(len(keys))
            fm = b.projection.slice_matrix(deg, w)
            for col in range(fm.cols):
                span.add_sparse(_column(fm, col))
            gens, imgs, batch_pairs = [], {}, []
            for key in keys:
                elem = tgt.element_of(key)
                if not span.add(tgt.coords(elem, deg, w)):
                    continue
                j = len(pairs) + len(batch_pairs)
                x, dx = f"P{j}", f"dP{j}"
                b.used_names.update((x, dx))
                gens += [GeneratorSymbol(x, deg, w), GeneratorSymbol(dx, deg + 1, w)]
                imgs[x] = elem
                imgs[dx] = tgt.d(elem)
                batch_pairs.append((x, dx))
            if gens:
                ring = b.middle.ring.extend(gens)
                diffs = {x: ring.gen(dx) for x, dx in batch_pairs}
                b.adjoin(StageBatch(deg, gens, diffs, imgs, f"free pairs onto degree {deg}, weight {w}"))
                pairs += batch_pairs
    return pairs


def free_factorize(f: DGMorphism, generating_set: Iterable[Poly]) -> FactorizationResult:
    """Factor ``f`` as a free extension followed by a map hitting every chosen element.

    Each element ``b`` (homogeneous, negative degree) contributes a pair
    ``x_b, dx_b`` with ``d(x_b) = dx_b``, ``x_b -> b`` and ``dx_b -> d b``.
    """
    source = _as_semifree_source(f.source)
    target = f.target
    elems = list(generating_set)
    gens, diffs, imgs, pairs = [], {}, dict(f.images), []
    used = {g.name for g in source.gens}
    for j, elem in enumerate(elems):
        elem = elem.coerce(target.ring)
        bd = elem.bidegrees()
        if len(bd) != 1:
            raise InputError(f"generating element {elem} is not homogeneous and nonzero")
        deg, wt = next(iter(bd))
        if deg >= 0:
            raise InputError(f"generating element {elem} has degree {deg}; only negative degrees are allowed")
        label = str(j)
        if len(elem.terms) == 1:
            (m, c), = elem.terms.items()
            if c == 1 and len(m) == 1 and m[0][1] == 1:
                label = m[0][0].name
        x, dx = f"x_{label}", f"dx_{label}"
        if x in used or dx in used:
            x, dx = f"x_{j}", f"dx_{j}"
        used.update((x, dx))
        gens += [GeneratorSymbol(x, deg, wt), GeneratorSymbol(dx, deg + 1, wt)]
        imgs[x] = elem
        imgs[dx] = target.d(elem)
        pairs.append((x, dx))
    ring = source.ring.extend(gens)
    diffs = {x: ring.gen(dx) for x, dx in pairs}
    middle = source.extend(gens, diffs)
    inclusion = DGMorphism(source, middle, {g.name: middle.gen(g.name) for g in source.gens}, check=False)
    projection = DGMorphism(middle, target, imgs, check=True)
    batch = StageBatch(0, gens, diffs, {n: imgs[n] for n, _ in pairs} | {d: imgs[d] for _, d in pairs}, "free pairs")
    return FactorizationResult(middle, inclusion, projection, [batch] if gens else [], None, pairs)


def _new_generators(i: DGMorphism) -> list[GeneratorSymbol]:
    src, tgt = i.source, i.target
    for g in src.gens:
        if i.image(g.name) != tgt.gen(g.name):
            raise InputError(f"{g.name} is not sent to the generator of the same name; not a semifree extension")
    old = {g.name for g in src.gens}
    return [g for g in tgt.gens if g.name not in old]


def _check_square(i: DGMorphism, g: DGMorphism, alpha: DGMorphism, beta: DGMorphism):
    for x in i.source.gens:
        lhs = g(alpha.image(x.name))
        rhs = beta(i.image(x.name))
        if lhs != rhs:
            raise PreconditionError(f"square does not commute on {x.name}: {lhs} != {rhs}")


def _partial(source: SemifreeAlgebra, target, images: Mapping[str, Poly]) -> DGMorphism:
    return DGMorphism(source, target, images, check=False)


def lift_against_trivial_fibration(
    i: DGMorphism, g: DGMorphism, alpha: DGMorphism, beta: DGMorphism, weight_bound: int
) -> DGMorphism:
    """A lift ``gamma`` with ``gamma i = alpha`` and ``g gamma = beta``.

    ``i`` is a semifree extension, ``g`` a surjective quasi-isomorphism on
    the slices the new generators need (checked).  Generators are treated
    by decreasing degree: degree 0 by surjectivity, lower ones by solving
    ``dy = gamma(dx)`` and correcting with a cocycle preimage of
    ``beta(x) - g(y)``.
    """
    new = _new_generators(i)
    _check_square(i, g, alpha, beta)
    big = i.target
    C = g.source
    D = g.target
    images: dict[str, Poly] = {x.name: alpha.image(x.name) for x in i.source.gens}
    for x in sorted(new, key=lambda s: (-s.degree, s.weight, s.name)):
        deg, w = x.degree, x.weight
        if w > weight_bound:
            raise TruncationError(f"generator {x.name} has weight {w} beyond the bound {weight_bound}")
        if not is_surjective_on_slice(g, deg, w):
            raise PreconditionError(f"g is not surjective on slice ({deg}, {w})")
        for dd in (deg, deg + 1):
            if dd <= 0 and not is_quasi_iso_on_slice(g, dd, w):
                raise PreconditionError(f"g is not a quasi-isomorphism on slice ({dd}, {w})")
        target_value = beta(big.gen(x.name))
        if deg == 0:
            pre = solve(g.slice_matrix(0, w), D.coords(target_value, 0, w))
            if pre is None:
                raise PreconditionError(f"no preimage of {target_value} in slice (0, {w})")
            images[x.name] = C.from_vector(pre, 0, w)
            continue
        gamma_prev = _partial(big, C, images)
        u = gamma_prev(big.d(big.gen(x.name)))
        y_vec = solve(C.d_matrix(deg, w), C.coords(u, deg + 1, w))
        if y_vec is None:
            raise PreconditionError(f"gamma(d{x.name}) is not a coboundary in slice ({deg + 1}, {w})")
        y = C.from_vector(y_vec, deg, w)
        z = target_value - g(y)
        # cocycle c with g(c) = z: stack d_C over g on the slice
        dmat = C.d_matrix(deg, w)
        gmat = g.slice_matrix(deg, w)
        stacked = {(r, c): v for (r, c), v in dmat.entries.items()}
        for (r, c), v in gmat.entries.items():
            stacked[(r + dmat.rows, c)] = v
        system = SparseMatrix(dmat.rows + gmat.rows, C.dim(deg, w), stacked)
        rhs = [Fraction(0)] * dmat.rows + D.coords(z, deg, w)
        c_vec = solve(system, rhs)
        if c_vec is None:
            raise PreconditionError(f"no cocycle preimage of {z} in slice ({deg}, {w})")
        images[x.name] = y + C.from_vector(c_vec, deg, w)
    gamma = DGMorphism(big, C, images, check=True)
    for x in new:
        if g(gamma.image(x.name)) != beta(big.gen(x.name)):
            raise PreconditionError(f"lift fails the lower triangle on {x.name}")
    return gamma


def free_pairs_of(i: DGMorphism) -> list[tuple[str, str]]:
    """Detect pairs ``(x, dx)`` of a free extension: ``d(x)`` is exactly the new generator ``dx``."""
    new = {s.name for s in _new_generators(i)}
    big = i.target
    pairs, seen = [], set()
    for name in sorted(new):
        dv = big.diff.get(name)
        if dv is None or len(dv.terms) != 1:
            continue
        (m, c), = dv.terms.items()
        if c == 1 and len(m) == 1 and m[0][1] == 1 and m[0][0].name in new:
            pairs.append((name, m[0][0].name))
            seen.update((name, m[0][0].name))
    if seen != new:
        raise InputError(f"generators {sorted(new - seen)} are not part of free pairs")
    return pairs


def lift_against_fibration(
    i: DGMorphism, g: DGMorphism, alpha: DGMorphism, beta: DGMorphism, pairs: list | None = None
) -> DGMorphism:
    """A lift ``h`` for a free extension ``i`` against ``g`` surjective in negative degrees.

    ``h(x)`` is the canonical ``g``-preimage of ``beta(x)`` and ``h(dx) = d h(x)``.
    """
    pairs = pairs if pairs is not None else free_pairs_of(i)
    _check_square(i, g, alpha, beta)
    big = i.target
    C, D = g.source, g.target
    images: dict[str, Poly] = {x.name: alpha.image(x.name) for x in i.source.gens}
    for x, dx in pairs:
        sym = big.ring.symbol(x)
        if sym.degree >= 0:
            raise InputError(f"free generator {x} must have negative degree")
        value = beta(big.gen(x))
        pre = solve(g.slice_matrix(sym.degree, sym.weight), D.coords(value, sym.degree, sym.weight))
        if pre is None:
            raise PreconditionError(f"no preimage of {value} in slice ({sym.degree}, {sym.weight})")
        hx = C.from_vector(pre, sym.degree, sym.weight)
        images[x] = hx
        images[dx] = C.d(hx)
    return DGMorphism(big, C, images, check=True)
