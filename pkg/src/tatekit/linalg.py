"""Exact sparse linear algebra over the rationals.

Every routine is deterministic: Gaussian elimination always takes the
leftmost column that still has a nonzero entry and, within it, the first
such row.  Reproducible pivots give reproducible bases downstream.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError

Vector = list  # list[Fraction]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


class SparseMatrix:
    """A rows x cols matrix stored as ``{(row, col): Fraction}`` without zeros."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise InputError(f"negative shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], Fraction] = {}
        for (r, c), value in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise InputError(f"entry ({r}, {c}) outside a {rows}x{cols} matrix")
            value = as_fraction(value)
            if value:
                self.entries[(r, c)] = value

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence]) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        entries = {}
        for r, row in enumerate(rows):
            if len(row) != ncols:
                raise InputError("ragged dense matrix")
            for c, value in enumerate(row):
                if value:
                    entries[(r, c)] = value
        return cls(nrows, ncols, entries)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Sequence]) -> "SparseMatrix":
        entries = {}
        for c, column in enumerate(columns):
            if len(column) != nrows:
                raise InputError(f"column {c} has length {len(column)}, expected {nrows}")
            for r, value in enumerate(column):
                if value:
                    entries[(r, c)] = value
        return cls(nrows, len(columns), entries)

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), value in self.entries.items():
            out[r][c] = value
        return out

    def row_dicts(self) -> list[dict[int, Fraction]]:
        rows: list[dict[int, Fraction]] = [{} for _ in range(self.rows)]
        for (r, c), value in self.entries.items():
            rows[r][c] = value
        return rows

    def mul_vec(self, x: Sequence) -> Vector:
        if len(x) != self.cols:
            raise InputError(f"vector of length {len(x)} against {self.cols} columns")
        out = [Fraction(0)] * self.rows
        for (r, c), value in self.entries.items():
            if x[c]:
                out[r] += value * x[c]
        return out

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise InputError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        by_row: dict[int, list[tuple[int, Fraction]]] = {}
        for (r, c), value in other.entries.items():
            by_row.setdefault(r, []).append((c, value))
        acc: dict[tuple[int, int], Fraction] = {}
        for (r, k), value in self.entries.items():
            for c, other_value in by_row.get(k, ()):
                acc[(r, c)] = acc.get((r, c), 0) + value * other_value
        return SparseMatrix(self.rows, other.cols, acc)

    def permute_rows(self, order: Sequence[int]) -> "SparseMatrix":
        """Row ``i`` of the result is row ``order[i]`` of ``self``."""
        inverse = {old: new for new, old in enumerate(order)}
        return SparseMatrix(
            self.rows, self.cols, {(inverse[r], c): v for (r, c), v in self.entries.items()}
        )

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __repr__(self):
        return f"SparseMatrix({self.rows}, {self.cols}, {len(self.entries)} nonzeros)"


def _rref(rows: list[dict[int, Fraction]], ncols: int) -> list[int]:
    """Reduce ``rows`` in place to reduced row echelon form; return pivot columns.

    Rows are reordered in place so that row ``i`` carries pivot ``pivots[i]``.
    """
    pivots: list[int] = []
    top = 0
    nrows = len(rows)
    for col in range(ncols):
        if top == nrows:
            break
        found = None
        for i in range(top, nrows):
            if rows[i].get(col):
                found = i
                break
        if found is None:
            continue
        rows[top], rows[found] = rows[found], rows[top]
        pivot_row = rows[top]
        scale = pivot_row[col]
        if scale != 1:
            for c in pivot_row:
                pivot_row[c] /= scale
        for i in range(nrows):
            if i == top:
                continue
            factor = rows[i].get(col)
            if not factor:
                continue
            row = rows[i]
            for c, value in pivot_row.items():
                updated = row.get(c, 0) - factor * value
                if updated:
                    row[c] = updated
                else:
                    row.pop(c, None)
        pivots.append(col)
        top += 1
    return pivots


def rank(m: SparseMatrix) -> int:
    return len(_rref(m.row_dicts(), m.cols))


def rank_kernel(m: SparseMatrix) -> tuple[int, list[Vector]]:
    """Rank of ``m`` and a basis of its kernel.

    Kernel vectors come one per free column, in increasing column order,
    scaled so that their first nonzero entry is positive.
    """
    rows = m.row_dicts()
    pivots = _rref(rows, m.cols)
    pivot_set = set(pivots)
    kernel: list[Vector] = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * m.cols
        v[free] = Fraction(1)
        for i, p in enumerate(pivots):
            coeff = rows[i].get(free)
            if coeff:
                v[p] = -coeff
        lead = next(x for x in v if x)
        if lead < 0:
            v = [-x for x in v]
        kernel.append(v)
    return len(pivots), kernel


def solve(m: SparseMatrix, b: Sequence) -> Vector | None:
    """Canonical solution of ``m x = b`` with every free variable set to zero.

    Returns ``None`` when the system is inconsistent.
    """
    if len(b) != m.rows:
        raise InputError(f"right-hand side has length {len(b)}, matrix has {m.rows} rows")
    rows = m.row_dicts()
    aug = m.cols
    for r, value in enumerate(b):
        if value:
            rows[r][aug] = as_fraction(value)
    pivots = _rref(rows, m.cols + 1)
    if pivots and pivots[-1] == aug:
        return None
    x = [Fraction(0)] * m.cols
    for i, p in enumerate(pivots):
        x[p] = rows[i].get(aug, Fraction(0))
    return x


class EchelonBasis:
    """Incrementally maintained echelon basis of a subspace of K^n.

    Each stored row is normalised to 1 at its pivot, the smallest column
    where it is nonzero.  ``reduce`` returns the unique representative of a
    vector modulo the span that vanishes at every pivot column, so it
    doubles as a canonical normal form.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self._rows: dict[int, dict[int, Fraction]] = {}
        self._order: list[int] = []

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> list[int]:
        return list(self._order)

    def _reduce_dict(self, v: dict[int, Fraction]) -> dict[int, Fraction]:
        for p in self._order:
            coeff = v.get(p)
            if not coeff:
                continue
            for c, value in self._rows[p].items():
                updated = v.get(c, 0) - coeff * value
                if updated:
                    v[c] = updated
                else:
                    v.pop(c, None)
        return v

    def reduce_sparse(self, v: dict[int, Fraction]) -> dict[int, Fraction]:
        return self._reduce_dict(dict(v))

    def reduce(self, v: Sequence) -> Vector:
        out = [Fraction(0)] * self.dim
        for c, value in self._reduce_dict(_to_sparse(v)).items():
            out[c] = value
        return out

    def contains(self, v: Sequence) -> bool:
        return not self._reduce_dict(_to_sparse(v))

    def add_sparse(self, v: dict[int, Fraction]) -> bool:
        """Add ``v``; return ``True`` when it was independent of the span."""
        rem = self._reduce_dict(dict(v))
        if not rem:
            return False
        pivot = min(rem)
        scale = rem[pivot]
        self._rows[pivot] = {c: value / scale for c, value in rem.items()}
        lo, hi = 0, len(self._order)
        while lo < hi:
            mid = (lo + hi) // 2
            if self._order[mid] < pivot:
                lo = mid + 1
            else:
                hi = mid
        self._order.insert(lo, pivot)
        return True

    def add(self, v: Sequence) -> bool:
        return self.add_sparse(_to_sparse(v))


def _to_sparse(v: Sequence) -> dict[int, Fraction]:
    return {i: as_fraction(x) for i, x in enumerate(v) if x}


def independent_subset(vectors: Iterable[Sequence], dim: int, start: EchelonBasis | None = None) -> list[int]:
    """Indices of a maximal subfamily independent modulo ``start``, chosen greedily in order."""
    basis = start if start is not None else EchelonBasis(dim)
    chosen = []
    for i, v in enumerate(vectors):
        if basis.add(v):
            chosen.append(i)
    return chosen
