"""Exact rational matrices and subspace utilities.

Vectors are columns throughout: an (m, n) matrix is a map Q^n -> Q^m,
kernels are returned as matrices whose columns span the kernel, and so on.

Heavy operations (rref, nullspace, solving) are delegated to sympy's
DomainMatrix over QQ, which runs on gmpy2 rationals and is roughly 20x
faster than naive Fraction loops at the sizes the tower computations hit.
The Fraction type only appears at the API boundary.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def _qq(v):
    if isinstance(v, Fraction):
        return QQ(v.numerator, v.denominator)
    if isinstance(v, int):
        return QQ(v)
    # gmpy2.mpq or QQ element already
    return QQ.convert(v)


def _frac(e) -> Fraction:
    return Fraction(int(e.numerator), int(e.denominator))


class Mat:
    """Dense exact matrix over Q, wrapping a DomainMatrix."""

    __slots__ = ("dm",)

    def __init__(self, dm: DomainMatrix):
        self.dm = dm

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rows(rows: Sequence[Sequence], cols: int | None = None) -> "Mat":
        rows = [list(r) for r in rows]
        if rows:
            ncols = len(rows[0])
        else:
            if cols is None:
                raise ValueError("column count needed for a 0-row matrix")
            ncols = cols
        data = [[_qq(v) for v in r] for r in rows]
        return Mat(DomainMatrix(data, (len(rows), ncols), QQ))

    @staticmethod
    def zeros(m: int, n: int) -> "Mat":
        return Mat(DomainMatrix.zeros((m, n), QQ))

    @staticmethod
    def identity(n: int) -> "Mat":
        return Mat(DomainMatrix.eye(n, QQ))

    @staticmethod
    def col_vector(values: Sequence) -> "Mat":
        return Mat.from_rows([[v] for v in values], cols=1)

    @staticmethod
    def block(grid: Sequence[Sequence["Mat"]]) -> "Mat":
        rows = [r[0].dm.hstack(*(b.dm for b in r[1:])) if len(r) > 1 else r[0].dm
                for r in grid]
        out = rows[0]
        if len(rows) > 1:
            out = out.vstack(*rows[1:])
        return Mat(out)

    @staticmethod
    def block_diag(blocks: Sequence["Mat"]) -> "Mat":
        total_r = sum(b.rows for b in blocks)
        total_c = sum(b.cols for b in blocks)
        grid = []
        r0 = 0
        c0 = 0
        for b in blocks:
            row = []
            if c0:
                row.append(Mat.zeros(b.rows, c0))
            row.append(b)
            rest = total_c - c0 - b.cols
            if rest:
                row.append(Mat.zeros(b.rows, rest))
            grid.append(row)
            r0 += b.rows
            c0 += b.cols
        if not grid:
            return Mat.zeros(0, 0)
        return Mat.block(grid)

    # -- shape and access --------------------------------------------------

    @property
    def rows(self) -> int:
        return self.dm.shape[0]

    @property
    def cols(self) -> int:
        return self.dm.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.dm.shape

    def entry(self, i: int, j: int) -> Fraction:
        return _frac(self.dm[i, j].element)

    def to_lists(self) -> list[list[Fraction]]:
        return [[_frac(e) for e in row] for row in self.dm.to_list()]

    def col(self, j: int) -> "Mat":
        return Mat(self.dm[:, j])

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "Mat":
        rows = list(rows)
        cols = list(cols)
        data = self.dm.to_list()
        picked = [[data[i][j] for j in cols] for i in rows]
        return Mat(DomainMatrix(picked, (len(rows), len(cols)), QQ))

    def take_cols(self, cols: Iterable[int]) -> "Mat":
        return self.submatrix(range(self.rows), cols)

    def take_rows(self, rows: Iterable[int]) -> "Mat":
        return self.submatrix(rows, range(self.cols))

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "Mat") -> "Mat":
        return Mat(self.dm + other.dm)

    def __sub__(self, other: "Mat") -> "Mat":
        return Mat(self.dm - other.dm)

    def __neg__(self) -> "Mat":
        return Mat(-self.dm)

    def __mul__(self, other):
        if isinstance(other, Mat):
            return Mat(self.dm * other.dm)
        return Mat(self.dm * _qq(other))

    def __rmul__(self, other):
        return Mat(self.dm * _qq(other))

    def scale(self, c) -> "Mat":
        return Mat(self.dm * _qq(c))

    def transpose(self) -> "Mat":
        return Mat(self.dm.transpose())

    def hstack(self, *others: "Mat") -> "Mat":
        return Mat(self.dm.hstack(*(o.dm for o in others)))

    def vstack(self, *others: "Mat") -> "Mat":
        return Mat(self.dm.vstack(*(o.dm for o in others)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and (self.dm - other.dm).is_zero_matrix

    def __hash__(self):
        return hash((self.shape, tuple(tuple(r) for r in self.dm.to_list())))

    def is_zero(self) -> bool:
        return self.dm.is_zero_matrix

    # -- rank layer --------------------------------------------------------

    def rank(self) -> int:
        return len(self.dm.rref()[1])

    def rref(self) -> tuple["Mat", tuple[int, ...]]:
        r, piv = self.dm.rref()
        return Mat(r), tuple(piv)

    def det(self) -> Fraction:
        return _frac(QQ.convert(self.dm.det()))

    def inv(self) -> "Mat":
        return Mat(self.dm.inv())

    def kernel(self) -> "Mat":
        """Columns span {x : self*x = 0}."""
        ns = self.dm.nullspace()  # rows span the nullspace
        return Mat(ns.transpose())

    def image_pivots(self) -> tuple[int, ...]:
        return tuple(self.dm.rref()[1])

    def image_basis(self) -> "Mat":
        """Columns: a basis of the column space (pivot columns of self)."""
        return self.take_cols(self.image_pivots())

    def is_injective(self) -> bool:
        return self.rank() == self.cols

    def is_surjective(self) -> bool:
        return self.rank() == self.rows

    def is_iso(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    # -- solving -----------------------------------------------------------

    def solve(self, b: "Mat") -> "Mat | None":
        """An X with self*X = b (columnwise), or None if inconsistent."""
        m, n = self.shape
        aug = self.hstack(b)
        r, piv = aug.dm.rref()
        if any(p >= n for p in piv):
            return None
        rl = r.to_list()
        out = [[QQ(0)] * b.cols for _ in range(n)]
        for k, p in enumerate(piv):
            for j in range(b.cols):
                out[p][j] = rl[k][n + j]
        return Mat(DomainMatrix(out, (n, b.cols), QQ))

    def contains_cols(self, other: "Mat") -> bool:
        """Column space of other contained in column space of self."""
        if other.cols == 0:
            return True
        return self.solve(other) is not None


# -- subspace utilities ----------------------------------------------------
# A subspace of Q^m is represented by a matrix whose columns span it.


def intersect_cols(a: Mat, b: Mat) -> Mat:
    """Basis of colspace(a) & colspace(b)."""
    if a.cols == 0 or b.cols == 0:
        return Mat.zeros(a.rows, 0)
    k = a.hstack(b).kernel()  # (a.cols + b.cols) x t
    if k.cols == 0:
        return Mat.zeros(a.rows, 0)
    coeffs = k.take_rows(range(a.cols))
    return (a * coeffs).image_basis()


def preimage_cols(f: Mat, s: Mat) -> Mat:
    """Basis of f^{-1}(colspace(s)), a subspace of the domain of f."""
    if f.cols == 0:
        return Mat.zeros(0, 0)
    k = f.hstack(s).kernel() if s.cols else f.kernel()
    if k.cols == 0:
        return Mat.zeros(f.cols, 0)
    return k.take_rows(range(f.cols)).image_basis()


def complement_pivots(s: Mat) -> tuple[int, ...]:
    """Standard basis indices completing colspace(s) to the ambient space."""
    m = s.rows
    aug = s.hstack(Mat.identity(m))
    piv = aug.image_pivots()
    return tuple(p - s.cols for p in piv if p >= s.cols)


class Quotient:
    """Coordinates on ambient/colspace(s), with projection and section."""

    __slots__ = ("sub", "proj", "section", "dim", "ambient_dim")

    def __init__(self, s: Mat, ambient_dim: int | None = None):
        if ambient_dim is None:
            ambient_dim = s.rows
        self.ambient_dim = ambient_dim
        sub = s.image_basis()
        self.sub = sub
        comp = complement_pivots(sub)
        self.dim = len(comp)
        if self.dim == 0:
            self.proj = Mat.zeros(0, ambient_dim)
            self.section = Mat.zeros(ambient_dim, 0)
            return
        section = Mat.identity(ambient_dim).take_cols(comp)
        self.section = section
        full = sub.hstack(section)  # invertible (ambient_dim square)
        inv = full.inv()
        self.proj = inv.take_rows(range(sub.cols, ambient_dim))

    def project(self, v: Mat) -> Mat:
        return self.proj * v

    def induced(self, f: Mat, source: "Quotient") -> Mat:
        """Map on quotients induced by f (caller guarantees f preserves subs)."""
        return self.proj * (f * source.section)
