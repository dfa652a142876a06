"""Matrices over Q[x] and Smith normal form with recorded transforms.

The Smith form is the engine behind every finitely-presented-module
computation over Q[x]: normal forms, invariant factors of a linear
operator, and the torsion bookkeeping of the localization instance.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd as int_gcd
from typing import Sequence

from .linalg import Mat
from .poly import Poly


class PolyMat:
    """Dense matrix with Poly entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[Poly]], cols: int | None = None):
        self.entries = [list(r) for r in entries]
        self.rows = len(self.entries)
        if self.rows:
            self.cols = len(self.entries[0])
            for r in self.entries:
                if len(r) != self.cols:
                    raise ValueError("ragged rows")
        else:
            self.cols = 0 if cols is None else cols

    @staticmethod
    def from_scalars(rows: Sequence[Sequence], cols: int | None = None) -> "PolyMat":
        return PolyMat([[p if isinstance(p, Poly) else Poly.const(p) for p in r]
                        for r in rows], cols=cols)

    @staticmethod
    def identity(n: int) -> "PolyMat":
        return PolyMat([[Poly.one() if i == j else Poly.zero() for j in range(n)]
                        for i in range(n)])

    @staticmethod
    def zeros(m: int, n: int) -> "PolyMat":
        return PolyMat([[Poly.zero()] * n for _ in range(m)], cols=n)

    @staticmethod
    def diagonal(ds: Sequence[Poly], rows: int | None = None,
                 cols: int | None = None) -> "PolyMat":
        r = rows if rows is not None else len(ds)
        c = cols if cols is not None else len(ds)
        out = PolyMat.zeros(r, c)
        for i, d in enumerate(ds):
            out.entries[i][i] = d
        return out

    def copy(self) -> "PolyMat":
        return PolyMat([r[:] for r in self.entries], cols=self.cols)

    def __eq__(self, other):
        if not isinstance(other, PolyMat):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and \
            self.entries == other.entries

    def __mul__(self, other: "PolyMat") -> "PolyMat":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = PolyMat.zeros(self.rows, other.cols)
        for i in range(self.rows):
            for k in range(self.cols):
                a = self.entries[i][k]
                if a.is_zero():
                    continue
                for j in range(other.cols):
                    b = other.entries[k][j]
                    if not b.is_zero():
                        out.entries[i][j] = out.entries[i][j] + a * b
        return out

    def transpose(self) -> "PolyMat":
        return PolyMat([[self.entries[i][j] for i in range(self.rows)]
                        for j in range(self.cols)], cols=self.rows)

    def eval_at(self, point) -> Mat:
        return Mat.from_rows(
            [[p.eval(point) for p in row] for row in self.entries],
            cols=self.cols)

    def det(self) -> Poly:
        """Bareiss fraction-free determinant (divisions are exact)."""
        if self.rows != self.cols:
            raise ValueError("det of non-square matrix")
        n = self.rows
        if n == 0:
            return Poly.one()
        m = [row[:] for row in self.entries]
        sign = 1
        prev = Poly.one()
        for k in range(n - 1):
            if m[k][k].is_zero():
                found = False
                for i in range(k + 1, n):
                    if not m[i][k].is_zero():
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        found = True
                        break
                if not found:
                    return Poly.zero()
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                    q, r = num.divmod(prev)
                    assert r.is_zero()
                    m[i][j] = q
            prev = m[k][k]
        d = m[n - 1][n - 1]
        return d.scale(sign) if sign < 0 else d

    def __repr__(self):
        return f"PolyMat({self.entries!r})"


def poly_of_matrix(p: Poly, t: Mat) -> Mat:
    """Evaluate p at a square matrix (Horner)."""
    n = t.rows
    acc = Mat.zeros(n, n)
    for c in reversed(p.coeffs):
        acc = acc * t
        if c:
            acc = acc + Mat.identity(n).scale(c)
    return acc


def char_matrix(t: Mat) -> PolyMat:
    """x*I - t over Q[x]."""
    n = t.rows
    x = Poly.x()
    out = PolyMat.zeros(n, n)
    rows = t.to_lists()
    for i in range(n):
        for j in range(n):
            c = Poly.const(-rows[i][j])
            out.entries[i][j] = c + x if i == j else c
    return out


@dataclass
class SmithForm:
    diag: list[Poly]          # monic d_1 | d_2 | ... | d_r, units included
    left: PolyMat             # unimodular, rows x rows
    right: PolyMat            # unimodular, cols x cols
    profile: int              # free rank of the cokernel (rows - r)

    def diagonal_matrix(self, rows: int, cols: int) -> PolyMat:
        return PolyMat.diagonal(self.diag, rows=rows, cols=cols)


def smith_normal_form(a: PolyMat) -> SmithForm:
    """Diagonalize over Q[x]: left * a * right = diag(d_1..d_r) padded with 0.

    Gcd pivoting with primitive pseudo-division: rows are kept integer and
    content-free, and each elimination step premultiplies its target row
    (or column) by a power of the pivot's leading coefficient before
    subtracting, so no denominators ever appear mid-computation. All the
    rescalings are unit row/column operations, mirrored into the recorded
    transforms; degrees strictly drop on every remainder swap, so each
    pivot terminates. Diagonal entries are scaled monic at the end.
    """
    m = a.copy()
    nr, nc = m.rows, m.cols
    left = PolyMat.identity(nr)
    right = PolyMat.identity(nc)
    e = m.entries

    def row_op(i, j, q: Poly):
        # row_i -= q * row_j, mirrored into left
        for k in range(nc):
            e[i][k] = e[i][k] - q * e[j][k]
        for k in range(nr):
            left.entries[i][k] = left.entries[i][k] - q * left.entries[j][k]

    def col_op(i, j, q: Poly):
        # col_i -= q * col_j, mirrored into right
        for k in range(nr):
            e[k][i] = e[k][i] - q * e[k][j]
        for k in range(nc):
            right.entries[k][i] = right.entries[k][i] - q * right.entries[k][j]

    def swap_rows(i, j):
        if i != j:
            e[i], e[j] = e[j], e[i]
            left.entries[i], left.entries[j] = left.entries[j], left.entries[i]

    def swap_cols(i, j):
        if i != j:
            for k in range(nr):
                e[k][i], e[k][j] = e[k][j], e[k][i]
            for k in range(nc):
                right.entries[k][i], right.entries[k][j] = \
                    right.entries[k][j], right.entries[k][i]

    def scale_row(i, c: Fraction):
        for k in range(nc):
            e[i][k] = e[i][k].scale(c)
        for k in range(nr):
            left.entries[i][k] = left.entries[i][k].scale(c)

    def scale_col(j, c: Fraction):
        for k in range(nr):
            e[k][j] = e[k][j].scale(c)
        for k in range(nc):
            right.entries[k][j] = right.entries[k][j].scale(c)

    def _content_unit(coeffs):
        den = 1
        for c in coeffs:
            den = den * c.denominator // int_gcd(den, c.denominator)
        g = 0
        for c in coeffs:
            g = int_gcd(g, abs(c.numerator * (den // c.denominator)))
        return None if g in (0, den) else Fraction(den, g)

    def rescale_content(i):
        # unit rescale of row i to integer primitive form
        u = _content_unit([c for p in e[i] for c in p.coeffs])
        if u is not None:
            scale_row(i, u)

    def rescale_col_content(j):
        u = _content_unit([c for k in range(nr) for c in e[k][j].coeffs])
        if u is not None:
            scale_col(j, u)

    for i in range(nr):
        rescale_content(i)

    t = 0
    while t < nr and t < nc:
        # move a minimal-degree entry (smallest leading coefficient among
        # ties, to keep pseudo-division multipliers gentle) to the pivot
        best = None
        best_key = None
        for i in range(t, nr):
            for j in range(t, nc):
                p = e[i][j]
                if not p.is_zero():
                    key = (p.degree, abs(p.lead()))
                    if best is None or key < best_key:
                        best, best_key = (i, j), key
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])

        while True:
            # clear column t below the pivot
            dirty = False
            for i in range(t + 1, nr):
                if e[i][t].is_zero():
                    continue
                q, r, k = e[i][t].pseudo_divmod(e[t][t])
                if k:
                    scale_row(i, e[t][t].lead() ** k)
                row_op(i, t, q)
                rescale_content(i)
                if not r.is_zero():
                    swap_rows(t, i)  # remainder has smaller degree
                    dirty = True
            if dirty:
                continue
            # clear row t
            for j in range(t + 1, nc):
                if e[t][j].is_zero():
                    continue
                q, r, k = e[t][j].pseudo_divmod(e[t][t])
                if k:
                    scale_col(j, e[t][t].lead() ** k)
                col_op(j, t, q)
                rescale_col_content(j)
                if not r.is_zero():
                    swap_cols(t, j)
                    dirty = True
            if dirty:
                continue
            # divisibility sweep over the rest of the block
            pivot = e[t][t]
            offender = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if not pivot.divides(e[i][j]):
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_op(t, offender, Poly.const(-1))  # pull the row up, redo
            rescale_content(t)

        lc = e[t][t].lead()
        if lc != 1:
            scale_row(t, 1 / lc)
        for i in range(t + 1, nr):
            rescale_content(i)
        t += 1

    diag = [e[i][i] for i in range(t)]
    return SmithForm(diag=diag, left=left, right=right, profile=nr - t)


def invariant_factors(t: Mat) -> list[Poly]:
    """Nonconstant invariant factors of the operator t (SNF of x*I - t)."""
    sf = smith_normal_form(char_matrix(t))
    return [d for d in sf.diag if d.degree >= 1]


def char_poly(t: Mat) -> Poly:
    """Characteristic polynomial det(x*I - t), monic, computed exactly."""
    cs = t.dm.charpoly()  # coefficients, highest degree first
    return Poly([Fraction(int(c.numerator), int(c.denominator))
                 for c in reversed(cs)])
