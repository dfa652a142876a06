"""Finitely presented modules over Q[x].

A presentation matrix A (m generators = rows, columns = relations) defines
coker(Q[x]^n -> Q[x]^m). The normal form is the classification over a PID:
free rank plus a divisibility chain of monic invariant factors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .linalg import Mat
from .polymat import PolyMat, invariant_factors, smith_normal_form
from .poly import Poly


@dataclass
class FPModPID:
    presentation: PolyMat
    normal: tuple[int, tuple[Poly, ...]] | None = None  # (free_rank, divisors)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_presentation(rows: Sequence[Sequence]) -> "FPModPID":
        return FPModPID(PolyMat.from_scalars(rows))

    @staticmethod
    def from_divisors(divisors: Sequence[Poly], free_rank: int = 0) -> "FPModPID":
        """Module free^rank + sum k[x]/(d); divisors need not form a chain."""
        ds = [d.monic() for d in divisors if d.degree >= 1]
        m = free_rank + len(ds)
        pres = PolyMat.zeros(m, len(ds))
        for j, d in enumerate(ds):
            pres.entries[free_rank + j][j] = d
        return fp_module_normal_form(FPModPID(pres))

    @staticmethod
    def zero() -> "FPModPID":
        return FPModPID.from_divisors([], 0)

    @staticmethod
    def free(rank: int) -> "FPModPID":
        return FPModPID.from_divisors([], rank)

    @staticmethod
    def cyclic(d: Poly) -> "FPModPID":
        return FPModPID.from_divisors([d], 0)

    @staticmethod
    def from_action(t: Mat) -> "FPModPID":
        """Finite-length module from the x-action on a Q-vector space."""
        m = FPModPID(PolyMat.zeros(0, 0))
        m.normal = (0, tuple(invariant_factors(t)))
        # canonical presentation: diagonal of the invariant factors
        m.presentation = PolyMat.diagonal(list(m.normal[1]),
                                          rows=len(m.normal[1]),
                                          cols=len(m.normal[1]))
        return m

    # -- normal form accessors --------------------------------------------

    def normalized(self) -> "FPModPID":
        return self if self.normal is not None else fp_module_normal_form(self)

    @property
    def free_rank(self) -> int:
        return self.normalized().normal[0]

    @property
    def divisors(self) -> tuple[Poly, ...]:
        return self.normalized().normal[1]

    def iso_class(self) -> tuple[int, tuple[Poly, ...]]:
        n = self.normalized()
        return (n.normal[0], n.normal[1])

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.divisors

    def is_finite_length(self) -> bool:
        return self.free_rank == 0

    def dim_k(self) -> int:
        if not self.is_finite_length():
            raise ValueError("infinite-dimensional over Q")
        return sum(d.degree for d in self.divisors)

    def torsion_dim(self) -> int:
        return sum(d.degree for d in self.divisors)

    def isomorphic(self, other: "FPModPID") -> bool:
        return self.iso_class() == other.iso_class()

    def direct_sum(self, other: "FPModPID") -> "FPModPID":
        return FPModPID.from_divisors(
            list(self.divisors) + list(other.divisors),
            self.free_rank + other.free_rank)

    def to_action(self) -> Mat:
        """Companion-block x-action on the torsion part (power bases)."""
        blocks = [companion(d) for d in self.divisors]
        if not blocks:
            return Mat.zeros(0, 0)
        return Mat.block_diag(blocks)

    def support_points(self) -> list:
        """Rational points in the support of the torsion part."""
        pts = set()
        for d in self.divisors:
            for r, _ in d.rational_roots():
                pts.add(r)
        return sorted(pts)

    def __repr__(self):
        if self.normal is None:
            return f"FPModPID(unnormalized {self.presentation.rows}x{self.presentation.cols})"
        fr, ds = self.normal
        return f"FPModPID(free={fr}, divisors={list(ds)!r})"


def companion(d: Poly) -> Mat:
    """Companion matrix of a monic polynomial of degree >= 1."""
    n = d.degree
    if n < 1:
        raise ValueError("companion needs degree >= 1")
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i in range(n):
        rows[i][n - 1] = -d[i]
    return Mat.from_rows(rows)


def fp_module_normal_form(m: FPModPID) -> FPModPID:
    """Fill the normal field from the Smith form of the presentation."""
    if m.normal is not None:
        return m
    sf = smith_normal_form(m.presentation)
    divisors = tuple(d for d in sf.diag if d.degree >= 1)
    free_rank = m.presentation.rows - len(sf.diag)
    return FPModPID(m.presentation, (free_rank, divisors))


def _chain(divisors: Sequence[Poly], free_rank: int = 0) -> FPModPID:
    return FPModPID.from_divisors(divisors, free_rank)


def pid_hom_ext_tor(m: FPModPID, n: FPModPID) -> tuple[FPModPID, FPModPID, FPModPID]:
    """Hom, Ext^1, Tor_1 over Q[x] by the additive rules on normal forms.

    Computed from the two-term free resolution of the first argument:
        Hom(k[x]/(d), k[x]/(e)) = Ext^1(...) = Tor_1(...) = k[x]/gcd(d, e),
        Hom(k[x]/(d), k[x]) = 0,   Ext^1(k[x]/(d), k[x]) = k[x]/(d),
    and free arguments are projective/flat.
    """
    m = m.normalized()
    n = n.normalized()
    a, ds = m.normal
    b, es = n.normal

    hom_divs: list[Poly] = []
    ext_divs: list[Poly] = []
    tor_divs: list[Poly] = []

    for e in es:
        hom_divs.extend([e] * a)          # Hom(free^a, k[x]/(e))
    for d in ds:
        ext_divs.extend([d] * b)          # Ext^1(k[x]/(d), free^b)
        for e in es:
            g = d.gcd(e)
            if g.degree >= 1:
                hom_divs.append(g)
                ext_divs.append(g)
                tor_divs.append(g)

    hom = _chain(hom_divs, free_rank=a * b)
    ext1 = _chain(ext_divs)
    tor1 = _chain(tor_divs)
    return hom, ext1, tor1
