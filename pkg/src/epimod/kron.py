"""Finite-dimensional Kronecker quiver representations.

A representation is a pair of spaces V1, V2 with two maps f, g: V1 -> V2,
equivalently a left module over the triangular matrix ring with k in the
corners and k + kx off-diagonal: V1 is the part supported at the second
idempotent, V2 at the first, and the two off-diagonal generators 1 and x
act by f and g.

Points of the projective line are labeled in the chart x = g/f: a regular
block sits "at lambda" (finite) when g - lambda*f is singular on it, and
"at infinity" when f is singular. Infinity is the string "inf" throughout.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import Mat

INF = "inf"


def as_point(v):
    """Normalize a projective-line label: Fraction or the string 'inf'."""
    if v == INF or v is None:
        return INF
    return Fraction(v)


def point_sort_key(p):
    """Finite points ascending, infinity last."""
    return (1, Fraction(0)) if p == INF else (0, Fraction(p))


@dataclass
class KronRep:
    d1: int
    d2: int
    F: Mat  # d2 x d1
    G: Mat  # d2 x d1

    def __post_init__(self):
        if self.F.shape != (self.d2, self.d1) or self.G.shape != (self.d2, self.d1):
            raise ValueError(f"matrix shapes must be {(self.d2, self.d1)}")

    @staticmethod
    def zero() -> "KronRep":
        return KronRep(0, 0, Mat.zeros(0, 0), Mat.zeros(0, 0))

    @staticmethod
    def from_lists(f_rows, g_rows, d1=None, d2=None) -> "KronRep":
        d2_ = len(f_rows) if d2 is None else d2
        d1_ = (len(f_rows[0]) if f_rows else 0) if d1 is None else d1
        return KronRep(d1_, d2_,
                       Mat.from_rows(f_rows, cols=d1_),
                       Mat.from_rows(g_rows, cols=d1_))

    def is_zero_rep(self) -> bool:
        return self.d1 == 0 and self.d2 == 0

    def dim(self) -> int:
        return self.d1 + self.d2

    def direct_sum(self, other: "KronRep") -> "KronRep":
        return KronRep(self.d1 + other.d1, self.d2 + other.d2,
                       Mat.block_diag([self.F, other.F]),
                       Mat.block_diag([self.G, other.G]))

    def transpose(self) -> "KronRep":
        """The dual representation (arrows reversed via transposes)."""
        return KronRep(self.d2, self.d1, self.F.transpose(), self.G.transpose())

    def conjugate(self, a1: Mat, a2: Mat) -> "KronRep":
        """Base change by invertible a1 (on V1) and a2 (on V2)."""
        a1i = a1.inv()
        return KronRep(self.d1, self.d2, a2 * self.F * a1i, a2 * self.G * a1i)

    def pencil(self) -> "list[list]":
        """G - t*F as a PolyMat (variable t), shape d2 x d1."""
        from .poly import Poly
        from .polymat import PolyMat
        f = self.F.to_lists()
        g = self.G.to_lists()
        return PolyMat([[Poly([g[i][j], -f[i][j]]) for j in range(self.d1)]
                        for i in range(self.d2)], cols=self.d1)

    def reversed_pencil(self) -> "list[list]":
        """F - t*G, detecting the point at infinity."""
        from .poly import Poly
        from .polymat import PolyMat
        f = self.F.to_lists()
        g = self.G.to_lists()
        return PolyMat([[Poly([f[i][j], -g[i][j]]) for j in range(self.d1)]
                        for i in range(self.d2)], cols=self.d1)

    def __eq__(self, other):
        if not isinstance(other, KronRep):
            return NotImplemented
        return (self.d1, self.d2) == (other.d1, other.d2) and \
            self.F == other.F and self.G == other.G


@dataclass
class RepMap:
    """Morphism of representations: A1 on V1, A2 on V2 (target dims x source dims)."""
    A1: Mat
    A2: Mat

    def check(self, src: KronRep, tgt: KronRep) -> bool:
        if self.A1.shape != (tgt.d1, src.d1) or self.A2.shape != (tgt.d2, src.d2):
            return False
        return tgt.F * self.A1 == self.A2 * src.F and \
            tgt.G * self.A1 == self.A2 * src.G

    def compose(self, other: "RepMap") -> "RepMap":
        """self after other."""
        return RepMap(self.A1 * other.A1, self.A2 * other.A2)

    def is_iso(self) -> bool:
        return self.A1.is_iso() and self.A2.is_iso()

    def is_zero(self) -> bool:
        return self.A1.is_zero() and self.A2.is_zero()

    @staticmethod
    def identity(rep: KronRep) -> "RepMap":
        return RepMap(Mat.identity(rep.d1), Mat.identity(rep.d2))


def _jordan_upper(n: int) -> Mat:
    rows = [[0] * n for _ in range(n)]
    for i in range(n - 1):
        rows[i][i + 1] = 1
    return Mat.from_rows(rows, cols=n)


def standard_reps(kind: str, params=None) -> KronRep:
    """Named indecomposables.

    kinds: simple_projective, simple_injective, projective(i), injective(i),
    regular(lambda, n). Regular normal forms: finite lambda has F = I and
    G = lambda*I + J (J the upper Jordan cell); lambda = inf has F = J, G = I.
    """
    if kind == "simple_projective":
        return KronRep(0, 1, Mat.zeros(1, 0), Mat.zeros(1, 0))
    if kind == "simple_injective":
        return KronRep(1, 0, Mat.zeros(0, 1), Mat.zeros(0, 1))
    if kind == "projective":
        i = params
        if i == 1:
            return standard_reps("simple_projective")
        if i == 2:
            return KronRep.from_lists([[1], [0]], [[0], [1]])
        raise ValueError(f"projective index must be 1 or 2, got {i!r}")
    if kind == "injective":
        i = params
        if i == 2:
            return standard_reps("simple_injective")
        if i == 1:
            return KronRep.from_lists([[1, 0]], [[0, 1]])
        raise ValueError(f"injective index must be 1 or 2, got {i!r}")
    if kind == "regular":
        lam, n = params
        lam = as_point(lam)
        if n < 1:
            raise ValueError("regular block size must be >= 1")
        j = _jordan_upper(n)
        eye = Mat.identity(n)
        if lam == INF:
            return KronRep(n, n, j, eye)
        return KronRep(n, n, eye, eye.scale(lam) + j)
    raise ValueError(f"unknown representation kind {kind!r}")


def regular(lam, n: int) -> KronRep:
    return standard_reps("regular", (lam, n))


def simple_projective() -> KronRep:
    return standard_reps("simple_projective")


def simple_injective() -> KronRep:
    return standard_reps("simple_injective")


def preprojective(n: int) -> KronRep:
    """Dims (n, n+1); n = 0 is the simple projective."""
    top = Mat.identity(n).vstack(Mat.zeros(1, n))
    bottom = Mat.zeros(1, n).vstack(Mat.identity(n))
    return KronRep(n, n + 1, top, bottom)


def preinjective(n: int) -> KronRep:
    """Dims (n+1, n); n = 0 is the simple injective."""
    left = Mat.identity(n).hstack(Mat.zeros(n, 1))
    right = Mat.zeros(n, 1).hstack(Mat.identity(n))
    return KronRep(n + 1, n, left, right)


def indecomposable_projectives() -> list[KronRep]:
    return [standard_reps("projective", 1), standard_reps("projective", 2)]


def indecomposable_injectives() -> list[KronRep]:
    return [standard_reps("injective", 1), standard_reps("injective", 2)]


def euler_form(m: KronRep, n: KronRep) -> int:
    return m.d1 * n.d1 + m.d2 * n.d2 - 2 * m.d1 * n.d2


def hom_matrix(m: KronRep, n: KronRep) -> Mat:
    """Matrix of (p1, p2) -> (p2*F_m - F_n*p1, p2*G_m - G_n*p1).

    Domain coordinates: vec(p1) then vec(p2), both row-major with p1 of
    shape (n.d1, m.d1) and p2 of shape (n.d2, m.d2).
    """
    rows_amount = 2 * n.d2 * m.d1
    cols_amount = n.d1 * m.d1 + n.d2 * m.d2
    fm = m.F.to_lists()
    gm = m.G.to_lists()
    fn = n.F.to_lists()
    gn = n.G.to_lists()
    rows = [[Fraction(0)] * cols_amount for _ in range(rows_amount)]

    def p1_idx(i, j):
        return i * m.d1 + j

    def p2_idx(i, j):
        return n.d1 * m.d1 + i * m.d2 + j

    r = 0
    for src_mat, tgt_mat in ((fm, fn), (gm, gn)):
        for i in range(n.d2):
            for j in range(m.d1):
                row = rows[r]
                for k in range(m.d2):
                    row[p2_idx(i, k)] += src_mat[k][j]
                for k in range(n.d1):
                    row[p1_idx(k, j)] -= tgt_mat[i][k]
                r += 1
    return Mat.from_rows(rows, cols=cols_amount)


def _unvec_pair(v: Mat, m: KronRep, n: KronRep) -> RepMap:
    vals = [v.entry(i, 0) for i in range(v.rows)]
    a1 = [vals[i * m.d1:(i + 1) * m.d1] for i in range(n.d1)]
    off = n.d1 * m.d1
    a2 = [vals[off + i * m.d2:off + (i + 1) * m.d2] for i in range(n.d2)]
    return RepMap(Mat.from_rows(a1, cols=m.d1), Mat.from_rows(a2, cols=m.d2))


def hom_space(m: KronRep, n: KronRep) -> list[RepMap]:
    """Basis of Hom(m, n)."""
    if m.dim() == 0 or n.dim() == 0:
        return []
    ker = hom_matrix(m, n).kernel()
    return [_unvec_pair(ker.col(j), m, n) for j in range(ker.cols)]


def hom_ext_rep(m: KronRep, n: KronRep) -> tuple[list[RepMap], int, list[KronRep]]:
    """(basis of Hom(m, n), dim Ext^1(m, n), middle terms realizing Ext^1).

    Ext classes are cocycle pairs (pa, pb) in Hom(V1m, V2n)^2 modulo the
    image of the intertwining differential; each representative gives the
    extension 0 -> n -> E -> m -> 0 with the cocycle in the upper corner.
    """
    if m.dim() == 0 or n.dim() == 0:
        return [], 0, []
    d = hom_matrix(m, n)
    ker = d.kernel()
    hom_basis = [_unvec_pair(ker.col(j), m, n) for j in range(ker.cols)]

    from .linalg import Quotient
    q = Quotient(d.image_basis(), ambient_dim=d.rows)
    ext1_dim = q.dim
    ext1_reps = []
    for j in range(q.dim):
        w = q.section.col(j)  # cocycle representative in Hom(V1m, V2n)^2
        vals = [w.entry(i, 0) for i in range(w.rows)]
        half = n.d2 * m.d1
        pa = Mat.from_rows([vals[i * m.d1:(i + 1) * m.d1] for i in range(n.d2)],
                           cols=m.d1)
        pb = Mat.from_rows([vals[half + i * m.d1:half + (i + 1) * m.d1]
                            for i in range(n.d2)], cols=m.d1)
        f_e = Mat.block([[n.F, pa], [Mat.zeros(m.d2, n.d1), m.F]])
        g_e = Mat.block([[n.G, pb], [Mat.zeros(m.d2, n.d1), m.G]])
        ext1_reps.append(KronRep(n.d1 + m.d1, n.d2 + m.d2, f_e, g_e))
    return hom_basis, ext1_dim, ext1_reps


def hom_dim(m: KronRep, n: KronRep) -> int:
    if m.dim() == 0 or n.dim() == 0:
        return 0
    d = hom_matrix(m, n)
    return d.cols - d.rank()


def ext_dim(m: KronRep, n: KronRep) -> int:
    if m.dim() == 0 or n.dim() == 0:
        return 0
    d = hom_matrix(m, n)
    return d.rows - d.rank()


def sub_rep(rep: KronRep, b1: Mat, b2: Mat) -> KronRep:
    """Restrict to the subrepresentation spanned by columns b1, b2.

    Caller guarantees F b1, G b1 land in the span of b2.
    """
    f = b2.solve(rep.F * b1)
    g = b2.solve(rep.G * b1)
    if f is None or g is None:
        raise ValueError("not a subrepresentation")
    return KronRep(b1.cols, b2.cols, f, g)
