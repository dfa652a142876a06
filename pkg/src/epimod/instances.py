"""Ring-epimorphism instances with finite-dimensional exhaustions.

Two hardcoded families, both with injective u: R -> U:

* cpid: R = Q[x], U the localization inverting x - mu for each point mu of a
  finite nonempty set Y.  K = U/R is the sum of the Prufer modules at the
  points of Y.
* kron: R the Kronecker matrix ring (upper triangular 2x2 matrices with a
  two-dimensional corner), U the full 2x2 matrix ring over the localization
  S_X of k[x] at the finite points of X, where X always contains infinity.
  K = U/R is a 2x2 square of localization quotients.

Both U and K are unions of finite-dimensional levels indexed by a token
basis: Pow(m) for x^m and Pole(lam, n) for (x - lam)^(-n).  Levels of K are
genuine submodules; levels of U in the cpid family are plain windows whose
action lands one level higher.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .fpmod import FPModPID
from .kron import INF, KronRep, RepMap, as_point, point_sort_key
from .linalg import Mat
from .poly import Poly

TARGETS = ("U_as_left_R_module", "K_as_left_R_module", "U_bimodule",
           "K_bimodule")

ENTRIES = ((1, 1), (1, 2), (2, 1), (2, 2))


@dataclass(frozen=True)
class Pow:
    """Basis token x^m."""
    m: int


@dataclass(frozen=True)
class Pole:
    """Basis token (x - point)^(-n), n >= 1."""
    point: Fraction
    n: int


def _require_point(inst: "EpiInstance", lam) -> Fraction:
    lam = Fraction(lam)
    if lam not in inst.finite_points:
        raise ValueError(f"pole point {lam} is not in the instance point set")
    return lam


def x_action_on_tokens(inst: "EpiInstance", token):
    """Exact expansion of x * token in the token basis.

    Pole(lam, 0) means Pow(0), so the bottom of a pole chain feeds into the
    polynomial part.  Zero coefficients are dropped.
    """
    if isinstance(token, Pow):
        return [(Pow(token.m + 1), Fraction(1))]
    lam = _require_point(inst, token.point)
    lower = Pow(0) if token.n == 1 else Pole(lam, token.n - 1)
    out = [(lower, Fraction(1))]
    if lam:
        out.append((Pole(lam, token.n), lam))
    return out


def pole_inverse_on_tokens(inst: "EpiInstance", lam, token):
    """Exact expansion of token / (x - lam) in the token basis."""
    lam = _require_point(inst, lam)
    if isinstance(token, Pow):
        # x^m / (x-lam) = sum_{i<m} lam^(m-1-i) x^i + lam^m / (x-lam)
        out = [(Pow(i), lam ** (token.m - 1 - i)) for i in range(token.m)
               if lam ** (token.m - 1 - i)]
        out.append((Pole(lam, 1), lam ** token.m))
        return [(t, c) for t, c in out if c]
    nu = _require_point(inst, token.point)
    if nu == lam:
        return [(Pole(lam, token.n + 1), Fraction(1))]
    # 1/((x-lam)(x-nu)^n) by partial fractions:
    #   (lam-nu)^(-n) / (x-lam) - sum_{i<n} (lam-nu)^(-(i+1)) / (x-nu)^(n-i)
    d = lam - nu
    out = [(Pole(lam, 1), d ** (-token.n))]
    out.extend((Pole(nu, token.n - i), -d ** (-(i + 1)))
               for i in range(token.n))
    return out


def _combo_matrix(src_tokens, tgt_tokens, expand, killed=frozenset()) -> Mat:
    """Matrix of a token-expansion map between two windows.

    Image tokens must land in the target window or in the killed set (the
    part a quotient entry annihilates); anything else is a construction bug.
    """
    index = {t: i for i, t in enumerate(tgt_tokens)}
    rows = [[Fraction(0)] * len(src_tokens) for _ in tgt_tokens]
    for j, tok in enumerate(src_tokens):
        for u, c in expand(tok):
            i = index.get(u)
            if i is not None:
                rows[i][j] += c
            elif u not in killed:
                raise AssertionError(f"token {u!r} escapes the level window")
    return Mat.from_rows(rows, cols=len(src_tokens))


def _subset_matrix(src_tokens, tgt_tokens) -> Mat:
    return _combo_matrix(src_tokens, tgt_tokens,
                         lambda t: [(t, Fraction(1))])


# --- cpid levels ----------------------------------------------------------

def _cpid_k_tokens(points, n):
    return tuple(Pole(mu, j) for mu in points for j in range(1, n + 1))


def _cpid_u_tokens(points, n):
    toks = [Pow(m) for m in range(n + 1)]
    for mu in points:
        toks.extend(Pole(mu, j) for j in range(1, n + 1))
    return tuple(toks)


@dataclass(eq=False)
class CpidKLevel:
    """Level n of U/R: the sum of length-n pole chains, one per point.

    x-closed, so x_action is square; include embeds level n-1.
    """
    n: int
    tokens: tuple
    x_action: Mat
    include: Mat
    module: FPModPID

    def dim(self) -> int:
        return len(self.tokens)


@dataclass(eq=False)
class CpidULevel:
    """Level n of U: powers up to n plus pole chains up to depth n.

    Not x-closed: x_action maps level n into level n+1 (the action target
    level is n+1); include embeds level n-1.
    """
    n: int
    tokens: tuple
    x_action: Mat
    include: Mat

    def dim(self) -> int:
        return len(self.tokens)


def _build_cpid_k(inst: "EpiInstance", n: int) -> CpidKLevel:
    toks = _cpid_k_tokens(inst.points, n)
    expand = lambda t: x_action_on_tokens(inst, t)
    x_act = _combo_matrix(toks, toks, expand, killed=frozenset({Pow(0)}))
    include = _subset_matrix(_cpid_k_tokens(inst.points, n - 1), toks)
    module = FPModPID.from_divisors(
        [Poly.x_minus(mu) ** n for mu in inst.points])
    return CpidKLevel(n, toks, x_act, include, module)


def _build_cpid_u(inst: "EpiInstance", n: int) -> CpidULevel:
    toks = _cpid_u_tokens(inst.points, n)
    expand = lambda t: x_action_on_tokens(inst, t)
    x_act = _combo_matrix(toks, _cpid_u_tokens(inst.points, n + 1), expand)
    include = _subset_matrix(_cpid_u_tokens(inst.points, n - 1), toks)
    return CpidULevel(n, toks, x_act, include)


# --- kron levels ----------------------------------------------------------

# Lowest power token per entry of K (the quotient kills what R occupies) and
# highest power shift per entry; pole chains run 1..n in every entry.
_K_LOW = {(1, 1): 1, (1, 2): 2, (2, 1): 0, (2, 2): 1}
_HIGH_SHIFT = {(1, 1): 0, (1, 2): 1, (2, 1): -1, (2, 2): 0}
_K_KILLED = {(1, 1): frozenset({Pow(0)}),
             (1, 2): frozenset({Pow(0), Pow(1)}),
             (2, 1): frozenset(),
             (2, 2): frozenset({Pow(0)})}


def _kron_entry_tokens(finite_points, target, entry, n):
    lo = _K_LOW[entry] if target == "K" else 0
    toks = [Pow(m) for m in range(lo, n + _HIGH_SHIFT[entry] + 1)]
    for lam in finite_points:
        toks.extend(Pole(lam, j) for j in range(1, n + 1))
    return tuple(toks)


@dataclass(eq=False)
class BimodLevel:
    """Level n of the kron U or K as a sub-bimodule.

    left: the left-module structure (V1 = row 2 entries, V2 = row 1 entries,
    f acts by 1 and g by x down each column).  right: the right-module
    structure (W1 = column 1 entries, W2 = column 2, acting along rows).
    include_* embed level n-1 (for U, level 0 is R itself).
    """
    target: str
    n: int
    entry_tokens: dict
    left: KronRep
    right: KronRep
    include_left: RepMap
    include_right: RepMap
    inst: "EpiInstance" = field(repr=False)

    def dim(self) -> int:
        return self.left.dim()

    def _tagged(self, side: str):
        """Concatenated (entry, token) lists for the two rep spaces."""
        e = self.entry_tokens
        if side == "left":
            one = [((2, 1), t) for t in e[(2, 1)]] + \
                  [((2, 2), t) for t in e[(2, 2)]]
            two = [((1, 1), t) for t in e[(1, 1)]] + \
                  [((1, 2), t) for t in e[(1, 2)]]
        elif side == "right":
            one = [((1, 1), t) for t in e[(1, 1)]] + \
                  [((2, 1), t) for t in e[(2, 1)]]
            two = [((1, 2), t) for t in e[(1, 2)]] + \
                  [((2, 2), t) for t in e[(2, 2)]]
        else:
            raise ValueError(f"side must be left or right, got {side!r}")
        return one, two

    def r_embedding(self, side: str) -> tuple[KronRep, RepMap]:
        """The copy of R inside a U level, as a rep with its embedding."""
        if self.target != "U":
            raise ValueError("R embeds into U levels only")
        rep, one, two = _r_rep(side)
        src_one, src_two = self._tagged(side)
        a1 = _position_matrix(one, src_one)
        a2 = _position_matrix(two, src_two)
        return rep, RepMap(a1, a2)

    def k_quotient(self, side: str) -> RepMap:
        """The projection of a U level onto the K level of the same n."""
        if self.target != "U":
            raise ValueError("quotient to K is defined on U levels only")
        klvl = self.inst.level("K_bimodule", self.n)
        src_one, src_two = self._tagged(side)
        tgt_one, tgt_two = klvl._tagged(side)
        return RepMap(_window_projection(src_one, tgt_one),
                      _window_projection(src_two, tgt_two))


def _position_matrix(cols_tagged, ambient_tagged) -> Mat:
    index = {t: i for i, t in enumerate(ambient_tagged)}
    rows = [[Fraction(0)] * len(cols_tagged) for _ in ambient_tagged]
    for j, tag in enumerate(cols_tagged):
        rows[index[tag]][j] = Fraction(1)
    return Mat.from_rows(rows, cols=len(cols_tagged))


def _window_projection(src_tagged, tgt_tagged) -> Mat:
    index = {t: i for i, t in enumerate(tgt_tagged)}
    rows = [[Fraction(0)] * len(src_tagged) for _ in tgt_tagged]
    for j, tag in enumerate(src_tagged):
        i = index.get(tag)
        if i is not None:
            rows[i][j] = Fraction(1)
        else:
            entry, tok = tag
            assert tok in _K_KILLED[entry], \
                f"non-R token {tok!r} missing from the K window at {entry}"
    return Mat.from_rows(rows, cols=len(src_tagged))


def _r_rep(side: str):
    """R over itself in the token tagging of U levels.

    Left structure = columns of R: the simple projective plus the projective
    of dimension vector (1, 2).  Right structure = rows, mirrored.
    """
    if side == "left":
        one = [((2, 2), Pow(0))]
        two = [((1, 1), Pow(0)), ((1, 2), Pow(0)), ((1, 2), Pow(1))]
        f = Mat.from_rows([[0], [1], [0]])
        g = Mat.from_rows([[0], [0], [1]])
    else:
        one = [((1, 1), Pow(0))]
        two = [((1, 2), Pow(0)), ((1, 2), Pow(1)), ((2, 2), Pow(0))]
        f = Mat.from_rows([[1], [0], [0]])
        g = Mat.from_rows([[0], [1], [0]])
    return KronRep(1, 3, f, g), one, two


def _build_kron(inst: "EpiInstance", target: str, n: int) -> BimodLevel:
    pts = inst.finite_points
    toks = {e: _kron_entry_tokens(pts, target, e, n) for e in ENTRIES}
    prev = {e: _kron_entry_tokens(pts, target, e, n - 1) for e in ENTRIES}
    ident = lambda t: [(t, Fraction(1))]
    expand = lambda t: x_action_on_tokens(inst, t)

    def emap(src, tgt, fn):
        killed = _K_KILLED[tgt] if target == "K" else frozenset()
        return _combo_matrix(toks[src], toks[tgt], fn, killed)

    left = KronRep(
        len(toks[(2, 1)]) + len(toks[(2, 2)]),
        len(toks[(1, 1)]) + len(toks[(1, 2)]),
        Mat.block_diag([emap((2, 1), (1, 1), ident),
                        emap((2, 2), (1, 2), ident)]),
        Mat.block_diag([emap((2, 1), (1, 1), expand),
                        emap((2, 2), (1, 2), expand)]))
    right = KronRep(
        len(toks[(1, 1)]) + len(toks[(2, 1)]),
        len(toks[(1, 2)]) + len(toks[(2, 2)]),
        Mat.block_diag([emap((1, 1), (1, 2), ident),
                        emap((2, 1), (2, 2), ident)]),
        Mat.block_diag([emap((1, 1), (1, 2), expand),
                        emap((2, 1), (2, 2), expand)]))
    sub = {e: _subset_matrix(prev[e], toks[e]) for e in ENTRIES}
    include_left = RepMap(Mat.block_diag([sub[(2, 1)], sub[(2, 2)]]),
                          Mat.block_diag([sub[(1, 1)], sub[(1, 2)]]))
    include_right = RepMap(Mat.block_diag([sub[(1, 1)], sub[(2, 1)]]),
                           Mat.block_diag([sub[(1, 2)], sub[(2, 2)]]))
    return BimodLevel(target, n, toks, left, right,
                      include_left, include_right, inst)


# --- instances ------------------------------------------------------------

@dataclass(frozen=True)
class EpiInstance:
    """One of the two epimorphism families; immutable, levels memoized."""
    kind: str
    points: tuple
    _cache: dict = field(default_factory=dict, compare=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock,
                                  compare=False, repr=False)

    @property
    def finite_points(self) -> tuple:
        if self.kind == "kron":
            return tuple(p for p in self.points if p != INF)
        return self.points

    def h_poly(self) -> Poly:
        """Product of x - mu over the finite points."""
        return Poly.from_roots(self.finite_points)

    def level(self, target: str, n: int):
        if target not in TARGETS:
            raise ValueError(f"unknown truncation target {target!r}")
        if n < 1:
            raise ValueError("level index must be >= 1")
        key = ("U" if target.startswith("U") else "K", n)
        with self._lock:
            if key not in self._cache:
                if self.kind == "cpid":
                    build = _build_cpid_u if key[0] == "U" else _build_cpid_k
                    self._cache[key] = build(self, n)
                else:
                    self._cache[key] = _build_kron(self, key[0], n)
            return self._cache[key]

    def is_restricted_u_module(self, rep: KronRep) -> bool:
        """Whether a finite-dimensional rep is the restriction of a U-module:
        f invertible and g - lam*f invertible for every finite point."""
        if self.kind != "kron":
            raise ValueError("predicate applies to the kron family")
        if not rep.F.is_iso():
            return False
        return all((rep.G - rep.F.scale(lam)).is_iso()
                   for lam in self.finite_points)


def make_instance(kind: str, points) -> EpiInstance:
    kind = kind.lower()
    if kind == "kron":
        pts = sorted({as_point(p) for p in points}, key=point_sort_key)
        if INF not in pts:
            raise ValueError("kron point set must contain inf")
        return EpiInstance(kind, tuple(pts))
    if kind == "cpid":
        if any(p == INF for p in points):
            raise ValueError("cpid points must be finite rationals")
        pts = sorted({Fraction(p) for p in points})
        if not pts:
            raise ValueError("cpid point set must be nonempty")
        return EpiInstance(kind, tuple(pts))
    raise ValueError(f"unknown instance kind {kind!r}")


def truncate(inst: EpiInstance, target: str, n: int):
    """Level n of the requested filtered object, with its inclusion from
    level n-1 attached.  Levels are cached, so a stabilized computation
    asking again gets the identical object."""
    return inst.level(target, n)


def level_containing_token(inst: EpiInstance, target: str, token) -> int:
    """Smallest level whose window contains the token (exhaustion helper)."""
    bound = token.m + 2 if isinstance(token, Pow) else token.n + 1
    for n in range(1, bound + 1):
        lvl = truncate(inst, target, n)
        if isinstance(lvl, BimodLevel):
            if any(token in toks for toks in lvl.entry_tokens.values()):
                return n
        elif token in lvl.tokens:
            return n
    raise ValueError(f"token {token!r} does not occur in {target}")


def instance_to_json(inst: EpiInstance) -> dict:
    return {"kind": inst.kind, "points": [str(p) for p in inst.points]}


def instance_from_json(data: dict) -> EpiInstance:
    return make_instance(data["kind"], data["points"])
