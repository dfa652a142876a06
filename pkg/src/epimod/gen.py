"""Seeded random module and morphism generators.

Every sampler takes an explicit random.Random stream, so suites and tests
replay case by case: `rng_for(seed, index)` derives an independent stream
per case from one 64-bit seed.
"""

import random
from fractions import Fraction

from .fpmod import FPModPID
from .kron import (INF, KronRep, RepMap, hom_space, preinjective,
                   preprojective, regular)
from .linalg import Mat
from .poly import Poly

_MIX = 1_000_003

OUT_POINTS = (Fraction(5), Fraction(-1))


def rng_for(seed, *salt) -> random.Random:
    """Independent stream for (seed, case index, ...)."""
    s = int(seed)
    for part in salt:
        if isinstance(part, str):
            for b in part.encode():
                s = s * _MIX + b + 1
        else:
            s = s * _MIX + int(part) + 1
    return random.Random(s)


def rand_invertible(rng, d) -> Mat:
    """Product of random shears; determinant 1, entries stay small."""
    a = Mat.identity(d)
    if d < 2:
        return a
    rows = a.to_lists()
    for _ in range(2 * d + 2):
        i, j = rng.randrange(d), rng.randrange(d)
        if i == j:
            continue
        c = rng.choice([-2, -1, 1, 2])
        rows[i] = [x + c * y for x, y in zip(rows[i], rows[j])]
    return Mat.from_rows(rows)


def _rand_block(rng, inst, kinds, size_bound):
    kind = rng.choice(kinds)
    if kind == "reg_in":
        pt = rng.choice(list(inst.points))
        return regular(pt, rng.randrange(1, size_bound + 1))
    if kind == "reg_out":
        outside = [p for p in OUT_POINTS if p not in inst.finite_points]
        return regular(rng.choice(outside), rng.randrange(1, size_bound + 1))
    if kind == "pp":
        return preprojective(rng.randrange(0, size_bound + 1))
    return preinjective(rng.randrange(0, size_bound + 1))


def sample_blocks(rng, inst, kinds, dim_bound, conjugate=True) -> KronRep:
    """Direct sum of random blocks from the named families, optionally
    hidden behind a random base change."""
    rep = KronRep.zero()
    size_bound = max(1, dim_bound // 2)
    for _ in range(rng.randrange(1, 4)):
        b = _rand_block(rng, inst, kinds, size_bound)
        if rep.dim() + b.dim() > dim_bound:
            continue
        rep = rep.direct_sum(b)
    if rep.dim() == 0:
        rep = regular(rng.choice(list(inst.points)), 1)
    if conjugate and rng.random() < 0.7:
        rep = rep.conjugate(rand_invertible(rng, rep.d1),
                            rand_invertible(rng, rep.d2))
    return rep


def sample_kron_rep(rng, inst, dim_bound=5, profile="mixed") -> KronRep:
    """Random representation: structured block sums or raw matrices.

    profile "structured" hides a block sum behind a base change, "raw"
    draws entries uniformly (generic: eigenvalues usually irrational),
    "mixed" flips a coin between the two.
    """
    if profile == "mixed":
        profile = "structured" if rng.random() < 0.5 else "raw"
    if profile == "structured":
        return sample_blocks(rng, inst, ("reg_in", "reg_out", "pp", "pi"),
                             dim_bound)
    d1 = rng.randrange(0, dim_bound + 1)
    d2 = rng.randrange(0, dim_bound + 1)
    if d1 + d2 == 0:
        d2 = 1
    draw = lambda: Fraction(rng.randrange(-3, 4), rng.choice([1, 1, 2]))
    f = Mat.from_rows([[draw() for _ in range(d1)] for _ in range(d2)],
                      cols=d1)
    g = Mat.from_rows([[draw() for _ in range(d1)] for _ in range(d2)],
                      cols=d1)
    return KronRep(d1, d2, f, g)


def sample_torsion_rep(rng, inst, dim_bound=6) -> KronRep:
    """Random u-torsion representation (regular-at-marked-points and
    preinjective blocks)."""
    return sample_blocks(rng, inst, ("reg_in", "pi"), dim_bound)


def sample_comodule(rng, inst, dim_bound=6) -> KronRep:
    """Random finite-dimensional comodule (equally: contramodule)."""
    return sample_blocks(rng, inst, ("reg_in",), dim_bound)


def sample_hom(rng, a: KronRep, b: KronRep) -> RepMap | None:
    """Random element of Hom(a, b), None when the space is zero."""
    basis = hom_space(a, b)
    if not basis:
        return None
    a1 = Mat.zeros(b.d1, a.d1)
    a2 = Mat.zeros(b.d2, a.d2)
    for h in basis:
        c = rng.randrange(-2, 3)
        if c:
            a1 = a1 + h.A1.scale(c)
            a2 = a2 + h.A2.scale(c)
    return RepMap(a1, a2)


def sample_cpid_module(rng, inst, dim_bound=6, out_points=OUT_POINTS,
                       free=False) -> FPModPID:
    """Random finitely generated torsion (optionally plus free) module."""
    divisors = []
    pool = list(inst.points) + [p for p in out_points
                                if p not in inst.points]
    total = 0
    for _ in range(rng.randrange(1, 4)):
        e = rng.randrange(1, 3)
        if total + e > dim_bound:
            continue
        mu = rng.choice(pool)
        divisors.append(Poly.x_minus(mu) ** e)
        total += e
    if not divisors:
        divisors = [Poly.x_minus(rng.choice(list(inst.points)))]
    rank = rng.randrange(0, 2) if free else 0
    return FPModPID.from_divisors(divisors, rank)


def intertwiner_basis(a_act: Mat, b_act: Mat) -> list[Mat]:
    """Basis of the maps X with X * a_act = b_act * X."""
    from .engine import _pid_hom_basis, _unvec
    da, db = a_act.rows, b_act.rows
    if da == 0 or db == 0:
        return []
    ker = _pid_hom_basis(a_act, b_act)
    return [_unvec(ker.col(j), db, da) for j in range(ker.cols)]


def sample_cpid_hom(rng, m: FPModPID, n: FPModPID) -> Mat | None:
    """Random module map m -> n as a matrix on the k-bases."""
    basis = intertwiner_basis(m.to_action(), n.to_action())
    if not basis:
        return None
    out = Mat.zeros(n.torsion_dim(), m.torsion_dim())
    for b in basis:
        c = rng.randrange(-2, 3)
        if c:
            out = out + b.scale(c)
    return out
