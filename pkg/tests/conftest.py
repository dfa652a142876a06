"""Shared oracles and generators for the test suite.

The oracles here are deliberately dumb and independent of the library
internals: brute-force linear solving over Fraction, no DomainMatrix, no
normal forms. They exist so the fast paths have something to disagree with.
"""
from __future__ import annotations

import random
from fractions import Fraction

from epimod.poly import Poly


# --- naive Fraction linear algebra (independent of epimod.linalg) ---------

def naive_rref(rows):
    """Row reduce a list-of-lists of Fractions in place; return pivot cols."""
    m = [list(map(Fraction, r)) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    piv = []
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        p = None
        for i in range(r, nr):
            if m[i][c] != 0:
                p = i
                break
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(nr):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        piv.append(c)
        r += 1
    return m, piv


def naive_rank(rows):
    if not rows or not rows[0]:
        return 0
    return len(naive_rref(rows)[1])


def naive_kernel_dim(rows, ncols):
    return ncols - naive_rank(rows) if rows else ncols


def hom_dim_oracle(s_mat, t_mat):
    """dim Hom_{Q[x]}(M, N) where M, N are given by x-action matrices.

    A homomorphism is a matrix A with A*S = T*A; solve the commutation
    system entrywise over Fraction.
    """
    a = len(s_mat)      # dim M
    b = len(t_mat)      # dim N
    if a == 0 or b == 0:
        return 0
    # unknowns A[i][j], i < b, j < a
    rows = []
    for i in range(b):
        for j in range(a):
            # (A S - T A)[i][j] = sum_k A[i][k] S[k][j] - sum_k T[i][k] A[k][j]
            row = [Fraction(0)] * (a * b)
            for k in range(a):
                row[i * a + k] += Fraction(s_mat[k][j])
            for k in range(b):
                row[k * a + j] -= Fraction(t_mat[i][k])
            rows.append(row)
    return naive_kernel_dim(rows, a * b)


def companion_lists(d: Poly):
    """Companion matrix of monic d as list-of-lists of Fractions."""
    n = d.degree
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(1, n):
        m[i][i - 1] = Fraction(1)
    for i in range(n):
        m[i][n - 1] = -d[i]
    return m


def action_of_divisors(divisors):
    """Block companion action for a list of monic divisors."""
    blocks = [companion_lists(d) for d in divisors]
    n = sum(len(b) for b in blocks)
    out = [[Fraction(0)] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[off + i][off + j] = v
        off += len(b)
    return out


def naive_mul(a, b):
    """Multiply two list-of-lists Fraction matrices."""
    if not a or not b:
        return [[Fraction(0)] * (len(b[0]) if b else 0) for _ in a]
    return [[sum((Fraction(x) * Fraction(y) for x, y in zip(row, col)),
                 Fraction(0))
             for col in zip(*b)] for row in a]


def kron_hom_ext_oracle(fm, gm, fn, gn, m_d1, m_d2, n_d1, n_d2):
    """(dim Hom, dim Ext1) for quiver reps given as plain list-of-lists.

    Builds the intertwining system column by column: for every basis pair
    (p1, p2) = (E_ij, 0) or (0, E_ij), apply the defining bilinear maps with
    naive matrix products and flatten the result. Completely independent of
    the library's vectorized construction.
    """
    def eij(i, j, r, c):
        m = [[Fraction(0)] * c for _ in range(r)]
        m[i][j] = Fraction(1)
        return m

    def msub(a, b):
        return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]

    def flat(mats):
        out = []
        for m in mats:
            for row in m:
                out.extend(row)
        return out

    cols = []
    for i in range(n_d1):
        for j in range(m_d1):
            p1 = eij(i, j, n_d1, m_d1)
            cols.append(flat([msub([[Fraction(0)] * m_d1
                                    for _ in range(n_d2)], naive_mul(fn, p1)),
                              msub([[Fraction(0)] * m_d1
                                    for _ in range(n_d2)], naive_mul(gn, p1))]))
    for i in range(n_d2):
        for j in range(m_d2):
            p2 = eij(i, j, n_d2, m_d2)
            cols.append(flat([naive_mul(p2, fm), naive_mul(p2, gm)]))
    dom = len(cols)
    target = 2 * n_d2 * m_d1
    if dom == 0:
        return 0, target
    rows = [[c[i] for c in cols] for i in range(target)]
    r = naive_rank(rows)
    return dom - r, target - r


# --- random data ----------------------------------------------------------

def random_poly(rng: random.Random, max_deg: int, *, monic=False) -> Poly:
    deg = rng.randint(0, max_deg)
    coeffs = [Fraction(rng.randint(-3, 3)) for _ in range(deg + 1)]
    if monic:
        coeffs[-1] = Fraction(1)
    elif all(c == 0 for c in coeffs):
        coeffs[-1] = Fraction(1)
    return Poly(coeffs)


def random_divisor(rng: random.Random, points, max_total=4) -> Poly:
    """Monic polynomial with roots among the given points."""
    d = Poly.one()
    total = 0
    for mu in points:
        e = rng.randint(0, max_total - total)
        total += e
        d = d * (Poly.x_minus(mu) ** e)
    if d.degree == 0:
        d = Poly.x_minus(rng.choice(points))
    return d
