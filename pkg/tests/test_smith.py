import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from epimod.poly import Poly
from epimod.polymat import PolyMat, char_matrix, invariant_factors, smith_normal_form

from conftest import random_poly


def check_smith(a: PolyMat):
    sf = smith_normal_form(a)
    # left * a * right == diagonal, entry-exact
    lar = sf.left * a * sf.right
    expected = sf.diagonal_matrix(a.rows, a.cols)
    assert lar == expected
    # transforms are unimodular: nonzero rational determinant
    dl = sf.left.det()
    dr = sf.right.det()
    assert dl.is_const() and not dl.is_zero()
    assert dr.is_const() and not dr.is_zero()
    # divisibility chain, monic entries
    for d in sf.diag:
        assert not d.is_zero()
        assert d.lead() == 1
    for d1, d2 in zip(sf.diag, sf.diag[1:]):
        assert d1.divides(d2)
    assert sf.profile == a.rows - len(sf.diag)
    return sf


class TestFrozenExamples:
    def test_single_entry(self):
        sf = check_smith(PolyMat.from_scalars([[Poly([0, 0, 1])]]))
        assert sf.diag == [Poly([0, 0, 1])]

    def test_two_by_two_coprime_diagonal(self):
        # diag(x, x-1) has invariant factors 1, x(x-1)
        a = PolyMat.from_scalars([[Poly.x(), Poly.zero()],
                                  [Poly.zero(), Poly.x_minus(1)]])
        sf = check_smith(a)
        assert sf.diag == [Poly.one(), Poly([0, -1, 1])]

    def test_zero_matrix(self):
        sf = check_smith(PolyMat.zeros(2, 3))
        assert sf.diag == []
        assert sf.profile == 2

    def test_merge_off_diagonal(self):
        # [[x, 1], [0, x]] presents a single cyclic module k[x]/(x^2)
        a = PolyMat.from_scalars([[Poly.x(), Poly.one()],
                                  [Poly.zero(), Poly.x()]])
        sf = check_smith(a)
        assert sf.diag == [Poly.one(), Poly([0, 0, 1])]


class TestRandom:
    def test_random_matrices(self):
        rng = random.Random(11)
        for _ in range(40):
            m = rng.randint(1, 4)
            n = rng.randint(1, 4)
            a = PolyMat([[random_poly(rng, 2) if rng.random() < 0.8 else Poly.zero()
                          for _ in range(n)] for _ in range(m)], cols=n)
            check_smith(a)

    def test_unimodular_invariance(self):
        # pre/post-composing with elementary transforms keeps the diag
        rng = random.Random(13)
        for _ in range(20):
            n = rng.randint(2, 3)
            a = PolyMat([[random_poly(rng, 2) for _ in range(n)] for _ in range(n)],
                        cols=n)
            e = PolyMat.identity(n)
            e.entries[0][n - 1] = random_poly(rng, 1)
            d1 = smith_normal_form(a).diag
            d2 = smith_normal_form(e * a).diag
            assert d1 == d2

    def test_sympy_oracle(self):
        # independent check of the invariant factors via sympy's matrices
        import sympy
        x = sympy.symbols("x")
        rng = random.Random(17)
        for _ in range(15):
            m = rng.randint(1, 3)
            n = rng.randint(1, 3)
            a = PolyMat([[random_poly(rng, 2) for _ in range(n)] for _ in range(m)],
                        cols=n)
            sf = smith_normal_form(a)
            sm = sympy.Matrix(
                [[sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator)
                                            for c in p.coeffs])) or [0], x).as_expr()
                  for p in row] for row in a.entries])
            # rank over the fraction field fixes the number of nonzero factors
            assert sm.rank() == len(sf.diag)
            # determinant divisors: product of diag = gcd of maximal minors (up to unit)
            if m == n and len(sf.diag) == n:
                det = sympy.cancel(sm.det())
                prod = Poly.one()
                for d in sf.diag:
                    prod = prod * d
                det_poly = sympy.Poly(det, x)
                lead = det_poly.LC()
                monic = [sympy.Rational(c) / lead for c in det_poly.all_coeffs()]
                mine = [sympy.Rational(c.numerator, c.denominator)
                        for c in reversed(prod.coeffs)]
                assert monic == mine


class TestInvariantFactors:
    def test_companion_roundtrip(self):
        from epimod.fpmod import companion
        d = Poly([2, 0, 1]) * Poly.x_minus(1)  # (x^2+2)(x-1), monic deg 3
        d = d.monic()
        t = companion(d)
        assert invariant_factors(t) == [d]

    def test_nilpotent_jordan(self):
        from epimod.linalg import Mat
        j = Mat.from_rows([[0, 1], [0, 0]])
        assert invariant_factors(j) == [Poly([0, 0, 1])]

    def test_diagonalizable_split(self):
        from epimod.linalg import Mat
        t = Mat.from_rows([[0, 0], [0, 1]])
        assert invariant_factors(t) == [Poly([0, -1, 1])]  # x(x-1)
