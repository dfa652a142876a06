"""Tests for the two ring-epimorphism instance families and their levels."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epimod.fpmod import FPModPID
from epimod.instances import (
    Pole,
    Pow,
    instance_from_json,
    instance_to_json,
    level_containing_token,
    make_instance,
    pole_inverse_on_tokens,
    truncate,
    x_action_on_tokens,
)
from epimod.kron import INF, regular
from epimod.linalg import Mat
from epimod.pencil import (
    Preprojective,
    Regular,
    pencil_decompose,
    pencil_invariants,
)
from epimod.poly import Poly


def combo_as_poly_identity(lam, n, combo):
    """Clear denominators: return sum of c * t * (x-lam)^n over (t, c) in combo.

    Pow(m) contributes c * x^m * (x-lam)^n, Pole(lam, j) contributes
    c * (x-lam)^(n-j).  Tokens at other pole points are rejected.
    """
    q = Poly.x_minus(lam)
    total = Poly.zero()
    for tok, c in combo:
        if isinstance(tok, Pow):
            total = total + (Poly.x() ** tok.m * q ** n).scale(c)
        else:
            assert tok.point == lam
            assert tok.n <= n
            total = total + (q ** (n - tok.n)).scale(c)
    return total


class TestTokens:
    def test_x_on_pow(self):
        inst = make_instance("cpid", [0])
        assert x_action_on_tokens(inst, Pow(4)) == [(Pow(5), Fraction(1))]

    def test_x_on_pole_bottom(self):
        inst = make_instance("cpid", [0])
        assert x_action_on_tokens(inst, Pole(Fraction(0), 1)) == \
            [(Pow(0), Fraction(1))]

    def test_x_on_pole_general(self):
        inst = make_instance("cpid", [2])
        got = x_action_on_tokens(inst, Pole(Fraction(2), 3))
        assert got == [(Pole(Fraction(2), 2), Fraction(1)),
                       (Pole(Fraction(2), 3), Fraction(2))]

    @given(lam=st.fractions(max_denominator=4), n=st.integers(1, 5))
    def test_x_on_pole_identity(self, lam, n):
        # Oracle: multiply x * (x-lam)^-n by (x-lam)^n and compare polynomials.
        inst = make_instance("cpid", [lam])
        combo = x_action_on_tokens(inst, Pole(lam, n))
        assert combo_as_poly_identity(lam, n, combo) == Poly.x()

    def test_pole_inverse_on_pole_same_point(self):
        inst = make_instance("cpid", [1])
        got = pole_inverse_on_tokens(inst, Fraction(1), Pole(Fraction(1), 2))
        assert got == [(Pole(Fraction(1), 3), Fraction(1))]

    @given(lam=st.sampled_from([Fraction(0), Fraction(1), Fraction(-2)]),
           m=st.integers(0, 5))
    def test_pole_inverse_on_pow_identity(self, lam, m):
        # x^m / (x-lam) expands to a polynomial part plus lam^m/(x-lam).
        inst = make_instance("cpid", [lam])
        combo = pole_inverse_on_tokens(inst, lam, Pow(m))
        got = combo_as_poly_identity(lam, 1, combo)
        assert got == Poly.x() ** m

    def test_pole_inverse_cross_point(self):
        # 1/((x-1)(x-3)) = (1/2)(1/(x-3)) - (1/2)(1/(x-1)) as rational functions.
        inst = make_instance("cpid", [1, 3])
        combo = pole_inverse_on_tokens(inst, Fraction(1), Pole(Fraction(3), 1))
        assert sorted(combo, key=str) == sorted(
            [(Pole(Fraction(1), 1), Fraction(-1, 2)),
             (Pole(Fraction(3), 1), Fraction(1, 2))], key=str)

    @given(lam=st.sampled_from([Fraction(0), Fraction(2)]),
           nu=st.sampled_from([Fraction(1), Fraction(-1)]),
           n=st.integers(1, 4))
    def test_pole_inverse_cross_point_identity(self, lam, nu, n):
        # Oracle: clear all denominators and compare polynomials.
        inst = make_instance("cpid", [lam, nu])
        combo = pole_inverse_on_tokens(inst, lam, Pole(nu, n))
        ql, qn = Poly.x_minus(lam), Poly.x_minus(nu)
        total = Poly.zero()
        for tok, c in combo:
            assert isinstance(tok, Pole)
            if tok.point == lam:
                total = total + (qn ** n * ql ** (1 - tok.n)).scale(c)
            else:
                total = total + (ql * qn ** (n - tok.n)).scale(c)
        assert total == Poly.one()

    def test_unknown_pole_point_rejected(self):
        inst = make_instance("cpid", [0])
        with pytest.raises(ValueError):
            x_action_on_tokens(inst, Pole(Fraction(5), 1))
        with pytest.raises(ValueError):
            pole_inverse_on_tokens(inst, Fraction(5), Pow(0))


class TestMakeInstance:
    def test_kron_requires_infinity(self):
        with pytest.raises(ValueError):
            make_instance("kron", [0, 2])

    def test_cpid_requires_points(self):
        with pytest.raises(ValueError):
            make_instance("cpid", [])

    def test_kron_two_points(self):
        inst = make_instance("kron", [INF, 2])
        assert inst.kind == "kron"
        assert inst.finite_points == (Fraction(2),)

    def test_cpid_points_sorted(self):
        inst = make_instance("cpid", [3, 0])
        assert inst.points == (Fraction(0), Fraction(3))

    def test_json_roundtrip(self):
        for inst in (make_instance("cpid", [0, Fraction(1, 2)]),
                     make_instance("kron", [INF, -1])):
            data = instance_to_json(inst)
            assert set(data) == {"kind", "points"}
            assert instance_from_json(data) == inst

    def test_json_format(self):
        inst = make_instance("kron", [2, INF])
        assert instance_to_json(inst) == {"kind": "kron",
                                          "points": ["2", "inf"]}


class TestCpidLevels:
    def test_k_level3_is_x_cubed_quotient(self):
        # Oracle: direct quotient computation.  In U/R with U the Laurent-like
        # localization at 0, level 3 has basis 1/x, 1/x^2, 1/x^3 and x acts by
        # x*(1/x) = 1 = 0, x*(1/x^2) = 1/x, x*(1/x^3) = 1/x^2.
        inst = make_instance("cpid", [0])
        lvl = truncate(inst, "K_as_left_R_module", 3)
        assert lvl.tokens == (Pole(Fraction(0), 1), Pole(Fraction(0), 2),
                              Pole(Fraction(0), 3))
        expected = Mat.from_rows([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
        assert lvl.x_action == expected
        assert FPModPID.from_action(lvl.x_action).isomorphic(
            FPModPID.cyclic(Poly.x() ** 3))
        assert lvl.module.isomorphic(FPModPID.cyclic(Poly.x() ** 3))

    def test_k_level_dims(self):
        inst = make_instance("cpid", [0, 1])
        for n in range(1, 5):
            lvl = truncate(inst, "K_as_left_R_module", n)
            assert len(lvl.tokens) == 2 * n

    def test_k_level_module_class(self):
        inst = make_instance("cpid", [0, 1])
        lvl = truncate(inst, "K_as_left_R_module", 2)
        expected = FPModPID.from_divisors(
            [Poly.x() ** 2, Poly.x_minus(1) ** 2])
        assert lvl.module.isomorphic(expected)

    def test_k_inclusions_intertwine(self):
        inst = make_instance("cpid", [0, 2])
        for n in range(2, 5):
            prev = truncate(inst, "K_as_left_R_module", n - 1)
            cur = truncate(inst, "K_as_left_R_module", n)
            assert cur.include.is_injective()
            assert cur.include * prev.x_action == cur.x_action * cur.include

    def test_u_window_action_targets_next_level(self):
        inst = make_instance("cpid", [0])
        lvl2 = truncate(inst, "U_as_left_R_module", 2)
        lvl3 = truncate(inst, "U_as_left_R_module", 3)
        assert lvl2.x_action.shape == (len(lvl3.tokens), len(lvl2.tokens))

    def test_u_window_intertwines(self):
        # The action maps level n into level n+1; the inclusion square
        # lvl(n-1) -> lvl(n) -> lvl(n+1) must commute entry-exactly.
        inst = make_instance("cpid", [0, 1])
        for n in range(2, 5):
            prev = truncate(inst, "U_as_left_R_module", n - 1)
            cur = truncate(inst, "U_as_left_R_module", n)
            nxt = truncate(inst, "U_as_left_R_module", n + 1)
            assert nxt.include * prev.x_action == cur.x_action * cur.include

    def test_bimodule_target_matches_left(self):
        # The base ring is commutative, so both one-sided structures agree.
        inst = make_instance("cpid", [0])
        assert truncate(inst, "K_bimodule", 2) is \
            truncate(inst, "K_as_left_R_module", 2)

    def test_truncate_cached(self):
        inst = make_instance("cpid", [0])
        assert truncate(inst, "K_as_left_R_module", 4) is \
            truncate(inst, "K_as_left_R_module", 4)


class TestKronLevels:
    def test_k_level1_single_point(self):
        # Lowest token of each matrix entry: S/k starts at x, S/(k+kx) at x^2,
        # S itself at 1.
        inst = make_instance("kron", [INF])
        lvl = truncate(inst, "K_bimodule", 1)
        assert lvl.entry_tokens[(1, 1)] == (Pow(1),)
        assert lvl.entry_tokens[(1, 2)] == (Pow(2),)
        assert lvl.entry_tokens[(2, 1)] == (Pow(0),)
        assert lvl.entry_tokens[(2, 2)] == (Pow(1),)

    def test_k_level_left_right_decomposition(self):
        # Oracle: pencil decomposition.  Each column (for the left structure)
        # and each row (for the right structure) of the level is a truncated
        # Prufer chain, one per point of X.
        inst = make_instance("kron", [INF, 2])
        for n in (1, 2):
            lvl = truncate(inst, "K_bimodule", n)
            for rep in (lvl.left, lvl.right):
                inv = pencil_invariants(rep)
                assert inv.finite_mults == {Fraction(2): 2 * n}
                assert inv.inf_mult == 2 * n
                assert not inv.pp_present and not inv.pi_present
                assert pencil_decompose(rep).block_multiset() == \
                    [(Regular(Fraction(2), n), 2), (Regular(INF, n), 2)]

    def test_u_level_left_is_preprojective_pair(self):
        # The two columns of a truncated U level are preprojective strips.
        inst = make_instance("kron", [INF, 2])
        n = 2
        lvl = truncate(inst, "U_bimodule", n)
        assert pencil_decompose(lvl.left).block_multiset() == \
            [(Preprojective(2 * n), 1), (Preprojective(2 * n + 1), 1)]

    def test_inclusions_intertwine(self):
        inst = make_instance("kron", [INF, 3])
        for target in ("K_bimodule", "U_bimodule"):
            for n in range(2, 4):
                prev = truncate(inst, target, n - 1)
                cur = truncate(inst, target, n)
                assert cur.include_left.check(prev.left, cur.left)
                assert cur.include_right.check(prev.right, cur.right)
                assert cur.include_left.A1.is_injective()
                assert cur.include_left.A2.is_injective()

    def test_r_embedding_and_quotient(self):
        inst = make_instance("kron", [INF, 2])
        for n in (1, 2, 3):
            lvl = truncate(inst, "U_bimodule", n)
            klvl = truncate(inst, "K_bimodule", n)
            for side in ("left", "right"):
                r_rep, embed = lvl.r_embedding(side)
                quot = lvl.k_quotient(side)
                u_rep = getattr(lvl, side)
                k_rep = getattr(klvl, side)
                assert r_rep.dim() == 4
                assert embed.check(r_rep, u_rep)
                assert quot.check(u_rep, k_rep)
                # Exactness of 0 -> R -> U<n> -> K<n> -> 0 at every spot.
                assert embed.A1.is_injective() and embed.A2.is_injective()
                assert quot.A1.is_surjective() and quot.A2.is_surjective()
                assert (quot.compose(embed)).is_zero()
                assert quot.A1.kernel().rank() == embed.A1.rank()
                assert quot.A2.kernel().rank() == embed.A2.rank()

    def test_u_level_f_injective(self):
        inst = make_instance("kron", [INF, 2])
        for n in (1, 2, 3):
            lvl = truncate(inst, "U_bimodule", n)
            assert lvl.left.F.is_injective()
            for lam in inst.finite_points:
                assert (lvl.left.G - lvl.left.F.scale(lam)).is_injective()

    def test_restricted_u_module_predicate(self):
        inst = make_instance("kron", [INF, 2])
        assert inst.is_restricted_u_module(regular(0, 1))
        assert inst.is_restricted_u_module(regular(Fraction(1, 3), 2))
        assert not inst.is_restricted_u_module(regular(2, 1))
        assert not inst.is_restricted_u_module(regular(INF, 1))

    def test_left_target_returns_bimodule_level(self):
        inst = make_instance("kron", [INF])
        assert truncate(inst, "K_as_left_R_module", 2) is \
            truncate(inst, "K_bimodule", 2)


class TestExhaustion:
    @settings(max_examples=30, deadline=None)
    @given(m=st.integers(0, 6))
    def test_cpid_u_pow_tokens_appear(self, m):
        inst = make_instance("cpid", [0])
        n = level_containing_token(inst, "U_as_left_R_module", Pow(m))
        lvl = truncate(inst, "U_as_left_R_module", n)
        assert Pow(m) in lvl.tokens

    def test_cpid_k_pole_tokens_appear(self):
        inst = make_instance("cpid", [0, 1])
        for j in range(1, 7):
            tok = Pole(Fraction(1), j)
            n = level_containing_token(inst, "K_as_left_R_module", tok)
            assert tok in truncate(inst, "K_as_left_R_module", n).tokens

    def test_kron_tokens_appear_in_every_entry(self):
        inst = make_instance("kron", [INF, 2])
        for m in range(0, 5):
            n = level_containing_token(inst, "K_bimodule", Pow(m))
            lvl = truncate(inst, "K_bimodule", n)
            assert any(Pow(m) in toks for toks in lvl.entry_tokens.values())
        for j in range(1, 5):
            tok = Pole(Fraction(2), j)
            n = level_containing_token(inst, "K_bimodule", tok)
            lvl = truncate(inst, "K_bimodule", n)
            assert all(tok in toks for toks in lvl.entry_tokens.values())

    def test_level_dims_nondecreasing(self):
        for inst, target in ((make_instance("cpid", [0]), "K_as_left_R_module"),
                             (make_instance("kron", [INF, 2]), "U_bimodule")):
            dims = []
            for n in range(1, 5):
                lvl = truncate(inst, target, n)
                dims.append(lvl.dim())
            assert dims == sorted(dims)
