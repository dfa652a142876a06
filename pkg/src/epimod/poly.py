"""Dense univariate polynomials over Q, lowest degree first.

Everything downstream (Smith forms, module normal forms, torsion towers)
reduces to gcd arithmetic in Q[x], so this stays deliberately small:
immutable coefficient tuples, exact Fraction arithmetic, no factorization.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd
from typing import Iterable, Sequence


def _fr(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    return Fraction(v)


class Poly:
    """Polynomial over Q. Zero polynomial has an empty coefficient tuple."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_fr(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return Poly(())

    @staticmethod
    def one() -> "Poly":
        return Poly((1,))

    @staticmethod
    def const(c) -> "Poly":
        return Poly((c,))

    @staticmethod
    def x() -> "Poly":
        return Poly((0, 1))

    @staticmethod
    def x_minus(mu) -> "Poly":
        return Poly((-_fr(mu), 1))

    @staticmethod
    def from_roots(roots: Sequence) -> "Poly":
        p = Poly.one()
        for r in roots:
            p = p * Poly.x_minus(r)
        return p

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (Fraction(1),)

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coeffs) - 1

    def lead(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return Poly(out)

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = _fr(c)
        if c == 0:
            return Poly.zero()
        return Poly(tuple(c * a for a in self.coeffs))

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power")
        out = Poly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def divmod(self, d: "Poly") -> tuple["Poly", "Poly"]:
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = [Fraction(0)] * max(0, self.degree - d.degree + 1)
        r = list(self.coeffs)
        dl = d.lead()
        dd = d.degree
        while len(r) - 1 >= dd and any(r):
            while r and r[-1] == 0:
                r.pop()
            if len(r) - 1 < dd:
                break
            k = len(r) - 1 - dd
            f = r[-1] / dl
            q[k] = f
            for i, c in enumerate(d.coeffs):
                r[k + i] -= f * c
            r.pop()
        return Poly(q), Poly(r)

    def pseudo_divmod(self, d: "Poly") -> tuple["Poly", "Poly", int]:
        """(q, r, k) with lead(d)^k * self = q*d + r and deg r < deg d.

        k = max(0, deg self - deg d + 1); q and r stay integral when self
        and d have integer coefficients, unlike ordinary division.
        """
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        k = max(0, self.degree - d.degree + 1)
        dl = d.lead()
        q = [Fraction(0)] * max(0, self.degree - d.degree + 1)
        r = list(self.coeffs)
        dd = d.degree
        steps = 0
        while len(r) - 1 >= dd and any(r):
            while r and r[-1] == 0:
                r.pop()
                if len(r) - 1 < dd:
                    break
            if len(r) - 1 < dd:
                break
            j = len(r) - 1 - dd
            f = r[-1]
            # multiply everything so far by dl, then subtract f * x^j * d
            for i in range(len(r) - 1):
                r[i] *= dl
            for i in range(len(q)):
                q[i] *= dl
            q[j] += f
            for i, c in enumerate(d.coeffs[:-1]):
                r[j + i] -= f * c
            r.pop()
            steps += 1
        # pad the power up to the declared k
        extra = k - steps
        if extra > 0:
            mul = dl ** extra
            q = [c * mul for c in q]
            r = [c * mul for c in r]
        return Poly(q), Poly(r), k

    def __floordiv__(self, d: "Poly") -> "Poly":
        return self.divmod(d)[0]

    def __mod__(self, d: "Poly") -> "Poly":
        return self.divmod(d)[1]

    def divides(self, other: "Poly") -> bool:
        if self.is_zero():
            return other.is_zero()
        return (other % self).is_zero()

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(1 / self.lead())

    def primitive(self) -> "Poly":
        """Integer-content normalization (sign fixed positive on the lead).

        Used during Smith pivoting to keep coefficients from ballooning.
        """
        if self.is_zero():
            return self
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // int_gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = int_gcd(g, v)
        if ints[-1] < 0:
            g = -g
        return Poly(tuple(Fraction(v, g) for v in ints))

    def eval(self, point) -> Fraction:
        point = _fr(point)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    def shift_up(self, k: int) -> "Poly":
        """Multiply by x^k."""
        if self.is_zero() or k == 0:
            return self
        return Poly((Fraction(0),) * k + self.coeffs)

    def derivative(self) -> "Poly":
        return Poly(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    # -- gcd layer ---------------------------------------------------------

    def gcd(self, other: "Poly") -> "Poly":
        """Monic gcd."""
        a, b = self, other
        while not b.is_zero():
            r = a % b
            if not r.is_zero():
                r = r.primitive()  # unit rescale, keeps coefficients small
            a, b = b, r
        return a.monic()

    def xgcd(self, other: "Poly") -> tuple["Poly", "Poly", "Poly"]:
        """(g, s, t) with g monic, s*self + t*other = g."""
        a, b = self, other
        sa, sb = Poly.one(), Poly.zero()
        ta, tb = Poly.zero(), Poly.one()
        while not b.is_zero():
            q, r = a.divmod(b)
            a, b = b, r
            sa, sb = sb, sa - q * sb
            ta, tb = tb, ta - q * tb
        if a.is_zero():
            return Poly.zero(), Poly.zero(), Poly.zero()
        lc = a.lead()
        return a.monic(), sa.scale(1 / lc), ta.scale(1 / lc)

    def lcm(self, other: "Poly") -> "Poly":
        if self.is_zero() or other.is_zero():
            return Poly.zero()
        return ((self * other) // self.gcd(other)).monic()

    def root_multiplicity(self, mu) -> int:
        """Multiplicity of x = mu as a root."""
        if self.is_zero():
            raise ValueError("zero polynomial has no finite multiplicity")
        m = 0
        p = self
        lin = Poly.x_minus(mu)
        while p.eval(mu) == 0:
            p = p // lin
            m += 1
        return m

    def rational_roots(self) -> list[tuple[Fraction, int]]:
        """All rational roots with multiplicities, ascending."""
        if self.is_zero():
            raise ValueError("zero polynomial")
        p = self.primitive()
        # strip the root at 0 first
        roots: dict[Fraction, int] = {}
        k = 0
        while p[0] == 0 and p.degree >= 1:
            p = Poly(p.coeffs[1:])
            k += 1
        if k:
            roots[Fraction(0)] = k
        if p.degree >= 1:
            a0 = p[0]
            an = p.lead()
            for r in _divisor_fractions(a0.numerator * a0.denominator,
                                        an.numerator * an.denominator):
                if p.eval(r) == 0:
                    m = p.root_multiplicity(r)
                    roots[r] = m
                    lin = Poly.x_minus(r) ** m
                    p = p // lin
        return sorted(roots.items())

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*x" if c != 1 else "x")
            else:
                terms.append(f"{c}*x^{i}" if c != 1 else f"x^{i}")
        return "Poly(" + " + ".join(terms) + ")"


def _divisor_fractions(num: int, den: int):
    """Candidate rational roots p/q with p | num, q | den (num, den != 0)."""
    num, den = abs(num), abs(den)

    def divisors(n: int) -> list[int]:
        ds = []
        d = 1
        while d * d <= n:
            if n % d == 0:
                ds.append(d)
                if d != n // d:
                    ds.append(n // d)
            d += 1
        return ds

    seen = set()
    for p in divisors(num):
        for q in divisors(den):
            for s in (1, -1):
                r = Fraction(s * p, q)
                if r not in seen:
                    seen.add(r)
                    yield r
