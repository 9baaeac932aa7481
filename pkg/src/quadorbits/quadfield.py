"""Exact arithmetic in quadratic fields Q(sqrt D).

Values are p + q*sqrt(D) with p, q Fractions.  D travels with the value and
mixing two different D is an error.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt, lcm

import mpmath


class FieldMismatch(ValueError):
    pass


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def surd_sign(a: int, b: int, D: int) -> int:
    """Sign of a + b*sqrt(D) for integers a, b and D >= 0, exactly."""
    if D < 0:
        raise ValueError("no real order for D < 0")
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0) if D > 0 else 0
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with b^2 D
    lhs, rhs = a * a, b * b * D
    if lhs == rhs:
        return 0
    return sa if lhs > rhs else sb


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class SurdD:
    __slots__ = ("D", "p", "q")

    def __init__(self, D: int, p=0, q=0):
        self.D = int(D)
        self.p = _frac(p)
        self.q = _frac(q)

    @classmethod
    def rational(cls, D: int, r) -> "SurdD":
        return cls(D, r, 0)

    def _check(self, other) -> "SurdD":
        if not isinstance(other, SurdD):
            return SurdD(self.D, other, 0)
        if other.D != self.D:
            raise FieldMismatch(f"D={self.D} vs D={other.D}")
        return other

    def __add__(self, other):
        o = self._check(other)
        return SurdD(self.D, self.p + o.p, self.q + o.q)

    __radd__ = __add__

    def __neg__(self):
        return SurdD(self.D, -self.p, -self.q)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        o = self._check(other)
        return SurdD(self.D, self.p * o.p + self.q * o.q * self.D,
                     self.p * o.q + self.q * o.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._check(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt D)")
        num = self * o.conj()
        return SurdD(self.D, num.p / n, num.q / n)

    def __rtruediv__(self, other):
        return self._check(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return SurdD(self.D, 1) / (self ** (-k))
        out, base = SurdD(self.D, 1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "SurdD":
        return SurdD(self.D, self.p, -self.q)

    def norm(self) -> Fraction:
        return self.p * self.p - self.q * self.q * self.D

    def trace(self) -> Fraction:
        return 2 * self.p

    def norm_trace_conj(self):
        return self.norm(), self.trace(), self.conj()

    def is_zero(self) -> bool:
        return self.p == 0 and self.q == 0

    def __eq__(self, other):
        if isinstance(other, SurdD):
            return self.D == other.D and self.p == other.p and self.q == other.q
        try:
            return self.q == 0 and self.p == _frac(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.D, self.p, self.q))

    def sign(self) -> int:
        """Exact sign of the real embedding (sqrt D > 0)."""
        a = self.p.numerator * self.q.denominator
        b = self.q.numerator * self.p.denominator
        return surd_sign(a, b, self.D)

    def compare(self, other) -> int:
        return (self - self._check(other)).sign()

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def floor(self) -> int:
        """Exact floor of the real embedding."""
        # p + q sqrt D = (a + b sqrt D)/den with den > 0
        den = lcm(self.p.denominator, self.q.denominator)
        a = int(self.p * den)
        b = int(self.q * den)
        r = isqrt(b * b * self.D)  # floor(|b| sqrt D)
        if b >= 0:
            return (a + r) // den
        # -|b| sqrt D lies in (-(r+1), -r], exact only when b^2 D is a square
        if r * r == b * b * self.D:
            return (a - r) // den
        return (a - r - 1) // den

    def to_real(self, precision_bits: int = 53):
        if precision_bits < 16:
            raise ValueError("precision_bits must be >= 16")
        with mpmath.workprec(precision_bits + 32 + _bits(self)):
            v = mpmath.mpf(self.p.numerator) / self.p.denominator
            if self.q:
                v += mpmath.mpf(self.q.numerator) / self.q.denominator * mpmath.sqrt(self.D)
            return +v

    def __float__(self):
        return float(self.to_real(64))

    def __repr__(self):
        return f"SurdD({self.D}, {self.p}, {self.q})"

    def __str__(self):
        if self.q == 0:
            return str(self.p)
        return f"{self.p}+({self.q})*sqrt({self.D})"


def _bits(x: SurdD) -> int:
    return max(abs(x.p.numerator).bit_length(), abs(x.q.numerator).bit_length(),
               x.p.denominator.bit_length(), x.q.denominator.bit_length())


def arith(x: SurdD, y: SurdD, op: str) -> SurdD:
    ops = {"add": SurdD.__add__, "sub": SurdD.__sub__,
           "mul": SurdD.__mul__, "div": SurdD.__truediv__}
    if op not in ops:
        raise ValueError(f"unknown op {op!r}")
    return ops[op](x, y)


def sign_and_compare(x: SurdD, y: SurdD) -> int:
    if x.D < 0 or y.D < 0:
        raise ValueError("no real order for D < 0")
    return x.compare(y)


def phi() -> SurdD:
    return SurdD(5, Fraction(1, 2), Fraction(1, 2))
