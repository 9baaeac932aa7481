"""Real quadratic irrationals (P + sqrt D)/Q with exact arithmetic.

Canonical presentation: D is the discriminant of the primitive integral
form (A, B, C) having alpha as its root (-B + sqrt D)/(2A), and
(P, Q) = (-B, 2A).  Equal values therefore have equal (D, P, Q).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .qforms import Form, GL2Int, act
from .quadfield import SurdD, is_square


def floor_surd(P: int, Q: int, D: int) -> int:
    """floor((P + sqrt D)/Q) for non-square D > 0 and Q != 0."""
    s = isqrt(D)
    if Q > 0:
        return (P + s) // Q
    return -((P + s) // (-Q)) - 1


@dataclass(frozen=True, order=True)
class QuadIrr:
    D: int
    P: int
    Qd: int

    def __post_init__(self):
        if self.D <= 0 or is_square(self.D):
            raise ValueError("D must be a positive non-square")
        if self.Qd == 0 or (self.D - self.P * self.P) % self.Qd:
            raise ValueError("Qd must divide D - P^2")

    # -- construction -------------------------------------------------------

    @classmethod
    def from_form(cls, Q: Form) -> "QuadIrr":
        """alpha_Q = (-B + sqrt D)/(2A) for the primitive part of Q."""
        k = Q.content()
        A, B = Q.A // k, Q.B // k
        if A == 0:
            raise ValueError("A = 0: the root is rational or infinite")
        return cls(Q.D // (k * k), -B, 2 * A)

    @classmethod
    def from_surd(cls, P: int, Q: int, D: int) -> "QuadIrr":
        """The value (P + sqrt D)/Q for any integers with D non-square, Q != 0."""
        if Q == 0:
            raise ValueError("zero denominator")
        if D <= 0 or is_square(D):
            raise ValueError("rational or non-real input")
        # Q^2 x^2 - 2PQ x + (P^2 - D) has roots (P +- sqrt D)/Q
        F = Form(Q * Q, -2 * P * Q, P * P - D)
        if Q < 0:
            F = -F
        return cls.from_form(F)

    @classmethod
    def from_surdd(cls, x: SurdD) -> "QuadIrr":
        if x.q == 0:
            raise ValueError("rational input")
        # x = p + q sqrt D with q > 0 -> (p' + sqrt(q^2 D den^2)) / den
        den = x.p.denominator * x.q.denominator
        a = x.p * den
        b = x.q * den
        if b < 0:
            # p - |b| sqrt D over den = (-a + |b| sqrt D)/(-den)
            return cls.from_surd(int(-a), -den, int(b * b) * x.D)
        return cls.from_surd(int(a), den, int(b * b) * x.D)

    @classmethod
    def parse(cls, text: str) -> "QuadIrr":
        t = text.replace(" ", "")
        m = re.fullmatch(r"\(?([+-]?\d+)?([+-])sqrt\((\d+)\)\)?(?:/([+-]?\d+))?", t)
        if m:
            P = int(m.group(1) or 0)
            sgn = -1 if m.group(2) == "-" else 1
            D = int(m.group(3))
            Q = int(m.group(4) or 1)
            return cls.from_surd(sgn * P, sgn * Q, D)
        m = re.fullmatch(r"\(?sqrt\((\d+)\)\)?(?:/([+-]?\d+))?", t)
        if m:
            return cls.from_surd(0, int(m.group(2) or 1), int(m.group(1)))
        raise ValueError(f"cannot parse quadratic irrational {text!r}")

    def canonical(self) -> "QuadIrr":
        return QuadIrr.from_surd(self.P, self.Qd, self.D)

    # -- basic data ---------------------------------------------------------

    def form(self) -> Form:
        """The primitive form whose root (-B + sqrt D)/(2A) is self."""
        A = self.Qd // 2 if self.Qd % 2 == 0 else None
        if A is not None and (self.P * self.P - self.D) % (4 * A) == 0:
            F = Form(A, -self.P, (self.P * self.P - self.D) // (4 * A))
            if F.content() == 1 and F.D == self.D:
                return F
        return QuadIrr.from_surd(self.P, self.Qd, self.D).form()

    def surd(self) -> SurdD:
        return SurdD(self.D, Fraction(self.P, self.Qd), Fraction(1, self.Qd))

    def conj(self) -> "QuadIrr":
        return QuadIrr.from_form(-self.form())

    def floor(self) -> int:
        return floor_surd(self.P, self.Qd, self.D)

    def __add__(self, n: int) -> "QuadIrr":
        return QuadIrr(self.D, self.P + n * self.Qd, self.Qd)

    def __sub__(self, n: int) -> "QuadIrr":
        return self + (-n)

    def __float__(self):
        return float(self.surd())

    def to_real(self, precision_bits: int = 64):
        return self.surd().to_real(precision_bits)

    def __str__(self):
        return f"({self.P}+sqrt({self.D}))/{self.Qd}"

    # -- complexity ---------------------------------------------------------

    def height(self) -> tuple[int, int]:
        """h = 2/|alpha - alpha^sigma| = |Qd|/sqrt(D), returned as (|Qd|, D)."""
        return abs(self.Qd), self.D

    def height_float(self) -> float:
        return abs(self.Qd) / self.D ** 0.5

    def height_compare(self, s) -> int:
        """Sign of h(alpha) - s for a rational s >= 0."""
        s = Fraction(s)
        lhs = self.Qd * self.Qd * s.denominator ** 2
        rhs = s.numerator ** 2 * self.D
        if s < 0:
            return 1
        return (lhs > rhs) - (lhs < rhs)

    def height_le(self, s) -> bool:
        return self.height_compare(s) <= 0


def conj(alpha: QuadIrr) -> QuadIrr:
    return alpha.conj()


def height(alpha: QuadIrr) -> tuple[int, int]:
    return alpha.height()


def mobius(g: GL2Int, alpha: QuadIrr) -> QuadIrr:
    """(a alpha + b)/(c alpha + d), via alpha_{Q o g^-1} = g alpha_Q."""
    if g.det() != 1:
        raise ValueError("mobius requires determinant +1")
    return QuadIrr.from_form(act(alpha.form(), g.inv()))


def mobius_surd(g: GL2Int, alpha: QuadIrr) -> QuadIrr:
    """Same map computed directly in Q(sqrt D); an independent route."""
    x = alpha.surd()
    return QuadIrr.from_surdd((x * g.a + g.b) / (x * g.c + g.d))


def canonical_mod_translation(alpha: QuadIrr, q: int = 1) -> QuadIrr:
    """The representative of alpha + qZ lying in [0, q)."""
    n = floor_surd(alpha.P, alpha.Qd * q, alpha.D)
    return alpha - n * q


# -- continued fractions -----------------------------------------------------


def cf_expand(alpha: QuadIrr) -> tuple[list[int], list[int]]:
    """Eventually periodic continued fraction (preperiod, period)."""
    D = alpha.D
    s = isqrt(D)
    P, Q = alpha.P, alpha.Qd
    seen: dict[tuple[int, int], int] = {}
    quotients: list[int] = []
    while (P, Q) not in seen:
        assert (D - P * P) % Q == 0
        seen[(P, Q)] = len(quotients)
        a = (P + s) // Q if Q > 0 else -((P + s) // (-Q)) - 1
        quotients.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    start = seen[(P, Q)]
    return quotients[:start], quotients[start:]


def is_palindrome_up_to_rotation(period: list[int]) -> bool:
    """Some cyclic rotation of the period reads the same backwards.

    Weaker tests such as "the reversal is a rotation" accept [1, 2] (sqrt 3),
    which is only GL2(Z)-reciprocal; the rotation parity matters in PSL2(Z).
    """
    L = len(period)
    for i in range(L):
        rot = period[i:] + period[:i]
        if rot == rot[::-1]:
            return True
    return False


def is_reciprocal_irr(alpha: QuadIrr) -> bool:
    return is_palindrome_up_to_rotation(cf_expand(alpha)[1])
