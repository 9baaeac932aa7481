"""The Pell-Fermat equation t^2 - D u^2 = 4."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import mpmath

from .quadfield import SurdD, is_square


class NotADiscriminant(ValueError):
    pass


def check_discriminant(D: int) -> None:
    if D <= 0 or D % 4 not in (0, 1) or is_square(D):
        raise NotADiscriminant(f"{D} is not a positive non-square discriminant")


@dataclass(frozen=True)
class PellSolution:
    D: int
    t: int
    u: int

    def __post_init__(self):
        if self.t * self.t - self.D * self.u * self.u != 4:
            raise ValueError("not a solution of t^2 - D u^2 = 4")

    @property
    def epsilon(self) -> SurdD:
        return SurdD(self.D, Fraction(self.t, 2), Fraction(self.u, 2))

    @property
    def regulator(self) -> float:
        return float(regulator_bits(self, 64))

    def power(self, k: int) -> "PellSolution":
        t, u = unit_power(self.D, self.t, self.u, k)
        return PellSolution(self.D, t, u)


def unit_power(D: int, t: int, u: int, k: int) -> tuple[int, int]:
    """(t_k, u_k) with (t_k + u_k sqrt D)/2 = ((t + u sqrt D)/2)^k, k >= 0."""
    tk, uk = 2, 0
    bt, bu = t, u
    while k:
        if k & 1:
            tk, uk = (tk * bt + D * uk * bu) // 2, (tk * bu + uk * bt) // 2
        bt, bu = (bt * bt + D * bu * bu) // 2, bt * bu
        k >>= 1
    return tk, uk


def cf_period_unit(D: int) -> tuple[int, int, int]:
    """Run the continued fraction of the reduced number (b + sqrt D)/2.

    Returns (x, y, L): the unit (x + y sqrt D)/2 read off one period, of
    norm (-1)^L, and the period length L.
    """
    s = isqrt(D)
    b = s if (s - D) % 2 == 0 else s - 1
    P, Q = b, 2
    start = (P, Q)
    q0, q1 = 0, 1
    L = 0
    while True:
        a = (P + s) // Q
        q0, q1 = a * q0 + q1, q0
        P = a * Q - P
        assert (D - P * P) % Q == 0
        Q = (D - P * P) // Q
        L += 1
        if (P, Q) == start:
            break
    # eta = q0 * alpha + q1 with alpha = (b + sqrt D)/2
    return q0 * b + 2 * q1, q0, L


def fundamental_pell4(D: int) -> PellSolution:
    check_discriminant(D)
    x, y, L = cf_period_unit(D)
    if L % 2:
        x, y = (x * x + D * y * y) // 2, x * y
    return PellSolution(D, x, y)


def has_negative_unit(D: int) -> bool:
    check_discriminant(D)
    return cf_period_unit(D)[2] % 2 == 1


def negative_unit(D: int) -> tuple[int, int] | None:
    """(x, y) with x^2 - D y^2 = -4 and (x + y sqrt D)/2 fundamental, or None."""
    check_discriminant(D)
    x, y, L = cf_period_unit(D)
    return (x, y) if L % 2 else None


def sqrt_unit(D: int, t: int, u: int) -> tuple[int, int] | None:
    """Exact square root (x, y) > 0 of (t + u sqrt D)/2 of norm -1, if any."""
    # ((x + y sqrt D)/2)^2 = (t + u sqrt D)/2 with x^2 - D y^2 = -4
    if t < 2 or (t + 2) % D:
        return None
    x2, y2 = t - 2, (t + 2) // D
    if not (is_square(x2) and is_square(y2)):
        return None
    x, y = isqrt(x2), isqrt(y2)
    return (x, y) if x * y == u else None


def pell_with_divisor(D: int, p: int, *, record: list | None = None) -> PellSolution:
    """Smallest power of the fundamental unit whose u is divisible by p."""
    check_discriminant(D)
    if p < 1:
        raise ValueError("p must be >= 1")
    base = fundamental_pell4(D)
    t, u = base.t, base.u
    for k in range(1, p * p + 2):
        if record is not None:
            record.append((k, t, u))
        if u % p == 0:
            return PellSolution(D, t, u)
        t, u = (t * base.t + D * u * base.u) // 2, (t * base.u + u * base.t) // 2
    raise RuntimeError(f"no power with p | u within p^2+1 steps (D={D}, p={p})")


def pell_divisor_index(D: int, p: int) -> int:
    rec: list = []
    pell_with_divisor(D, p, record=rec)
    return rec[-1][0]


def regulator_bits(sol: PellSolution, precision_bits: int = 53):
    """log((t + u sqrt D)/2), evaluated with interval arithmetic.

    Returns an mpf whose error is below 2^-precision_bits (checked against
    the width of the enclosing interval).
    """
    prec = precision_bits + 20
    iv = mpmath.iv
    old = iv.prec
    try:
        while True:
            iv.prec = prec
            eps = (iv.mpf(sol.t) + iv.mpf(sol.u) * iv.sqrt(iv.mpf(sol.D))) / 2
            r = iv.log(eps)
            with mpmath.workprec(prec):
                lo, hi = mpmath.mpf(r.a), mpmath.mpf(r.b)
                if hi - lo < mpmath.mpf(2) ** (-precision_bits - 1):
                    return (lo + hi) / 2
            prec *= 2
    finally:
        iv.prec = old


# ---------------------------------------------------------------------------
# independent reference solvers used by the tests


def brute_force_pell4(D: int, u_max: int) -> PellSolution | None:
    """Minimal-u solution by scanning u = 1..u_max, or None if none found."""
    check_discriminant(D)
    for u in range(1, u_max + 1):
        n = D * u * u + 4
        t = isqrt(n)
        if t * t == n:
            return PellSolution(D, t, u)
    return None


def convergent_pell4(D: int) -> PellSolution:
    """Minimal solution via the convergents of sqrt(D).

    For D > 16 every solution t/u of t^2 - D u^2 = 4 satisfies
    |t/u - sqrt D| < 1/(2u^2) even after removing gcd(t, u) in {1, 2}, so by
    Legendre's theorem it is g times a convergent.  Scanning convergents in
    order of increasing denominator finds the minimal u.
    """
    check_discriminant(D)
    if D <= 16:
        sol = brute_force_pell4(D, 10)
        assert sol is not None
        return sol
    s = isqrt(D)
    m, d, a = 0, 1, s
    p0, p1 = a, 1
    q0, q1 = 1, 0
    while True:
        for g in (1, 2):
            t, u = g * p0, g * q0
            if t * t - D * u * u == 4:
                return PellSolution(D, t, u)
        m = d * a - m
        d = (D - m * m) // d
        a = (s + m) // d
        p0, p1 = a * p0 + p1, p0
        q0, q1 = a * q0 + q1, q0
        assert gcd(p0, q0) == 1
