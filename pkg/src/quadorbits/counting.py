"""Orbit counts for binary quadratic forms and quadratic irrationals.

Two engines count automorph orbits of primitive representations:

* fast: enumerate one point per orbit inside the sector
  u > 0, 1 <= |v/u| < eps^2 where Q = A u v, u = x - alpha y, v = x - alpha^s y.
* oracle: scan a box known to contain each orbit's minimal-norm element and
  canonicalize every point by walking along the automorph.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

import mpmath
import numpy as np

from .pell import fundamental_pell4, pell_with_divisor, regulator_bits, unit_power
from .qforms import (GL2Int, IDENTITY, Form, _ext_gcd, automorph, classify,
                     reciprocal_witness)
from .quadfield import surd_sign
from .quadirr import QuadIrr, canonical_mod_translation, mobius


class HypothesisViolated(ValueError):
    pass


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class GroupSpec:
    kind: str = "full"  # "full", "principal", "hecke0"
    p: int = 1

    def __post_init__(self):
        if self.kind not in ("full", "principal", "hecke0"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.kind != "full" and self.p < 2:
            raise ValueError("congruence level must be >= 2")

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        t = text.strip().lower()
        if t in ("full", "gamma", "psl2z"):
            return cls()
        for prefix, kind in (("principal", "principal"), ("gamma0", "hecke0"),
                             ("hecke0", "hecke0"), ("gamma", "principal")):
            if t.startswith(prefix):
                return cls(kind, int(t[len(prefix):].strip("():")))
        raise ValueError(f"cannot parse group {text!r}")

    def __str__(self):
        return {"full": "full", "principal": f"principal({self.p})",
                "hecke0": f"hecke0({self.p})"}[self.kind]

    def index(self) -> int:
        """[PSL2(Z) : G]."""
        p = self.p
        if self.kind == "full":
            return 1
        if self.kind == "principal":
            if p == 2:
                return 6
            num, den = p ** 3, 2
            for q in prime_factors(p):
                num *= q * q - 1
                den *= q * q
            assert num % den == 0
            return num // den
        num, den = p, 1
        for q in prime_factors(p):
            num *= q + 1
            den *= q
        return num // den

    def q(self) -> int:
        return self.p if self.kind == "principal" else 1

    def admissible(self, c: int, d: int) -> bool:
        """Does the coprime bottom row (c, d) extend to an element of G?"""
        if self.kind == "full":
            return True
        p = self.p
        if self.kind == "hecke0":
            return c % p == 0
        return c % p == 0 and (d % p == 1 % p or d % p == (-1) % p)

    def contains(self, g: GL2Int) -> bool:
        """Membership of +-g (PSL sense)."""
        if self.kind == "full":
            return True
        p = self.p
        if self.kind == "hecke0":
            return g.c % p == 0
        m = g.mod(p)
        return m in ((1 % p, 0, 0, 1 % p), ((-1) % p, 0, 0, (-1) % p))

    def complete(self, c: int, d: int) -> GL2Int:
        """A matrix of G with bottom row (c, d)."""
        g, x, y = _ext_gcd(d, -c)  # d*x - c*y = g = +-1
        a, b = x * g, y * g  # a d - b c = 1
        if self.kind == "principal":
            p = self.p
            n = (-b * pow(d, -1, p)) % p
            a, b = a + n * c, b + n * d
        M = GL2Int(a, b, c, d)
        assert M.det() == 1 and self.contains(M)
        return M


FULL = GroupSpec()


def power_in_group(gamma: GL2Int, group: GroupSpec, cap: int = 100000) -> int:
    """Least k >= 1 with +-gamma^k in G."""
    M = gamma
    for k in range(1, cap):
        if group.contains(M):
            return k
        M = M @ gamma
    raise RuntimeError("no power of gamma lies in the group")


def congruence_generator(gamma: GL2Int, p: int) -> tuple[int, int]:
    """(k, sign) with sign * gamma^k = I mod p, k minimal (SL sense up to -I)."""
    M = gamma
    I = (1 % p, 0, 0, 1 % p)
    mI = ((-1) % p, 0, 0, (-1) % p)
    for k in range(1, p * p * p + 2):
        m = M.mod(p)
        if m == I:
            return k, 1
        if m == mI:
            return k, -1
        M = M @ gamma
    raise RuntimeError("unreachable: gamma has finite order mod p")


# ---------------------------------------------------------------------------
# sector enumeration (fast engine)


def _surd_lt_abs(a1: int, b1: int, a2: int, b2: int, D: int) -> bool:
    """|a1 + b1 sqrt D| < |a2 + b2 sqrt D|."""
    s1 = surd_sign(a1, b1, D)
    s2 = surd_sign(a2, b2, D)
    return surd_sign(s2 * a2 - s1 * a1, s2 * b2 - s1 * b1, D) > 0


@dataclass
class _Sector:
    A: int
    B: int
    C: int
    D: int
    T2: int  # eps^2 = (T2 + U2 sqrt D)/2
    U2: int

    def contains(self, x: int, y: int) -> bool:
        A, D = self.A, self.D
        w = 2 * A * x + self.B * y
        sa = 1 if A > 0 else -1
        if sa * surd_sign(w, -y, D) <= 0:
            return False
        if w * y < 0:
            return False
        # 2|w + y sqrt D| < |(T2 + U2 sqrt D)(w - y sqrt D)|
        a2 = self.T2 * w - self.U2 * y * D
        b2 = self.U2 * w - self.T2 * y
        return _surd_lt_abs(2 * w, 2 * y, a2, b2, D)


def _sector_for(Q: Form) -> tuple[_Sector, float, float, float, float]:
    sol = fundamental_pell4(Q.D)
    T2, U2 = unit_power(Q.D, sol.t, sol.u, 2)
    sec = _Sector(Q.A, Q.B, Q.C, Q.D, T2, U2)
    sq = math.sqrt(Q.D)
    alpha = (-Q.B + sq) / (2 * Q.A)
    delta = sq / Q.A
    E = (T2 + U2 * sq) / 2
    return sec, alpha, delta, E, sq


def _sector_chunk(args):
    Q, smax, y0, y1, thr = args
    sec, alpha, delta, E, _ = _sector_for(Q)
    S = smax / abs(Q.A)
    out = []
    for y in range(y0, y1):
        z = delta * y
        if z >= 0:
            lo = z / (E - 1)
            hi = (-z + math.sqrt(z * z + 4 * S)) / 2
        else:
            az = -z
            lo = az / (E + 1)
            hi = az / 2
            disc = az * az - 4 * S
            if disc >= 0:
                hi = min(hi, (az - math.sqrt(disc)) / 2)
        if hi < lo - 1e-9 * (1 + abs(lo)):
            continue
        pad = 2 + 1e-9 * (abs(alpha * y) + hi)
        x0 = math.floor(lo + alpha * y - pad)
        x1 = math.ceil(hi + alpha * y + pad)
        for x in range(x0, x1 + 1):
            if gcd(x, y) != 1:
                continue
            qv = Q(x, y)
            if not thr(qv):
                continue
            if sec.contains(x, y):
                out.append((x, y))
    return out


class _IntThreshold:
    """|Q| <= s for an integer s."""

    def __init__(self, s: int):
        self.s = s

    def __call__(self, qv: int) -> bool:
        return abs(qv) <= self.s


class _SurdThreshold:
    """|Q| <= s sqrt(D)/2 for a rational s, i.e. 4 Q^2 den^2 <= num^2 D."""

    def __init__(self, s: Fraction, D: int):
        self.num, self.den, self.D = s.numerator, s.denominator, D

    def __call__(self, qv: int) -> bool:
        return 4 * qv * qv * self.den * self.den <= self.num * self.num * self.D


def sector_points(Q: Form, smax: float, thr=None, threads: int = 1) -> list[tuple[int, int]]:
    """Primitive points of the sector with |Q(x)| <= smax (refined by thr).

    One point per orbit of the full automorph group {+-gamma_Q^k}.
    """
    if thr is None:
        thr = _IntThreshold(int(math.floor(smax)))
    sec, alpha, delta, E, _ = _sector_for(Q)
    S = smax / abs(Q.A)
    # the u-interval of a row is empty unless (delta y)^2 <= 2 S (E + 1)
    ymax = int(math.sqrt(2 * S * (E + 1)) / abs(delta)) + 2
    if threads <= 1:
        pts = _sector_chunk((Q, smax, -ymax, ymax + 1, thr))
    else:
        edges = [(-ymax + (2 * ymax + 1) * i // threads) for i in range(threads + 1)]
        jobs = [(Q, smax, edges[i], edges[i + 1], thr) for i in range(threads)]
        with ProcessPoolExecutor(threads) as ex:
            pts = [p for part in ex.map(_sector_chunk, jobs) for p in part]
    return sorted(pts)


# ---------------------------------------------------------------------------
# psi: orbits of primitive representations


def _mat_vec(g: GL2Int, x: tuple[int, int]) -> tuple[int, int]:
    return (g.a * x[0] + g.b * x[1], g.c * x[0] + g.d * x[1])


@dataclass
class _PsiSetup:
    Q: Form  # primitive part
    k: int  # content
    s: int  # threshold for the primitive part
    gamma: GL2Int
    cosets: list  # coset representatives of G / H
    in_points: object  # predicate on points
    eta: GL2Int  # generator of H
    minus_in_H: bool


def _psi_setup(Q: Form, s: int, group: GroupSpec) -> _PsiSetup:
    info = classify(Q)
    if not info["indefinite"] or not info["irreducible"]:
        raise ValueError("psi needs an indefinite form with non-square discriminant")
    if s < 0:
        raise ValueError("s must be >= 0")
    k = info["content"]
    P = Q.primitive_part()
    gamma = automorph(P, *_tu(P.D))
    if group.kind == "full":
        return _PsiSetup(P, k, s // k, gamma, [IDENTITY], lambda x: True, gamma, True)
    p = group.p
    if group.kind == "hecke0":
        if Q.A % p != 1 % p:
            raise HypothesisViolated(f"hypothesis violated: A = {Q.A} is not 1 mod {p}")
        kk = power_in_group(gamma, group)
        cos = [gamma ** j for j in range(kk)]
        return _PsiSetup(P, k, s // k, gamma, cos, lambda x: x[1] % p == 0 and gcd(x[0], x[1]) == 1,
                         gamma ** kk, True)
    kk, sign = congruence_generator(gamma, p)
    eta = gamma ** kk if sign == 1 else -(gamma ** kk)
    if p == 2:
        cos = [gamma ** j for j in range(kk)]
        minus = True
    else:
        cos = [gamma ** j for j in range(kk)] + [-(gamma ** j) for j in range(kk)]
        minus = False
    return _PsiSetup(P, k, s // k, gamma, cos,
                     lambda x: x[0] % p == 1 % p and x[1] % p == 0, eta, minus)


def _tu(D: int) -> tuple[int, int]:
    sol = fundamental_pell4(D)
    return sol.t, sol.u


def psi_values_fast(Q: Form, s: int, group: GroupSpec = FULL, threads: int = 1) -> list[int]:
    """Sorted list of |Q(x)| over the orbits counted by psi(Q, s)."""
    st = _psi_setup(Q, s, group)
    if st.s < 1:
        return []
    vals = []
    for x in sector_points(st.Q, st.s, threads=threads):
        qv = abs(st.Q(*x)) * st.k
        for g in st.cosets:
            if st.in_points(_mat_vec(g, x)):
                vals.append(qv)
    return sorted(vals)


def _walk_key(x: tuple[int, int], eta: GL2Int, eta_inv: GL2Int) -> tuple[int, int, int]:
    def key(v):
        return (v[0] * v[0] + v[1] * v[1], v[0], v[1])

    cur = x
    kc = key(cur)
    while True:
        moved = False
        for g in (eta, eta_inv):
            nxt = _mat_vec(g, cur)
            kn = key(nxt)
            if kn < kc:
                cur, kc, moved = nxt, kn, True
                break
        if not moved:
            return kc


def _canonical(x, eta, eta_inv, minus: bool):
    k1 = _walk_key(x, eta, eta_inv)
    if not minus:
        return k1
    return min(k1, _walk_key((-x[0], -x[1]), eta, eta_inv))


def oracle_box(Q: Form, s: int) -> tuple[int, int]:
    """|x| <= X, |y| <= Y contains the minimal-norm point of every orbit.

    Each orbit meets the balanced sector eps^-1 <= |v/u| < eps, where
    |u|, |v| <= sqrt(eps s/|A|); then y = (v - u)/delta and x = u + alpha y.
    """
    sol = fundamental_pell4(Q.D)
    eps = (sol.t + sol.u * math.sqrt(Q.D)) / 2
    sq = math.sqrt(Q.D)
    U = math.sqrt(eps * s / abs(Q.A))
    delta = sq / abs(Q.A)
    Y = 2 * U / delta
    alpha = min(abs((-Q.B + sq) / (2 * Q.A)), abs((-Q.B - sq) / (2 * Q.A)))
    X = U + alpha * Y
    # minimal norm <= norm of the balanced representative
    R = math.hypot(X, Y)
    return int(R) + 2, int(R) + 2


def _box_points(P: Form, X: int, Y: int, s: int):
    """Primitive (x, y) in the box with |P(x, y)| <= s, scanned row by row."""
    ys = np.arange(-Y, Y + 1, dtype=object if max(X, Y) ** 2 * max(abs(P.A), abs(P.B), abs(P.C)) > 2 ** 60
                   else np.int64)
    for x in range(-X, X + 1):
        q = P.A * x * x + P.B * x * ys + P.C * ys * ys
        ok = np.abs(q) <= s
        for y in ys[ok].tolist():
            if gcd(x, y) == 1:
                yield x, int(y)


def psi_values_oracle(Q: Form, s: int, group: GroupSpec = FULL) -> list[int]:
    st = _psi_setup(Q, s, group)
    if st.s < 1:
        return []
    P, gamma = st.Q, st.gamma
    g_inv = gamma.inv()
    X, Y = oracle_box(P, st.s)
    reps: dict = {}
    for x, y in _box_points(P, X, Y, st.s):
        key = _canonical((x, y), gamma, g_inv, True)
        reps[key] = (x, y)
    # each full-group orbit splits into H-orbits along the cosets
    eta, eta_inv = st.eta, st.eta.inv()
    found: dict = {}
    for x in reps.values():
        for g in st.cosets:
            z = _mat_vec(g, x)
            if st.in_points(z):
                found[_canonical(z, eta, eta_inv, st.minus_in_H)] = abs(P(*z)) * st.k
    # distinct H-orbits inside one G-orbit must carry distinct keys
    assert len(found) == sum(
        1 for x in reps.values() for g in st.cosets if st.in_points(_mat_vec(g, x)))
    return sorted(found.values())


def psi(Q: Form, s: int, group: GroupSpec = FULL, engine: str = "fast", threads: int = 1) -> int:
    if engine == "fast":
        return len(psi_values_fast(Q, s, group, threads))
    if engine == "oracle":
        return len(psi_values_oracle(Q, s, group))
    if engine == "both":
        a = psi_values_fast(Q, s, group, threads)
        b = psi_values_oracle(Q, s, group)
        if a != b:
            raise EngineDisagreement(f"fast={len(a)} oracle={len(b)}")
        return len(a)
    raise ValueError(f"unknown engine {engine!r}")


class EngineDisagreement(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# orbits of quadratic irrationals


@dataclass
class OrbitData:
    alpha0: QuadIrr
    group: GroupSpec
    Q: Form
    gamma: GL2Int
    K: int  # least power of gamma_Q lying in G
    reciprocal: bool  # G-reciprocal: alpha0^s in G . alpha0


def orbit_data(alpha0: QuadIrr, group: GroupSpec = FULL) -> OrbitData:
    Q = alpha0.form()
    gamma = automorph(Q, *_tu(Q.D))
    K = power_in_group(gamma, group)
    w = reciprocal_witness(Q)
    recip = False
    if w is not None:
        swap = w.inv()  # maps alpha0 to alpha0^s
        period = power_in_group(gamma, GroupSpec("principal", group.p)) if group.kind != "full" else 1
        M = swap
        for _ in range(period):
            if group.contains(M):
                recip = True
                break
            M = M @ gamma
    return OrbitData(alpha0, group, Q, gamma, K, recip)


def orbit_values(alpha0: QuadIrr, group: GroupSpec, s, mode: str = "joint",
                 threads: int = 1) -> set[QuadIrr]:
    """The set {alpha in G.alpha0 (u G.alpha0^s) mod q_G : h(alpha) <= s}."""
    s = Fraction(s)
    if s <= 0:
        raise ValueError("s must be > 0")
    od = orbit_data(alpha0, group)
    Q, D, q = od.Q, od.Q.D, group.q()
    thr = _SurdThreshold(s, D)
    smax = float(s) * math.sqrt(D) / 2 * (1 + 1e-12) + 1e-9
    g_inv = od.gamma.inv()
    powers = [IDENTITY]
    for _ in range(od.K - 1):
        powers.append(powers[-1] @ g_inv)
    out: set[QuadIrr] = set()
    for x in sector_points(Q, smax, thr, threads=threads):
        for g in powers:
            d, mc = _mat_vec(g, x)
            c = -mc
            if not group.admissible(c, d):
                continue
            M = group.complete(c, d)
            a = canonical_mod_translation(mobius(M, alpha0), q)
            assert a.height_le(s)
            out.add(a)
            if mode == "joint":
                out.add(canonical_mod_translation(a.conj(), q))
    return out


def orbit_count(alpha0: QuadIrr, group: GroupSpec = FULL, s=1, mode: str = "joint",
                threads: int = 1) -> int:
    return len(orbit_values(alpha0, group, s, mode, threads))


def bfs_orbit_values(alpha0: QuadIrr, s, max_depth: int = 30) -> set[QuadIrr]:
    """Independent oracle for the full modular group.

    States are values mod Z; a move is y -> -1/(y + k).  Since
    h(-1/(y + k)) = h(y) |N(y + k)|, only finitely many k keep h <= s.
    """
    s = Fraction(s)
    seeds = {canonical_mod_translation(alpha0), canonical_mod_translation(alpha0.conj())}
    seen = {a for a in seeds if a.height_le(s)}
    frontier = list(seen)
    S = GL2Int(0, -1, 1, 0)
    for _ in range(max_depth):
        nxt = []
        for y in frontier:
            # |N(y + k)| <= s/h(y): y + k = (P + k Qd + sqrt D)/Qd
            hy = y.height_float()
            bound = float(s) / hy
            ry = float(y)
            ryc = float(y.conj())
            # N(y+k) = (ry+k)(ryc+k); solve |.| <= bound in k
            mid = -(ry + ryc) / 2
            half = abs(ry - ryc) / 2
            r = math.sqrt(half * half + bound) + 2
            for k in range(math.floor(mid - r), math.ceil(mid + r) + 1):
                z = canonical_mod_translation(mobius(S, y + k))
                if z in seen or not z.height_le(s):
                    continue
                seen.add(z)
                nxt.append(z)
        if not nxt:
            break
        frontier = nxt
    return seen


# ---------------------------------------------------------------------------
# asymptotic constants


def _pi():
    return mpmath.pi


def predicted_constant(theorem: str, *, D: int | None = None, R=None, p: int | None = None,
                       n0: int | None = None, q: int = 1, index: int = 1,
                       prec: int = 80):
    """Leading coefficient of the linear asymptotics.

    kind: "psi" (12R/(pi^2 sqrt D)), "psi_p", "psi_p0", "separation"
    (24 R/(pi^2 n0), complexity measured by |alpha - alpha^s|^-1), "orbit"
    (12 q R/(pi^2 index n0), complexity h).
    """
    with mpmath.workprec(prec):
        pi2 = mpmath.pi ** 2
        if theorem == "psi":
            return 12 * mpmath.mpf(R) / (pi2 * mpmath.sqrt(D))
        if theorem == "psi_p":
            if p == 2:
                return 4 * mpmath.mpf(R) / (pi2 * mpmath.sqrt(D))
            f = mpmath.mpf(1)
            for l in prime_factors(p):
                f /= (1 - mpmath.mpf(1) / l ** 2)
            return 24 * mpmath.mpf(R) / (pi2 * p * p * mpmath.sqrt(D)) * f
        if theorem == "psi_p0":
            f = mpmath.mpf(1)
            for l in prime_factors(p):
                f /= (1 + mpmath.mpf(1) / l)
            return 12 * mpmath.mpf(R) / (pi2 * p * mpmath.sqrt(D)) * f
        if theorem == "separation":
            return 24 * mpmath.mpf(R) / (pi2 * n0)
        if theorem == "orbit":
            return 12 * q * mpmath.mpf(R) / (pi2 * index * n0)
    raise ValueError(f"unknown constant kind {theorem!r}")


def psi_constant(Q: Form, group: GroupSpec = FULL, prec: int = 80):
    P = Q.primitive_part()
    sol = fundamental_pell4(P.D)
    if group.kind == "full":
        return predicted_constant("psi", D=Q.D, R=regulator_bits(sol, prec), prec=prec)
    solp = pell_with_divisor(P.D, group.p)
    tag = "psi_p" if group.kind == "principal" else "psi_p0"
    return predicted_constant(tag, D=Q.D, R=regulator_bits(solp, prec), p=group.p, prec=prec)


def orbit_constant(alpha0: QuadIrr, group: GroupSpec = FULL, mode: str = "joint", prec: int = 80):
    od = orbit_data(alpha0, group)
    sol = fundamental_pell4(od.Q.D)
    R = regulator_bits(sol, prec) * od.K
    n0 = 2 if od.reciprocal else 1
    c = predicted_constant("orbit", R=R, q=group.q(), index=group.index(), n0=n0, prec=prec)
    if mode == "single" and not od.reciprocal:
        c /= 2
    return c


# ---------------------------------------------------------------------------
# series and reports


@dataclass
class CountSeries:
    thresholds: list
    counts: list
    predicted_constant: float | None = None
    exponent: int = 1
    provenance: str = ""

    def __post_init__(self):
        if len(self.thresholds) != len(self.counts):
            raise ValueError("length mismatch")
        if any(b < a for a, b in zip(self.counts, self.counts[1:])):
            raise ValueError("counts must be non-decreasing")


def run_series(counter, thresholds, predicted=None, exponent: int = 1, provenance: str = "") -> CountSeries:
    ths = list(thresholds)
    if any(b <= a for a, b in zip(ths, ths[1:])):
        raise ValueError("thresholds must be increasing")
    return CountSeries(ths, [counter(s) for s in ths], predicted, exponent, provenance)


def report(series: CountSeries) -> list[dict]:
    rows = []
    for s, c in zip(series.thresholds, series.counts):
        ratio = c / float(s) ** series.exponent
        pred = None if series.predicted_constant is None else float(series.predicted_constant)
        gap = None if pred is None else abs(ratio - pred) / pred
        rows.append({"s": s, "count": c, "ratio": ratio, "predicted": pred, "rel_gap": gap})
    return rows
