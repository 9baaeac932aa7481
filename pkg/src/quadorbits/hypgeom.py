"""Hyperbolic geometry constants and the equidistribution demo.

Floating point is fine here; nothing in this module feeds an exact count.
"""
from __future__ import annotations

import cmath
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate

from .pell import fundamental_pell4
from .qforms import Form, classify


def sphere_volume(m: int) -> float:
    """Volume of the unit sphere S^m in R^(m+1)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    with mpmath.workdps(40):
        return float(2 * mpmath.pi ** (mpmath.mpf(m + 1) / 2) / mpmath.gamma(mpmath.mpf(m + 1) / 2))


def tube_volume(n: int, k: int, vol_C: float, t: float) -> dict:
    """Volume of the t-neighbourhood of a k-dimensional totally geodesic C.

    Returns {"quad": ..., "closed": ...}; "closed" is only set for k = 1,
    where it must agree with the quadrature.
    """
    if not (0 <= k < n) or n < 2:
        raise ValueError(f"invalid (n, k) = ({n}, {k})")
    if t < 0 or vol_C <= 0:
        raise ValueError("need t >= 0 and vol_C > 0")
    front = sphere_volume(n - k - 1) * vol_C
    with mpmath.workdps(30):
        f = lambda s: mpmath.tanh(s) ** (n - k - 1) * mpmath.cosh(s) ** (n - 1)
        # split the range so the exponential growth is resolved
        pts = [mpmath.mpf(0)] + [mpmath.mpf(t) * i / 8 for i in range(1, 9)]
        quad = float(front * mpmath.quad(f, pts)) if t > 0 else 0.0
        closed = None
        if k == 1:
            closed = float(front * mpmath.sinh(t) ** (n - 1) / (n - 1))
    if closed is not None:
        scale = max(abs(closed), 1e-300)
        if abs(quad - closed) > 1e-9 * scale:
            raise ArithmeticError(f"quadrature {quad} disagrees with closed form {closed}")
    return {"quad": quad, "closed": closed}


def translation_length(trace, dim: int = 2) -> float:
    """Translation length of a loxodromic/hyperbolic element from its trace."""
    if dim == 2:
        tr = float(trace)
        if abs(tr) <= 2:
            raise ValueError("not hyperbolic: |trace| <= 2")
        return 2 * math.acosh(abs(tr) / 2)
    if dim == 3:
        tr = complex(trace)
        root = cmath.sqrt(tr * tr - 4)
        lams = [(tr + root) / 2, (tr - root) / 2]
        vals = [2 * abs(math.log(abs(l))) for l in lams]
        if min(vals) < 1e-14:
            raise ValueError("eigenvalues of modulus 1: not loxodromic")
        if abs(vals[0] - vals[1]) > 1e-9 * max(vals):
            raise ArithmeticError("square-root branches disagree")
        return vals[0]
    raise ValueError("dim must be 2 or 3")


def horoball_geodesic_distance(h: float, x: complex, y: complex) -> float:
    """Signed distance from the horosphere at height h to the geodesic (x, y)."""
    if h <= 0:
        raise ValueError("h must be > 0")
    r = abs(complex(y) - complex(x))
    if r == 0:
        raise ValueError("endpoints coincide")
    return math.log(2 * h / r)


@dataclass
class GeometryParams:
    n: int
    k: int = 1
    vol_C: float | None = None
    vol_H: float | None = None
    vol_M: float | None = None
    vol_dH: float | None = None
    ell0: float | None = None
    A_inf: float | None = None
    n_G0: int | None = None

    def __post_init__(self):
        if self.vol_H is None and self.vol_dH is not None:
            self.vol_H = self.vol_dH / (self.n - 1)
        if self.vol_H is not None and self.vol_dH is not None:
            if abs(self.vol_H - self.vol_dH / (self.n - 1)) > 1e-12 * self.vol_H:
                raise ValueError("vol_H must equal vol_dH/(n-1)")


def _positive(*xs):
    for x in xs:
        if x is None or x <= 0:
            raise ValueError("all volumes and lengths must be positive")


def counting_constant(params: GeometryParams, theorem: str) -> float:
    n = params.n
    if theorem == "geodesic":
        _positive(params.vol_H, params.vol_C, params.vol_M)
        num = sphere_volume(n - params.k - 1) * params.vol_H * params.vol_C
        return num / (sphere_volume(n - 1) * params.vol_M)
    if theorem == "cusp":
        _positive(params.ell0, params.A_inf, params.vol_M, params.n_G0)
        num = 2 ** n * params.ell0 * sphere_volume(n - 2) * params.A_inf
        return num / ((n - 1) * params.n_G0 * sphere_volume(n - 1) * params.vol_M)
    raise ValueError(f"unknown constant kind {theorem!r}")


# ---------------------------------------------------------------------------
# the modular surface


def reduce_to_fundamental_domain(z, max_iter: int = 10000):
    """Move points of the upper half plane into |Re z| <= 1/2, |z| >= 1.

    Ties: Re z = 1/2 goes to -1/2; points on the unit circle with Re z > 0
    are sent once by z -> -1/z.
    """
    z = np.array(z, dtype=np.complex128, copy=True)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    active = np.ones(z.shape, dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        w = z[idx]
        w = w - np.floor(w.real + 0.5)
        inside = np.abs(w) < 1.0
        w[inside] = -1.0 / w[inside]
        z[idx] = w
        active[idx] = inside
    else:
        raise RuntimeError("reduction did not converge")
    arc = (np.abs(np.abs(z) - 1.0) < 1e-15) & (z.real > 0)
    z[arc] = -1.0 / z[arc]
    return z[0] if scalar else z


def reference_masses(bins: int, ymax: float) -> np.ndarray:
    """Normalized dx dy / y^2 mass of each bin of the truncated domain."""
    xe = np.linspace(-0.5, 0.5, bins + 1)
    ye = np.linspace(math.sqrt(3) / 2, ymax, bins + 1)
    m = np.zeros((bins, bins))
    for i in range(bins):
        for j in range(bins):
            y0, y1 = ye[j], ye[j + 1]
            f = lambda x: max(0.0, 1.0 / max(y0, math.sqrt(max(0.0, 1 - x * x))) - 1.0 / y1)
            brk = [x for yy in (y0, y1) if yy < 1 for x in (-math.sqrt(1 - yy * yy), math.sqrt(1 - yy * yy))
                   if xe[i] < x < xe[i + 1]]
            m[i, j] = integrate.quad(f, xe[i], xe[i + 1], points=brk or None, epsabs=1e-13, epsrel=1e-11)[0]
    return m / m.sum()


def _axis_map(Q: Form):
    sq = math.sqrt(Q.D)
    r1 = (-Q.B + sq) / (2 * Q.A)
    r2 = (-Q.B - sq) / (2 * Q.A)
    return max(r1, r2), min(r1, r2)


def _demo_chunk(args):
    a, b, ell, t, n, seed_seq, bins, ymax, one_sided = args
    rng = np.random.default_rng(seed_seq)
    tau = rng.uniform(0.0, ell, n)
    if one_sided:
        side = np.ones(n)
    else:
        side = np.where(rng.integers(0, 2, n) == 0, -1.0, 1.0)
    w = np.exp(tau) * (side * math.tanh(t) + 1j / math.cosh(t))
    z = (a * w + b) / (w + 1)
    z = reduce_to_fundamental_domain(z)
    keep = z.imag <= ymax
    h, _, _ = np.histogram2d(z.real[keep], z.imag[keep], bins=bins,
                             range=[[-0.5, 0.5], [math.sqrt(3) / 2, ymax]])
    return h, int(keep.sum())


N_STREAMS = 16


def equidistribution_demo(Q: Form, t: float, samples: int = 10 ** 6, bins: int = 20,
                          ymax: float = 4.0, seed: int = 0, one_sided: bool = False,
                          threads: int = 1) -> dict:
    """Push the closed geodesic of gamma_Q a distance t along its normals.

    Returns the empirical and reference bin masses and their total
    variation distance.  The sample is split into a fixed number of RNG
    streams, so the result does not depend on the number of threads.
    """
    if samples <= 0:
        raise ValueError("samples must be > 0")
    info = classify(Q)
    if not info["indefinite"] or not info["irreducible"]:
        raise ValueError("need an indefinite form with non-square discriminant")
    P = Q.primitive_part()
    sol = fundamental_pell4(P.D)
    ell = 2 * math.log((sol.t + sol.u * math.sqrt(P.D)) / 2)
    a, b = _axis_map(P)
    streams = np.random.SeedSequence(seed).spawn(N_STREAMS)
    sizes = [samples // N_STREAMS + (1 if i < samples % N_STREAMS else 0) for i in range(N_STREAMS)]
    jobs = [(a, b, ell, t, sizes[i], streams[i], bins, ymax, one_sided) for i in range(N_STREAMS)]
    if threads > 1:
        with ProcessPoolExecutor(threads) as ex:
            parts = list(ex.map(_demo_chunk, jobs))
    else:
        parts = [_demo_chunk(j) for j in jobs]
    hist = sum(p[0] for p in parts)
    kept = sum(p[1] for p in parts)
    emp = hist / max(kept, 1)
    ref = reference_masses(bins, ymax)
    tv = 0.5 * float(np.abs(emp - ref).sum())
    return {"tv": tv, "empirical": emp, "reference": ref, "kept": kept, "samples": samples,
            "t": t, "bins": bins, "ymax": ymax}
