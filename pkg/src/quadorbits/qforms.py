"""Integral binary quadratic forms A X^2 + B XY + C Y^2."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .quadfield import is_square


@dataclass(frozen=True)
class GL2Int:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.det() not in (1, -1):
            raise ValueError(f"determinant {self.det()} is not +-1")

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, o: "GL2Int") -> "GL2Int":
        return GL2Int(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                      self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def inv(self) -> "GL2Int":
        e = self.det()
        return GL2Int(e * self.d, -e * self.b, -e * self.c, e * self.a)

    def __neg__(self):
        return GL2Int(-self.a, -self.b, -self.c, -self.d)

    def __pow__(self, k: int) -> "GL2Int":
        if k < 0:
            return self.inv() ** (-k)
        out, base = IDENTITY, self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def trace(self) -> int:
        return self.a + self.d

    def mod(self, p: int) -> tuple[int, int, int, int]:
        return (self.a % p, self.b % p, self.c % p, self.d % p)

    def tuple(self):
        return (self.a, self.b, self.c, self.d)


IDENTITY = GL2Int(1, 0, 0, 1)
T = GL2Int(1, 1, 0, 1)
S = GL2Int(0, -1, 1, 0)


@dataclass(frozen=True)
class Form:
    A: int
    B: int
    C: int

    def __post_init__(self):
        if self.A == 0 and self.B == 0 and self.C == 0:
            raise ValueError("zero form")

    @property
    def D(self) -> int:
        return self.B * self.B - 4 * self.A * self.C

    def __call__(self, x: int, y: int) -> int:
        return self.A * x * x + self.B * x * y + self.C * y * y

    def __neg__(self) -> "Form":
        return Form(-self.A, -self.B, -self.C)

    def content(self) -> int:
        return gcd(gcd(self.A, self.B), self.C)

    def primitive_part(self) -> "Form":
        k = self.content()
        return Form(self.A // k, self.B // k, self.C // k)

    def scale(self, k: int) -> "Form":
        return Form(k * self.A, k * self.B, k * self.C)

    def __str__(self):
        return f"{self.A},{self.B},{self.C}"

    @classmethod
    def parse(cls, text: str) -> "Form":
        parts = [int(x) for x in text.replace(" ", "").split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected a,b,c but got {text!r}")
        return cls(*parts)


def classify(Q: Form) -> dict:
    D = Q.D
    k = Q.content()
    return {"content": k, "primitive": k == 1, "indefinite": D > 0,
            "irreducible": not is_square(D), "D": D}


def act(Q: Form, g: GL2Int) -> Form:
    """The form (X, Y) -> Q(aX + bY, cX + dY)."""
    if g.det() != 1:
        raise ValueError("act requires determinant +1")
    a, b, c, d = g.a, g.b, g.c, g.d
    return Form(Q(a, c), 2 * Q.A * a * b + Q.B * (a * d + b * c) + 2 * Q.C * c * d, Q(b, d))


def _check_form(Q: Form):
    info = classify(Q)
    if not (info["primitive"] and info["indefinite"] and info["irreducible"]):
        raise ValueError(f"form {Q} must be primitive, indefinite and irreducible")


def automorph(Q: Form, t: int, u: int) -> GL2Int:
    if t * t - Q.D * u * u != 4:
        raise ValueError(f"({t},{u}) is not a solution of t^2 - {Q.D} u^2 = 4")
    if (t - Q.B * u) % 2:
        raise ValueError("non-integral automorph")
    return GL2Int((t - Q.B * u) // 2, -Q.C * u, Q.A * u, (t + Q.B * u) // 2)


def fundamental_automorph(Q: Form) -> GL2Int:
    """gamma_Q from the fundamental Pell solution of the primitive part."""
    from .pell import fundamental_pell4
    P = Q.primitive_part()
    sol = fundamental_pell4(P.D)
    return automorph(P, sol.t, sol.u)


def alpha_of(Q: Form):
    from .quadirr import QuadIrr
    _check_form(Q)
    if Q.A == 0:
        raise ValueError("A = 0")
    return QuadIrr.from_form(Q)


def form_of(alpha) -> Form:
    return alpha.form()


# --- reduction theory of indefinite forms ------------------------------------


def is_reduced(Q: Form) -> bool:
    """|sqrt D - 2|A|| < B < sqrt D, in integer form."""
    s = isqrt(Q.D)
    a2 = 2 * abs(Q.A)
    return 0 < Q.B <= s and a2 + Q.B > s and a2 - Q.B <= s and Q.A != 0 and Q.C != 0


def rho(Q: Form) -> tuple[Form, GL2Int]:
    """One normalized neighbour step; returns the form and the matrix used."""
    D = Q.D
    s = isqrt(D)
    c = Q.C
    m = 2 * abs(c)
    if abs(c) > s:
        # r = -b mod 2|c| in (-|c|, |c|]
        r = (-Q.B) % m
        if r > abs(c):
            r -= m
    else:
        # r = -b mod 2|c| in (sqrt D - 2|c|, sqrt D)
        r = s - ((s + Q.B) % m)
    tt = (r + Q.B) // (2 * c)
    assert r + Q.B == 2 * c * tt
    g = GL2Int(0, -1, 1, tt)
    R = Form(c, r, (r * r - D) // (4 * c))
    assert act(Q, g) == R
    return R, g


def reduce_form(Q: Form) -> tuple[Form, GL2Int]:
    """A reduced form R with act(Q, g) = R."""
    _check_form(Q)
    g = IDENTITY
    R = Q
    steps = 0
    while not is_reduced(R):
        R, h = rho(R)
        g = g @ h
        steps += 1
        if steps > 10000 + 4 * R.D:
            raise RuntimeError("reduction did not terminate")
    return R, g


def cycle(Q: Form) -> list[tuple[Form, GL2Int]]:
    """The reduced cycle of Q with matrices h_j, act(R0, h_j) = R_j."""
    R0, _ = reduce_form(Q)
    out = [(R0, IDENTITY)]
    R, g = R0, IDENTITY
    while True:
        R, h = rho(R)
        g = g @ h
        if R == R0:
            return out
        out.append((R, g))


def equivalent(Q1: Form, Q2: Form, witness: bool = False):
    """SL2(Z)-equivalence by intersecting reduced cycles."""
    if Q1.D != Q2.D:
        return (False, None) if witness else False
    R1, g1 = reduce_form(Q1)
    _, g2 = reduce_form(Q2)
    for C, h in cycle(Q2):
        if C == R1:
            if not witness:
                return True
            # act(Q1, g1) = act(Q2, g2 h)
            w = g1 @ (g2 @ h).inv()
            assert act(Q1, w) == Q2
            return True, w
    return (False, None) if witness else False


def is_reciprocal_form(Q: Form) -> bool:
    return equivalent(Q, -Q)


def reciprocal_witness(Q: Form) -> GL2Int | None:
    ok, w = equivalent(Q, -Q, witness=True)
    return w if ok else None


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def brute_force_equivalent(Q1: Form, Q2: Form, bound: int = 50) -> bool:
    """Search SL2(Z) matrices with entries in [-bound, bound]."""
    if Q1.D != Q2.D:
        return False
    for a in range(-bound, bound + 1):
        for c in range(-bound, bound + 1):
            if gcd(a, c) != 1 or Q1(a, c) != Q2.A:
                continue
            g, x, y = _ext_gcd(a, c)
            # a*x + c*y = g = +-1, so (b, d) = (-y, x)/g solves ad - bc = 1
            b0, d0 = -y * g, x * g
            for k in range(-2 * bound - 2, 2 * bound + 3):
                b, d = b0 + k * a, d0 + k * c
                if abs(b) <= bound and abs(d) <= bound and act(Q1, GL2Int(a, b, c, d)) == Q2:
                    return True
    return False


def forms_of_discriminant(D: int, primitive: bool = True) -> list[Form]:
    """All reduced forms of discriminant D (useful for test fixtures)."""
    s = isqrt(D)
    out = []
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        n = (b * b - D) // 4
        for a in range(1, abs(n) + 1):
            if n % a:
                continue
            for sa in (a, -a):
                Q = Form(sa, b, n // sa)
                if is_reduced(Q) and (not primitive or Q.content() == 1):
                    out.append(Q)
    return out


def class_representatives(D: int) -> list[Form]:
    seen, reps = set(), []
    for Q in forms_of_discriminant(D):
        if Q in seen:
            continue
        reps.append(Q)
        for C, _ in cycle(Q):
            seen.add(C)
    return reps
