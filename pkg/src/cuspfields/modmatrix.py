"""Integer 2x2 matrices: SL2(Z) lifts, g_lambda, Atkin-Lehner matrices, cusp data."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "MatZ",
    "MatModN",
    "Cusp",
    "S",
    "T",
    "I",
    "xgcd",
    "sl2_lift",
    "g_lambda",
    "atkin_lehner_matrices",
    "wq_g_decomposition",
    "cusp_of",
    "cusp_width",
    "in_gamma0",
    "parse_matrix",
    "is_maximal_divisor",
    "cusp_matrix",
    "cusps_x0",
]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


@dataclass(frozen=True)
class MatZ:
    A: int
    B: int
    C: int
    D: int

    @property
    def det(self) -> int:
        return self.A * self.D - self.B * self.C

    def __matmul__(self, other: MatZ) -> MatZ:
        return MatZ(
            self.A * other.A + self.B * other.C,
            self.A * other.B + self.B * other.D,
            self.C * other.A + self.D * other.C,
            self.C * other.B + self.D * other.D,
        )

    def inverse(self) -> MatZ:
        if self.det not in (1, -1):
            raise ValueError("matrix is not invertible over Z")
        d = self.det
        return MatZ(self.D * d, -self.B * d, -self.C * d, self.A * d)

    def mod(self, N: int) -> MatModN:
        return MatModN(N, self.A, self.B, self.C, self.D)

    def is_sl2(self) -> bool:
        return self.det == 1

    def act(self, tau: complex) -> complex:
        return (self.A * tau + self.B) / (self.C * tau + self.D)

    def power(self, e: int) -> MatZ:
        result, base = I, self if e >= 0 else self.inverse()
        for _ in range(abs(e)):
            result = result @ base
        return result

    def to_text(self) -> str:
        return f"{self.A},{self.B},{self.C},{self.D}"

    def __str__(self):
        return f"({self.A} {self.B}; {self.C} {self.D})"


I = MatZ(1, 0, 0, 1)
S = MatZ(0, -1, 1, 0)
T = MatZ(1, 1, 0, 1)


def parse_matrix(text: str) -> MatZ:
    parts = [int(t) for t in text.replace(" ", "").split(",")]
    if len(parts) != 4:
        raise ValueError(f"expected four comma-separated integers, got {text!r}")
    return MatZ(*parts)


@dataclass(frozen=True)
class MatModN:
    N: int
    A: int
    B: int
    C: int
    D: int

    def __post_init__(self):
        N = self.N
        object.__setattr__(self, "A", self.A % N)
        object.__setattr__(self, "B", self.B % N)
        object.__setattr__(self, "C", self.C % N)
        object.__setattr__(self, "D", self.D % N)
        if math.gcd(self.det, N) != 1:
            raise ValueError(f"determinant {self.det} is not a unit modulo {N}")

    @property
    def det(self) -> int:
        return (self.A * self.D - self.B * self.C) % self.N

    def __matmul__(self, other: MatModN) -> MatModN:
        if self.N != other.N:
            raise ValueError("modulus mismatch")
        return MatModN(
            self.N,
            self.A * other.A + self.B * other.C,
            self.A * other.B + self.B * other.D,
            self.C * other.A + self.D * other.C,
            self.C * other.B + self.D * other.D,
        )

    def __eq__(self, other):
        if isinstance(other, MatZ):
            other = other.mod(self.N)
        if not isinstance(other, MatModN):
            return NotImplemented
        return (self.N, self.A, self.B, self.C, self.D) == (other.N, other.A, other.B, other.C, other.D)

    def __hash__(self):
        return hash((self.N, self.A, self.B, self.C, self.D))

    def row_action(self, a: int, b: int) -> tuple[int, int]:
        """The row vector (a, b) times this matrix, modulo N."""
        return (a * self.A + b * self.C) % self.N, (a * self.B + b * self.D) % self.N


def diag(N: int, lam: int) -> MatModN:
    return MatModN(N, 1, 0, 0, lam)


def sl2_lift(m: MatModN) -> MatZ:
    """An SL2(Z) matrix congruent to m modulo N."""
    N = m.N
    if m.det != 1 % N:
        raise ValueError(f"determinant {m.det} is not 1 modulo {N}")
    if N == 1:
        return I
    a, b, c, d = m.A, m.B, m.C, m.D
    if (a, b, c, d) == (1 % N, 0, 0, 1 % N):
        return I
    # make the bottom row coprime by shifting d by multiples of N
    c0 = c if c else N
    t = 0
    while math.gcd(c0, d + t * N) != 1:
        t += 1
    d0 = d + t * N
    # any (a0, b0) with a0 d0 - b0 c0 = 1, then correct the top row mod N
    g, x, y = xgcd(d0, -c0)
    assert g == 1
    a0, b0 = x, y
    # (a, b) - (a0, b0) is a multiple of the unimodular row (c0, d0) modulo N
    for k in range(N):
        if (a0 + k * c0 - a) % N == 0 and (b0 + k * d0 - b) % N == 0:
            lift = MatZ(a0 + k * c0, b0 + k * d0, c0, d0)
            assert lift.det == 1
            return lift
    raise AssertionError("no SL2 lift found (unreachable for det = 1)")


def g_lambda(g: MatZ, lam: int, N: int) -> MatZ:
    """SL2(Z) lift of (A, lam B; lam^-1 C, D) modulo N."""
    if math.gcd(lam, N) != 1:
        raise ValueError(f"{lam} is not a unit modulo {N}")
    if not g.is_sl2():
        raise ValueError("g must lie in SL2(Z)")
    li = pow(lam, -1, N) if N > 1 else 0
    return sl2_lift(MatModN(N, g.A, lam * g.B, li * g.C, g.D))


def is_maximal_divisor(Q: int, N: int) -> bool:
    return Q > 0 and N % Q == 0 and math.gcd(Q, N // Q) == 1


def atkin_lehner_matrices(Q: int, N: int) -> tuple[MatZ, MatZ]:
    """Return (W_Q, h_Q) with W_Q = (Qx, y; Nz, Qw) of determinant Q and W_Q = h_Q diag(Q, 1)."""
    if not is_maximal_divisor(Q, N):
        raise ValueError(f"{Q} is not a maximal divisor of {N}")
    R = N // Q
    if Q == 1:
        return I, I
    if R == 1:
        # y = 1 mod Q as in the general case
        return MatZ(0, 1, -N, 0), MatZ(0, 1, -1, 0)
    # det = Q^2 x w - N y z = Q  <=>  Q x w - R y z = 1
    # take y = 1 + Q t, x = 1 + R s and solve for w, z
    for t in range(R + 1):
        y = 1 + Q * t
        for s in range(Q + 1):
            x = 1 + R * s
            g, w, mz = xgcd(Q * x, R * y)
            if g == 1:
                z = -mz
                W = MatZ(Q * x, y, N * z, Q * w)
                h = MatZ(x, y, R * z, Q * w)
                assert W.det == Q and h.det == 1
                return W, h
    raise AssertionError("unreachable: Atkin-Lehner matrix not found")


def wq_g_decomposition(g: MatZ, Q: int, N: int) -> tuple[MatZ, MatZ]:
    """Factor diag(Q, 1) g = g2 @ upper with g2 in SL2(Z) and upper triangular of det Q."""
    if not is_maximal_divisor(Q, N):
        raise ValueError(f"{Q} is not a maximal divisor of {N}")
    if not g.is_sl2():
        raise ValueError("g must lie in SL2(Z)")
    A, B, C, D = g.A, g.B, g.C, g.D
    g0 = math.gcd(C, Q)
    p, c = A * Q // g0, C // g0
    # r p - s c = 1
    gg, r, ms = xgcd(p, c)
    if gg != 1:
        raise ValueError("AQ/gcd(C,Q) and C/gcd(C,Q) are not coprime")
    s = -ms
    g2 = MatZ(p, s, c, r)
    upper = MatZ(g0, r * B * Q - s * D, 0, Q // g0)
    # normalise the upper-right entry into [0, Q/g0) by moving a translation across
    k = upper.B // (Q // g0)
    g2 = g2 @ MatZ(1, k, 0, 1)
    upper = MatZ(g0, upper.B - k * (Q // g0), 0, Q // g0)
    assert g2.det == 1
    assert MatZ(Q, 0, 0, 1) @ g == g2 @ upper
    return g2, upper


def in_gamma0(m: MatZ, N: int) -> bool:
    return m.C % N == 0


@dataclass(frozen=True)
class Cusp:
    """The cusp A/C of X_0(N) with its denominator and width."""

    numerator: int
    denominator: int
    delta: int
    width: int

    def __str__(self):
        return "oo" if self.denominator == 0 else f"{self.numerator}/{self.denominator}"


def _width_formula(C: int, N: int) -> int:
    return N // math.gcd(C * C, N)


def cusp_width(g: MatZ, N: int, group: str = "Gamma0") -> int:
    """Smallest h > 0 with g T^h g^-1 in the given congruence subgroup (up to sign)."""
    ginv = g.inverse()
    for h in range(1, N * N + 1):
        m = g @ MatZ(1, h, 0, 1) @ ginv
        if group == "Gamma0":
            if m.C % N == 0:
                return h
        elif group == "Gamma1":
            if m.C % N == 0 and ((m.A - 1) % N == 0 and (m.D - 1) % N == 0 or (m.A + 1) % N == 0 and (m.D + 1) % N == 0):
                return h
        elif group == "Gamma":
            if m.B % N == 0 and m.C % N == 0 and ((m.A - 1) % N == 0 or (m.A + 1) % N == 0):
                return h
        else:
            raise ValueError(f"unknown group {group!r}")
    raise AssertionError("width search exhausted")


def cusp_of(g: MatZ, N: int) -> Cusp:
    A, C = g.A, g.C
    if C == 0:
        num, den = 1, 0
    else:
        f = Fraction(A, C)
        num, den = f.numerator, f.denominator
    delta = math.gcd(C, N)
    w = _width_formula(C, N)
    assert w == cusp_width(g, N, "Gamma0")
    return Cusp(num, den, delta, w)


def cusp_matrix(a: int, c: int) -> MatZ:
    """An SL2(Z) matrix sending oo to a/c (gcd(a, c) = 1)."""
    if c == 0:
        return I
    g, x, y = xgcd(a, c)
    if abs(g) != 1:
        raise ValueError(f"{a}/{c} is not in lowest terms")
    # a*x + c*y = g; take (a, -y*g; c, x*g)
    return MatZ(a, -y * g, c, x * g)


def cusps_x0(N: int) -> list[MatZ]:
    """One matrix per cusp of X_0(N): a/c with c | N and a running over units mod gcd(c, N/c)."""
    out = []
    for c in range(1, N + 1):
        if N % c:
            continue
        if c == N:
            out.append(I)
            continue
        t = math.gcd(c, N // c)
        for r in range(t):
            if math.gcd(r, t) != 1 and t > 1:
                continue
            a = next(x for x in range(r if r else t, r + t * c + 1, t) if math.gcd(x, c) == 1)
            out.append(cusp_matrix(a, c))
    return out
