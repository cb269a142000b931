"""Level-N Eisenstein series E^(k)_{a,b}, their exact q-expansions and the index action.

Weight 2 series are always the holomorphic combinations
E~^(2)_{a,b} = E^(2)_{a,b} - E^(2)_{0,0}.  Expansions are produced in width N
with coefficients in Q(zeta_N).  Internally a series is first assembled in
the group ring Z[Z/NZ] (column e holds the multiplicity of zeta_N^e), which
makes twisting by roots of unity a column rotation.
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .cyclotomic import CycNumber, euler_phi, lcm, pow_table, zeta
from .modmatrix import MatModN, MatZ
from .qseries import QExpansion

__all__ = [
    "EisIndex",
    "EisMonomial",
    "EisLinear",
    "EisProduct",
    "eis_expansion",
    "eis_constant_term",
    "index_slash",
    "monomial_expansion",
    "eis_numeric",
    "eulerian_poly",
    "polylog_neg",
]


@dataclass(frozen=True, order=True)
class EisIndex:
    """E^(k)_{a,b} at level N (k = 2 stands for the tilde series)."""

    N: int
    a: int
    b: int
    k: int = 1

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("level must be positive")
        if self.k < 1:
            raise ValueError("weight must be at least 1")
        object.__setattr__(self, "a", self.a % self.N)
        object.__setattr__(self, "b", self.b % self.N)

    @property
    def tilde(self) -> bool:
        return self.k == 2

    def slash(self, gamma: MatModN | MatZ) -> EisIndex:
        g = gamma if isinstance(gamma, MatModN) else gamma.mod(self.N)
        a, b = g.row_action(self.a, self.b)
        return EisIndex(self.N, a, b, self.k)

    def galois(self, lam: int) -> EisIndex:
        return EisIndex(self.N, self.a, lam * self.b, self.k)

    def __str__(self):
        t = "E~" if self.k == 2 else "E"
        return f"{t}^({self.k})_{{{self.a},{self.b}}}[N={self.N}]"


@dataclass(frozen=True)
class EisMonomial:
    """Formal product of Eisenstein series of one level, canonically sorted."""

    N: int
    indices: tuple[EisIndex, ...] = ()

    def __post_init__(self):
        for idx in self.indices:
            if idx.N != self.N:
                raise ValueError("all factors must share the level")
        object.__setattr__(self, "indices", tuple(sorted(self.indices, key=lambda i: (i.k, i.a, i.b))))

    @classmethod
    def of(cls, N: int, pairs, k: int = 1) -> EisMonomial:
        return cls(N, tuple(EisIndex(N, a, b, k) for a, b in pairs))

    @property
    def weight(self) -> int:
        return sum(i.k for i in self.indices)

    def slash(self, gamma) -> EisMonomial:
        return EisMonomial(self.N, tuple(i.slash(gamma) for i in self.indices))

    def galois(self, lam: int) -> EisMonomial:
        return EisMonomial(self.N, tuple(i.galois(lam) for i in self.indices))

    def __mul__(self, other: EisMonomial) -> EisMonomial:
        return EisMonomial(self.N, self.indices + other.indices)

    def as_product(self) -> EisProduct:
        return EisProduct(self.N, tuple(EisLinear.single(i) for i in self.indices))

    def __str__(self):
        return "*".join(f"E{i.k}[{i.a},{i.b}]" for i in self.indices) or "1"


def index_slash(obj, gamma):
    """Row-vector action (a, b) -> (a, b) gamma on an index, monomial or product."""
    return obj.slash(gamma)


# ---------------------------------------------------------------------------
# linear combinations and products (the generators used by the engine)


@dataclass(frozen=True)
class EisLinear:
    """sum_j c_j E^(k)_{a_j,b_j} with coefficients c_j in Q(zeta_N)."""

    N: int
    k: int
    terms: tuple[tuple[tuple[int, int], CycNumber], ...]

    @classmethod
    def single(cls, idx: EisIndex) -> EisLinear:
        return cls(idx.N, idx.k, (((idx.a, idx.b), CycNumber.rational(1)),))

    @classmethod
    def build(cls, N: int, k: int, terms) -> EisLinear:
        acc: dict[tuple[int, int], CycNumber] = {}
        for (a, b), c in terms:
            key = (a % N, b % N)
            c = CycNumber.coerce(c)
            if N % c.modulus and c.modulus > 1:
                c = c.minimal_modulus()
                if N % c.modulus:
                    raise ValueError("coefficients must lie in Q(zeta_N)")
            acc[key] = acc[key] + c if key in acc else c
        items = tuple(sorted(((key, c) for key, c in acc.items() if not c.is_zero()), key=lambda t: t[0]))
        return cls(N, k, items)

    def slash(self, gamma) -> EisLinear:
        g = gamma if isinstance(gamma, MatModN) else gamma.mod(self.N)
        return EisLinear.build(self.N, self.k, [(g.row_action(a, b), c) for (a, b), c in self.terms])

    def galois(self, lam: int) -> EisLinear:
        out = []
        for (a, b), c in self.terms:
            M = lcm(self.N, c.modulus)
            out.append(((a, lam * b), c.embed(M).sigma(lam % M if M > 1 else 0) if M > 1 else c))
        return EisLinear.build(self.N, self.k, out)

    def key(self):
        return (self.N, self.k, tuple((ab, c.to_text()) for ab, c in self.terms))

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        return isinstance(other, EisLinear) and self.key() == other.key()


@dataclass(frozen=True)
class EisProduct:
    """Product of EisLinear factors of one level."""

    N: int
    factors: tuple[EisLinear, ...]

    @property
    def weight(self) -> int:
        return sum(f.k for f in self.factors)

    def slash(self, gamma) -> EisProduct:
        return EisProduct(self.N, tuple(f.slash(gamma) for f in self.factors))

    def galois(self, lam: int) -> EisProduct:
        return EisProduct(self.N, tuple(f.galois(lam) for f in self.factors))


# ---------------------------------------------------------------------------
# constant terms


def eulerian_poly(n: int) -> list[int]:
    """Coefficients of the Eulerian polynomial A_n(z) (A_0 = 1)."""
    if n == 0:
        return [1]
    return [
        sum((-1) ** j * math.comb(n + 1, j) * (m + 1 - j) ** n for j in range(m + 1))
        for m in range(n)
    ]


def polylog_neg(n: int, z: CycNumber) -> CycNumber:
    """Li_{-n}(z) = z A_n(z) / (1 - z)^(n+1) for a root of unity z != 1."""
    one = CycNumber.rational(1, z.modulus)
    num = CycNumber.rational(0, z.modulus)
    zp = z
    for c in eulerian_poly(n):
        num = num + zp * c
        zp = zp * z
    return num * ((one - z) ** (n + 1)).inverse()


def _bernoulli(k: int) -> Fraction:
    B = [Fraction(1)]
    for m in range(1, k + 1):
        B.append(-sum(math.comb(m + 1, j) * B[j] for j in range(m)) / Fraction(m + 1))
    return B[k]


@lru_cache(maxsize=None)
def eis_constant_term(idx: EisIndex) -> CycNumber:
    """Exact constant term a_0 of E^(k)_{a,b} (tilde series for k = 2), in Q(zeta_N)."""
    N, a, b, k = idx.N, idx.a, idx.b, idx.k
    if k == 1:
        if a == 0:
            if b == 0:
                return CycNumber.rational(0, N)
            z = zeta(N, b)
            one = CycNumber.rational(1, N)
            return (one + z) * (one - z).inverse() * Fraction(1, 2)
        return CycNumber.rational(Fraction(1, 2) - Fraction(a, N), N)
    if k == 2:
        if a != 0:
            return CycNumber.rational(Fraction(1, 12), N)
        if b == 0:
            return CycNumber.rational(0, N)
        return polylog_neg(1, zeta(N, b)) + Fraction(1, 12)
    if a != 0:
        return CycNumber.rational(0, N)
    if b == 0:
        return CycNumber.rational(-_bernoulli(k) / k if k % 2 == 0 else 0, N)
    return polylog_neg(k - 1, zeta(N, b))


# ---------------------------------------------------------------------------
# expansions

_cache_lock = threading.Lock()
_gr_cache: dict[tuple[EisIndex, int], np.ndarray] = {}


def _group_ring(idx: EisIndex, prec: int) -> np.ndarray:
    """Non-constant part of the expansion as an int64 array (prec, N) over Z[Z/NZ]."""
    key = (idx, prec)
    hit = _gr_cache.get(key)
    if hit is not None:
        return hit
    N, a, b, k = idx.N, idx.a, idx.b, idx.k
    G = np.zeros((prec, N), dtype=np.int64)
    sign = -1 if k % 2 else 1
    for m in range(1, prec):
        top = (prec - 1) // m
        if top < 1:
            break
        ns = np.arange(1, top + 1, dtype=np.int64)
        vals = ns ** (k - 1)
        if m % N == a:
            np.add.at(G, (m * ns, (b * ns) % N), vals)
        if m % N == (-a) % N:
            np.add.at(G, (m * ns, (-b * ns) % N), sign * vals)
    if k == 2:
        for m in range(1, (prec - 1) // N + 1):
            top = (prec - 1) // (N * m)
            ns = np.arange(1, top + 1, dtype=np.int64)
            np.add.at(G, (N * m * ns, np.zeros_like(ns)), -2 * ns)
    G.setflags(write=False)
    with _cache_lock:
        _gr_cache[key] = G
    return G


def _to_power_basis(G: np.ndarray, N: int) -> np.ndarray:
    table = pow_table(N)
    bound = int(np.abs(G).max()) if G.size else 0
    if G.dtype != object and bound * N * 64 < 2**62:
        t = np.array(table, dtype=np.int64)
        return (G @ t).astype(object)
    return G.astype(object).dot(table)


def eis_expansion(idx: EisIndex, prec: int) -> QExpansion:
    """q-expansion of E^(k)_{a,b} in q^(1/N), known to precision prec."""
    if prec < 1:
        raise ValueError("precision must be positive")
    return linear_expansion(EisLinear.single(idx), prec)


def _groupring_vector(c: CycNumber, N: int) -> tuple[list[int], int]:
    c = c.embed(N) if c.modulus != N else c
    vec = [0] * N
    for j, a in enumerate(c.num):
        vec[j] = a
    return vec, c.den


_lin_cache: dict[tuple, QExpansion] = {}


def linear_expansion(lin: EisLinear, prec: int) -> QExpansion:
    """Expansion of a linear combination of Eisenstein series of one weight."""
    key = (lin.key(), prec)
    hit = _lin_cache.get(key)
    if hit is not None:
        return hit
    N = lin.N
    if not lin.terms:
        out = QExpansion.zero(N, prec, N)
    else:
        vecs = []
        D = 1
        for (a, b), c in lin.terms:
            v, d = _groupring_vector(c, N)
            vecs.append((EisIndex(N, a, b, lin.k), v, d))
            D = lcm(D, d)
        use_obj = False
        acc = np.zeros((prec, N), dtype=np.int64)
        for idx, v, d in vecs:
            G = _group_ring(idx, prec)
            f = D // d
            gmax = int(np.abs(G).max()) if G.size else 0
            if use_obj or gmax * max(abs(x) for x in v) * f * N * len(vecs) > 2**60:
                if not use_obj:
                    acc = acc.astype(object)
                    use_obj = True
                G = G.astype(object)
            for e, x in enumerate(v):
                if x:
                    acc = acc + np.roll(G, e, axis=1) * (x * f)
        num = _to_power_basis(acc, N)
        const = CycNumber.rational(0, N)
        for (a, b), c in lin.terms:
            const = const + c * eis_constant_term(EisIndex(N, a, b, lin.k))
        const = const.embed(N) if const.modulus != N else const
        den = lcm(D, const.den)
        num = num * (den // D)
        num[0] = num[0] + np.array(const.num, dtype=object) * (den // const.den)
        out = QExpansion(N, N, num, den)
    with _cache_lock:
        _lin_cache[key] = out
    return out


def product_expansion(prod: EisProduct, prec: int) -> QExpansion:
    N = prod.N
    out = None
    for f in prod.factors:
        e = linear_expansion(f, prec)
        out = e if out is None else out * e
    if out is None:
        return QExpansion.one(N, prec, N)
    return out


def monomial_expansion(mon: EisMonomial, prec: int) -> QExpansion:
    """Product of the factor expansions; the empty monomial is 1."""
    return product_expansion(mon.as_product(), prec)


def clear_caches() -> None:
    with _cache_lock:
        _gr_cache.clear()
        _lin_cache.clear()


# ---------------------------------------------------------------------------
# floating-point evaluation by closed-form polylogarithm sums


def _li_neg_complex(n: int, y):
    coeffs = eulerian_poly(n)
    num = sum(c * y ** (j + 1) for j, c in enumerate(coeffs))
    return num / (1 - y) ** (n + 1)


def eis_numeric(idx: EisIndex, tau: complex, tol: float = 1e-17) -> complex:
    """E^(k)_{a,b}(tau) in double precision, summing geometric blocks until the tail is below tol."""
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    N, a, b, k = idx.N, idx.a, idx.b, idx.k
    total = eis_constant_term(idx).to_complex()
    x = cmath.exp(2j * math.pi * tau / N)
    zb = cmath.exp(2j * math.pi * b / N)
    r = abs(x)
    sign = -1 if k % 2 else 1
    m_max = int(math.ceil(math.log(tol) / math.log(r))) + 2 if r < 1 else 0
    ms = np.arange(1, m_max + 1)
    xm = x ** ms
    res = ms % N
    if np.any(res == a):
        y = zb * xm[res == a]
        total += complex(np.sum(_li_neg_complex(k - 1, y)))
    if np.any(res == (-a) % N):
        y = xm[res == (-a) % N] / zb
        total += sign * complex(np.sum(_li_neg_complex(k - 1, y)))
    if k == 2:
        q = cmath.exp(2j * math.pi * tau)
        mm = np.arange(1, int(math.ceil(math.log(tol) / math.log(abs(q)))) + 2)
        total -= 2 * complex(np.sum(_li_neg_complex(1, q ** mm)))
    return total
