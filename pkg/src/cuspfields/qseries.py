"""Truncated Fourier expansions sum_n c_n q^(n/w) with cyclotomic coefficients.

A :class:`QExpansion` stores its coefficients as an integer object array of
shape ``(prec, phi(M))`` (power-basis numerators) over one common
denominator.  An optional radical multiplier ``sqrt(radical)`` records
half-integral powers of determinants, kept out of the coefficient field.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

try:  # GMP multiplication is far faster on the multi-megabyte integers used below
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

from .cyclotomic import CycNumber, euler_phi, galois_matrix, lcm, pow_table

__all__ = ["QExpansion", "series_mul_arrays", "squarefree_split"]


def _content(arr: np.ndarray, den: int) -> int:
    g = den
    for a in arr.flat:
        if g == 1:
            return 1
        if a:
            g = math.gcd(g, int(a))
    return g


def squarefree_split(n: int) -> tuple[int, int]:
    """Return (s, r) with n = s^2 * r and r squarefree."""
    s, r, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            r *= p
        p += 1
    return s, r * n


# ---------------------------------------------------------------------------
# Kronecker-substitution product


def _small_bytes(arr: np.ndarray, slot: int, nbytes: int) -> tuple[bytes, bytes]:
    P, d = arr.shape
    a = np.zeros((P, slot), dtype=np.int64)
    a[:, :d] = arr.astype(np.int64)
    pos = np.where(a > 0, a, 0).astype("<u8").view(np.uint8).reshape(P * slot, 8)[:, :nbytes]
    neg = np.where(a < 0, -a, 0).astype("<u8").view(np.uint8).reshape(P * slot, 8)[:, :nbytes]
    return pos.tobytes(), neg.tobytes()


def _pack(arr: np.ndarray, slot: int, nbytes: int, small: bool = False) -> int:
    """Pack a 2-D integer array into one signed integer, digits of nbytes bytes."""
    P, d = arr.shape
    if small and nbytes <= 8:
        pos, neg = _small_bytes(arr, slot, nbytes)
        return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")
    pos = bytearray(P * slot * nbytes)
    neg = bytearray(P * slot * nbytes)
    any_neg = False
    for n in range(P):
        row = arr[n]
        base = n * slot
        for j in range(d):
            a = int(row[j])
            if a > 0:
                off = (base + j) * nbytes
                pos[off:off + nbytes] = a.to_bytes(nbytes, "little")
            elif a < 0:
                any_neg = True
                off = (base + j) * nbytes
                neg[off:off + nbytes] = (-a).to_bytes(nbytes, "little")
    value = int.from_bytes(pos, "little")
    if any_neg:
        value -= int.from_bytes(neg, "little")
    return value


def _unpack(value: int, count: int, nbytes: int) -> list[int]:
    half = 1 << (8 * nbytes - 1)
    offset = int.from_bytes(((b"\x00" * (nbytes - 1)) + b"\x80") * count, "little")
    low = (value + offset) & ((1 << (8 * nbytes * count)) - 1)
    buf = low.to_bytes(count * nbytes, "little")
    if nbytes < 8:
        raw = np.zeros((count, 8), dtype=np.uint8)
        raw[:, :nbytes] = np.frombuffer(buf, dtype=np.uint8).reshape(count, nbytes)
        vals = raw.view("<u8").reshape(count).astype(np.int64) - half
        return vals.tolist()
    return [int.from_bytes(buf[i * nbytes:(i + 1) * nbytes], "little") - half for i in range(count)]


def series_mul_arrays(A: np.ndarray, B: np.ndarray, M: int, prec: int) -> np.ndarray:
    """Product of two power-basis coefficient arrays, truncated to ``prec`` rows."""
    A = A[:prec]
    B = B[:prec]
    d = A.shape[1]
    if not A.size or not B.size:
        return np.zeros((prec, d), dtype=object)
    ma = max(abs(int(A.max())), abs(int(A.min())))
    mb = max(abs(int(B.max())), abs(int(B.min())))
    if ma == 0 or mb == 0:
        return np.zeros((prec, d), dtype=object)
    bound = ma * mb * d * min(A.shape[0], B.shape[0])
    nbytes = (bound.bit_length() + 2 + 7) // 8
    slot = 2 * d - 1
    small = max(ma, mb) < (1 << 62)
    pa, pb = _pack(A, slot, nbytes, small), _pack(B, slot, nbytes, small)
    if gmpy2 is not None:
        prod = int(gmpy2.mpz(pa) * gmpy2.mpz(pb))
    else:
        prod = pa * pb
    digits = _unpack(prod, prec * slot, nbytes)
    table = pow_table(M)
    red = table[[e % M for e in range(slot)], :]
    top = max(abs(int(red.max())), abs(int(red.min())))
    fits = nbytes < 8 and bound * d * top < (1 << 62)
    full = np.array(digits, dtype=np.int64 if fits else object).reshape(prec, slot)
    if slot == d:
        return full.astype(object)
    if fits:
        red = red.astype(np.int64)
    out = full[:, :d] + full[:, d:].dot(red[d:])
    return out.astype(object)


# ---------------------------------------------------------------------------


class QExpansion:
    """Truncated series sum_{n<prec} c_n q^(n/width), coefficients in Q(zeta_modulus)."""

    __slots__ = ("width", "prec", "modulus", "num", "den", "radical")

    def __init__(self, width: int, modulus: int, num: np.ndarray, den: int = 1, radical: int = 1):
        if width < 1:
            raise ValueError("width must be positive")
        num = np.asarray(num, dtype=object)
        if num.ndim != 2 or num.shape[1] != euler_phi(modulus):
            raise ValueError(f"coefficient array must have shape (prec, {euler_phi(modulus)})")
        if num.shape[0] < 1:
            raise ValueError("precision must be positive")
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        g = _content(num, den)
        if g > 1:
            num = num // g
            den //= g
        self.width = width
        self.prec = num.shape[0]
        self.modulus = modulus
        self.num = num
        self.den = den
        self.radical = radical

    # -- constructors

    @classmethod
    def from_coeffs(cls, width: int, coeffs, modulus: int | None = None, radical: int = 1) -> QExpansion:
        cs = [CycNumber.coerce(c) for c in coeffs]
        M = lcm(*(c.modulus for c in cs)) if cs else 1
        if modulus is not None:
            M = lcm(M, modulus)
        cs = [c.embed(M) for c in cs]
        den = lcm(*(c.den for c in cs)) if cs else 1
        arr = np.empty((len(cs), euler_phi(M)), dtype=object)
        for i, c in enumerate(cs):
            f = den // c.den
            arr[i, :] = [a * f for a in c.num]
        return cls(width, M, arr, den, radical)

    @classmethod
    def zero(cls, width: int, prec: int, modulus: int = 1) -> QExpansion:
        return cls(width, modulus, np.zeros((prec, euler_phi(modulus)), dtype=object))

    @classmethod
    def one(cls, width: int, prec: int, modulus: int = 1) -> QExpansion:
        arr = np.zeros((prec, euler_phi(modulus)), dtype=object)
        arr[0, 0] = 1
        return cls(width, modulus, arr)

    @classmethod
    def monomial(cls, width: int, prec: int, n: int, c=1) -> QExpansion:
        coeffs = [0] * prec
        coeffs[n] = c
        return cls.from_coeffs(width, coeffs)

    # -- access

    def coeff(self, n: int) -> CycNumber:
        if not 0 <= n < self.prec:
            raise IndexError(f"coefficient {n} outside precision {self.prec}")
        return CycNumber.from_ints(self.modulus, list(self.num[n]), self.den)

    @property
    def coeffs(self) -> list[CycNumber]:
        return [self.coeff(n) for n in range(self.prec)]

    def __getitem__(self, n: int) -> CycNumber:
        return self.coeff(n)

    def is_zero(self) -> bool:
        return not any(self.num.flat)

    def valuation(self) -> int | None:
        for n in range(self.prec):
            if any(self.num[n]):
                return n
        return None

    def support(self) -> list[int]:
        return [n for n in range(self.prec) if any(self.num[n])]

    def denominator_primes(self) -> set[int]:
        """Primes dividing some coefficient denominator (power-basis coordinates)."""
        primes: set[int] = set()
        for n in range(self.prec):
            g = self.den
            for a in self.num[n]:
                g = math.gcd(g, int(a))
            d = self.den // g
            p = 2
            while d > 1 and p * p <= d:
                while d % p == 0:
                    primes.add(p)
                    d //= p
                p += 1
            if d > 1:
                primes.add(d)
        return primes

    # -- coercions

    def with_modulus(self, M: int) -> QExpansion:
        if M == self.modulus:
            return self
        if M % self.modulus:
            raise ValueError(f"modulus {self.modulus} does not divide {M}")
        r = M // self.modulus
        E = pow_table(M)[[j * r for j in range(euler_phi(self.modulus))], :]
        return QExpansion(self.width, M, self.num.dot(E), self.den, self.radical)

    def truncate(self, prec: int) -> QExpansion:
        if prec > self.prec:
            raise ValueError(f"cannot extend precision from {self.prec} to {prec}")
        return QExpansion(self.width, self.modulus, self.num[:prec], self.den, self.radical)

    def _unify(self, other: QExpansion) -> tuple[QExpansion, QExpansion]:
        if self.width != other.width:
            raise ValueError(f"width mismatch: {self.width} vs {other.width}")
        M = lcm(self.modulus, other.modulus)
        return self.with_modulus(M), other.with_modulus(M)

    # -- arithmetic

    def __add__(self, other):
        if isinstance(other, (int, Fraction, CycNumber)):
            c = CycNumber.coerce(other)
            return self + QExpansion.from_coeffs(self.width, [c] + [0] * (self.prec - 1)).with_radical(self.radical)
        if not isinstance(other, QExpansion):
            return NotImplemented
        if self.radical != other.radical and not (self.is_zero() or other.is_zero()):
            raise ValueError("cannot add series with different radical multipliers")
        rad = self.radical if not self.is_zero() else other.radical
        a, b = self._unify(other)
        P = min(a.prec, b.prec)
        num = a.num[:P] * b.den + b.num[:P] * a.den
        return QExpansion(a.width, a.modulus, num, a.den * b.den, rad)

    __radd__ = __add__

    def __neg__(self):
        return QExpansion(self.width, self.modulus, -self.num, self.den, self.radical)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scalar_mul(self, c) -> QExpansion:
        c = CycNumber.coerce(c)
        M = lcm(self.modulus, c.modulus)
        f = self.with_modulus(M)
        c = c.embed(M)
        if c.is_rational():
            return QExpansion(f.width, M, f.num * c.num[0], f.den * c.den, f.radical)
        num = _row_scalar(f.num, c, M)
        return QExpansion(f.width, M, num, f.den * c.den, f.radical)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycNumber)):
            return self.scalar_mul(other)
        if not isinstance(other, QExpansion):
            return NotImplemented
        a, b = self._unify(other)
        P = min(a.prec, b.prec)
        num = series_mul_arrays(a.num, b.num, a.modulus, P)
        rad_s, rad_r = squarefree_split(a.radical * b.radical)
        if rad_s > 1:
            num = num * rad_s
        return QExpansion(a.width, a.modulus, num, a.den * b.den, rad_r)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> QExpansion:
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = QExpansion.one(self.width, self.prec, self.modulus)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def with_radical(self, radical: int) -> QExpansion:
        return QExpansion(self.width, self.modulus, self.num, self.den, radical)

    def __eq__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        if self.width != other.width or self.prec != other.prec:
            return False
        if self.is_zero() and other.is_zero():
            return True
        if self.radical != other.radical:
            return False
        a, b = self._unify(other)
        return a.den == b.den and bool(np.array_equal(a.num, b.num))

    def agrees_with(self, other: QExpansion) -> bool:
        """Equality up to the smaller of the two precisions (widths may differ)."""
        if self.width != other.width:
            w = lcm(self.width, other.width)
            return self.rescale_width(w).agrees_with(other.rescale_width(w))
        P = min(self.prec, other.prec)
        return self.truncate(P) == other.truncate(P)

    __hash__ = None

    # -- operations on exponents

    def rescale_width(self, w2: int) -> QExpansion:
        if w2 % self.width:
            raise ValueError(f"new width {w2} is not a multiple of {self.width}")
        r = w2 // self.width
        if r == 1:
            return self
        num = np.zeros((self.prec * r, self.num.shape[1]), dtype=object)
        num[::r] = self.num
        return QExpansion(w2, self.modulus, num, self.den, self.radical)

    def descend_width(self, w2: int) -> QExpansion:
        if self.width % w2:
            raise ValueError(f"width {w2} does not divide {self.width}")
        r = self.width // w2
        if r == 1:
            return self
        mask = np.ones(self.prec, dtype=bool)
        mask[::r] = False
        if any(self.num[mask].flat):
            raise ValueError(f"series has exponents outside (1/{w2})Z")
        num = self.num[::r]
        P = (self.prec + r - 1) // r
        return QExpansion(w2, self.modulus, num[:P], self.den, self.radical)

    def minimal_width(self) -> QExpansion:
        g = self.width
        for n in self.support():
            g = math.gcd(g, n)
        # the truncation point must stay representable
        g = math.gcd(g, self.prec) if self.prec % g else g
        return self.descend_width(self.width // g) if g > 1 else self

    def apply_galois(self, lam: int) -> QExpansion:
        M = self.modulus
        lam %= M
        if math.gcd(lam, M) != 1:
            raise ValueError(f"{lam} is not coprime to the coefficient modulus {M}")
        if lam == 1 % M:
            return self
        return QExpansion(self.width, M, self.num.dot(galois_matrix(M, lam)), self.den, self.radical)

    def apply_T_power(self, u: int) -> QExpansion:
        """Substitute tau -> tau + u: c_n -> zeta_w^(n u) c_n."""
        return self._twist(u, self.width)

    def _twist(self, b: int, W: int) -> QExpansion:
        # c_n -> zeta_W^(n b) c_n
        g = math.gcd(W, b)
        if g == W:
            return self
        Wr, br = W // g, (b // g) % (W // g)
        M = lcm(self.modulus, Wr)
        f = self.with_modulus(M)
        table = pow_table(M)
        step = (M // Wr) * br
        num = np.empty_like(f.num)
        for n in range(f.prec):
            num[n] = _times_zeta(f.num[n], (n * step) % M, table, M)
        return QExpansion(f.width, M, num, f.den, f.radical)

    def apply_upper_triangular(self, a: int, b: int, d: int, k: int) -> QExpansion:
        """Weight-k slash by (a b; 0 d) with a, d > 0.

        The factor (ad)^(k/2) d^(-k) is absorbed exactly; a leftover square
        root is recorded in ``radical``.
        """
        if a <= 0 or d <= 0:
            raise ValueError("diagonal entries must be positive")
        w = self.width
        W = w * d
        # f((a tau + b)/d) = sum c_n zeta_{W}^{n b} q^{n a / W}
        g = self._twist(b, W)
        num = np.zeros((self.prec * a, g.num.shape[1]), dtype=object)
        num[::a] = g.num
        if k % 2 == 0:
            scale = Fraction((a * d) ** (k // 2), d ** k)
            rad = 1
        else:
            s, r = squarefree_split(a * d)
            scale = Fraction((a * d) ** ((k - 1) // 2) * s, d ** k)
            rad = r
        s2, r2 = squarefree_split(rad * self.radical)
        scale *= s2
        out = QExpansion(W, g.modulus, num * scale.numerator, g.den * scale.denominator, r2)
        return out

    # -- numerics

    def eval_numeric(self, tau: complex, terms: int | None = None) -> tuple[complex, float]:
        """Evaluate the truncated series at tau; returns (value, tail estimate)."""
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        if terms is None:
            terms = self.prec
        if terms > self.prec:
            raise ValueError(f"requested {terms} terms but precision is {self.prec}")
        M = self.modulus
        zs = np.array([cmath.exp(2j * math.pi * j / M) for j in range(self.num.shape[1])])
        vals = np.array([[float(Fraction(int(a), self.den)) for a in row] for row in self.num[:terms]]).dot(zs) if terms else np.array([])
        x = cmath.exp(2j * math.pi * tau / self.width)
        powers = x ** np.arange(terms)
        total = complex(np.sum(vals * powers))
        if self.radical != 1:
            total *= math.sqrt(self.radical)
        # tail bound: |c_n| <= A (n+1)^3 with A fitted on the known terms
        r = abs(x)
        A = float(np.max(np.abs(vals) * (np.arange(terms) + 1.0) ** -3)) if terms else 0.0
        tail, n = 0.0, terms
        while True:
            t = A * (n + 1.0) ** 3 * r ** n
            tail += t
            n += 1
            if t <= 1e-18 * max(tail, 1e-300) or n > terms + 10**6:
                break
        return total, tail

    # -- text form

    def to_text(self) -> str:
        lines = [f"w={self.width} prec={self.prec} M={self.modulus}" + (f" radical={self.radical}" if self.radical != 1 else "")]
        lines.extend(self.coeff(n).to_text() for n in range(self.prec))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> QExpansion:
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        header = dict(tok.split("=") for tok in lines[0].split())
        w, P, M = int(header["w"]), int(header["prec"]), int(header["M"])
        rad = int(header.get("radical", 1))
        cs = [CycNumber.from_text(ln) for ln in lines[1:]]
        if len(cs) != P:
            raise ValueError(f"header declares {P} coefficients, found {len(cs)}")
        return cls.from_coeffs(w, cs, M, rad).with_modulus(M)

    def __repr__(self):
        shown = []
        for n in range(min(self.prec, 6)):
            c = self.coeff(n)
            if not c.is_zero():
                shown.append(f"({c})*q^({n}/{self.width})")
        body = " + ".join(shown) if shown else "0"
        return f"<QExpansion w={self.width} M={self.modulus} prec={self.prec}: {body} + ...>"


def _times_zeta(row, e: int, table, M: int):
    d = len(row)
    out = [0] * d
    for j in range(d):
        a = row[j]
        if a:
            r = table[(j + e) % M]
            for i in range(d):
                if r[i]:
                    out[i] += a * r[i]
    return out


def _row_scalar(num: np.ndarray, c: CycNumber, M: int) -> np.ndarray:
    # multiply every coefficient row by the numerator vector of c
    d = num.shape[1]
    table = pow_table(M)
    red = table[[e % M for e in range(2 * d - 1)], :]
    cm = np.zeros((d, 2 * d - 1), dtype=object)
    for j in range(d):
        cm[j, j:j + d] = c.num
    full = num.dot(cm)
    return full.dot(red)
