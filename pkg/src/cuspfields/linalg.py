"""Exact linear algebra used by the expansion engine.

Rank decisions are made modulo a prime p = 1 mod M (with zeta_M sent to an
element of order M), which never overstates the rank over Q(zeta_M); the
square subsystems picked that way are then solved exactly.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .cyclotomic import CycNumber, euler_phi

__all__ = [
    "ModPContext",
    "ModPEchelon",
    "solve_rational",
    "solve_cyclotomic",
    "is_probable_prime",
]

_SMALL = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in _SMALL:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


class ModPContext:
    """Reduction map Z[zeta_M][1/den] -> F_p for a prime p = 1 mod M below 2^25."""

    def __init__(self, M: int, start: int = 1 << 24, skip: int = 0):
        M = max(M, 1)
        p = (start // M) * M + 1
        found = 0
        while True:
            if is_probable_prime(p):
                if found == skip:
                    break
                found += 1
            p += M
        self.M, self.p = M, p
        # element of exact order M
        facs = _prime_factors(M)
        for h in range(2, p):
            r = pow(h, (p - 1) // M, p)
            if all(pow(r, M // q, p) != 1 for q in facs):
                break
        else:
            r = 1
        self.root = r if M > 1 else 1
        phi = euler_phi(M)
        self.powers = np.array([pow(self.root, j, p) for j in range(phi)], dtype=np.int64)

    def reduce_rows(self, num: np.ndarray, den: int) -> np.ndarray:
        """Reduce an object array (rows, phi(M)) of numerators with common denominator den."""
        p = self.p
        if den % p == 0:
            raise ZeroDivisionError("denominator vanishes modulo the working prime")
        red = np.array([[int(x) % p for x in row] for row in num], dtype=np.int64).reshape(num.shape)
        out = np.zeros(red.shape[0], dtype=np.int64)
        for j in range(red.shape[1]):
            out = (out + red[:, j] * self.powers[j]) % p
        return out * pow(den, -1, p) % p

    def reduce_number(self, x: CycNumber) -> int:
        if self.M % max(x.modulus, 1):
            raise ValueError("modulus does not divide the context modulus")
        x = x.embed(self.M) if x.modulus != self.M else x
        row = np.array([x.num], dtype=object)
        return int(self.reduce_rows(row, x.den)[0])


class ModPEchelon:
    """Incremental row echelon form over F_p; reports whether new vectors raise the rank."""

    def __init__(self, p: int, length: int):
        self.p = p
        self.length = length
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, v: np.ndarray) -> np.ndarray:
        p = self.p
        v = np.asarray(v, dtype=np.int64) % p
        for row, piv in zip(self.rows, self.pivots):
            c = v[piv]
            if c:
                v = (v - c * row) % p
        return v

    def add(self, v) -> bool:
        v = self.reduce(v)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        piv = int(nz[0])
        v = v * pow(int(v[piv]), -1, self.p) % self.p
        # keep earlier rows reduced at the new pivot so reduce() stays a single pass
        for i, row in enumerate(self.rows):
            c = row[piv]
            if c:
                self.rows[i] = (row - c * v) % self.p
        self.rows.append(v)
        self.pivots.append(piv)
        return True


def solve_rational(A: list[list], B: list[list]) -> list[list[Fraction]]:
    """Solve A X = B for square nonsingular A over Q by fraction-free (Bareiss) elimination."""
    n = len(A)
    s = len(B[0]) if B else 0
    # scale every row to integers
    rows = []
    for i in range(n):
        entries = [Fraction(x) for x in A[i]] + [Fraction(x) for x in B[i]]
        den = 1
        for e in entries:
            den = den * e.denominator // np.gcd(den, e.denominator) if e.denominator != 1 else den
        rows.append([int(e * den) for e in entries])
    M = rows
    prev = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
        mk = M[k]
        akk = mk[k]
        for i in range(k + 1, n):
            mi = M[i]
            aik = mi[k]
            for j in range(k + 1, n + s):
                mi[j] = (akk * mi[j] - aik * mk[j]) // prev
            mi[k] = 0
        prev = akk
    # back substitution with fractions on the triangular system
    X = [[Fraction(0)] * s for _ in range(n)]
    for i in range(n - 1, -1, -1):
        for c in range(s):
            acc = Fraction(M[i][n + c])
            for j in range(i + 1, n):
                if M[i][j]:
                    acc -= M[i][j] * X[j][c]
            X[i][c] = acc / M[i][i]
    return X


def solve_cyclotomic(A: list[list[CycNumber]], b: list[CycNumber]) -> list[CycNumber]:
    """Solve A x = b over a cyclotomic field, pivoting on the entry of least height."""
    n = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for k in range(n):
        cands = [i for i in range(k, n) if not M[i][k].is_zero()]
        if not cands:
            raise ZeroDivisionError("singular system")
        piv = min(cands, key=lambda i: M[i][k].height())
        M[k], M[piv] = M[piv], M[k]
        inv = M[k][k].inverse()
        M[k] = [x * inv for x in M[k]]
        for i in range(n):
            if i != k and not M[i][k].is_zero():
                f = M[i][k]
                M[i] = [x - f * y for x, y in zip(M[i], M[k])]
    return [row[n] for row in M]
