"""Exact arithmetic in cyclotomic fields Q(zeta_M).

Elements are stored in the power basis 1, z, ..., z^(phi(M)-1) modulo the
M-th cyclotomic polynomial, as integer numerators over one positive common
denominator.  Abelian subfields are described by their stabiliser subgroup
in (Z/MZ)^x.
"""

from __future__ import annotations

import cmath
import math
import re
import threading
from fractions import Fraction
from functools import reduce

import numpy as np

__all__ = [
    "CycNumber",
    "UnitSubgroup",
    "AbelianFieldDescriptor",
    "cyclotomic_poly",
    "euler_phi",
    "units",
    "pow_table",
    "galois_matrix",
    "zeta",
    "embed",
    "galois_sigma",
    "field_of",
    "intersect_with_cyclotomic",
    "cyclotomic_field",
    "rational_field",
]


def lcm(*args: int) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), args, 1)


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def units(n: int) -> list[int]:
    if n == 1:
        return [0]
    return [a for a in range(n) if math.gcd(a, n) == 1]


# ---------------------------------------------------------------------------
# cyclotomic polynomials and reduction tables

_lock = threading.Lock()
_poly_cache: dict[int, tuple[int, ...]] = {}
_table_cache: dict[int, np.ndarray] = {}
_table_rows: dict[int, list[tuple[int, ...]]] = {}
_galois_cache: dict[tuple[int, int], np.ndarray] = {}


def _poly_divexact(num: list[int], den: tuple[int, ...]) -> list[int]:
    # den is monic
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + dn]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    assert not any(num[:dn]), "inexact polynomial division"
    return out


def cyclotomic_poly(M: int) -> tuple[int, ...]:
    """Coefficients (constant term first) of the M-th cyclotomic polynomial."""
    if M < 1:
        raise ValueError("modulus must be positive")
    cached = _poly_cache.get(M)
    if cached is not None:
        return cached
    num = [-1] + [0] * (M - 1) + [1]
    for d in range(1, M):
        if M % d == 0:
            num = _poly_divexact(num, cyclotomic_poly(d))
    result = tuple(num)
    with _lock:
        _poly_cache.setdefault(M, result)
    return _poly_cache[M]


def pow_table(M: int) -> np.ndarray:
    """Object array of shape (M, phi(M)); row e holds the coordinates of zeta_M^e."""
    cached = _table_cache.get(M)
    if cached is not None:
        return cached
    phi_poly = cyclotomic_poly(M)
    d = len(phi_poly) - 1
    rows = []
    cur = [1] + [0] * (d - 1)
    for _ in range(M):
        rows.append(tuple(cur))
        # multiply by z and reduce with z^d = -sum phi_j z^j
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * p for c, p in zip(cur, phi_poly[:d])]
    table = np.empty((M, d), dtype=object)
    for e, r in enumerate(rows):
        table[e, :] = r
    with _lock:
        if M not in _table_cache:
            _table_rows[M] = rows
            _table_cache[M] = table
    return _table_cache[M]


def _rows(M: int) -> list[tuple[int, ...]]:
    if M not in _table_rows:
        pow_table(M)
    return _table_rows[M]


def galois_matrix(M: int, lam: int) -> np.ndarray:
    """Matrix of sigma_lam on power-basis coordinates (row vector convention)."""
    lam %= M
    key = (M, lam)
    cached = _galois_cache.get(key)
    if cached is not None:
        return cached
    if math.gcd(lam, M) != 1:
        raise ValueError(f"{lam} is not a unit modulo {M}")
    table = pow_table(M)
    d = table.shape[1]
    mat = table[[(j * lam) % M for j in range(d)], :]
    with _lock:
        _galois_cache.setdefault(key, mat)
    return _galois_cache[key]


def embedding_matrix(M: int, M2: int) -> np.ndarray:
    """Matrix sending Q(zeta_M) coordinates to Q(zeta_M2) coordinates."""
    if M2 % M:
        raise ValueError(f"cannot embed Q(zeta_{M}) into Q(zeta_{M2})")
    r = M2 // M
    return pow_table(M2)[[j * r for j in range(euler_phi(M))], :]


# ---------------------------------------------------------------------------
# CycNumber


def _normalize(num: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        num = [-a for a in num]
        den = -den
    g = den
    for a in num:
        if g == 1:
            break
        g = math.gcd(g, a)
    if g > 1:
        num = [a // g for a in num]
        den //= g
    return tuple(num), den


_TEXT_RE = re.compile(r"^\s*(\d+)\s*:\s*\[(.*)\]\s*$")


class CycNumber:
    """An exact element of Q(zeta_M) in the power basis."""

    __slots__ = ("modulus", "num", "den", "_hash")

    def __init__(self, modulus: int, coords=None):
        if modulus < 1:
            raise ValueError("modulus must be positive")
        d = euler_phi(modulus)
        if coords is None:
            coords = [0] * d
        coords = [Fraction(c) for c in coords]
        if len(coords) != d:
            raise ValueError(f"expected {d} coordinates for modulus {modulus}, got {len(coords)}")
        den = lcm(*(c.denominator for c in coords)) if coords else 1
        num = [int(c * den) for c in coords]
        self.modulus = modulus
        self.num, self.den = _normalize(num, den)
        self._hash = None

    @classmethod
    def from_ints(cls, modulus: int, num, den: int = 1) -> CycNumber:
        obj = cls.__new__(cls)
        obj.modulus = modulus
        obj.num, obj.den = _normalize([int(a) for a in num], int(den))
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, x, modulus: int = 1) -> CycNumber:
        x = Fraction(x)
        d = euler_phi(modulus)
        return cls.from_ints(modulus, [x.numerator] + [0] * (d - 1), x.denominator)

    @classmethod
    def coerce(cls, x, modulus: int = 1) -> CycNumber:
        if isinstance(x, CycNumber):
            return x
        return cls.rational(x, modulus)

    # -- basic properties

    @property
    def degree(self) -> int:
        return len(self.num)

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.den) for a in self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def height(self) -> int:
        """Bit size of the largest numerator or of the denominator."""
        return max([abs(a).bit_length() for a in self.num] + [self.den.bit_length()])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.num[0], self.den)

    # -- field maps

    def embed(self, M2: int) -> CycNumber:
        M = self.modulus
        if M2 == M:
            return self
        if M2 % M:
            raise ValueError(f"modulus {M} does not divide {M2}")
        r = M2 // M
        rows = _rows(M2)
        out = [0] * euler_phi(M2)
        for j, a in enumerate(self.num):
            if a:
                for i, c in enumerate(rows[(j * r) % M2]):
                    if c:
                        out[i] += a * c
        return CycNumber.from_ints(M2, out, self.den)

    def descend(self, M2: int) -> CycNumber:
        """Rewrite in Q(zeta_M2) for M2 | M; raises if the element is not in that field."""
        M = self.modulus
        if M % M2:
            raise ValueError(f"modulus {M2} does not divide {M}")
        if M2 == M:
            return self
        piv, inv = _descent_data(M2, M)
        sol = [sum((inv[i][j] * self.num[c] for j, c in enumerate(piv)), Fraction(0)) for i in range(len(piv))]
        cand = CycNumber(M2, [s / self.den for s in sol])
        if cand.embed(M) != self:
            raise ValueError(f"element does not lie in Q(zeta_{M2})")
        return cand

    def minimal_modulus(self) -> CycNumber:
        """Same element written over the smallest modulus possible (odd moduli preferred)."""
        x = self
        changed = True
        while changed and x.modulus > 1:
            changed = False
            M = x.modulus
            for p in _prime_factors(M):
                try:
                    x = x.descend(M // p)
                    changed = True
                    break
                except ValueError:
                    continue
        return x

    def sigma(self, lam: int) -> CycNumber:
        M = self.modulus
        lam %= M
        if math.gcd(lam, M) != 1:
            raise ValueError(f"{lam} is not coprime to modulus {M}")
        if lam == 1 % M:
            return self
        rows = _rows(M)
        out = [0] * len(self.num)
        for j, a in enumerate(self.num):
            if a:
                for i, c in enumerate(rows[(j * lam) % M]):
                    if c:
                        out[i] += a * c
        return CycNumber.from_ints(M, out, self.den)

    def conjugate(self) -> CycNumber:
        return self.sigma(-1)

    def norm(self) -> Fraction:
        """Absolute norm from Q(zeta_M) down to Q."""
        prod = CycNumber.rational(1, self.modulus)
        for lam in units(self.modulus):
            prod = prod * self.sigma(lam)
        return prod.to_rational()

    def inverse(self) -> CycNumber:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        M = self.modulus
        rest = CycNumber.rational(1, M)
        for lam in units(M):
            if lam != 1 % M:
                rest = rest * self.sigma(lam)
        n = (self * rest).to_rational()
        return rest * CycNumber.rational(1 / n, M)

    def to_complex(self) -> complex:
        M = self.modulus
        return sum(a * cmath.exp(2j * math.pi * k / M) for k, a in enumerate(self.num)) / self.den

    # -- arithmetic

    def _unify(self, other):
        other = CycNumber.coerce(other) if not isinstance(other, CycNumber) else other
        if other.modulus == self.modulus:
            return self, other
        L = lcm(self.modulus, other.modulus)
        return self.embed(L), other.embed(L)

    def __add__(self, other):
        if not isinstance(other, (CycNumber, int, Fraction)):
            return NotImplemented
        a, b = self._unify(other)
        if a.den == b.den:
            return CycNumber.from_ints(a.modulus, [x + y for x, y in zip(a.num, b.num)], a.den)
        return CycNumber.from_ints(
            a.modulus, [x * b.den + y * a.den for x, y in zip(a.num, b.num)], a.den * b.den
        )

    __radd__ = __add__

    def __neg__(self):
        return CycNumber.from_ints(self.modulus, [-x for x in self.num], self.den)

    def __sub__(self, other):
        if not isinstance(other, (CycNumber, int, Fraction)):
            return NotImplemented
        return self + (-CycNumber.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return CycNumber.from_ints(
                self.modulus, [x * other.numerator for x in self.num], self.den * other.denominator
            )
        if not isinstance(other, CycNumber):
            return NotImplemented
        a, b = self._unify(other)
        M = a.modulus
        d = len(a.num)
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(a.num):
            if x:
                for j, y in enumerate(b.num):
                    if y:
                        prod[i + j] += x * y
        out = list(prod[:d])
        rows = _rows(M)
        for e in range(d, 2 * d - 1):
            c = prod[e]
            if c:
                for i, r in enumerate(rows[e % M]):
                    if r:
                        out[i] += c * r
        return CycNumber.from_ints(M, out, a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        if not isinstance(other, CycNumber):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return CycNumber.coerce(other, self.modulus) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = CycNumber.rational(1, self.modulus)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycNumber.rational(other)
        if not isinstance(other, CycNumber):
            return NotImplemented
        if other.modulus == self.modulus:
            return self.den == other.den and self.num == other.num
        a, b = self._unify(other)
        return a.den == b.den and a.num == b.num

    def __hash__(self):
        if self._hash is None:
            x = self.minimal_modulus()
            M = x.modulus
            # Q(zeta_M) = Q(zeta_2M) for odd M; hash through the odd representative
            if M % 2 == 0 and (M // 2) % 2 == 1:
                try:
                    x = x.descend(M // 2)
                except ValueError:
                    pass
            self._hash = hash((x.modulus, x.num, x.den))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # -- text form

    def to_text(self) -> str:
        parts = []
        for a in self.num:
            f = Fraction(a, self.den)
            parts.append(str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}")
        return f"{self.modulus}:[{','.join(parts)}]"

    @classmethod
    def from_text(cls, text: str) -> CycNumber:
        m = _TEXT_RE.match(text)
        if not m:
            raise ValueError(f"malformed cyclotomic number {text!r}")
        M = int(m.group(1))
        body = m.group(2).strip()
        coords = [Fraction(t.strip()) for t in body.split(",")] if body else []
        return cls(M, coords)

    def __repr__(self):
        return f"CycNumber({self.to_text()})"

    def __str__(self):
        terms = []
        for j, a in enumerate(self.num):
            if not a:
                continue
            c = Fraction(a, self.den)
            if j == 0:
                terms.append(str(c))
            else:
                z = f"z{self.modulus}" + (f"^{j}" if j > 1 else "")
                terms.append(z if c == 1 else f"-{z}" if c == -1 else f"{c}*{z}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


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


_descent_cache: dict[tuple[int, int], tuple[list[int], list[list[Fraction]]]] = {}


def _descent_data(M2: int, M: int):
    key = (M2, M)
    if key in _descent_cache:
        return _descent_cache[key]
    E = embedding_matrix(M2, M)  # phi(M2) x phi(M), full row rank
    rows = [[Fraction(int(v)) for v in E[i]] for i in range(E.shape[0])]
    # choose pivot columns by elimination on the transpose
    d2 = len(rows)
    cols = [[rows[i][c] for i in range(d2)] for c in range(E.shape[1])]
    piv = []
    basis: list[list[Fraction]] = []
    for c, vec in enumerate(cols):
        v = list(vec)
        for b, p in basis:
            if v[p]:
                f = v[p] / b[p]
                v = [x - f * y for x, y in zip(v, b)]
        nz = next((i for i, x in enumerate(v) if x), None)
        if nz is not None:
            basis.append((v, nz))
            piv.append(c)
            if len(piv) == d2:
                break
    sub = [[rows[i][c] for c in piv] for i in range(d2)]  # y @ sub = x[piv]
    inv = _frac_inverse(sub)
    # y = x[piv] @ inv  ->  y_i = sum_j x[piv_j] inv[j][i]
    inv_t = [[inv[j][i] for j in range(d2)] for i in range(d2)]
    _descent_cache[key] = (piv, inv_t)
    return piv, inv_t


def _frac_inverse(A: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(A)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c])
        aug[c], aug[p] = aug[p], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def zeta(M: int, e: int = 1) -> CycNumber:
    """The root of unity zeta_M^e."""
    row = _rows(M)[e % M]
    return CycNumber.from_ints(M, row, 1)


def embed(x: CycNumber, M2: int) -> CycNumber:
    return x.embed(M2)


def galois_sigma(x: CycNumber, lam: int) -> CycNumber:
    return x.sigma(lam)


# ---------------------------------------------------------------------------
# subgroups of (Z/MZ)^x and abelian fields


class UnitSubgroup:
    """Subgroup of (Z/MZ)^x given by generators; elements found by closure."""

    __slots__ = ("modulus", "generators", "elements")

    def __init__(self, modulus: int, generators=()):
        self.modulus = modulus
        gens = sorted({g % modulus for g in generators} - {1 % modulus})
        for g in gens:
            if math.gcd(g, modulus) != 1:
                raise ValueError(f"{g} is not a unit modulo {modulus}")
        self.generators = tuple(gens)
        self.elements = frozenset(_closure(modulus, gens))

    @classmethod
    def from_elements(cls, modulus: int, elements) -> UnitSubgroup:
        elements = {e % modulus for e in elements}
        for a in elements:
            for b in elements:
                if (a * b) % modulus not in elements:
                    raise ValueError("element set is not closed under multiplication")
        gens: list[int] = []
        cur = {1 % modulus}
        for e in sorted(elements):
            if e not in cur:
                gens.append(e)
                cur = _closure(modulus, gens)
        sub = cls(modulus, gens)
        assert sub.elements == frozenset(elements)
        return sub

    @classmethod
    def full(cls, modulus: int) -> UnitSubgroup:
        return cls.from_elements(modulus, units(modulus))

    @classmethod
    def trivial(cls, modulus: int) -> UnitSubgroup:
        return cls(modulus, ())

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x: int):
        return x % self.modulus in self.elements

    def __eq__(self, other):
        return (
            isinstance(other, UnitSubgroup)
            and self.modulus == other.modulus
            and self.elements == other.elements
        )

    def __hash__(self):
        return hash((self.modulus, self.elements))

    def lift(self, L: int) -> UnitSubgroup:
        """Full preimage in (Z/LZ)^x under reduction, for modulus | L."""
        M = self.modulus
        if L % M:
            raise ValueError(f"{M} does not divide {L}")
        return UnitSubgroup.from_elements(L, [u for u in units(L) if u % M in self.elements])

    def project(self, m: int) -> UnitSubgroup:
        """Image in (Z/mZ)^x, for m | modulus."""
        if self.modulus % m:
            raise ValueError(f"{m} does not divide {self.modulus}")
        return UnitSubgroup.from_elements(m, {e % m for e in self.elements})

    def sorted(self) -> list[int]:
        return sorted(self.elements)

    def __repr__(self):
        return f"UnitSubgroup({self.modulus}, {self.sorted()})"


def _closure(M: int, gens) -> set[int]:
    elems = {1 % M}
    frontier = list(elems)
    while frontier:
        new = []
        for e in frontier:
            for g in gens:
                x = (e * g) % M
                if x not in elems:
                    elems.add(x)
                    new.append(x)
        frontier = new
    return elems


class AbelianFieldDescriptor:
    """The fixed field of a subgroup H of (Z/MZ)^x inside Q(zeta_M)."""

    __slots__ = ("modulus", "stabilizer")

    def __init__(self, modulus: int, stabilizer: UnitSubgroup | None = None):
        if stabilizer is None:
            stabilizer = UnitSubgroup.trivial(modulus)
        if stabilizer.modulus != modulus:
            raise ValueError("stabilizer modulus mismatch")
        self.modulus = modulus
        self.stabilizer = stabilizer

    @property
    def degree(self) -> int:
        return euler_phi(self.modulus) // len(self.stabilizer)

    def over(self, L: int) -> AbelianFieldDescriptor:
        """Same field, described inside Q(zeta_L) (modulus must divide L)."""
        return AbelianFieldDescriptor(L, self.stabilizer.lift(L))

    def __le__(self, other: AbelianFieldDescriptor) -> bool:
        L = lcm(self.modulus, other.modulus)
        return other.stabilizer.lift(L).elements <= self.stabilizer.lift(L).elements

    def __eq__(self, other):
        if not isinstance(other, AbelianFieldDescriptor):
            return NotImplemented
        L = lcm(self.modulus, other.modulus)
        return self.stabilizer.lift(L) == other.stabilizer.lift(L)

    def __lt__(self, other):
        return self <= other and not self == other

    def __hash__(self):
        return hash(self.degree)

    def composite(self, other: AbelianFieldDescriptor) -> AbelianFieldDescriptor:
        L = lcm(self.modulus, other.modulus)
        inter = self.stabilizer.lift(L).elements & other.stabilizer.lift(L).elements
        return AbelianFieldDescriptor(L, UnitSubgroup.from_elements(L, inter))

    def adjoin_zeta(self, n: int) -> AbelianFieldDescriptor:
        return self.composite(cyclotomic_field(n))

    def contains(self, x: CycNumber) -> bool:
        L = lcm(self.modulus, x.modulus)
        y = x.embed(L)
        return all(y.sigma(lam) == y for lam in self.stabilizer.lift(L).generators)

    def minimal(self) -> AbelianFieldDescriptor:
        """Equivalent descriptor over the smallest modulus (its conductor)."""
        M = self.modulus
        best = self
        for d in range(1, M + 1):
            if M % d:
                continue
            ker = [u for u in units(M) if u % d == 1 % d]
            if set(ker) <= self.stabilizer.elements:
                best = AbelianFieldDescriptor(d, self.stabilizer.project(d))
                break
        return best

    def describe(self) -> str:
        m = self.minimal()
        if m.degree == 1:
            return "Q"
        if len(m.stabilizer) == 1:
            return f"Q(zeta_{m.modulus})"
        return f"Q(zeta_{m.modulus})^{m.stabilizer.sorted()}"

    def __repr__(self):
        return f"AbelianFieldDescriptor({self.modulus}, {self.stabilizer.sorted()})"


def cyclotomic_field(M: int) -> AbelianFieldDescriptor:
    return AbelianFieldDescriptor(M, UnitSubgroup.trivial(M))


def rational_field(M: int = 1) -> AbelianFieldDescriptor:
    return AbelianFieldDescriptor(M, UnitSubgroup.full(M))


def field_of(values, M: int) -> AbelianFieldDescriptor:
    """Fixed-field descriptor of the field generated by ``values`` inside Q(zeta_M)."""
    vals = [CycNumber.coerce(v).embed(M) for v in values]
    vals = [v for v in vals if not v.is_rational()]
    stab = [lam for lam in units(M) if all(v.sigma(lam) == v for v in vals)]
    return AbelianFieldDescriptor(M, UnitSubgroup.from_elements(M, stab))


def intersect_with_cyclotomic(field: AbelianFieldDescriptor, m: int) -> UnitSubgroup:
    """Subgroup G' of (Z/mZ)^x cutting out field & Q(zeta_m) inside Q(zeta_m)."""
    L = lcm(field.modulus, m)
    H = field.stabilizer.lift(L).elements
    ker = {u for u in units(L) if u % m == 1 % m}
    return UnitSubgroup.from_elements(L, _closure(L, sorted(H | ker))).project(m)
