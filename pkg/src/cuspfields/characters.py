"""Dirichlet characters modulo N, their conductors, prime-power parts and Gauss sums."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import cached_property

from .cyclotomic import AbelianFieldDescriptor, CycNumber, cyclotomic_field, lcm, units, zeta

__all__ = ["DirichletCharacter", "unit_generators", "factorize"]


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _order_mod(a: int, n: int) -> int:
    k, x = 1, a % n
    while x != 1 % n:
        x = (x * a) % n
        k += 1
    return k


def _crt_lift(r: int, q: int, N: int) -> int:
    """The unit modulo N congruent to r mod q and to 1 mod N/q (gcd(q, N/q) = 1)."""
    R = N // q
    for t in range(R):
        x = r + q * t
        if x % R == 1 % R:
            return x % N
    raise AssertionError("CRT lift failed")


def unit_generators(N: int) -> list[tuple[int, int]]:
    """Canonical (generator, order) pairs for (Z/NZ)^x, ordered by prime.

    Odd prime powers use their smallest primitive root; 4 uses -1; 2^e >= 8
    uses -1 and 5.  Each generator is 1 modulo the other prime-power factors.
    """
    gens = []
    for p, e in sorted(factorize(N).items()):
        q = p ** e
        if p == 2:
            if e == 2:
                gens.append((_crt_lift(q - 1, q, N), 2))
            elif e >= 3:
                gens.append((_crt_lift(q - 1, q, N), 2))
                gens.append((_crt_lift(5, q, N), q // 4))
            continue
        phi = q - q // p
        g = next(g for g in range(2, q) if math.gcd(g, p) == 1 and _order_mod(g, q) == phi)
        gens.append((_crt_lift(g, q, N), phi))
    return gens


class DirichletCharacter:
    """A Dirichlet character given by chi(g_i) = exp(2 pi i * values[i]) on canonical generators."""

    def __init__(self, modulus: int, values=None):
        self.modulus = modulus
        self.gens = unit_generators(modulus)
        if values is None:
            values = [0] * len(self.gens)
        values = [Fraction(v) % 1 for v in values]
        if len(values) != len(self.gens):
            raise ValueError(f"expected {len(self.gens)} generator values for modulus {modulus}")
        for (g, o), v in zip(self.gens, values):
            if (v * o).denominator != 1:
                raise ValueError(f"chi({g}) must be an {o}-th root of unity")
        self.values = tuple(values)

    @classmethod
    def trivial(cls, N: int) -> DirichletCharacter:
        return cls(N)

    @classmethod
    def from_map(cls, N: int, images: dict[int, Fraction]) -> DirichletCharacter:
        """Build from images chi(a) = exp(2 pi i r_a) of arbitrary units; checked for consistency."""
        gens = unit_generators(N)
        logs = cls(N)._logs
        sols = []
        ranges = [[Fraction(j, o) for j in range(o)] for _, o in gens]
        for cand in itertools.product(*ranges):
            ok = True
            for a, r in images.items():
                ex = logs[a % N]
                if sum(c * e for c, e in zip(cand, ex)) % 1 != Fraction(r) % 1:
                    ok = False
                    break
            if ok:
                sols.append(cand)
        if len(sols) != 1:
            raise ValueError(f"images determine {len(sols)} characters, expected exactly one")
        return cls(N, sols[0])

    @cached_property
    def _logs(self) -> dict[int, tuple[int, ...]]:
        N = self.modulus
        logs: dict[int, tuple[int, ...]] = {1 % N: tuple(0 for _ in self.gens)}
        for i, (g, o) in enumerate(self.gens):
            new = {}
            for a, ex in logs.items():
                x = a
                for k in range(o):
                    e2 = list(ex)
                    e2[i] = k
                    new[x] = tuple(e2)
                    x = (x * g) % N
            logs = new
        return logs

    def angle(self, a: int) -> Fraction | None:
        """chi(a) = exp(2 pi i * angle), or None when gcd(a, N) > 1."""
        a %= self.modulus
        if math.gcd(a, self.modulus) != 1:
            return None
        ex = self._logs[a]
        return sum((v * e for v, e in zip(self.values, ex)), Fraction(0)) % 1

    def __call__(self, a: int) -> CycNumber:
        ang = self.angle(a)
        if ang is None:
            return CycNumber.rational(0)
        return zeta(ang.denominator, ang.numerator)

    @cached_property
    def order(self) -> int:
        return lcm(*(v.denominator for v in self.values))

    def parity(self) -> int:
        return 1 if self.angle(-1) == 0 else -1

    def is_trivial(self) -> bool:
        return self.order == 1

    def value_modulus(self) -> int:
        """Modulus M with all values in Q(zeta_M)."""
        return self.order

    def __mul__(self, other: DirichletCharacter) -> DirichletCharacter:
        if other.modulus != self.modulus:
            N = lcm(self.modulus, other.modulus)
            return self.extend(N) * other.extend(N)
        return DirichletCharacter(self.modulus, [a + b for a, b in zip(self.values, other.values)])

    def conjugate(self) -> DirichletCharacter:
        return DirichletCharacter(self.modulus, [-v for v in self.values])

    def __pow__(self, e: int) -> DirichletCharacter:
        return DirichletCharacter(self.modulus, [v * e for v in self.values])

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return self.modulus == other.modulus and self.values == other.values

    def __hash__(self):
        return hash((self.modulus, self.values))

    def extend(self, N: int) -> DirichletCharacter:
        """The character modulo N (a multiple of the modulus) induced by this one."""
        if N % self.modulus:
            raise ValueError(f"{self.modulus} does not divide {N}")
        gens = unit_generators(N)
        return DirichletCharacter(N, [self.angle(g) for g, _ in gens])

    def restrict(self, d: int) -> DirichletCharacter:
        """The character modulo d inducing this one; d must be a multiple of the conductor."""
        if self.modulus % d:
            raise ValueError(f"{d} does not divide {self.modulus}")
        N = self.modulus
        for u in units(N):
            if u % d == 1 % d and self.angle(u) != 0:
                raise ValueError(f"character does not factor through (Z/{d}Z)^x")
        vals = []
        for g, _ in unit_generators(d):
            lift = next(x for x in range(g, N * d + g + 1, d) if math.gcd(x, N) == 1)
            vals.append(self.angle(lift))
        return DirichletCharacter(d, vals)

    @cached_property
    def conductor(self) -> int:
        N = self.modulus
        for d in sorted(d for d in range(1, N + 1) if N % d == 0):
            if all(self.angle(u) == 0 for u in units(N) if u % d == 1 % d):
                return d
        return N

    def primitive(self) -> DirichletCharacter:
        return self.restrict(self.conductor)

    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def q_part(self, Q: int) -> tuple[DirichletCharacter, DirichletCharacter]:
        """Split chi = chi_Q * chi_{N/Q} with moduli Q and N/Q."""
        N = self.modulus
        if N % Q or math.gcd(Q, N // Q) != 1:
            raise ValueError(f"{Q} is not a maximal divisor of {N}")
        R = N // Q

        def part(q):
            vals = []
            for g, _ in unit_generators(q):
                vals.append(self.angle(_crt_lift(g, q, N)))
            return DirichletCharacter(q, vals)

        return part(Q), part(R)

    def gauss_sum(self) -> CycNumber:
        """G(chi) = sum_u chi(u) zeta_m^u for a primitive character of modulus m."""
        if not self.is_primitive():
            raise ValueError("Gauss sums are only computed for primitive characters")
        return self.gauss_sum_mod()

    def gauss_sum_mod(self) -> CycNumber:
        """The Gauss sum over (Z/NZ)^x for the character as given (primitive or not)."""
        N = self.modulus
        L = lcm(N, self.order)
        total = CycNumber.rational(0, L)
        for u in units(N):
            total = total + self(u) * zeta(N, u)
        return total.embed(L) if total.modulus != L else total

    def field(self) -> AbelianFieldDescriptor:
        return cyclotomic_field(self.order)

    def to_text(self) -> str:
        pairs = []
        for (g, _), v in zip(self.gens, self.values):
            pairs.append(f"{g}->{v.numerator}/{v.denominator}")
        return f"{self.modulus}: " + " ".join(pairs)

    @classmethod
    def from_text(cls, text: str) -> DirichletCharacter:
        head, _, body = text.partition(":")
        N = int(head.strip())
        gens = [g for g, _ in unit_generators(N)]
        images = {}
        for tok in body.split():
            g, _, v = tok.partition("->")
            images[int(g)] = Fraction(v)
        if sorted(images) == sorted(gens):
            return cls(N, [images[g] for g in gens])
        return cls.from_map(N, images)

    def __repr__(self):
        return f"DirichletCharacter({self.to_text()})"
