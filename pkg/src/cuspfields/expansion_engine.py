"""Expansions of modular forms at arbitrary cusps.

A form is written as a polynomial in Eisenstein series; slashing by g then
only moves Eisenstein indices, after which the product is re-expanded
exactly.  Two generator families are available:

* ``Gamma`` -- products of the weight-1 series E^(1)_{a,b} (for N = 2 the
  weight-2 series, for N = 1 the level-one E4 and E6), spanning M_k(Gamma(N)).
* ``Gamma1`` -- the Gamma_1(N)-invariant combinations
  F^(j)_a = (1/N) sum_b zeta_N^(-ab) E^(j)_{0,b}, which have rational
  q-expansions in integral powers of q.  Monomials in them are enough to
  decompose the forms of Gamma_1(N) met in practice and keep the linear
  algebra over Q.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .characters import DirichletCharacter, factorize
from .cyclotomic import CycNumber, euler_phi, lcm, units, zeta
from .eisenstein import (
    EisIndex,
    EisLinear,
    EisMonomial,
    EisProduct,
    eis_constant_term,
    product_expansion,
)
from .linalg import ModPContext, ModPEchelon, solve_cyclotomic, solve_rational
from .modmatrix import MatZ, g_lambda
from .qseries import QExpansion

log = logging.getLogger(__name__)

__all__ = [
    "ModularFormInput",
    "EisDecomposition",
    "Basis",
    "NotModularError",
    "UnsupportedWeightError",
    "sturm_bound",
    "gamma1_sturm_bound",
    "gamma_index",
    "gamma1_index",
    "dim_gamma",
    "dim_gamma1",
    "build_basis",
    "build_gamma1_basis",
    "express_in_basis",
    "slash_expand",
    "galois_slash_check",
    "gamma1_generator",
    "gamma1_generator_expansion",
    "get_basis",
    "use_basis_store",
    "clear_basis_cache",
]


class NotModularError(ValueError):
    """The input expansion is not a modular form of the declared type."""


class UnsupportedWeightError(ValueError):
    pass


# ---------------------------------------------------------------------------
# indices, dimensions and Sturm bounds


def _prime_product(N: int) -> Fraction:
    out = Fraction(1)
    for p in factorize(N):
        out *= 1 - Fraction(1, p * p)
    return out


def gamma_index(N: int) -> int:
    """[SL2(Z) : Gamma(N)] = N^3 prod (1 - p^-2)."""
    return int(N**3 * _prime_product(N))


def gamma1_index(N: int) -> int:
    """[SL2(Z) : Gamma_1(N)] = N^2 prod (1 - p^-2)."""
    return int(N**2 * _prime_product(N))


def sturm_bound(N: int, k: int) -> int:
    """Number of q^(1/N)-coefficients that determine a form in M_k(Gamma(N))."""
    return math.ceil(Fraction(k * gamma_index(N), 12)) + 1


def gamma1_sturm_bound(N: int, k: int) -> int:
    """Number of q-coefficients that determine a form in M_k(Gamma_1(N))."""
    return math.ceil(Fraction(k * gamma1_index(N), 12)) + 1


def _dim_level_one(k: int) -> int:
    if k < 0 or k % 2:
        return 0
    if k % 12 == 2:
        return k // 12
    return k // 12 + 1


def dim_gamma(N: int, k: int) -> int:
    """dim M_k(Gamma(N)) for k >= 2."""
    if N == 1:
        return _dim_level_one(k)
    if N == 2:
        return k // 2 + 1 if k % 2 == 0 else 0
    mu = Fraction(gamma_index(N), 2)
    cusps = mu / N
    genus = 1 + mu * (N - 6) / (12 * N)
    return int((k - 1) * (genus - 1) + k * cusps / 2)


def dim_gamma1(N: int, k: int) -> int | None:
    """dim M_k(Gamma_1(N)) for N >= 5 and k >= 2 (None where the simple formula does not apply)."""
    if N < 5 or k < 2:
        return None
    mu = Fraction(gamma1_index(N), 2)
    cusps = Fraction(sum(euler_phi(d) * euler_phi(N // d) for d in range(1, N + 1) if N % d == 0), 2)
    genus = 1 + mu / 12 - cusps / 2
    return int((k - 1) * (genus - 1) + k * cusps / 2)


# ---------------------------------------------------------------------------
# decompositions


@dataclass
class EisDecomposition:
    """f = sum_i c_i * P_i with P_i products of Eisenstein combinations."""

    N: int
    k: int
    terms: list[tuple[EisProduct, CycNumber]] = field(default_factory=list)

    @classmethod
    def from_monomials(cls, N: int, pairs) -> EisDecomposition:
        terms = [(m.as_product(), CycNumber.coerce(c)) for m, c in pairs]
        k = terms[0][0].weight if terms else 0
        return cls(N, k, terms)

    @property
    def coefficient_modulus(self) -> int:
        return lcm(1, *(c.modulus for _, c in self.terms))

    def slash(self, g) -> EisDecomposition:
        return EisDecomposition(self.N, self.k, [(p.slash(g), c) for p, c in self.terms])

    def galois(self, lam: int) -> EisDecomposition:
        out = []
        for p, c in self.terms:
            M = c.modulus
            out.append((p.galois(lam), c.sigma(lam % M) if M > 1 else c))
        return EisDecomposition(self.N, self.k, out)

    def expand(self, prec: int) -> QExpansion:
        """Exact expansion in q^(1/N) to precision prec."""
        total = None
        for p, c in self.terms:
            e = product_expansion(p, prec).scalar_mul(c)
            total = e if total is None else total + e
        if total is None:
            return QExpansion.zero(self.N, prec, self.N)
        return total

    def __len__(self):
        return len(self.terms)

    def to_text(self) -> str:
        lines = [f"decomposition N={self.N} k={self.k} terms={len(self.terms)}"]
        for p, c in self.terms:
            facs = []
            for lin in p.factors:
                body = ";".join(f"{a},{b}={x.to_text()}" for (a, b), x in lin.terms)
                facs.append(f"{lin.k}({body})")
            lines.append(f"{c.to_text()} | {' * '.join(facs)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> EisDecomposition:
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        m = re.match(r"decomposition N=(\d+) k=(\d+) terms=(\d+)", lines[0])
        if not m:
            raise ValueError("malformed decomposition header")
        N, k, count = (int(x) for x in m.groups())
        terms = []
        for ln in lines[1:]:
            ctext, _, ptext = ln.partition(" | ")
            facs = []
            for ftext in ptext.split(" * "):
                fm = re.fullmatch(r"(\d+)\((.*)\)", ftext.strip())
                if not fm:
                    raise ValueError(f"malformed factor {ftext!r}")
                j = int(fm.group(1))
                items = []
                for t in fm.group(2).split(";"):
                    ab, _, x = t.partition("=")
                    a, b = (int(v) for v in ab.split(","))
                    items.append(((a, b), CycNumber.from_text(x)))
                facs.append(EisLinear(N, j, tuple(items)))
            terms.append((EisProduct(N, tuple(facs)), CycNumber.from_text(ctext.strip())))
        if len(terms) != count:
            raise ValueError("term count mismatch")
        return cls(N, k, terms)


# ---------------------------------------------------------------------------
# input forms


@dataclass
class ModularFormInput:
    """A modular form given by its q-expansion at infinity.

    ``group`` is one of "Gamma" (expansion in q^(1/N)), "Gamma1" or "Gamma0"
    (expansion in q).  ``coeff_modulus`` n means all coefficients lie in Q(zeta_n).
    """

    N: int
    k: int
    expansion: QExpansion
    group: str = "Gamma0"
    character: DirichletCharacter | None = None
    coeff_modulus: int = 1
    is_newform: bool = False
    al_eigenvalues: dict = field(default_factory=dict)  # Q -> PseudoEigenvalue
    label: str = ""
    coeff_field: object = None

    def __post_init__(self):
        if self.group not in ("Gamma", "Gamma1", "Gamma0"):
            raise ValueError(f"unknown group {self.group!r}")
        if self.N < 1 or self.k < 1:
            raise ValueError("level and weight must be positive")
        if self.group == "Gamma" and self.expansion.width != self.N:
            raise ValueError("Gamma(N) forms are given in q^(1/N)")
        if self.group != "Gamma" and self.expansion.width != 1:
            raise ValueError("Gamma_1(N) forms are given in integral powers of q")
        if self.character is not None:
            if self.N % self.character.modulus:
                raise ValueError("character modulus must divide the level")
            if self.character.modulus != self.N:
                self.character = self.character.extend(self.N)
            if self.character.parity() != (-1) ** self.k:
                raise ValueError("character parity does not match the weight")
        if self.expansion.modulus > 1 and self.coeff_modulus % self.expansion.modulus:
            e = self.expansion
            raise ValueError(f"coefficients lie in Q(zeta_{e.modulus}), not in Q(zeta_{self.coeff_modulus})")
        if self.k >= 2 and self.expansion.prec < self.required_precision():
            raise ValueError(
                f"precision {self.expansion.prec} is below the Sturm bound {self.required_precision()}"
            )

    @property
    def chi(self) -> DirichletCharacter:
        return self.character if self.character is not None else DirichletCharacter.trivial(self.N)

    def required_precision(self) -> int:
        B = sturm_bound(self.N, self.k)
        if self.group == "Gamma":
            return B
        return max(-(-B // self.N), gamma1_sturm_bound(self.N, self.k))

    def width_n_expansion(self) -> QExpansion:
        return self.expansion if self.group == "Gamma" else self.expansion.rescale_width(self.N)

    def has_integral_coefficients(self) -> bool:
        return self.expansion.den == 1

    def coefficient(self, n: int) -> CycNumber:
        return self.expansion.coeff(n)


# ---------------------------------------------------------------------------
# Gamma(N) bases


@dataclass
class Basis:
    """Independent Eisenstein products of one weight, with expansions and pivot positions."""

    N: int
    k: int
    prec: int
    kind: str
    elements: list[EisProduct]
    expansions: list[QExpansion]
    pivots: list[int]
    dimension: int | None
    modulus: int
    keys: list | None = None

    @property
    def rank(self) -> int:
        return len(self.elements)


def _gamma_generators(N: int) -> list[EisMonomial]:
    if N == 1:
        return [EisMonomial(1, (EisIndex(1, 0, 0, 4),)), EisMonomial(1, (EisIndex(1, 0, 0, 6),))]
    if N == 2:
        return [EisMonomial(2, (EisIndex(2, a, b, 2),)) for a, b in ((1, 0), (0, 1), (1, 1))]
    seen, gens = set(), []
    for a in range(N):
        for b in range(N):
            if (a, b) == (0, 0) or ((-a) % N, (-b) % N) in seen:
                continue
            seen.add((a, b))
            gens.append(EisMonomial(N, (EisIndex(N, a, b, 1),)))
    return gens


def _select(cands, expand, ctx: ModPContext, prec: int, echelon: ModPEchelon, target: int | None):
    chosen = []
    for c in cands:
        if target is not None and echelon.rank >= target:
            break
        e = expand(c)
        try:
            v = ctx.reduce_rows(e.num, e.den)
        except ZeroDivisionError:
            raise RuntimeError("working prime divides a denominator; choose another prime") from None
        if echelon.add(v):
            chosen.append((c, e))
    return chosen


def build_basis(N: int, k: int, prec: int | None = None) -> Basis:
    """Basis of M_k(Gamma(N)) by Eisenstein monomials, saturated against the dimension formula."""
    if k < 2:
        raise UnsupportedWeightError("weight-1 forms are not in the Eisenstein span; only weights >= 2 are expanded")
    B = sturm_bound(N, k)
    prec = B if prec is None else prec
    if prec < B:
        raise ValueError(f"precision {prec} is below the Sturm bound {B}")
    dim = dim_gamma(N, k)
    gens = _gamma_generators(N)
    gen_weight = gens[0].weight
    ctx = ModPContext(N)

    def expand(m):
        return product_expansion(m.as_product(), prec)

    if N == 1:
        cands = []
        for i in range(k // 4 + 1):
            for j in range(k // 6 + 1):
                if 4 * i + 6 * j == k:
                    cands.append(EisMonomial(1, (EisIndex(1, 0, 0, 4),) * i + (EisIndex(1, 0, 0, 6),) * j))
        ech = ModPEchelon(ctx.p, prec)
        chosen = _select(cands, expand, ctx, prec, ech, None)
    elif k % gen_weight:
        chosen, ech = [], ModPEchelon(ctx.p, prec)
    else:
        # weight by weight: previous basis times generators, until the rank stops growing
        level_basis = [EisMonomial(N, ())]
        w = 0
        chosen, ech = [], None
        while w < k:
            w += gen_weight
            ech = ModPEchelon(ctx.p, prec)
            cands = [b * g for b in level_basis for g in gens]
            seen, uniq = set(), []
            for c in cands:
                if c.indices not in seen:
                    seen.add(c.indices)
                    uniq.append(c)
            target = dim_gamma(N, w) if w >= 2 else None
            chosen = _select(uniq, expand, ctx, prec, ech, target)
            level_basis = [c for c, _ in chosen]
    if len(chosen) != dim:
        raise RuntimeError(f"Eisenstein monomials reached rank {len(chosen)}, expected dim M_{k}(Gamma({N})) = {dim}")
    return Basis(
        N, k, prec, "Gamma",
        [c.as_product() for c, _ in chosen],
        [e for _, e in chosen],
        list(ech.pivots),
        dim,
        N,
    )


# ---------------------------------------------------------------------------
# Gamma_1(N) generators


def gamma1_generator(N: int, j: int, a: int) -> EisLinear:
    """F^(j)_a = (1/N) sum_b zeta_N^(-ab) E^(j)_{0,b}, invariant under Gamma_1(N)."""
    terms = [((0, b), zeta(N, -a * b) * Fraction(1, N)) for b in range(N)]
    return EisLinear.build(N, j, terms)


def gamma1_generator_expansion(N: int, j: int, a: int, prec: int) -> QExpansion:
    """Rational q-expansion of F^(j)_a:
    c_0 + sum_{n = a (N)} n^(j-1) q^(mn) + (-1)^j sum_{n = -a (N)} n^(j-1) q^(mn) (- 2 sum n q^(mn) if j = 2, a = 0).
    """
    a %= N
    coeffs = np.zeros(prec, dtype=object)
    sign = -1 if j % 2 else 1
    for n in range(1, prec):
        w = 0
        if n % N == a:
            w += n ** (j - 1)
        if n % N == (-a) % N:
            w += sign * n ** (j - 1)
        if j == 2 and a == 0:
            w -= 2 * n
        if w:
            coeffs[n : prec : n] += w
    const = CycNumber.rational(0, N)
    for b in range(N):
        const = const + zeta(N, -a * b) * eis_constant_term(EisIndex(N, 0, b, j))
    const = const * Fraction(1, N)
    if not const.is_rational():
        raise AssertionError("constant term of a Gamma_1 generator is not rational")
    c0 = const.to_rational()
    den = c0.denominator
    num = np.empty((prec, 1), dtype=object)
    num[:, 0] = coeffs * den
    num[0, 0] = c0.numerator
    return QExpansion(1, 1, num, den)


def _gamma1_gens(N: int, j: int) -> list[int]:
    """Representatives a with F^(j)_a nonzero, up to F^(j)_{-a} = (-1)^j F^(j)_a."""
    out = []
    for a in range(N):
        b = (-a) % N
        if b < a:
            continue
        if j % 2 and a == b:
            continue
        out.append(a)
    return out


_g1_exp_cache: dict = {}


def _gamma1_product_expansion(N: int, prod: EisProduct, prec: int, keys) -> QExpansion:
    out = None
    for j, a in keys:
        ck = (N, j, a, prec)
        e = _g1_exp_cache.get(ck)
        if e is None:
            e = gamma1_generator_expansion(N, j, a, prec)
            _g1_exp_cache[ck] = e
        out = e if out is None else out * e
    return out


def build_gamma1_basis(N: int, k: int, prec: int | None = None) -> Basis:
    """Independent monomials in the F^(j)_a of total weight k, with rational q-expansions (width 1).

    Candidates in weight w are F^(w)_a together with (basis in weight w-1) * F^(1)_a.
    """
    if k < 2:
        raise UnsupportedWeightError("weight-1 forms are not in the Eisenstein span; only weights >= 2 are expanded")
    B = gamma1_sturm_bound(N, k)
    prec = B if prec is None else prec
    if prec < B:
        raise ValueError(f"precision {prec} is below the Sturm bound {B}")
    ctx = ModPContext(1)
    w1 = [((1, a),) for a in _gamma1_gens(N, 1)]
    prev = w1
    chosen = []
    ech = ModPEchelon(ctx.p, prec)
    for w in range(2, k + 1):
        cands = [((w, a),) for a in _gamma1_gens(N, w)]
        cands += [tuple(sorted(p + f)) for p in prev for f in w1]
        seen, uniq = set(), []
        for c in cands:
            if c not in seen:
                seen.add(c)
                uniq.append(c)
        ech = ModPEchelon(ctx.p, prec)
        chosen = _select(
            uniq,
            lambda keys: _gamma1_product_expansion(N, None, prec, keys),
            ctx,
            prec,
            ech,
            None,
        )
        prev = [c for c, _ in chosen]
    dim = dim_gamma1(N, k)
    if dim is not None and len(chosen) != dim:
        raise RuntimeError(f"Gamma_1 generator monomials reached rank {len(chosen)}, expected dim M_{k}(Gamma_1({N})) = {dim}")
    elements = [
        EisProduct(N, tuple(gamma1_generator(N, j, a) for j, a in keys)) for keys, _ in chosen
    ]
    return Basis(
        N, k, prec, "Gamma1", elements, [e for _, e in chosen], list(ech.pivots), dim, 1,
        [keys for keys, _ in chosen],
    )


# ---------------------------------------------------------------------------
# decomposition and slashing


_basis_cache: dict = {}
_basis_store = None


def use_basis_store(store) -> None:
    """Install a persistent store (an object with load(kind, N, k, prec) and save(basis)), or None."""
    global _basis_store
    _basis_store = store


def get_basis(kind: str, N: int, k: int, prec: int) -> Basis:
    key = (kind, N, k, prec)
    b = _basis_cache.get(key)
    if b is None and _basis_store is not None:
        b = _basis_store.load(kind, N, k, prec)
    if b is None:
        b = build_basis(N, k, prec) if kind == "Gamma" else build_gamma1_basis(N, k, prec)
        if _basis_store is not None:
            _basis_store.save(b)
    _basis_cache[key] = b
    return b


def clear_basis_cache() -> None:
    _basis_cache.clear()
    _g1_exp_cache.clear()


def _solve_rational_basis(basis: Basis, target: QExpansion) -> list[CycNumber]:
    r = basis.rank
    piv = basis.pivots
    A = []
    for i in piv:
        A.append([Fraction(int(e.num[i, 0]), e.den) for e in basis.expansions])
    n = target.modulus
    phi = euler_phi(n)
    rhs = [[Fraction(int(target.num[i, j]), target.den) for j in range(phi)] for i in piv]
    if r == 0:
        return []
    X = solve_rational(A, rhs)
    out = []
    for i in range(r):
        den = 1
        for x in X[i]:
            den = lcm(den, x.denominator)
        out.append(CycNumber.from_ints(n, [int(x * den) for x in X[i]], den))
    return out


def _solve_cyclotomic_basis(basis: Basis, target: QExpansion) -> list[CycNumber]:
    L = lcm(basis.modulus, target.modulus)
    A = [[e.coeff(i).embed(L) for e in basis.expansions] for i in basis.pivots]
    b = [target.coeff(i).embed(L) for i in basis.pivots]
    if not A:
        return []
    return [x.minimal_modulus() for x in solve_cyclotomic(A, b)]


def express_in_basis(f: ModularFormInput, kind: str | None = None) -> EisDecomposition:
    """Write f as a combination of Eisenstein products; the residual is checked to the full input precision."""
    if f.k < 2:
        raise UnsupportedWeightError("weight-1 forms are not in the Eisenstein span; only weights >= 2 are expanded")
    if kind is None:
        kind = "Gamma" if f.group == "Gamma" else "Gamma1"
    N, k = f.N, f.k
    if kind == "Gamma1":
        if f.group == "Gamma":
            raise ValueError("a Gamma(N) form cannot be decomposed over Gamma_1(N) generators")
        target = f.expansion
        basis = get_basis("Gamma1", N, k, gamma1_sturm_bound(N, k))
        coeffs = _solve_rational_basis(basis, target)
        terms = [(el, c) for el, c in zip(basis.elements, coeffs) if not c.is_zero()]
        dec = EisDecomposition(N, k, terms)
        check = _expand_gamma1(dec, basis, coeffs, target.prec)
    else:
        target = f.width_n_expansion()
        P = sturm_bound(N, k)
        basis = get_basis("Gamma", N, k, P)
        coeffs = _solve_cyclotomic_basis(basis, target)
        terms = [(el, c) for el, c in zip(basis.elements, coeffs) if not c.is_zero()]
        dec = EisDecomposition(N, k, terms)
        check = dec.expand(target.prec)
    if not check.agrees_with(target):
        raise NotModularError(
            "input is not modular of the declared type: the Eisenstein decomposition leaves a nonzero residual"
        )
    return dec


def _expand_gamma1(dec: EisDecomposition, basis: Basis, coeffs, prec: int) -> QExpansion:
    """Re-expand a Gamma_1 decomposition at infinity in integral powers of q."""
    total = QExpansion.zero(1, prec, 1)
    for el, keys, c in zip(basis.elements, basis.keys, coeffs):
        if c.is_zero():
            continue
        total = total + _gamma1_product_expansion(basis.N, el, prec, keys).scalar_mul(c)
    return total


def slash_expand(f: ModularFormInput | EisDecomposition, g: MatZ, prec: int | None = None,
                 decomposition: EisDecomposition | None = None) -> QExpansion:
    """Exact expansion of f|_k g in q^(1/N) to precision prec (default 4x the Gamma(N) Sturm bound)."""
    if not g.is_sl2():
        raise ValueError("g must lie in SL2(Z)")
    if isinstance(f, EisDecomposition):
        dec = f
    else:
        dec = decomposition if decomposition is not None else express_in_basis(f)
    if prec is None:
        prec = 4 * sturm_bound(dec.N, dec.k)
    return dec.slash(g).expand(prec)


def galois_slash_check(f: ModularFormInput | EisDecomposition, g: MatZ, lam: int, prec: int | None = None,
                       decomposition: EisDecomposition | None = None) -> bool:
    """Exact test of (f|g)^sigma_lam = f^sigma_lam | g_lam."""
    dec = f if isinstance(f, EisDecomposition) else (decomposition or express_in_basis(f))
    N = dec.N
    L = lcm(N, dec.coefficient_modulus)
    if math.gcd(lam, L) != 1:
        raise ValueError(f"{lam} is not a unit modulo {L}")
    if prec is None:
        prec = 4 * sturm_bound(N, dec.k)
    lhs = dec.slash(g).expand(prec)
    lhs = lhs.apply_galois(lam % lhs.modulus) if lhs.modulus > 1 else lhs
    gl = g_lambda(g, lam % N if N > 1 else 0, N) if N > 1 else g
    rhs = dec.galois(lam).slash(gl).expand(prec)
    return lhs == rhs
