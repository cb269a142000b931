"""Where the coefficients of f|g live: predicted fields and modules, their optimisation, and certification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .characters import DirichletCharacter, factorize
from .cyclotomic import (
    AbelianFieldDescriptor,
    CycNumber,
    UnitSubgroup,
    cyclotomic_field,
    euler_phi,
    intersect_with_cyclotomic,
    lcm,
    rational_field,
    units,
    zeta,
)
from .modmatrix import (
    MatZ,
    atkin_lehner_matrices,
    g_lambda,
    is_maximal_divisor,
    wq_g_decomposition,
)
from .qseries import QExpansion, squarefree_split

__all__ = [
    "FormMetadata",
    "FieldBoundReport",
    "ALBound",
    "Verdict",
    "Certificate",
    "nprime",
    "mprime",
    "field_bound",
    "chi_g",
    "chi_g_hom_check",
    "c_chi_g",
    "atkin_lehner_bound",
    "atkin_li_lambda",
    "engine_lambda",
    "minimal_M_translation",
    "brute_force_min_M",
    "optimal_atkin_lehner_Q",
    "al_target_M",
    "expansion_field",
    "expansion_in_module",
    "certify_exact_field",
    "denominator_property",
    "c_part",
]


def nprime(N: int, g: MatZ) -> int:
    """N' = N / gcd(CD, N) (gcd(0, N) = N)."""
    return N // math.gcd(g.C * g.D, N)


def mprime(m: int, g: MatZ) -> int:
    """m' = m / gcd(BC, m)."""
    return m // math.gcd(g.B * g.C, m)


@dataclass(frozen=True)
class FormMetadata:
    """What the field bounds need to know about f: level, weight, Nebentypus and K_f."""

    N: int
    k: int
    character: DirichletCharacter | None = None
    field: AbelianFieldDescriptor | None = None

    @property
    def chi(self) -> DirichletCharacter:
        return self.character if self.character is not None else DirichletCharacter.trivial(self.N)

    @property
    def K(self) -> AbelianFieldDescriptor:
        """K_f, defaulting to Q(chi) (the smallest field allowed for a form with this character)."""
        if self.field is not None:
            return self.field
        return cyclotomic_field(self.chi.order)

    @classmethod
    def from_input(cls, f) -> FormMetadata:
        K = f.coeff_field
        if K is None:
            K = expansion_field(f.expansion, f.coeff_modulus)
        return cls(f.N, f.k, f.character, K)


# ---------------------------------------------------------------------------
# the character twist chi_g and the scalar c_{chi,g}


def chi_g(chi: DirichletCharacter, g: MatZ, mu: int) -> CycNumber:
    """chi'_g(mu) = chi(AD - mu^-1 BC) for mu in (Z/m'Z)^x, chi taken modulo its conductor m."""
    prim = chi.primitive()
    m = prim.modulus
    if m == 1:
        return CycNumber.rational(1)
    mp = mprime(m, g)
    # BC mu^-1 modulo m only depends on mu^-1 modulo m'
    inv = pow(mu, -1, mp) if mp > 1 else 0
    return prim(g.A * g.D - inv * g.B * g.C)


def c_chi_g(chi: DirichletCharacter, g: MatZ, Gp: UnitSubgroup, j: int) -> CycNumber:
    """sum_{mu in G'} chi(AD - mu BC) zeta_{m'}^(j mu)."""
    prim = chi.primitive()
    mp = Gp.modulus
    total = CycNumber.rational(0, max(lcm(mp, prim.order), 1))
    for mu in Gp.sorted():
        total = total + prim(g.A * g.D - mu * g.B * g.C) * zeta(mp, j * mu)
    return total


def _subgroup_text(H: UnitSubgroup) -> str:
    return "{" + ",".join(str(x) for x in H.sorted()) + "}"


@dataclass
class FieldBoundReport:
    N: int
    k: int
    g: MatZ
    conductor: int
    nprime: int
    mprime: int
    M: int
    Gprime: UnitSubgroup
    chi_g_values: dict[int, CycNumber]
    c: CycNumber
    zeta_choice: int
    base_field: AbelianFieldDescriptor
    composite_field: AbelianFieldDescriptor
    trivial_character: bool = True

    def module_text(self) -> str:
        base = self.base_field.describe()
        if self.c == CycNumber.rational(1):
            return base
        return f"({self.c}) * {base}"

    def contains(self, v: CycNumber) -> bool:
        """Membership of v in c * K_f(zeta_N')."""
        if v.is_zero():
            return True
        return self.base_field.contains(v * self.c.inverse())

    def render(self) -> str:
        lines = [
            f"matrix g = {self.g}  (level {self.N}, weight {self.k})",
            f"N' = {self.nprime}   m' = {self.mprime}   M = {self.M}   conductor m = {self.conductor}",
            f"G' = {_subgroup_text(self.Gprime)} in (Z/{self.mprime}Z)^x",
        ]
        if not self.trivial_character:
            vals = ", ".join(f"{mu}: {v}" for mu, v in sorted(self.chi_g_values.items()))
            lines.append(f"chi_g on G': {vals}")
            lines.append(f"zeta = zeta_{self.mprime}^{self.zeta_choice}, c = {self.c}")
        lines.append(f"coefficients of f|g lie in {self.module_text()}")
        lines.append(f"composite field F*K_f(zeta_N'): {self.composite_field.describe()}")
        return "\n".join(lines)

    def to_text(self) -> str:
        rows = [
            ("N", str(self.N)),
            ("k", str(self.k)),
            ("g", self.g.to_text()),
            ("conductor", str(self.conductor)),
            ("nprime", str(self.nprime)),
            ("mprime", str(self.mprime)),
            ("M", str(self.M)),
            ("Gprime", ",".join(str(x) for x in self.Gprime.sorted())),
            ("chi_g", ";".join(f"{mu}={v.to_text()}" for mu, v in sorted(self.chi_g_values.items()))),
            ("c", self.c.to_text()),
            ("zeta_choice", str(self.zeta_choice)),
            ("base_field", _descriptor_text(self.base_field)),
            ("composite_field", _descriptor_text(self.composite_field)),
            ("trivial_character", "yes" if self.trivial_character else "no"),
        ]
        return "".join(f"{k}: {v}\n" for k, v in rows)

    @classmethod
    def from_text(cls, text: str) -> FieldBoundReport:
        d = {}
        for line in text.strip().splitlines():
            key, _, val = line.partition(":")
            d[key.strip()] = val.strip()
        from .modmatrix import parse_matrix

        mp = int(d["mprime"])
        chi_vals = {}
        if d["chi_g"]:
            for item in d["chi_g"].split(";"):
                mu, _, v = item.partition("=")
                chi_vals[int(mu)] = CycNumber.from_text(v)
        return cls(
            int(d["N"]), int(d["k"]), parse_matrix(d["g"]), int(d["conductor"]), int(d["nprime"]), mp,
            int(d["M"]), UnitSubgroup.from_elements(mp, [int(x) for x in d["Gprime"].split(",")]),
            chi_vals, CycNumber.from_text(d["c"]), int(d["zeta_choice"]),
            _descriptor_from_text(d["base_field"]), _descriptor_from_text(d["composite_field"]),
            d["trivial_character"] == "yes",
        )


def _descriptor_text(F: AbelianFieldDescriptor) -> str:
    return f"{F.modulus}/" + ",".join(str(x) for x in F.stabilizer.sorted())


def _descriptor_from_text(text: str) -> AbelianFieldDescriptor:
    M, _, rest = text.partition("/")
    M = int(M)
    return AbelianFieldDescriptor(M, UnitSubgroup.from_elements(M, [int(x) for x in rest.split(",")]))


def field_bound(meta: FormMetadata, g: MatZ) -> FieldBoundReport:
    """Module c_{chi,g} * K_f(zeta_N') containing the coefficients of f|g, with the data behind it."""
    if not g.is_sl2():
        raise ValueError("g must lie in SL2(Z)")
    N = meta.N
    chi = meta.chi
    if chi.modulus != N:
        if N % chi.modulus:
            raise ValueError("character modulus must divide the level")
        chi = chi.extend(N)
    if chi.parity() != (-1) ** meta.k:
        raise ValueError("character parity does not match the weight")
    prim = chi.primitive()
    m = prim.modulus
    Np = nprime(N, g)
    mp = mprime(m, g)
    M = lcm(Np, mp)
    K = meta.K
    if not cyclotomic_field(prim.order).over(lcm(K.modulus, prim.order)) <= K.over(lcm(K.modulus, prim.order)):
        raise ValueError("K_f must contain the field of values of the character")
    base = K.adjoin_zeta(Np)
    Gp = intersect_with_cyclotomic(base, mp)
    values = {mu: chi_g(chi, g, mu) for mu in Gp.sorted()}
    if chi.is_trivial():
        c, j = CycNumber.rational(1), 0
    else:
        for j in range(1, mp + 1):
            c = c_chi_g(chi, g, Gp, j)
            if not c.is_zero():
                break
        else:
            raise AssertionError("no root of unity gives a nonzero c_{chi,g}")
        c = c.minimal_modulus()
    # composite field: F = fixed field of ker chi'_g inside Q(zeta_m')
    one = CycNumber.rational(1)
    kernel = [mu for mu, v in values.items() if v == one]
    Fdesc = AbelianFieldDescriptor(mp, UnitSubgroup.from_elements(mp, kernel)) if mp > 1 else rational_field(1)
    composite = Fdesc.composite(base)
    return FieldBoundReport(
        N, meta.k, g, m, Np, mp, M, Gp, values, c, j, base, composite, chi.is_trivial()
    )


def chi_g_hom_check(chi: DirichletCharacter, g: MatZ, Np: int | None = None, K: AbelianFieldDescriptor | None = None) -> bool:
    """chi'_g is multiplicative on G' and agrees with the lower-right entry of g_lambda g^-1 for lambda = 1 mod N'."""
    N = chi.modulus
    prim = chi.primitive()
    m = prim.modulus
    if Np is None:
        Np = nprime(N, g)
    K = K if K is not None else cyclotomic_field(prim.order)
    mp = mprime(m, g)
    Gp = intersect_with_cyclotomic(K.adjoin_zeta(Np), mp)
    els = Gp.sorted()
    for a in els:
        for b in els:
            if chi_g(chi, g, (a * b) % mp if mp > 1 else 0) != chi_g(chi, g, a) * chi_g(chi, g, b):
                return False
    # specialization of g lambda = diag(1, lambda) g_lambda: g_lambda g^-1 is in Gamma_0(N) with
    # lower-right entry AD - lambda^-1 BC whenever lambda = 1 mod N'
    if N > 1:
        for lam in units(N):
            if (lam - 1) % Np:
                continue
            gl = g_lambda(g, lam, N)
            h = gl @ g.inverse()
            if h.C % N:
                return False
            li = pow(lam, -1, N)
            if (h.D - (g.A * g.D - li * g.B * g.C)) % N:
                return False
            if chi(h.D) != chi(g.A * g.D - li * g.B * g.C):
                return False
    return True


# ---------------------------------------------------------------------------
# Atkin-Lehner operators


@dataclass
class ALBound:
    """Coefficients of f|W_Q lie in Q^(k/2) * scalar * field."""

    Q: int
    k: int
    sqrt_part: tuple[int, int]  # Q^(k/2) = a * sqrt(r)
    scalar: CycNumber
    field: AbelianFieldDescriptor
    chi_hQ: dict[int, CycNumber]

    def contains_hQ(self, v: CycNumber) -> bool:
        """Membership of a coefficient of f|h_Q (that is, of Q^(-k/2) f|W_Q) in scalar * field."""
        if v.is_zero():
            return True
        return self.field.contains(v * self.scalar.inverse())

    def describe(self) -> str:
        a, r = self.sqrt_part
        rad = f"{a}" + (f"*sqrt({r})" if r > 1 else "")
        sc = "" if self.scalar == CycNumber.rational(1) else f"({self.scalar}) * "
        return f"Q^(k/2) = {rad};  f|W_Q in Q^(k/2) * {sc}{self.field.describe()}"


def _q_power_half(Q: int, k: int) -> tuple[int, int]:
    if k % 2 == 0:
        return Q ** (k // 2), 1
    s, r = squarefree_split(Q)
    return Q ** ((k - 1) // 2) * s, r


def atkin_lehner_bound(meta: FormMetadata, Q: int) -> ALBound:
    N = meta.N
    if not is_maximal_divisor(Q, N):
        raise ValueError(f"{Q} is not a maximal divisor of {N}")
    chi = meta.chi
    if chi.modulus != N:
        chi = chi.extend(N)
    K = meta.K
    chiQ, _ = chi.q_part(Q)
    mQ = chiQ.conductor
    hq = {}
    if mQ > 1:
        for lam in units(mQ):
            hq[lam] = chiQ.primitive()(lam).conjugate()
    if chi.is_trivial():
        return ALBound(Q, meta.k, _q_power_half(Q, meta.k), CycNumber.rational(1), K.adjoin_zeta(Q), hq)
    G = chiQ.primitive().gauss_sum()
    return ALBound(Q, meta.k, _q_power_half(Q, meta.k), G.minimal_modulus(), K, hq)


@dataclass
class PseudoEigenvalue:
    """lambda = value * sqrt(radical)."""

    value: CycNumber
    radical: int = 1

    def to_complex(self) -> complex:
        return self.value.to_complex() * math.sqrt(self.radical)

    def __eq__(self, other):
        if not isinstance(other, PseudoEigenvalue):
            return NotImplemented
        return self.radical == other.radical and self.value == other.value

    def __str__(self):
        return f"{self.value}" + (f" * sqrt({self.radical})" if self.radical > 1 else "")


def atkin_li_lambda(f, q: int) -> PseudoEigenvalue:
    """lambda_Q(f) = Q^(k/2 - 1) G(chi_Q) / a_Q for Q the q-primary part of N.

    G(chi_Q) is the Gauss sum over (Z/QZ)^x of the Q-part of the character, taken as a
    character modulo Q (for the trivial character modulo a prime this is -1).
    """
    N, k = f.N, f.k
    if N % q:
        raise ValueError(f"{q} does not divide {N}")
    Q = q ** _val(N, q)
    aQ = f.coefficient(Q)
    if aQ.is_zero():
        raise ValueError("Atkin-Li formula inapplicable: a_Q = 0")
    chiQ, _ = f.chi.q_part(Q)
    G = chiQ.gauss_sum_mod()
    # Q^(k/2 - 1) = Q^((k-2)/2)
    if k % 2 == 0:
        scale, rad = Fraction(Q) ** (k // 2 - 1), 1
    else:
        s, r = squarefree_split(Q)
        scale, rad = Fraction(Q) ** ((k - 3) // 2) * s, r
    return PseudoEigenvalue((G * aQ.inverse() * scale).minimal_modulus(), rad)


def engine_lambda(f, Q: int, f_hQ: QExpansion) -> PseudoEigenvalue:
    """Pseudo-eigenvalue read off f|W_Q = Q^(k/2) (f|h_Q)(Q tau) = lambda f~ (f~ normalised)."""
    w = f_hQ.width
    # coefficient of q^1 after tau -> Q tau sits at index w/Q
    if w % Q:
        f_hQ = f_hQ.rescale_width(lcm(w, Q))
        w = f_hQ.width
    c = f_hQ.coeff(w // Q)
    a, r = _q_power_half(Q, f.k)
    return PseudoEigenvalue((c * a).minimal_modulus(), r)


def _val(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# optimising the cusp representative and the Atkin-Lehner twist


def c_part(N: int, C: int) -> int:
    """N_C = prod_{p | C} p^(v_p(N)); every prime divides 0."""
    out = 1
    for p, e in factorize(N).items():
        if C == 0 or C % p == 0:
            out *= p**e
    return out


def _M_u(N: int, m: int, g: MatZ, u: int) -> int:
    A, B, C, D = g.A, g.B, g.C, g.D
    return lcm(N // math.gcd(C * (u * C + D), N), m // math.gcd(C * (u * A + B), m))


def brute_force_min_M(N: int, m: int, g: MatZ) -> int:
    """min over u of M for g T^u (u modulo N suffices)."""
    return min(_M_u(N, m, g, u) for u in range(max(N, 1)))


def minimal_M_translation(N: int, m: int, g: MatZ) -> tuple[int, int]:
    """Closed-form minimal M' over translations g T^u, and a u attaining it."""
    C, D = g.C, g.D
    NC = c_part(N, C)
    mC = c_part(m, C)
    Mp = NC // math.gcd(C, N) * (m // mC)
    R = N // NC
    if R == 1:
        u = 0
    else:
        u = (-D * pow(C, -1, R)) % R
    assert (u * C + D) % R == 0
    return Mp, u


def al_target_M(N: int, delta: int, Q: int) -> tuple[int, int]:
    """(delta', M') for the cusp denominator delta after W_Q: delta' = (Q/delta_Q) delta_Qbar, M' = N_delta'/delta'."""
    dQ = math.gcd(delta, Q)
    dQbar = delta // dQ
    dp = (Q // dQ) * dQbar
    return dp, c_part(N, dp) // dp


def optimal_atkin_lehner_Q(delta: int, N: int) -> tuple[int, int]:
    """Q = prod_{p | N, 0 < v_p(delta) <= v_p(N)/2} p^(v_p(N)), with M' = gcd(delta, N/delta)."""
    if N % delta:
        raise ValueError(f"{delta} does not divide {N}")
    Q = 1
    for p, e in factorize(N).items():
        v = _val(delta, p)
        if 0 < v and 2 * v <= e:
            Q *= p**e
    return Q, math.gcd(delta, N // delta)


@dataclass
class OptimizationPlan:
    N: int
    g: MatZ
    delta: int
    Q: int
    W: MatZ
    h: MatZ
    g2: MatZ
    upper: MatZ
    gprime: MatZ
    v: int
    Mprime: int

    def steps(self) -> list[str]:
        up = self.upper
        return [
            f"cusp {'oo' if self.g.C == 0 else f'{self.g.A}/{self.g.C}'} has denominator delta = {self.delta}",
            f"Atkin-Lehner divisor Q = {self.Q}: W_Q = {self.W}, h_Q = {self.h}",
            f"diag(Q,1) g = g'' * upper with g'' = {self.g2}, upper = {self.upper}",
            f"g' = h_Q g'' = {self.gprime}; translate by T^{self.v} for the field K_f(zeta_{self.Mprime})",
            f"compute F = f | g' T^{self.v} with the engine (coefficients in K_f(zeta_{self.Mprime}))",
            f"undo the translation: F | T^{-self.v}",
            f"apply the upper triangular matrix ({up.A} {up.B}; 0 {up.D})",
            "multiply by the Atkin-Lehner eigenvalue lambda_Q(f)",
        ]


def optimization_plan(N: int, g: MatZ, m: int = 1) -> OptimizationPlan:
    delta = math.gcd(g.C, N)
    Q, Mp = optimal_atkin_lehner_Q(delta, N)
    W, h = atkin_lehner_matrices(Q, N)
    g2, upper = wq_g_decomposition(g, Q, N)
    gp = h @ g2
    M2, v = minimal_M_translation(N, m, gp)
    return OptimizationPlan(N, g, delta, Q, W, h, g2, upper, gp, v, M2)


def replay_plan(plan: OptimizationPlan, dec, k: int, lam_Q, prec: int) -> QExpansion:
    """f|g rebuilt as lambda_Q * ((f | g' T^v) | T^-v) | upper."""
    from .expansion_engine import slash_expand

    T_v = MatZ(1, plan.v, 0, 1)
    F = slash_expand(dec, plan.gprime @ T_v, prec)
    F = F.apply_T_power(-plan.v)
    up = plan.upper
    F = F.apply_upper_triangular(up.A, up.B, up.D, k)
    return F.scalar_mul(lam_Q)


# ---------------------------------------------------------------------------
# observed fields and certification


def expansion_field(F: QExpansion, M: int | None = None) -> AbelianFieldDescriptor:
    """Field generated by the coefficients of F, as a fixed field inside Q(zeta_M)."""
    M = F.modulus if M is None else lcm(M, F.modulus)
    G = F.with_modulus(M)
    fixed = [lam for lam in units(M) if G.apply_galois(lam) == G] if M > 1 else [0]
    return AbelianFieldDescriptor(M, UnitSubgroup.from_elements(M, fixed))


def expansion_in_module(F: QExpansion, c: CycNumber, K: AbelianFieldDescriptor) -> bool:
    """Every coefficient of F lies in c * K."""
    G = F.scalar_mul(c.inverse())
    L = lcm(G.modulus, K.modulus)
    G = G.with_modulus(L)
    H = K.over(L).stabilizer
    return all(G.apply_galois(lam) == G for lam in H.sorted()) if L > 1 else True


class Verdict(Enum):
    EXACT = "EXACT"
    STRICTLY_SMALLER = "STRICTLY-SMALLER"
    CONTAINED = "CONTAINED"
    NOT_CONTAINED = "NOT-CONTAINED"


@dataclass
class Certificate:
    verdict: Verdict
    predicted: AbelianFieldDescriptor
    observed: AbelianFieldDescriptor
    nprime: int
    exactness_claimed: bool
    expansion: QExpansion | None = field(default=None, repr=False)

    def summary(self) -> str:
        return (
            f"predicted {self.predicted.describe()}, observed {self.observed.describe()}: {self.verdict.value}"
        )


def _compare(observed: AbelianFieldDescriptor, predicted: AbelianFieldDescriptor, exact: bool) -> Verdict:
    L = lcm(observed.modulus, predicted.modulus)
    o, p = observed.over(L), predicted.over(L)
    if not o <= p:
        return Verdict.NOT_CONTAINED
    if o == p:
        return Verdict.EXACT if exact else Verdict.CONTAINED
    return Verdict.STRICTLY_SMALLER


def certify_exact_field(f, g: MatZ, prec: int | None = None, decomposition=None, expansion: QExpansion | None = None) -> Certificate:
    """Compare the field of f|g with the predicted field (K_f(zeta_N') for trivial character).

    Exactness is only claimed for newforms with trivial character; otherwise the verdict is a
    containment check against the composite field of the bound.
    """
    from .expansion_engine import slash_expand

    meta = FormMetadata.from_input(f)
    Np = nprime(f.N, g)
    predicted = field_bound(meta, g).composite_field
    if prec is None and expansion is None:
        # F and its conjugates are Gamma(N)-forms, so agreement up to the Sturm bound is equality
        from .expansion_engine import sturm_bound

        prec = sturm_bound(f.N, f.k)
    F = expansion if expansion is not None else slash_expand(f, g, prec, decomposition=decomposition)
    observed = expansion_field(F, lcm(predicted.modulus, F.modulus))
    claim = bool(f.is_newform and f.chi.is_trivial() and f.k >= 2)
    return Certificate(_compare(observed, predicted, claim), predicted, observed.minimal(), Np, claim, F)


def denominator_property(F: QExpansion, N: int) -> tuple[bool, set[int]]:
    """All primes dividing coefficient denominators of F divide N."""
    bad = {p for p in F.denominator_primes() if N % p}
    return not bad, F.denominator_primes()
