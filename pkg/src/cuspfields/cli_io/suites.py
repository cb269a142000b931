"""Invariant suites run by ``cuspfields verify`` and by the acceptance tests.

Each suite returns a :class:`SuiteResult`; a suite passes when no case fails.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

from ..cyclotomic import lcm, units
from ..eisenstein import EisIndex, EisMonomial, eis_expansion, eis_numeric
from ..expansion_engine import EisDecomposition, express_in_basis, galois_slash_check, slash_expand, sturm_bound
from ..field_bounds import (
    Verdict,
    _M_u,
    al_target_M,
    brute_force_min_M,
    certify_exact_field,
    chi_g_hom_check,
    denominator_property,
    minimal_M_translation,
    optimal_atkin_lehner_Q,
)
from ..modmatrix import MatZ, S, T, is_maximal_divisor, xgcd
from .formfile import load_form

__all__ = ["SuiteResult", "SUITES", "run_suite", "random_sl2", "matrices_for_divisors"]


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.passed > 0

    def record(self, ok: bool, what: str) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            self.failures.append(what)

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{self.name}: {status} ({self.passed} passed, {self.failed} failed, {self.seconds:.1f}s)"


def random_sl2(rng: random.Random, bound: int) -> MatZ:
    """Random SL2(Z) matrix with entries in [-bound, bound]: random coprime lower row, then the
    upper row closest to zero among its translates."""
    while True:
        C, D = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if math.gcd(C, D) != 1:
            continue
        g, x, y = xgcd(D, -C)  # x D - y C = g = +-1
        A0, B0 = x * g, y * g
        if C == 0:
            A, B = A0, rng.randint(-bound, bound)
        else:
            t0 = -round(A0 / C)
            t = rng.choice([t0 - 1, t0, t0 + 1])
            A, B = A0 + t * C, B0 + t * D
        if max(abs(A), abs(B)) <= bound:
            g = MatZ(A, B, C, D)
            assert g.det == 1
            return g


def _with_lower_row(C: int, D: int) -> MatZ:
    """An SL2(Z) matrix with lower row (C, D)."""
    g, x, y = xgcd(D, -C)
    if g != 1:
        raise ValueError("lower row must be coprime")
    return MatZ(x, y, C, D)


def matrices_for_divisors(N: int, count: int, rng: random.Random | None = None) -> list[MatZ]:
    """At least ``count`` SL2(Z) matrices whose values gcd(CD, N) cover every divisor of N."""
    rng = rng or random.Random(0)
    out, seen = [], set()
    for d in sorted(x for x in range(1, N + 1) if N % x == 0):
        found = None
        for C in range(0, 4 * N + 1):
            for D in range(1, 4 * N + 1):
                if math.gcd(C, D) == 1 and math.gcd(C * D, N) == d:
                    found = (C, D)
                    break
            if found:
                break
        if found is None:
            raise AssertionError(f"no lower row with gcd(CD, {N}) = {d}")
        out.append(_with_lower_row(*found))
        seen.add(found)
    while len(out) < count:
        g = random_sl2(rng, max(5, N))
        if (g.C, g.D) not in seen:
            seen.add((g.C, g.D))
            out.append(g)
    return out


# ---------------------------------------------------------------------------


def eisenstein_galois(max_level: int = 8, weights=(1, 2, 3), matrices=None, prec_factor: int = 4) -> SuiteResult:
    """(E|g)^sigma_lam == E^sigma_lam | g_lam for single Eisenstein series (weight 2 is the tilde series)."""
    res = SuiteResult("eisenstein-galois")
    mats = matrices or {"S": S, "T": T, "ST": S @ T}
    for N in range(2, max_level + 1):
        for k in weights:
            prec = prec_factor * sturm_bound(N, k)
            for a in range(N):
                for b in range(N):
                    dec = EisDecomposition.from_monomials(N, [(EisMonomial(N, (EisIndex(N, a, b, k),)), 1)])
                    for name, g in mats.items():
                        for lam in units(N):
                            ok = galois_slash_check(dec, g, lam, prec)
                            res.record(ok, f"N={N} k={k} (a,b)=({a},{b}) g={name} lam={lam}")
    return res


def random_monomial_checks(count: int = 200, max_level: int = 8, max_weight: int = 4, seed: int = 1) -> SuiteResult:
    """galois_slash_check on random combinations of Eisenstein monomials."""
    res = SuiteResult("monomial-galois")
    rng = random.Random(seed)
    for _ in range(count):
        N = rng.randint(2, max_level)
        k = rng.randint(1, max_weight)
        pairs = []
        for _ in range(rng.randint(1, 3)):
            # weight-k monomials from weight-1 factors, or a single higher-weight series
            if rng.random() < 0.5 or k == 1:
                idx = tuple(EisIndex(N, rng.randrange(N), rng.randrange(N), 1) for _ in range(k))
            else:
                idx = (EisIndex(N, rng.randrange(N), rng.randrange(N), k),)
            pairs.append((EisMonomial(N, idx), rng.randint(-3, 3) or 1))
        dec = EisDecomposition.from_monomials(N, pairs)
        g = random_sl2(rng, 5)
        lam = rng.choice(units(N))
        ok = galois_slash_check(dec, g, lam, 4 * sturm_bound(N, k))
        res.record(ok, f"N={N} k={k} g={g} lam={lam}")
    return res


def fg_sigma(label: str = "9a", matrices=None, prec: int | None = None) -> SuiteResult:
    """(f|g)^sigma_lam == f^sigma_lam | g_lam for a bundled form, all lam modulo lcm(N, coefficient modulus)."""
    res = SuiteResult("fg-sigma")
    f = load_form(label)
    dec = express_in_basis(f)
    N = f.N
    L = lcm(N, f.coeff_modulus)
    mats = matrices or [S, S @ T, MatZ(0, -1, 1, 3), MatZ(1, 0, 3, 1), MatZ(2, 1, 1, 1)]
    for g in mats:
        for lam in units(L):
            ok = galois_slash_check(dec, g, lam, prec)
            res.record(ok, f"{label} g={g} lam={lam}")
    return res


def prop61_brute(max_level: int = 60, per_level: int = 20, seed: int = 7) -> SuiteResult:
    """Closed-form minimal M' over translations equals the brute-force minimum, for every cusp denominator."""
    res = SuiteResult("translation-brute")
    rng = random.Random(seed)
    for N in range(1, max_level + 1):
        divs = [d for d in range(1, N + 1) if N % d == 0]
        mats = []
        for d in divs:
            # a matrix with gcd(C, N) = d
            C = d
            D = next(x for x in range(1, 10 * N + 2) if math.gcd(x, C) == 1)
            mats.append(_with_lower_row(C, D))
        while len(mats) < len(divs) + per_level:
            mats.append(random_sl2(rng, 3 * N + 5))
        for g in mats:
            m = rng.choice(divs)
            Mp, u = minimal_M_translation(N, m, g)
            brute = brute_force_min_M(N, m, g)
            ok = Mp == brute and _M_u(N, m, g, u) == Mp
            res.record(ok, f"N={N} m={m} g={g}: closed form {Mp}, brute force {brute}")
    return res


def optimal_q_brute(max_level: int = 100) -> SuiteResult:
    """The stated Q reaches M' = gcd(delta, N/delta) and no maximal divisor of N does better."""
    res = SuiteResult("optimal-Q-brute")
    for N in range(1, max_level + 1):
        maximal = [Q for Q in range(1, N + 1) if N % Q == 0 and is_maximal_divisor(Q, N)]
        for delta in (d for d in range(1, N + 1) if N % d == 0):
            Q, target = optimal_atkin_lehner_Q(delta, N)
            best = min(al_target_M(N, delta, q)[1] for q in maximal)
            ok = al_target_M(N, delta, Q)[1] == target == best
            res.record(ok, f"N={N} delta={delta}: Q={Q} gives {al_target_M(N, delta, Q)[1]}, best {best}")
    return res


def field_bounds_brute(max_level: int = 60, per_level: int = 20, seed: int = 7) -> SuiteResult:
    res = SuiteResult("field-bounds-brute")
    t = time.perf_counter()
    for sub in (prop61_brute(max_level, per_level, seed), optimal_q_brute(max(100, max_level))):
        res.passed += sub.passed
        res.failed += sub.failed
        res.failures += sub.failures
    # multiplicativity of the character twist on the bundled nontrivial-character form
    f = load_form("9a")
    rng = random.Random(seed)
    for _ in range(20):
        g = random_sl2(rng, 9)
        res.record(chi_g_hom_check(f.chi, g), f"chi'_g homomorphism for g={g}")
    res.seconds = time.perf_counter() - t
    return res


def exact_field(labels=("11a", "36a"), count: int = 10, seed: int = 3, outputs: list | None = None) -> SuiteResult:
    """certify_exact_field returns EXACT for trivial-character newforms on matrices covering all gcd(CD, N)."""
    res = SuiteResult("exact-field")
    for label in labels:
        f = load_form(label)
        dec = express_in_basis(f)
        for g in matrices_for_divisors(f.N, count, random.Random(seed)):
            cert = certify_exact_field(f, g, decomposition=dec)
            if outputs is not None:
                outputs.append((label, g, cert.expansion))
            res.record(cert.verdict is Verdict.EXACT, f"{label} g={g}: {cert.summary()}")
    return res


def denominators(labels=("11a", "27a", "32a", "36a"), count: int = 6, seed: int = 5) -> SuiteResult:
    """Primes in the denominators of f|g divide N for integral inputs."""
    res = SuiteResult("denominators")
    for label in labels:
        f = load_form(label)
        if not f.has_integral_coefficients():
            continue
        dec = express_in_basis(f)
        for g in matrices_for_divisors(f.N, count, random.Random(seed)):
            F = slash_expand(f, g, sturm_bound(f.N, f.k), decomposition=dec)
            ok, primes = denominator_property(F, f.N)
            res.record(ok, f"{label} g={g}: denominator primes {sorted(primes)}")
    return res


def numeric_oracle(count: int = 50, max_level: int = 8, seed: int = 11, bound: int = 5, tol: float = 1e-8) -> SuiteResult:
    """(c tau + d)^-k E(g tau) against the exact expansion of E|g, evaluated numerically at three points."""
    res = SuiteResult("numeric-oracle")
    rng = random.Random(seed)
    points = (complex(0.13, 0.91), complex(-0.37, 1.23), complex(0.41, 0.67))
    for _ in range(count):
        N = rng.randint(1, max_level)
        k = rng.choice((1, 2, 3, 4))
        if N == 1 and k < 4:
            k = 4
        idx = EisIndex(N, rng.randrange(N), rng.randrange(N), k)
        g = random_sl2(rng, bound)
        target = idx.slash(g)
        F = eis_expansion(target, 40 * N)
        worst = 0.0
        for tau in points:
            lhs = (g.C * tau + g.D) ** (-k) * eis_numeric(idx, g.act(tau))
            rhs, tail = F.eval_numeric(tau)
            closed = eis_numeric(target, tau)
            worst = max(worst, abs(lhs - rhs) if tail < tol / 10 else 0.0, abs(lhs - closed))
        res.record(worst < tol, f"{idx} g={g}: deviation {worst:.2e}")
    return res


SUITES = {
    "eisenstein-galois": eisenstein_galois,
    "fg-sigma": fg_sigma,
    "field-bounds-brute": field_bounds_brute,
    "exact-field": exact_field,
    "denominators": denominators,
    "numeric-oracle": numeric_oracle,
}


def run_suite(name: str, **caps) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    t = time.perf_counter()
    res = SUITES[name](**caps)
    if not res.seconds:
        res.seconds = time.perf_counter() - t
    return res
