"""Recipes that produce the bundled newforms from first principles.

Weight-2 forms come from eta products; the weight-3 form of level 9 is cut
out of a product of two Eisenstein series with Hecke operators.
"""

from __future__ import annotations

from fractions import Fraction

from .characters import DirichletCharacter
from .cyclotomic import CycNumber

__all__ = [
    "eta_product",
    "ETA_RECIPES",
    "eisenstein_chars",
    "hecke_tp",
    "level9_weight3_newform",
    "LEVEL9_CHARACTER",
    "RECIPE_TEXT",
    "recipe_coefficients",
]


def _euler_product(prec: int) -> list[int]:
    """prod_{n >= 1} (1 - q^n) to precision prec via the pentagonal number theorem."""
    out = [0] * prec
    k = 0
    while True:
        hit = False
        for kk in (k, -k) if k else (0,):
            e = kk * (3 * kk - 1) // 2
            if e < prec:
                out[e] += -1 if kk % 2 else 1
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return out


def _mul(a: list[int], b: list[int], prec: int) -> list[int]:
    out = [0] * prec
    for i, x in enumerate(a[:prec]):
        if x:
            for j, y in enumerate(b[: prec - i]):
                if y:
                    out[i + j] += x * y
    return out


def eta_product(exps: dict[int, int], prec: int) -> list[int]:
    """Coefficients a_0..a_{prec-1} of prod_d eta(d tau)^(r_d), an integral power series in q.

    The leading exponent sum_d d r_d / 24 must be a non-negative integer.
    """
    shift = Fraction(sum(d * r for d, r in exps.items()), 24)
    if shift.denominator != 1 or shift < 0:
        raise ValueError("eta product does not have an integral leading exponent")
    shift = int(shift)
    body = prec - shift
    series = [1] + [0] * (body - 1)
    base = _euler_product(body)
    for d, r in sorted(exps.items()):
        dil = [0] * body
        for i in range(0, body, d):
            dil[i] = base[i // d]
        if r < 0:
            raise ValueError("only holomorphic eta products are supported")
        for _ in range(r):
            series = _mul(series, dil, body)
    return [0] * shift + series


ETA_RECIPES = {
    "11a": (11, {1: 2, 11: 2}),
    "27a": (27, {3: 2, 9: 2}),
    "32a": (32, {4: 2, 8: 2}),
    "36a": (36, {6: 4}),
}


def eisenstein_chars(psi: DirichletCharacter, phi: DirichletCharacter, k: int, prec: int, a0) -> list[CycNumber]:
    """a_0, then sum_{d | n} psi(n/d) phi(d) d^(k-1) for 1 <= n < prec."""
    out = [CycNumber.coerce(a0)]
    for n in range(1, prec):
        s = CycNumber.rational(0)
        for d in range(1, n + 1):
            if n % d == 0:
                s = s + psi(n // d) * phi(d) * d ** (k - 1)
        out.append(s)
    return out


def _series_mul(a: list[CycNumber], b: list[CycNumber], prec: int) -> list[CycNumber]:
    out = []
    for n in range(prec):
        s = CycNumber.rational(0)
        for i in range(n + 1):
            if not a[i].is_zero() and not b[n - i].is_zero():
                s = s + a[i] * b[n - i]
        out.append(s)
    return out


def hecke_tp(coeffs: list[CycNumber], p: int, k: int, chi: DirichletCharacter) -> list[CycNumber]:
    """a_n(T_p f) = a_{pn} + chi(p) p^(k-1) a_{n/p}; output precision is floor((P-1)/p) + 1."""
    P = (len(coeffs) - 1) // p + 1
    cp = chi(p) * p ** (k - 1)
    out = []
    for n in range(P):
        v = coeffs[p * n]
        if n % p == 0 and not cp.is_zero():
            v = v + cp * coeffs[n // p]
        out.append(v)
    return out


# chi(2) = zeta_6 on the generator 2 of (Z/9Z)^x: chi(4) = zeta_3, chi(-1) = -1
LEVEL9_CHARACTER = DirichletCharacter(9, [Fraction(1, 6)])


def level9_weight3_newform(prec: int) -> list[CycNumber]:
    """The weight-3 newform of level 9 with character chi (chi(2) = zeta_6), coefficients a_0..a_{prec-1}.

    v = E_1^{1, chi^3} * E_2^{chi^4, 1} lies in M_3(Gamma_0(9), chi); the two Eisenstein
    series E_3^{1,chi}, E_3^{chi,1} have T_2-eigenvalues 1 + 4 chi(2) and chi(2) + 4, and
    (T_2 - e_1)(T_2 - e_2) v is a multiple of the newform.
    """
    chi = LEVEL9_CHARACTER
    one = DirichletCharacter.trivial(1)
    big = 4 * prec + 8
    e1 = eisenstein_chars(one, chi**3, 1, big, Fraction(1, 6))
    e2 = eisenstein_chars(chi**4, one, 2, big, 0)
    v = _series_mul(e1, e2, big)
    ev1 = chi(2) * 4 + 1
    ev2 = chi(2) + 4
    w = hecke_tp(v, 2, 3, chi)
    w = [a - ev1 * b for a, b in zip(w, v)]
    u = hecke_tp(w, 2, 3, chi)
    u = [a - ev2 * b for a, b in zip(u, w)]
    lead = next(c for c in u[1:] if not c.is_zero())
    inv = lead.inverse()
    f = [(c * inv).minimal_modulus() for c in u[:prec]]
    if not f[0].is_zero():
        raise AssertionError("Hecke projection left a constant term")
    return f


RECIPE_TEXT = {
    "9a": "(T_2 - e_1)(T_2 - e_2) applied to E_1^(1, chi^3) * E_2^(chi^4, 1), normalised so a_1 = 1;"
          " chi(2) = zeta_6, e_1 = 1 + 4 chi(2), e_2 = chi(2) + 4",
    "11a": "eta(tau)^2 eta(11 tau)^2",
    "27a": "eta(3 tau)^2 eta(9 tau)^2",
    "32a": "eta(4 tau)^2 eta(8 tau)^2",
    "36a": "eta(6 tau)^4",
}


def recipe_coefficients(label: str, prec: int) -> list[CycNumber]:
    """a_0 .. a_{prec-1} of a bundled newform, recomputed from its recipe."""
    if label == "9a":
        return level9_weight3_newform(prec)
    if label not in ETA_RECIPES:
        raise KeyError(f"no recipe for {label!r}")
    _, exps = ETA_RECIPES[label]
    return [CycNumber.rational(a) for a in eta_product(exps, prec)]
