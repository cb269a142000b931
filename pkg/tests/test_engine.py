import cmath
import math
from fractions import Fraction

import pytest

from cuspfields.cli_io import load_form
from cuspfields.cyclotomic import CycNumber
from cuspfields.expansion_engine import (
    EisDecomposition,
    ModularFormInput,
    NotModularError,
    UnsupportedWeightError,
    build_basis,
    build_gamma1_basis,
    dim_gamma,
    dim_gamma1,
    express_in_basis,
    galois_slash_check,
    gamma1_sturm_bound,
    slash_expand,
    sturm_bound,
)
from cuspfields.modmatrix import MatZ
from cuspfields.qseries import QExpansion

S = MatZ(0, -1, 1, 0)


def sigma1(n):
    return sum(d for d in range(1, n + 1) if n % d == 0)


def e2_difference(p, prec):
    """E2(tau) - p E2(p tau) with E2 = 1 - 24 sum sigma(n) q^n, a form on Gamma_0(p)."""
    c = []
    for n in range(prec):
        a = 1 if n == 0 else -24 * sigma1(n)
        b = (1 if n == 0 else -24 * sigma1(n // p)) if n % p == 0 else 0
        c.append(a - p * b)
    return c


@pytest.mark.parametrize("N,k,dim", [(1, 4, 1), (1, 12, 2), (2, 2, 2), (3, 2, 3), (4, 2, 5), (5, 2, 11), (3, 3, 4), (4, 3, 7)])
def test_gamma_dimensions(N, k, dim):
    assert dim_gamma(N, k) == dim


@pytest.mark.parametrize("N,k,dim", [(5, 2, 3), (7, 2, 5), (11, 2, 10), (5, 3, 4), (9, 3, 10)])
def test_gamma1_dimensions(N, k, dim):
    assert dim_gamma1(N, k) == dim


@pytest.mark.parametrize("N,k", [(2, 2), (3, 2), (4, 2), (5, 2), (3, 3), (4, 4)])
def test_gamma_basis_rank_is_the_dimension(N, k):
    b = build_basis(N, k)
    assert b.rank == dim_gamma(N, k)


@pytest.mark.parametrize("N,k", [(5, 2), (7, 2), (11, 2), (5, 3), (9, 3)])
def test_gamma1_basis_rank_is_the_dimension(N, k):
    b = build_gamma1_basis(N, k)
    assert b.rank == dim_gamma1(N, k)


def _e2_input(prec=None):
    P = prec or 12
    f = QExpansion.from_coeffs(1, e2_difference(5, P))
    return ModularFormInput(5, 2, f, group="Gamma0")


def test_gamma_and_gamma1_routes_agree():
    f = _e2_input()
    d1 = express_in_basis(f, "Gamma1")
    dG = express_in_basis(f, "Gamma")
    prec = sturm_bound(5, 2) * 2
    for g in (S, MatZ(1, 0, 2, 1), MatZ(2, 1, 1, 1)):
        assert slash_expand(d1, g, prec) == slash_expand(dG, g, prec)


def test_e2_difference_at_zero_is_the_classical_value():
    # (E2(tau) - 5 E2(5 tau)) | S = E2(tau) - (1/5) E2(tau/5)
    f = _e2_input()
    F = slash_expand(f, S, 60)
    expected = [0] * 60
    for n in range(0, 60, 5):
        expected[n] += 1 if n == 0 else -24 * sigma1(n // 5)
    for n in range(60):
        expected[n] -= Fraction(1 if n == 0 else -24 * sigma1(n), 5)
    assert F.coeffs == [CycNumber.rational(x) for x in expected]


def test_residual_detects_non_modular_input():
    f = load_form("11a")
    coeffs = f.expansion.coeffs
    coeffs[7] = coeffs[7] + 1
    bad = ModularFormInput(11, 2, QExpansion.from_coeffs(1, coeffs), character=None)
    with pytest.raises(NotModularError):
        express_in_basis(bad)


def test_low_precision_rejected_and_weight_one_refused():
    with pytest.raises(ValueError):
        ModularFormInput(11, 2, QExpansion.from_coeffs(1, [0, 1, -2]))
    f1 = ModularFormInput(4, 1, QExpansion.from_coeffs(1, [Fraction(1, 4), 1, 0, 0, 1]), group="Gamma1")
    with pytest.raises(UnsupportedWeightError):
        express_in_basis(f1)


def test_decomposition_reproduces_input_and_round_trips():
    f = load_form("11a")
    dec = express_in_basis(f)
    P = f.expansion.prec
    assert dec.expand(11 * P).descend_width(1).agrees_with(f.expansion)
    dec2 = EisDecomposition.from_text(dec.to_text())
    assert dec2.expand(200) == dec.expand(200)


def test_slash_is_a_right_action():
    f = load_form("11a")
    dec = express_in_basis(f)
    g, h = MatZ(2, 1, 1, 1), MatZ(1, 0, 3, 1)
    assert dec.slash(g).slash(h).expand(150) == dec.slash(g @ h).expand(150)


def test_slash_against_numeric_evaluation():
    f = load_form("11a")
    F = slash_expand(f, S, sturm_bound(11, 2))
    tau = complex(0.1, 0.9)
    x = -1 / tau
    q = cmath.exp(2j * math.pi * x)
    direct = sum(complex(c.to_complex()) * q**n for n, c in enumerate(f.expansion.coeffs))
    lhs = tau ** (-2) * direct
    val, tail = F.eval_numeric(tau)
    assert abs(lhs - val) < 1e-6 + 10 * tail


def test_galois_compatibility_on_a_bundled_form():
    f = load_form("9a")
    dec = express_in_basis(f)
    for lam in (2, 4, 5, 7, 8):
        assert galois_slash_check(dec, MatZ(0, -1, 1, 3), lam, sturm_bound(9, 3))


def test_sturm_bounds():
    assert sturm_bound(1, 12) == 2
    assert gamma1_sturm_bound(11, 2) == 21
    assert _e2_input().required_precision() <= 12
