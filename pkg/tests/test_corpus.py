import math

import pytest

from cuspfields.cli_io.formfile import bundled_forms, bundled_path, FormFile, load_form
from cuspfields.corpus import ETA_RECIPES, eta_product, hecke_tp, recipe_coefficients
from cuspfields.cyclotomic import CycNumber

PRIMES = [p for p in range(2, 40) if all(p % q for q in range(2, p))]


def test_bundled_labels():
    assert bundled_forms() == ["11a", "27a", "32a", "36a", "9a"]


def test_euler_product_oracle():
    # eta(tau)^2 eta(11 tau)^2 = q - 2q^2 - q^3 + 2q^4 + q^5 + 2q^6 - 2q^7 - 2q^9 - 2q^10 + q^11
    assert eta_product({1: 2, 11: 2}, 12) == [0, 1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1]
    with pytest.raises(ValueError):
        eta_product({1: 1}, 5)


@pytest.mark.parametrize("label", ["11a", "27a", "32a", "36a"])
def test_eta_recipes_reproduce_bundled_files(label):
    f = FormFile.load(bundled_path(label))
    assert recipe_coefficients(label, f.precision) == f.coefficients
    assert ETA_RECIPES[label][0] == f.level


def test_level9_recipe_reproduces_bundled_file():
    f = FormFile.load(bundled_path("9a"))
    P = 40
    assert recipe_coefficients("9a", P) == f.coefficients[:P]


@pytest.mark.parametrize("label", bundled_forms())
def test_hecke_relations(label):
    f = load_form(label)
    N, k, chi = f.N, f.k, f.chi
    a = f.expansion.coeffs
    P = len(a)
    # normalised and multiplicative
    assert a[0].is_zero() and a[1] == CycNumber.rational(1)
    for m in range(2, P):
        for n in range(2, P // m + 1):
            if m * n < P and math.gcd(m, n) == 1:
                assert a[m * n] == a[m] * a[n]
    # prime power recursion, with the bad-prime version a_{p^2} = a_p^2 when p | N
    for p in PRIMES:
        if p * p >= P:
            break
        expected = a[p] * a[p] - chi(p) * p ** (k - 1)
        assert a[p * p] == expected


@pytest.mark.parametrize("label", bundled_forms())
def test_eigenform_under_t2(label):
    f = load_form(label)
    if f.N % 2 == 0:
        return
    a = f.expansion.coeffs
    t2 = hecke_tp(a, 2, f.k, f.chi)
    assert t2 == [c * a[2] for c in a[: len(t2)]]


@pytest.mark.parametrize("label", bundled_forms())
def test_atkin_lehner_tables(label):
    f = load_form(label)
    assert f.al_eigenvalues, "every bundled form records its Atkin-Lehner pseudo-eigenvalues"
    for Q, lam in f.al_eigenvalues.items():
        assert f.N % Q == 0 and math.gcd(Q, f.N // Q) == 1
        assert abs(abs(lam.to_complex()) - 1) < 1e-10
