import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cuspfields.cyclotomic import (
    AbelianFieldDescriptor,
    CycNumber,
    UnitSubgroup,
    cyclotomic_field,
    cyclotomic_poly,
    euler_phi,
    field_of,
    intersect_with_cyclotomic,
    rational_field,
    units,
    zeta,
)

MODULI = [1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 15, 16, 20, 24, 36]


@st.composite
def cyc(draw, modulus=None):
    M = modulus if modulus is not None else draw(st.sampled_from(MODULI))
    d = euler_phi(M)
    coords = draw(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=12), min_size=d, max_size=d))
    return CycNumber(M, coords)


def test_cyclotomic_polynomials_small():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)
    # Phi_105 is the first with a coefficient -2
    assert -2 in cyclotomic_poly(105)


@pytest.mark.parametrize("M", MODULI + [105])
def test_zeta_has_exact_order(M):
    z = zeta(M)
    assert z**M == CycNumber.rational(1)
    for p in {p for p in range(2, M + 1) if M % p == 0 and all(p % q for q in range(2, p))}:
        assert z ** (M // p) != CycNumber.rational(1)


@given(st.data())
def test_ring_axioms(data):
    M = data.draw(st.sampled_from(MODULI))
    x, y, z = (data.draw(cyc(M)) for _ in range(3))
    assert (x + y) * z == x * z + y * z
    assert x * (y * z) == (x * y) * z
    assert x - x == CycNumber.rational(0)


@given(cyc())
def test_inverse_and_norm(x):
    if x.is_zero():
        return
    assert x * x.inverse() == CycNumber.rational(1)
    n = x.norm()
    assert isinstance(n, Fraction)
    prod = 1
    for lam in units(x.modulus):
        prod *= x.sigma(lam).to_complex()
    assert abs(prod - float(n)) < 1e-6 * max(1, abs(float(n)))


@given(st.data())
def test_sigma_is_a_ring_homomorphism(data):
    M = data.draw(st.sampled_from(MODULI))
    x, y = data.draw(cyc(M)), data.draw(cyc(M))
    lam = data.draw(st.sampled_from(units(M)))
    assert (x * y).sigma(lam) == x.sigma(lam) * y.sigma(lam)
    assert (x + y).sigma(lam) == x.sigma(lam) + y.sigma(lam)


@given(cyc())
def test_complex_embedding_matches(x):
    M = x.modulus
    direct = sum(complex(c) * cmath.exp(2j * math.pi * j / M) for j, c in enumerate(x.coords))
    assert abs(direct - x.to_complex()) < 1e-9


@given(cyc(), st.sampled_from([2, 3, 5]))
def test_embed_then_minimal_modulus(x, r):
    big = x.embed(x.modulus * r)
    assert big == x
    small = big.minimal_modulus()
    assert small == x
    assert x.modulus % small.modulus == 0 or small.modulus % 2 == 0


def test_minimal_modulus_examples():
    assert zeta(12, 4).minimal_modulus().modulus == 3
    assert (zeta(8) + zeta(8, 7)).minimal_modulus().to_complex() == pytest.approx(math.sqrt(2))
    # zeta_6 = -zeta_3^2, so Q(zeta_6) = Q(zeta_3)
    assert zeta(6).minimal_modulus().modulus == 3
    assert CycNumber.rational(5, 7).minimal_modulus().modulus == 1


@given(cyc())
def test_text_round_trip(x):
    assert CycNumber.from_text(x.to_text()) == x
    assert CycNumber.from_text(x.to_text()).to_text() == x.to_text()


def test_equality_across_moduli_and_hash():
    a = zeta(3)
    b = zeta(6, 2)
    assert a == b
    assert hash(a) == hash(b)
    assert a != zeta(6)


def test_field_descriptors():
    Q9 = cyclotomic_field(9)
    Q3 = cyclotomic_field(3)
    assert Q3 <= Q9 and not Q9 <= Q3
    assert Q3.over(9).degree == 2
    assert Q3.contains(zeta(3)) and not Q3.contains(zeta(9))
    assert Q3.composite(cyclotomic_field(4)) == cyclotomic_field(12)
    assert cyclotomic_field(5).adjoin_zeta(3) == cyclotomic_field(15)
    real = AbelianFieldDescriptor(8, UnitSubgroup.from_elements(8, [1, 7]))
    assert real.degree == 2
    assert real.contains(zeta(8) + zeta(8, 7))
    assert not real.contains(zeta(8))
    assert rational_field().degree == 1


def test_field_of_values():
    F = field_of([zeta(9, 3), CycNumber.rational(2)], 9)
    assert F == cyclotomic_field(3).over(9)
    assert field_of([zeta(8) + zeta(8, 7)], 8).degree == 2


@given(st.sampled_from([3, 4, 5, 8, 9, 12]), st.sampled_from([3, 4, 9, 12, 27]))
def test_intersection_with_cyclotomic(n, m):
    K = cyclotomic_field(n)
    H = intersect_with_cyclotomic(K, m)
    # the fixed field of H in Q(zeta_m) is Q(zeta_m) cap Q(zeta_n) = Q(zeta_gcd) (up to Q(zeta_2) = Q)
    g = math.gcd(n, m)
    expected = AbelianFieldDescriptor(m, H)
    assert expected == cyclotomic_field(g).over(m) or (g == 2 and expected.degree == 1)
