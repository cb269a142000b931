import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cuspfields.characters import DirichletCharacter, factorize, unit_generators
from cuspfields.cyclotomic import CycNumber, units, zeta


@st.composite
def characters(draw):
    N = draw(st.sampled_from([1, 3, 4, 5, 7, 8, 9, 12, 15, 16, 20, 21, 36]))
    vals = [Fraction(draw(st.integers(0, o - 1)), o) for _, o in unit_generators(N)]
    return DirichletCharacter(N, vals)


@given(characters(), st.integers(-200, 200), st.integers(-200, 200))
def test_multiplicative(chi, a, b):
    assert chi(a * b) == chi(a) * chi(b)
    assert chi(a + chi.modulus) == chi(a)
    if math.gcd(a, chi.modulus) != 1:
        assert chi(a).is_zero()


@given(characters())
def test_order_conductor_and_primitive(chi):
    assert chi(1) == CycNumber.rational(1)
    for u in units(chi.modulus):
        assert chi(u) ** chi.order == CycNumber.rational(1)
    f = chi.conductor
    assert chi.modulus % f == 0
    prim = chi.primitive()
    assert prim.is_primitive()
    for u in units(chi.modulus):
        assert prim(u) == chi(u)
    assert prim.extend(chi.modulus) == chi


@given(characters())
def test_text_round_trip(chi):
    assert DirichletCharacter.from_text(chi.to_text()) == chi


@given(characters())
def test_conjugate_and_powers(chi):
    assert chi * chi.conjugate() == DirichletCharacter.trivial(chi.modulus)
    assert chi ** chi.order == DirichletCharacter.trivial(chi.modulus)
    assert chi.parity() in (1, -1)
    assert chi(-1) == CycNumber.rational(chi.parity())


@given(characters())
def test_gauss_sum_absolute_value(chi):
    if not chi.is_primitive():
        return
    G = chi.gauss_sum()
    assert abs(abs(G.to_complex()) ** 2 - chi.modulus) < 1e-8


def test_q_part_split():
    chi = DirichletCharacter.from_text("36: 19->1/2 29->1/6")
    c4, c9 = chi.q_part(4)
    for u in units(36):
        assert chi(u) == c4(u) * c9(u)
    with pytest.raises(ValueError):
        chi.q_part(6)


def test_level9_character_values():
    chi = DirichletCharacter(9, [Fraction(1, 6)])
    assert chi(2) == zeta(6)
    assert chi(4) == zeta(3)
    assert chi(-1) == CycNumber.rational(-1)
    assert chi.conductor == 9 and chi.order == 6


@given(st.integers(1, 10**5))
def test_factorize(n):
    f = factorize(n)
    prod = 1
    for p, e in f.items():
        prod *= p**e
    assert prod == n
