import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from cuspfields.characters import DirichletCharacter
from cuspfields.cli_io import load_form
from cuspfields.cli_io.suites import random_sl2
from cuspfields.cyclotomic import CycNumber, cyclotomic_field, zeta
from cuspfields.expansion_engine import express_in_basis, slash_expand, sturm_bound
from cuspfields.field_bounds import (
    FieldBoundReport,
    FormMetadata,
    Verdict,
    _M_u,
    al_target_M,
    atkin_lehner_bound,
    brute_force_min_M,
    c_chi_g,
    certify_exact_field,
    chi_g_hom_check,
    denominator_property,
    expansion_field,
    expansion_in_module,
    field_bound,
    minimal_M_translation,
    mprime,
    nprime,
    optimal_atkin_lehner_Q,
    optimization_plan,
    replay_plan,
)
from cuspfields.modmatrix import MatZ, cusps_x0, is_maximal_divisor

G9 = MatZ(0, -1, 1, 3)


@pytest.fixture(scope="module")
def f9():
    return load_form("9a")


def test_level9_report(f9):
    rep = field_bound(FormMetadata.from_input(f9), G9)
    assert (rep.nprime, rep.mprime, rep.M) == (3, 9, 9)
    assert rep.Gprime.sorted() == [1, 4, 7]
    assert c_chi_g(f9.chi, G9, rep.Gprime, 1).is_zero()
    assert c_chi_g(f9.chi, G9, rep.Gprime, 2) == zeta(9, 2) * 3
    assert rep.c == zeta(9, 2) * 3
    assert rep.base_field == cyclotomic_field(3)


def test_level9_expansion_lies_in_the_module(f9):
    rep = field_bound(FormMetadata.from_input(f9), G9)
    F = slash_expand(f9, G9, sturm_bound(9, 3))
    assert expansion_in_module(F, rep.c, rep.base_field)
    # the module is not the whole field: zeta_9 * F is outside it
    assert not expansion_in_module(F.scalar_mul(zeta(9)), rep.c, rep.base_field)


def test_report_text_round_trip(f9):
    rep = field_bound(FormMetadata.from_input(f9), G9)
    back = FieldBoundReport.from_text(rep.to_text())
    assert back.to_text() == rep.to_text()
    assert back.contains(zeta(9, 2) * 6)


def test_conductor_formulas():
    g = MatZ(2, 1, 9, 5)
    assert nprime(36, g) == 36 // math.gcd(45, 36)
    assert mprime(12, g) == 12 // math.gcd(9, 12)
    # C = 0: translations only, every coefficient stays in K_f
    assert nprime(36, MatZ(1, 5, 0, 1)) == 1


def test_metadata_without_expansion():
    chi = DirichletCharacter.from_text("9: 2->1/6")
    rep = field_bound(FormMetadata(9, 3, chi, None), G9)
    assert rep.nprime == 3
    with pytest.raises(ValueError):
        field_bound(FormMetadata(9, 2, chi, None), G9)  # parity mismatch


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_chi_g_multiplicative(seed):
    chi = DirichletCharacter.from_text("9: 2->1/6")
    g = random_sl2(random.Random(seed), 12)
    assert chi_g_hom_check(chi, g)


@pytest.mark.parametrize("N", [1, 6, 12, 36, 50])
def test_translation_closed_form(N):
    rng = random.Random(N)
    for _ in range(15):
        g = random_sl2(rng, 2 * N + 3)
        for m in (d for d in range(1, N + 1) if N % d == 0):
            Mp, u = minimal_M_translation(N, m, g)
            assert Mp == brute_force_min_M(N, m, g) == _M_u(N, m, g, u)


def test_translation_and_q_examples():
    assert minimal_M_translation(36, 1, MatZ(1, 0, 6, 1)) == (6, 0)
    assert optimal_atkin_lehner_Q(6, 36) == (36, 6)
    assert optimal_atkin_lehner_Q(1, 36) == (1, 1)
    assert optimal_atkin_lehner_Q(2, 36) == (4, 2)
    assert optimal_atkin_lehner_Q(4, 36) == (1, 1)


@given(st.integers(1, 100), st.data())
def test_optimal_q_is_optimal(N, data):
    delta = data.draw(st.sampled_from([d for d in range(1, N + 1) if N % d == 0]))
    Q, target = optimal_atkin_lehner_Q(delta, N)
    assert is_maximal_divisor(Q, N)
    assert target == math.gcd(delta, N // delta) == al_target_M(N, delta, Q)[1]
    for q in (q for q in range(1, N + 1) if is_maximal_divisor(q, N)):
        assert al_target_M(N, delta, q)[1] >= target


def test_plan_replay_matches_direct_expansion():
    f = load_form("36a")
    dec = express_in_basis(f)
    prec = sturm_bound(36, 2)
    for g in cusps_x0(36)[:6]:
        plan = optimization_plan(36, g, 1)
        lam = f.al_eigenvalues.get(plan.Q)
        lam_value = lam.value if lam is not None else 1
        assert slash_expand(dec, g, prec).agrees_with(replay_plan(plan, dec, 2, lam_value, prec))
        assert len(plan.steps()) == 8


def test_certification_verdicts():
    f = load_form("11a")
    cert = certify_exact_field(f, MatZ(1, 0, 1, 1))
    assert cert.verdict is Verdict.EXACT
    assert cert.observed == cyclotomic_field(11)
    # S sends oo to 0, which W_11 swaps with oo: the field is Q again
    assert certify_exact_field(f, MatZ(0, -1, 1, 0)).observed.degree == 1


def test_certification_catches_a_wrong_claim(f9):
    # feed an expansion that lives in a bigger field than predicted
    F = slash_expand(f9, G9, sturm_bound(9, 3)).scalar_mul(zeta(5))
    cert = certify_exact_field(f9, G9, expansion=F)
    assert cert.verdict is Verdict.NOT_CONTAINED


def test_expansion_field_and_denominators():
    f = load_form("11a")
    F = slash_expand(f, MatZ(1, 0, 1, 1), sturm_bound(11, 2))
    assert expansion_field(F).degree == 10
    ok, primes = denominator_property(F, 11)
    assert ok and primes <= {11}


def test_atkin_lehner_bound_on_character_form(f9):
    b = atkin_lehner_bound(FormMetadata.from_input(f9), 9)
    assert abs(abs(b.scalar.to_complex()) - 3) < 1e-12  # Gauss sum of a primitive character mod 9
    assert "sqrt" not in b.describe() or b.sqrt_part[1] > 1
