import math
import random

import pytest
from hypothesis import given, strategies as st

from cuspfields.cli_io.suites import random_sl2
from cuspfields.modmatrix import (
    MatModN,
    MatZ,
    atkin_lehner_matrices,
    cusp_matrix,
    cusp_of,
    cusp_width,
    cusps_x0,
    g_lambda,
    is_maximal_divisor,
    parse_matrix,
    sl2_lift,
    wq_g_decomposition,
    xgcd,
)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_xgcd(a, b):
    g, x, y = xgcd(a, b)
    assert a * x + b * y == g
    assert abs(g) == math.gcd(a, b)


sl2 = st.integers(0, 10**6).map(lambda s: random_sl2(random.Random(s), 40))


@given(sl2, sl2)
def test_matrix_group_laws(g, h):
    assert (g @ h).det == 1
    assert g @ g.inverse() == MatZ(1, 0, 0, 1)
    assert (g @ h).mod(7) == g.mod(7) @ h.mod(7)


@given(sl2, st.sampled_from([2, 3, 5, 6, 9, 12, 36]))
def test_sl2_lift_is_congruent(g, N):
    lift = sl2_lift(g.mod(N))
    assert lift.is_sl2()
    assert lift.mod(N) == g.mod(N)


@given(sl2, st.sampled_from([3, 5, 8, 9, 12]), st.data())
def test_g_lambda_congruence(g, N, data):
    lam = data.draw(st.sampled_from([u for u in range(1, N) if math.gcd(u, N) == 1]))
    gl = g_lambda(g, lam, N)
    li = pow(lam, -1, N)
    assert gl.mod(N) == MatModN(N, g.A, lam * g.B, li * g.C, g.D)


def test_parse_matrix():
    assert parse_matrix("0,-1,1,3") == MatZ(0, -1, 1, 3)
    with pytest.raises(ValueError):
        parse_matrix("1,2,3")


@pytest.mark.parametrize("N", [6, 9, 10, 12, 18, 36, 45])
def test_atkin_lehner_matrices(N):
    for Q in range(1, N + 1):
        if not is_maximal_divisor(Q, N):
            continue
        W, h = atkin_lehner_matrices(Q, N)
        assert W.det == Q and h.det == 1
        assert W == h @ MatZ(Q, 0, 0, 1)
        assert W.A % Q == 0 and W.D % Q == 0 and W.C % N == 0
        assert (W.B - 1) % Q == 0


def test_atkin_lehner_full_level():
    W, h = atkin_lehner_matrices(9, 9)
    assert W == MatZ(0, 1, -9, 0)
    assert h == MatZ(0, 1, -1, 0)


@given(sl2, st.sampled_from([(4, 36), (9, 36), (36, 36), (5, 10), (8, 24)]))
def test_wq_decomposition(g, QN):
    Q, N = QN
    g2, upper = wq_g_decomposition(g, Q, N)
    assert MatZ(Q, 0, 0, 1) @ g == g2 @ upper
    assert upper.C == 0 and upper.A * upper.D == Q and 0 <= upper.B < upper.D


@pytest.mark.parametrize("N,count", [(1, 1), (4, 3), (9, 4), (11, 2), (12, 6), (36, 12), (27, 6)])
def test_cusps_of_x0(N, count):
    mats = cusps_x0(N)
    assert len(mats) == count
    widths = 0
    for g in mats:
        assert g.is_sl2()
        widths += cusp_of(g, N).width
    # widths add up to the index of Gamma_0(N)
    index = N
    for p in {p for p in range(2, N + 1) if N % p == 0 and all(p % q for q in range(2, p))}:
        index = index * (p + 1) // p
    assert widths == index


def test_cusp_widths_by_group():
    S = MatZ(0, -1, 1, 0)
    assert cusp_width(S, 9, "Gamma0") == 9
    assert cusp_width(MatZ(1, 0, 3, 1), 9, "Gamma0") == 1
    assert cusp_width(S, 5, "Gamma") == 5
    assert cusp_width(MatZ(1, 0, 0, 1), 5, "Gamma1") == 1


def test_cusp_matrix():
    g = cusp_matrix(5, 12)
    assert g.is_sl2() and (g.A, g.C) == (5, 12)
    with pytest.raises(ValueError):
        cusp_matrix(4, 12)
