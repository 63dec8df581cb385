import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scsherald import closed_form as cf
from scsherald.errors import ConvergenceError, DomainError
from scsherald.oracle import BeamSplitterParams, CascadeParams, cascade_herald, herald_input
from scsherald.states import Parity, squeeze_from

from literal_forms import CASES, JMAX, envelope as _envelope, ratio as _ratio

CASE_PARAMS = [
    pytest.param(f, k1(m1), k2(m2), m1, m2, id=f"{f.__name__}-{m1}{m2}")
    for f, k1, k2, r1, r2 in CASES
    for m1, m2 in product(r1, r2)
]


@pytest.mark.parametrize("literal, k1, k2, m1, m2", CASE_PARAMS)
@pytest.mark.parametrize("y2, B", [(0.05, 0.3), (0.2, 1.0), (0.3, 2.5)])
def test_unified_form_matches_literal(literal, k1, k2, m1, m2, y2, B):
    p = cf.HeraldPattern(k1, k2)
    lit = literal(m1, m2, y2, B)
    uni = cf.unnormalized_amplitudes(p, y2, B, cutoff=JMAX)
    env = _envelope(p, y2)
    assert np.all(np.abs(lit - uni) <= 1e-12 * (np.abs(lit) + env))


@pytest.mark.parametrize("literal, k1, k2, m1, m2", CASE_PARAMS)
def test_bracket_product_is_quadratic_weight(literal, k1, k2, m1, m2):
    B = 0.7
    p = cf.HeraldPattern(k1, k2)
    w = cf.quadratic_weights(p, B)
    lit = literal(m1, m2, 0.1, B)
    env = _envelope(p, 0.1)
    j = np.arange(9)
    keep = j % 2 == p.K % 2
    assert np.allclose(lit[:9][keep] / env[:9][keep], w(j[keep].astype(float)), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize(
    "k, y, B, value",
    [(0, 0.2, 1.0, math.sqrt(0.5)), (1, 0.3, 1.0, math.sqrt(0.5)), (1, 0.1, 3.0, 0.5), (2, 0.2, 1.0, -math.sqrt(0.2))],
)
def test_ck_examples(k, y, B, value):
    assert cf.herald_amplitude_ck(k, y, B) == pytest.approx(value, rel=1e-14)


@given(st.integers(1, 12), st.floats(0.01, 0.49), st.floats(0.01, 5))
def test_ck_sign_and_magnitude(k, y, B):
    c = cf.herald_amplitude_ck(k, y, B)
    assert math.copysign(1, c) == (-1) ** (k + 1)
    assert abs(c) == pytest.approx((y * B) ** ((k - 1) / 2) * k / math.sqrt(math.factorial(k) * (1 + B)), rel=1e-12)


def test_weights_example():
    w = cf.quadratic_weights(cf.HeraldPattern(2, 2), 1.0)
    assert (w.a0, w.a1, w.a2) == pytest.approx((0.5, -0.75, 0.25), abs=1e-16)
    assert w.A == pytest.approx((0.25, -0.75, 13 / 16, -0.375, 1 / 16), abs=1e-16)


@given(st.integers(1, 8), st.floats(0.01, 5))
def test_weight_a0_when_second_detector_sees_one(k1, B):
    assert cf.quadratic_weights(cf.HeraldPattern(k1, 1), B).a0 == 1.0


@given(st.floats(0.01, 5), st.integers(0, 30))
def test_single_click_pair_weight(B, j):
    w = cf.quadratic_weights(cf.HeraldPattern(1, 1), B)
    assert w(j) == pytest.approx((1 - B * j) ** 2, rel=1e-12, abs=1e-12)


@given(st.integers(1, 7), st.integers(1, 7), st.floats(0.01, 5), st.floats(-5, 40))
def test_A_is_square_of_quadratic(k1, k2, B, j):
    w = cf.quadratic_weights(cf.HeraldPattern(k1, k2), B)
    poly = sum(a * j**l for l, a in enumerate(w.A))
    assert poly == pytest.approx(w(j) ** 2, rel=1e-9, abs=1e-9)


@given(st.integers(1, 7), st.integers(1, 7), st.floats(0.01, 0.45), st.floats(0.05, 3))
def test_state_parity_and_norm(k1, k2, y2, B):
    p = cf.HeraldPattern(k1, k2)
    s = cf.conditional_state(p, y2, B)
    assert s.parity is Parity.of(k1 + k2)
    assert abs(s.norm_sq() - 1) < 1e-12
    assert s.amplitudes[np.flatnonzero(s.amplitudes)[0]] > 0


def _oracle(k1, k2, y, B):
    c = CascadeParams(squeeze_from("y", y), BeamSplitterParams(B))
    return c, cascade_herald(herald_input(c.squeeze, k1 + k2), 1, 1, c.bs, k1, k2)


def test_state_matches_oracle_example():
    c, o = _oracle(2, 2, 0.2, 0.5)
    s = cf.conditional_state(cf.HeraldPattern(2, 2), c.y2, 0.5)
    n = max(s.cutoff, o.state.cutoff)
    assert np.max(np.abs(s.padded(n).amplitudes - o.state.padded(n).amplitudes)) < 1e-9


@pytest.mark.parametrize("k1, k2", [(1, 1), (2, 3), (3, 2), (4, 4)])
def test_state_matches_oracle_on_common_grid(k1, k2):
    c, o = _oracle(k1, k2, 0.3, 1.0)
    s = cf.conditional_state(cf.HeraldPattern(k1, k2), c.y2, 1.0, cutoff=o.state.cutoff)
    assert np.max(np.abs(s.amplitudes - o.state.amplitudes)) < 1e-14


@pytest.mark.parametrize("y, B", list(product((0.1, 0.3), (0.5, 1.0, 2.0))))
def test_probability_matches_oracle(y, B):
    for k1, k2 in product(range(1, 5), repeat=2):
        c, o = _oracle(k1, k2, y, B)
        P = cf.herald_probability(cf.HeraldPattern(k1, k2), c)
        assert 0 < P < 1
        assert P == pytest.approx(o.probability, rel=1e-9)


def test_G_from_oracle_projection():
    k1, k2, y, B = 3, 2, 0.25, 0.8
    c, o = _oracle(k1, k2, y, B)
    ck = cf.herald_amplitude_ck(k1, c.y1, B) * cf.herald_amplitude_ck(k2, c.y2, B)
    G = float(o.amplitudes @ o.amplitudes) * math.cosh(c.squeeze.s) / ck**2
    assert cf.normalization_G_direct(cf.HeraldPattern(k1, k2), c.y2, B) == pytest.approx(G, rel=1e-12)


def test_completeness_mixed_accounting():
    from scsherald.oracle import smsv_state

    y, B = 0.2, 1.0
    c = CascadeParams(squeeze_from("y", y), BeamSplitterParams(B))
    psi = smsv_state(c.squeeze)
    total = sum(cf.herald_probability(cf.HeraldPattern(a, b), c) for a, b in product(range(1, 11), repeat=2))
    budget = psi.cutoff + 2
    total += sum(cascade_herald(psi, 1, 1, c.bs, 0, k).probability for k in range(budget + 1))
    total += sum(cascade_herald(psi, 1, 1, c.bs, k, 0).probability for k in range(1, budget + 1))
    # whatever is missing sits in outcomes with more than 10 clicks on a detector
    beyond = sum(
        cascade_herald(psi, 1, 1, c.bs, a, b).probability
        for a in range(1, budget + 1)
        for b in range(1, budget + 1 - a)
        if max(a, b) > 10
    )
    assert beyond > 0
    assert total + beyond == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("k1, k2", [(1, 1), (2, 3), (6, 6)])
def test_G_small_y2_limit(k1, k2):
    p = cf.HeraldPattern(k1, k2)
    B, y2 = 0.6, 1e-7
    j0 = p.K % 2
    nu0 = (j0 + p.K - 2) // 2
    lead = cf.quadratic_weights(p, B)(j0) ** 2 * _ratio(nu0) ** 2 / math.factorial(j0) * y2**j0
    assert cf.normalization_G_direct(p, y2, B) == pytest.approx(lead, rel=1e-5)
    assert cf.normalization_G_closed(p, y2, B) == pytest.approx(lead, rel=1e-5)


@pytest.mark.parametrize("k1, k2", [(1, 1), (1, 2), (3, 5), (6, 6)])
@pytest.mark.parametrize("y2, B", [(0.05, 0.2), (0.3, 3.0), (0.4, 1.0)])
def test_G_two_routes(k1, k2, y2, B):
    p = cf.HeraldPattern(k1, k2)
    assert cf.normalization_G_closed(p, y2, B) == pytest.approx(cf.normalization_G_direct(p, y2, B), rel=1e-10)


def test_G_closed_reports_nonconvergence():
    with pytest.raises(ConvergenceError):
        cf.normalization_G_closed(cf.HeraldPattern(6, 7), 0.45, 1.0)


def test_domain():
    with pytest.raises(DomainError):
        cf.HeraldPattern(0, 3)
    with pytest.raises(DomainError):
        cf.conditional_state(cf.HeraldPattern(1, 1), 0.5, 1.0)
    with pytest.raises(DomainError):
        cf.herald_amplitude_ck(2, 0.2, -1.0)
