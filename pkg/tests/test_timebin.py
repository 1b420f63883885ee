import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringbin.timebin import (CLASSICAL_VISIBILITY_BOUND, LOST, AmziConfig, TimeBinState,
                             amzi_route, exceeds_classical_bound, outcome_table,
                             phase_from_temperature, route_pairs, xbasis_probabilities,
                             zbasis_coincidence_visibility)

phases = st.floats(-10.0, 10.0)
visibilities = st.floats(0.0, 1.0)


@given(visibilities, phases)
def test_balanced_decoder_table(v, phase):
    p = xbasis_probabilities(TimeBinState(visibility_source=v), AmziConfig(theta1=phase))
    assert p.as_array().sum() == pytest.approx(1.0, abs=1e-12)
    assert abs(p.p00 - p.p11) <= 1e-12 and abs(p.p01 - p.p10) <= 1e-12
    assert p.p00 == pytest.approx((1 + v * np.cos(phase)) / 4, abs=1e-12)
    assert p.p01 == pytest.approx((1 - v * np.cos(phase)) / 4, abs=1e-12)


@given(visibilities, st.floats(0.05, 0.95), phases)
def test_table_normalised_for_any_coupler(v, kappa, phase):
    p = xbasis_probabilities(TimeBinState(visibility_source=v),
                             AmziConfig(theta1=phase, idler_coupler=kappa, signal_coupler=kappa))
    arr = p.as_array()
    assert arr.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(arr >= -1e-15)


def test_phase_is_sum_of_terms():
    a = xbasis_probabilities(TimeBinState(), AmziConfig(theta1=0.3, theta2=0.4, pump_phase_diff=0.5))
    b = xbasis_probabilities(TimeBinState(), AmziConfig(theta1=1.2))
    assert np.allclose(a.as_array(), b.as_array(), atol=1e-15)


def test_unbalanced_idler_lowers_00_contrast():
    kappa = 0.6
    am = AmziConfig(idler_coupler=kappa)
    grid = np.linspace(0, 2 * np.pi, 257)
    p00 = np.array([xbasis_probabilities(TimeBinState(), AmziConfig(theta1=t, idler_coupler=kappa)).p00
                    for t in grid])
    vis = (p00.max() - p00.min()) / (p00.max() + p00.min())
    assert vis == pytest.approx(2 * kappa * (1 - kappa) / (kappa**2 + (1 - kappa) ** 2), abs=1e-4)
    assert am.x_fraction == pytest.approx(2 * 10 ** -0.6)


def test_outcome_table_sums_to_one():
    for kappa in (0.5, 0.63):
        table = outcome_table(TimeBinState(visibility_source=0.9), AmziConfig(idler_coupler=kappa))
        assert table[4].sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(table[4] >= 0)


def test_route_statistics():
    state, am = TimeBinState(), AmziConfig()
    rng = np.random.default_rng(21)
    n = 200_000
    sp, sd, ip, idl = route_pairs(n, state, am, rng)
    kept = sp != LOST
    assert kept.mean() == pytest.approx(am.survival, abs=3 * np.sqrt(am.survival * (1 - am.survival) / n))
    x = np.isin(sp[kept], (0, 1))
    p = am.x_fraction
    assert x.mean() == pytest.approx(p, abs=3 * np.sqrt(p * (1 - p) / kept.sum()))
    both_x = np.isin(sp, (0, 1)) & np.isin(ip, (0, 1))
    rel = (idl - sd)[both_x]
    assert set(np.unique(rel)) <= {-state.delay_tau, 0.0, state.delay_tau}
    # side bins carry a quarter each, the central bin half
    central = np.mean(rel == 0)
    assert central == pytest.approx(0.5, abs=3 * np.sqrt(0.25 / rel.size))


def test_amzi_route_single():
    rng = np.random.default_rng(0)
    seen = set()
    for _ in range(300):
        sig, idr = amzi_route(1000.0, TimeBinState(), AmziConfig(), rng)
        for ph in (sig, idr):
            if ph is not None:
                port, t = ph
                seen.add(port)
                assert t in (1000.0, 1800.0)
    assert seen == {"X0", "X1", "Z"}


def test_zbasis_visibility():
    s = TimeBinState()
    assert zbasis_coincidence_visibility(s, 0.0) == 1.0
    assert zbasis_coincidence_visibility(s, 0.01) == pytest.approx(1 / 1.02)
    assert zbasis_coincidence_visibility(s, float("inf")) == 0.0
    with pytest.raises(ValueError):
        zbasis_coincidence_visibility(s, -0.1)


@given(st.floats(0.0, 1e3))
def test_zbasis_monotone(b):
    s = TimeBinState()
    assert zbasis_coincidence_visibility(s, b) >= zbasis_coincidence_visibility(s, b * 1.5 + 1e-9)


def test_classical_bound():
    assert CLASSICAL_VISIBILITY_BOUND == pytest.approx(0.70710678118654752)
    assert exceeds_classical_bound(0.72) and not exceeds_classical_bound(0.70)


def test_temperature_phase_linear():
    am = AmziConfig()
    assert phase_from_temperature(am, 25.0) == 0.0
    assert phase_from_temperature(am, 25.5) == pytest.approx(2 * np.pi)


def test_invalid():
    assert TimeBinState(visibility_source=1.2).problems()
    assert AmziConfig(idler_coupler=1.0).problems()
    assert AmziConfig(excess_loss_db=-1).problems()
