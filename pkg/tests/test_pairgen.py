import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringbin.pairgen import (DOUBLE_PORT_RATE_RATIO, PumpConfig, SourceModel, channel_pairs,
                             double_port_enhancement, idler_wavelength, pair_rate, pump_enhancement,
                             solve_backscatter)
from ringbin.resonator import RingParams, resonance_comb

R_STAR = 0.541112510204302


@given(st.floats(0.0, 10.0), st.floats(1.0, 1e9))
def test_rate_quadratic(power, brightness):
    src = SourceModel(brightness)
    one = pair_rate(src, PumpConfig(power_per_port=power))
    two = pair_rate(src, PumpConfig(power_per_port=2 * power))
    assert two == pytest.approx(4 * one, rel=1e-15, abs=0)


@given(st.floats(0.01, 10.0), st.floats(0.01, 10.0))
def test_rate_monotonic(p1, p2):
    src = SourceModel(1e8)
    lo, hi = sorted((p1, p2))
    assert pair_rate(src, PumpConfig(power_per_port=lo)) <= pair_rate(src, PumpConfig(power_per_port=hi))


def test_channel_pairs_energy_conservation():
    ring = RingParams()
    comb = resonance_comb(ring, 28.907, 3)
    pump = PumpConfig()
    for p in channel_pairs(comb, pump, 3):
        lhs = 2 / pump.wavelength
        rhs = 1 / p.signal_wavelength + 1 / p.idler_wavelength
        assert abs(lhs - rhs) / lhs <= 1e-12
        assert p.signal_wavelength > pump.wavelength > p.idler_wavelength
        assert abs(p.idler_wavelength - comb.center(-p.order)) <= 0.5 * comb.fwhm(-p.order)


@given(st.floats(1500.0, 1600.0), st.floats(1510.0, 1590.0))
def test_idler_energy(lp, ls):
    li = idler_wavelength(lp, ls)
    assert abs(2 / lp - 1 / ls - 1 / li) * lp / 2 <= 1e-12


def test_misaligned_idler_warns():
    comb = resonance_comb(RingParams(), 28.907, 2)
    with pytest.warns(UserWarning):
        channel_pairs(comb, PumpConfig(wavelength=1546.5), 1)


def test_detuning_warning():
    comb = resonance_comb(RingParams(), 28.907, 1)
    assert PumpConfig().detuning_warning(comb) is None
    assert "resonance" in PumpConfig(wavelength=1546.3).detuning_warning(comb)


def test_enhancement_closed_forms():
    assert double_port_enhancement(0.0) == 1.0
    assert double_port_enhancement(1.0) == pytest.approx(6.0)
    assert double_port_enhancement(1.0, coherent=False) == pytest.approx(4.0)
    assert double_port_enhancement(R_STAR) == pytest.approx(DOUBLE_PORT_RATE_RATIO, rel=1e-13)


def test_backscatter_root():
    r = solve_backscatter()
    # r**2 solves u**2 + 4u + 1 = target
    u = -2 + np.sqrt(3 + DOUBLE_PORT_RATE_RATIO)
    assert r == pytest.approx(np.sqrt(u), rel=1e-13)
    assert r == pytest.approx(R_STAR, rel=1e-13)
    with pytest.raises(ValueError):
        solve_backscatter(7.0)


def test_enhancement_sampling():
    sampled = double_port_enhancement(R_STAR, phase_samples=100_000, seed=4)
    assert sampled == pytest.approx(double_port_enhancement(R_STAR), rel=1e-3)


def test_pump_enhancement_single_is_one():
    assert pump_enhancement(PumpConfig(ports="single"), 0.9) == 1.0
    assert pump_enhancement(PumpConfig(ports="double"), 0.0) == 1.0


def test_invalid_configs():
    assert PumpConfig(ports="triple").problems()
    assert SourceModel(-1.0).problems()
    with pytest.raises(ValueError):
        pair_rate(SourceModel(1.0), PumpConfig(), enhancement=-1)
