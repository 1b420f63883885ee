"""Closed-form expectations for the simulated chain, used to calibrate free parameters.

These formulas are independent of the Monte Carlo in :mod:`ringbin.detection`
and serve both to fix source brightness / decoder settings and as oracles
in the tests.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq
from scipy.special import erf

from .detection import PS_PER_S, DetectorParams
from .pairgen import DOUBLE_PORT_RATE_RATIO, solve_backscatter
from .timebin import AmziConfig, TimeBinState, _port_amplitudes

# average of the X0-X'0 and X0-X'1 fringe peaks, first pair, single-port 0.5 mW
SINGLE_PORT_PEAK_COUNTS = 432.0
SINGLE_PORT_PEAK_ACCUMULATION = 300.0
PUMP_POWER_MW = 0.5

# fitted fringe visibilities (X0-X'0, X0-X'1) per channel order
REPORTED_VISIBILITIES = {1: (0.8196, 0.9018), 2: (0.8222, 0.9503)}
REPORTED_VISIBILITY_ERRORS = {1: (0.0316, 0.0480), 2: (0.0222, 0.0338)}


def window_fraction(det_s: DetectorParams, det_i: DetectorParams, bin_width: float = 64.0) -> float:
    """Probability a true pair's delay falls in the zero-delay bin.

    Gaussian jitter on both tags plus 1 ps rounding of each (variance 1/12);
    the zero bin is closed, so integer delays up to ``bin_width/2`` count.
    """
    var = det_s.jitter_sigma**2 + det_i.jitter_sigma**2 + 2 / 12
    half = np.floor(bin_width / 2) + 0.5
    return float(erf(half / np.sqrt(2 * var)))


def xport_singles_rate(pair_rate: float, det: DetectorParams, amzi: AmziConfig, kappa: float,
                       port: int, raman_background: float = 0.0) -> float:
    """Click rate on one X output: pair photons plus dark/Raman counts."""
    short, long_ = _port_amplitudes(kappa)
    share = amzi.x_fraction * (abs(short[port]) ** 2 + abs(long_[port]) ** 2)
    return pair_rate * det.transmission * amzi.survival * share + det.dark_rate + raman_background


def fringe_extrema(pair_rate, det_s, det_i, state: TimeBinState, amzi: AmziConfig,
                   bin_width=64.0, raman_background=0.0) -> tuple[np.ndarray, np.ndarray]:
    """``(max, min)`` zero-delay coincidence rates (1/s) of the X0-X'0 and X0-X'1 fringes.

    Includes the accidental floor, ignores dead time.
    """
    sa, sb = _port_amplitudes(amzi.signal_coupler)
    ia, ib = _port_amplitudes(amzi.idler_coupler)
    early = np.abs(sa[0] * ia)
    late = np.abs(sb[0] * ib)
    scale = (pair_rate * det_s.transmission * det_i.transmission * amzi.survival**2
             * amzi.x_fraction**2 * window_fraction(det_s, det_i, bin_width))
    base = early**2 + late**2
    swing = 2 * state.visibility_source * early * late
    s_rate = xport_singles_rate(pair_rate, det_s, amzi, amzi.signal_coupler, 0, raman_background)
    acc = np.array([s_rate * xport_singles_rate(pair_rate, det_i, amzi, amzi.idler_coupler, k,
                                                raman_background) * bin_width / PS_PER_S
                    for k in (0, 1)])
    return scale * (base + swing) + acc, scale * (base - swing) + acc


def expected_visibilities(pair_rate, det_s, det_i, state, amzi, bin_width=64.0, raman_background=0.0):
    hi, lo = fringe_extrema(pair_rate, det_s, det_i, state, amzi, bin_width, raman_background)
    return (hi - lo) / (hi + lo)


def expected_peak_counts(pair_rate, det_s, det_i, state, amzi, accumulation, bin_width=64.0,
                         raman_background=0.0) -> float:
    """Average of the two fringe peaks, in counts per ``accumulation`` seconds."""
    hi, _ = fringe_extrema(pair_rate, det_s, det_i, state, amzi, bin_width, raman_background)
    return float(hi.mean() * accumulation)


def calibrate_pair_rate(det_s, det_i, state, amzi, target=SINGLE_PORT_PEAK_COUNTS,
                        accumulation=SINGLE_PORT_PEAK_ACCUMULATION, bin_width=64.0,
                        raman_background=0.0) -> float:
    """On-chip pair rate giving ``target`` averaged peak counts per ``accumulation``."""
    f = lambda r: expected_peak_counts(r, det_s, det_i, state, amzi, accumulation, bin_width,
                                       raman_background) - target
    return brentq(f, 1.0, 1e12, rtol=1e-13)


def coupler_visibility_factor(kappa: float) -> float:
    """Contrast of the X0-X'0 fringe relative to X0-X'1 for an idler coupler ``kappa``.

    With a balanced signal decoder the X'1 output keeps full contrast and X'0
    is reduced by ``2 k (1 - k) / (k**2 + (1 - k)**2)``.
    """
    return 2 * kappa * (1 - kappa) / (kappa**2 + (1 - kappa) ** 2)


def calibrate_decoder(v00: float, v01: float, pair_rate, det_s, det_i, amzi: AmziConfig,
                      bin_width=64.0, raman_background=0.0) -> tuple[float, float]:
    """``(visibility_source, idler_coupler)`` whose observed fringes have contrasts ``v00``, ``v01``.

    The observed contrasts include dilution by accidentals. Requires
    ``v00 <= v01`` with a balanced signal decoder.
    """
    from dataclasses import replace
    if not 0 < v00 <= v01 < 1:
        raise ValueError("need 0 < v00 <= v01 < 1")

    def observed(vs, kappa):
        return expected_visibilities(pair_rate, det_s, det_i, TimeBinState(visibility_source=vs),
                                     replace(amzi, idler_coupler=kappa), bin_width, raman_background)

    vs = brentq(lambda v: observed(v, 0.5)[1] - v01, 1e-9, 1.0, xtol=1e-15)
    if observed(vs, 0.5)[0] <= v00 + 1e-15:
        return float(vs), 0.5
    kappa = 0.5
    for _ in range(100):
        kappa_new = brentq(lambda k: observed(vs, k)[0] - v00, 0.5, 1 - 1e-12, xtol=1e-15)
        vs_new = brentq(lambda v: observed(v, kappa_new)[1] - v01, 1e-9, 1.0, xtol=1e-15)
        done = abs(kappa_new - kappa) < 1e-14 and abs(vs_new - vs) < 1e-14
        kappa, vs = kappa_new, vs_new
        if done:
            break
    return float(vs), float(kappa)


def calibrate_all(det_s: DetectorParams | None = None, det_i: DetectorParams | None = None,
                  amzi: AmziConfig | None = None, bin_width: float = 64.0,
                  raman_background: float = 0.0) -> dict:
    """Every calibrated constant of the bundled scenarios.

    Brightness is fixed on the first pair; each order then gets its own
    ``(visibility_source, idler_coupler)``. The two steps are iterated
    because the decoder settings change the peak counts.
    """
    from dataclasses import replace
    det_s = det_s or DetectorParams(28.0)
    det_i = det_i or DetectorParams(29.0)
    amzi = amzi or AmziConfig()
    state, am = TimeBinState(visibility_source=REPORTED_VISIBILITIES[1][1]), amzi
    rate = calibrate_pair_rate(det_s, det_i, state, am, bin_width=bin_width,
                               raman_background=raman_background)
    for _ in range(50):
        vs, kappa = calibrate_decoder(*REPORTED_VISIBILITIES[1], rate, det_s, det_i, amzi,
                                      bin_width, raman_background)
        state, am = TimeBinState(visibility_source=vs), replace(amzi, idler_coupler=kappa)
        new = calibrate_pair_rate(det_s, det_i, state, am, bin_width=bin_width,
                                  raman_background=raman_background)
        done = abs(new / rate - 1) < 1e-13
        rate = new
        if done:
            break
    orders = {}
    for order, (v00, v01) in REPORTED_VISIBILITIES.items():
        vs, kappa = calibrate_decoder(v00, v01, rate, det_s, det_i, amzi, bin_width, raman_background)
        orders[order] = {"visibility_source": vs, "idler_coupler": kappa}
    return {
        "brightness": rate / PUMP_POWER_MW**2,
        "single_port_pair_rate": rate,
        "backscatter_r": solve_backscatter(DOUBLE_PORT_RATE_RATIO),
        "orders": orders,
    }
