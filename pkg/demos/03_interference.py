"""Two-photon interference through the decoders.

First the ideal port-pair probabilities, then a short simulated fringe
sweep fitted with a sinusoid.
"""

from dataclasses import replace

import numpy as np

from ringbin import AmziConfig, FringeSweep, TimeBinState, visibility_pair, xbasis_probabilities
from ringbin.detection import DetectorParams, Router, simulate_streams, window_count
from ringbin.timebin import phase_from_temperature

state = TimeBinState(visibility_source=0.9)
for phase in np.linspace(0, np.pi, 5):
    p = xbasis_probabilities(state, AmziConfig(theta1=phase))
    print(f"phase {phase:4.2f}: p00 {p.p00:.3f} p01 {p.p01:.3f} p10 {p.p10:.3f} p11 {p.p11:.3f}")

amzi = AmziConfig()
temps = np.linspace(25.0, 25.6, 9)
det_s, det_i = DetectorParams(28.0), DetectorParams(29.0)
rate = 3.26e7
c00, c01 = [], []
for k, t in enumerate(temps):
    am = replace(amzi, theta1=float(phase_from_temperature(amzi, t)))
    s, i = simulate_streams(rate, det_s, det_i, 60.0, seed=100 + k,
                            router=Router(state, am, ("X0",), ("X0", "X1")))
    c00.append([window_count(s.select("X0"), i.select("X0"))])
    c01.append([window_count(s.select("X0"), i.select("X1"))])
    print(f"{t:.3f} C  X0-X'0 {c00[-1][0]:4d}  X0-X'1 {c01[-1][0]:4d}")

pair = visibility_pair(FringeSweep(temps, np.array(c00), np.array(c01), 60.0))
for name, fit in (("X0-X'0", pair.fit_00), ("X0-X'1", pair.fit_01)):
    print(f"{name}: V = {fit.visibility:.3f} +- {fit.visibility_err:.3f}, period {fit.period:.3f} K")
print(f"phase gap from pi: {pair.phase_gap:+.3f} +- {pair.phase_gap_err:.3f}")
