"""Simulate a short coincidence measurement and read off CAR.

A 30 s run is enough to see the zero-delay peak stand ~400x above the
accidental floor at the calibrated pair rate.
"""

from ringbin import DetectorParams, PumpConfig, SourceModel, car, coincidence_histogram, pair_rate
from ringbin.detection import accidental_floor, analytic_accidentals, simulate_streams
from ringbin.timebin import zbasis_coincidence_visibility, TimeBinState

source = SourceModel(brightness=130343674.73733374)
rate = pair_rate(source, PumpConfig(power_per_port=0.5))
signal, idler = DetectorParams(28.0), DetectorParams(29.0)

s, i = simulate_streams(rate, signal, idler, duration=30.0, seed=1)
print(f"pair rate {rate:.3e}/s, singles {s.rate:.0f} / {i.rate:.0f} cps")

h = coincidence_histogram(s, i, bin_width=64.0, span=3200.0)
for d, c in zip(h.delays, h.counts):
    if abs(d) <= 320:
        print(f"{d:+6.0f} ps {c:6d}")
value = car(h, 64.0)
print(f"CAR = {value:.0f}")
print(f"floor {accidental_floor(h):.2f} per bin, S1*S2*t_w*T = {analytic_accidentals(s, i, 64.0):.2f}")
print(f"implied Z-basis visibility {zbasis_coincidence_visibility(TimeBinState(), 1 / value):.4f}")
