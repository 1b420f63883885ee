"""Ring resonances around the pump and the channel pairs they define.

Prints the comb at the operating temperature, then shows how warming the
ring drags every peak along by the same amount.
"""

import numpy as np

from ringbin import PumpConfig, RingParams, channel_pairs, drop_transmission, resonance_comb

ring = RingParams()
comb = resonance_comb(ring, 28.907, 3)
print(f"FSR at the pump: {ring.fsr(comb.center(0)):.3f} nm, FWHM {comb.fwhm(0) * 1e3:.1f} pm")
for k, centre, q in comb.peaks:
    print(f"  peak {k:+d}: {centre:10.4f} nm  (Q = {q:.0f})")

pump = PumpConfig()
for pair in channel_pairs(comb, pump, 2):
    print(f"order {pair.order}: signal {pair.signal_wavelength:.4f} nm, "
          f"idler {pair.idler_wavelength:.4f} nm")

# a coarse look at the line shape of the pump resonance
grid = comb.center(0) + np.linspace(-0.4, 0.4, 9)
for wl, t in zip(grid, drop_transmission(ring, comb, grid)):
    print(f"{wl:10.4f} nm  {'#' * int(round(60 * t)):s}")

warm = resonance_comb(ring, 32.207, 1)
print(f"at 32.207 C the pump peak sits at {warm.center(0):.4f} nm")
