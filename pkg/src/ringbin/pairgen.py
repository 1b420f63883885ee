"""Signal/idler channel selection and SFWM pair rates.

Naming convention: the signal photon sits on comb index ``+order`` (the long
wavelength side, since comb wavelength grows with index) and the idler on
``-order``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .resonator import ResonanceComb

# ratio of double-port to single-port peak-fringe rates, 975 / 432 pairs per 300 s
DOUBLE_PORT_RATE_RATIO = 975 / 432


@dataclass(frozen=True)
class PumpConfig:
    wavelength: float = 1546.0593
    power_per_port: float = 0.5
    ports: str = "single"
    coherent: bool = True

    def problems(self) -> list[tuple[str, str]]:
        out = []
        if not self.power_per_port >= 0:
            out.append(("power_per_port", "must be >= 0"))
        if self.ports not in ("single", "double"):
            out.append(("ports", "must be 'single' or 'double'"))
        if not self.wavelength > 0:
            out.append(("wavelength", "must be > 0"))
        return out

    def detuning_warning(self, comb: ResonanceComb) -> str | None:
        """Message if the pump is off the index-0 peak by more than half a FWHM."""
        detune = self.wavelength - comb.center(0)
        half = 0.5 * comb.fwhm(0)
        if abs(detune) > half:
            return (f"pump at {self.wavelength:.4f} nm is {detune:+.4f} nm from the "
                    f"resonance at {comb.center(0):.4f} nm (half FWHM {half:.4f} nm)")
        return None


@dataclass(frozen=True)
class ChannelPair:
    order: int
    signal_wavelength: float
    idler_wavelength: float


@dataclass(frozen=True)
class SourceModel:
    """Calibrated on-chip brightness (pairs/s/mW^2 per channel pair) and flat Raman singles (cps)."""

    brightness: float
    raman_background: float = 0.0

    def problems(self) -> list[tuple[str, str]]:
        out = []
        if not self.brightness >= 0:
            out.append(("brightness", "must be >= 0"))
        if not self.raman_background >= 0:
            out.append(("raman_background", "must be >= 0"))
        return out


def idler_wavelength(pump_wavelength: float, signal_wavelength: float) -> float:
    """Energy-conserving partner: ``1/l_i = 2/l_p - 1/l_s``."""
    return 1.0 / (2.0 / pump_wavelength - 1.0 / signal_wavelength)


def channel_pairs(comb: ResonanceComb, pump: PumpConfig, max_order: int) -> list[ChannelPair]:
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    if comb.n_side < max_order:
        raise ValueError(f"comb has {comb.n_side} side peaks, need {max_order}")
    pairs = []
    for k in range(1, max_order + 1):
        sig = comb.center(k)
        idl = idler_wavelength(pump.wavelength, sig)
        mismatch = idl - comb.center(-k)
        if abs(mismatch) > 0.5 * comb.fwhm(-k):
            warnings.warn(f"order {k}: energy-conserving idler {idl:.4f} nm misses the "
                          f"resonance at {comb.center(-k):.4f} nm by {mismatch:+.4f} nm",
                          stacklevel=2)
        pairs.append(ChannelPair(k, sig, idl))
    return pairs


def pair_rate(source: SourceModel, pump: PumpConfig, enhancement: float = 1.0) -> float:
    """On-chip pair rate per channel pair: ``brightness * P**2 * enhancement``."""
    if enhancement < 0:
        raise ValueError("enhancement must be >= 0")
    return source.brightness * pump.power_per_port**2 * enhancement


def double_port_enhancement(r: float, coherent: bool = True, phase_samples: int | None = None,
                            seed: int | None = None) -> float:
    """Mean squared forward pump power under double-port pumping, relative to single-port.

    The forward intracavity power is ``P (1 + r**2 + 2 r cos(phi))`` for a
    coherent counter-pump with relative phase ``phi``; SFWM scales as its
    square, so averaging over uniform ``phi`` gives ``(1 + r**2)**2 + 2 r**2``.
    Without phase coherence the cross term vanishes and the factor is
    ``(1 + r**2)**2``.

    With ``phase_samples`` set, the coherent average is estimated by sampling
    ``phi`` instead of the closed form.
    """
    if not 0 <= r <= 1:
        raise ValueError("r must lie in [0, 1]")
    if not coherent:
        return (1 + r**2) ** 2
    if phase_samples is None:
        return (1 + r**2) ** 2 + 2 * r**2
    if phase_samples < 1:
        raise ValueError("phase_samples must be >= 1")
    phi = np.random.default_rng(seed).uniform(0.0, 2 * np.pi, size=phase_samples)
    return float(np.mean((1 + r**2 + 2 * r * np.cos(phi)) ** 2))


def pump_enhancement(pump: PumpConfig, r: float) -> float:
    if pump.ports == "single":
        return 1.0
    return double_port_enhancement(r, pump.coherent)


def solve_backscatter(target: float = DOUBLE_PORT_RATE_RATIO, coherent: bool = True) -> float:
    """Reflection ``r`` in [0, 1] whose enhancement equals ``target``."""
    f = lambda r: double_port_enhancement(r, coherent) - target
    if f(0.0) > 0 or f(1.0) < 0:
        raise ValueError(f"target {target} not reachable for r in [0, 1]")
    return brentq(f, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
