"""Silicon microring resonance comb and drop-port spectra.

The comb is built from the standard free-spectral-range relation
``FSR = lambda**2 / (2*pi*R*n_g)``.  With a constant group index this is
exactly a comb that is uniform in optical frequency, so adjacent peaks are
found by stepping ``1/lambda`` by ``1/(2*pi*R*n_g)``.

Lengths are in nm unless a field name says otherwise (``radius_um``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RingParams:
    """Geometric and optical description of an add-drop ring.

    Parameters
    ----------
    radius_um : float
        Ring radius in micrometres.
    group_index : float
        Waveguide group index. Not measured for this device; 4.3 is a
        typical silicon-wire value.
    q_factor : float
        Loaded quality factor, shared by every resonance.
    t_drop_peak : float
        On-resonance add-to-drop power transmission, in [0, 1].
    anchor_wavelength : float
        Centre of the pump resonance (nm) at ``anchor_temperature``.
    anchor_temperature : float
        Ring temperature (deg C) at which ``anchor_wavelength`` holds.
    thermal_shift : float
        Resonance shift in nm per kelvin.
    backscatter_r : float
        Amplitude reflection coupling the counter-propagating pump into the
        forward mode, in [0, 1].
    backscatter_phase_slope : float
        Phase of the reflected field versus detuning, rad/nm.
    """

    radius_um: float = 10.0
    group_index: float = 4.3
    q_factor: float = 8000.0
    t_drop_peak: float = 0.5
    anchor_wavelength: float = 1546.0593
    anchor_temperature: float = 28.907
    thermal_shift: float = 0.08
    backscatter_r: float = 0.0
    backscatter_phase_slope: float = 2 * np.pi / 0.1

    def problems(self) -> list[tuple[str, str]]:
        """Return ``(field, message)`` for every violated invariant."""
        out = []
        if not self.radius_um > 0:
            out.append(("radius_um", "must be > 0"))
        if not self.group_index > 1:
            out.append(("group_index", "must be > 1"))
        if not self.q_factor > 0:
            out.append(("q_factor", "must be > 0"))
        if not 0 <= self.t_drop_peak <= 1:
            out.append(("t_drop_peak", "must lie in [0, 1]"))
        if not 0 <= self.backscatter_r <= 1:
            out.append(("backscatter_r", "must lie in [0, 1]"))
        if not self.anchor_wavelength > 0:
            out.append(("anchor_wavelength", "must be > 0"))
        return out

    def validate(self) -> None:
        probs = self.problems()
        if probs:
            msg = "; ".join(f"{name} {why}" for name, why in probs)
            raise ValueError(f"invalid RingParams: {msg}")

    @property
    def circumference_nm(self) -> float:
        return 2 * np.pi * self.radius_um * 1e3

    def fsr(self, wavelength) -> np.ndarray:
        """Local free spectral range (nm) at ``wavelength``."""
        wl = np.asarray(wavelength, dtype=float)
        return wl**2 / (self.circumference_nm * self.group_index)


@dataclass(frozen=True)
class ResonanceComb:
    """Resonances indexed relative to the pump peak (index 0).

    Wavelength increases with index.
    """

    indices: np.ndarray
    centers: np.ndarray
    q_factors: np.ndarray
    _pos: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int)
        ctr = np.asarray(self.centers, dtype=float)
        q = np.asarray(self.q_factors, dtype=float)
        if not (idx.shape == ctr.shape == q.shape):
            raise ValueError("indices, centers and q_factors must have equal length")
        if 0 not in idx:
            raise ValueError("comb must contain the pump resonance (index 0)")
        order = np.argsort(idx)
        idx, ctr, q = idx[order], ctr[order], q[order]
        if np.any(np.diff(ctr) <= 0):
            raise ValueError("centre wavelengths must increase strictly with index")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "centers", ctr)
        object.__setattr__(self, "q_factors", q)
        object.__setattr__(self, "_pos", {int(k): i for i, k in enumerate(idx)})

    @property
    def peaks(self) -> list[tuple[int, float, float]]:
        return [(int(k), float(c), float(q)) for k, c, q in
                zip(self.indices, self.centers, self.q_factors)]

    @property
    def n_side(self) -> int:
        return int(min(-self.indices.min(), self.indices.max()))

    def center(self, index: int) -> float:
        return float(self.centers[self._pos[index]])

    def fwhm(self, index: int = 0) -> float:
        i = self._pos[index]
        return float(self.centers[i] / self.q_factors[i])

    def span(self) -> tuple[float, float]:
        """Wavelength range on which spectra are defined (half a spacing past the end peaks)."""
        lo = self.centers[0] - 0.5 * (self.centers[1] - self.centers[0])
        hi = self.centers[-1] + 0.5 * (self.centers[-1] - self.centers[-2])
        return float(lo), float(hi)


def resonance_comb(params: RingParams, temperature: float, n_side: int) -> ResonanceComb:
    """Resonance comb of ``2*n_side + 1`` peaks centred on the pump resonance.

    Every peak is shifted by ``thermal_shift * (temperature - anchor_temperature)``.
    """
    params.validate()
    if n_side < 1:
        raise ValueError("n_side must be >= 1")
    k = np.arange(-n_side, n_side + 1)
    inv_step = 1.0 / (params.circumference_nm * params.group_index)
    centers = 1.0 / (1.0 / params.anchor_wavelength - k * inv_step)
    centers = centers + params.thermal_shift * (temperature - params.anchor_temperature)
    return ResonanceComb(k, centers, np.full(k.shape, float(params.q_factor)))


def _lorentzians(params: RingParams, comb: ResonanceComb, wl: np.ndarray) -> np.ndarray:
    x = 2 * comb.q_factors[:, None] * (wl[None, :] - comb.centers[:, None]) / comb.centers[:, None]
    return params.t_drop_peak / (1 + x**2)


def drop_transmission(params: RingParams, comb: ResonanceComb, wavelength):
    """Add-to-drop power transmission at ``wavelength`` (scalar or array).

    Each resonance is a Lorentzian ``t_peak / (1 + (2Q(lambda - lambda0)/lambda0)**2)``.
    The dominant (nearest) resonance is taken at every wavelength, which keeps
    peak values and line symmetry exact; the neighbouring tails it ignores are
    below 1e-3 of the peak for Q above a few thousand.
    """
    wl = np.asarray(wavelength, dtype=float)
    lo, hi = comb.span()
    if np.any(wl < lo) or np.any(wl > hi):
        raise ValueError(f"wavelength outside comb span [{lo:.4f}, {hi:.4f}] nm")
    flat = np.atleast_1d(wl).ravel()
    t = _lorentzians(params, comb, flat).max(axis=0)
    t = np.clip(t, 0.0, 1.0)
    return float(t[0]) if wl.ndim == 0 else t.reshape(wl.shape)


def backscatter_factor(r: float, phase) -> np.ndarray:
    """``|1 + r e^{i phase}|**2``, the forward intracavity power factor."""
    phase = np.asarray(phase, dtype=float)
    return 1 + r**2 + 2 * r * np.cos(phase)


def double_pump_intensity(params: RingParams, comb: ResonanceComb, wavelength, phase: float):
    """Forward drop intensity for one realisation of the counter-pump phase.

    Normalised by ``1 + r**2`` so that the phase-averaged value equals
    :func:`drop_transmission`.
    """
    r = params.backscatter_r
    t = drop_transmission(params, comb, wavelength)
    delta = phase + params.backscatter_phase_slope * (np.asarray(wavelength) - comb.center(0))
    return np.minimum(t * backscatter_factor(r, delta) / (1 + r**2), 1.0)


def double_pump_drop_spectrum(params: RingParams, comb: ResonanceComb, wavelength_grid,
                              phase_samples: int, rng_seed: int) -> np.ndarray:
    """Mean and spread of the drop spectrum under coherent double-port pumping.

    Each sample is one spectral scan with a fixed pump phase drawn uniformly
    from ``[0, 2*pi)``. Returns an ``(n, 3)`` array with columns
    ``wavelength_nm, mean_T, std_T`` (population standard deviation).
    """
    grid = np.asarray(wavelength_grid, dtype=float).ravel()
    if grid.size == 0:
        raise ValueError("wavelength grid is empty")
    if phase_samples < 2:
        raise ValueError("phase_samples must be >= 2")
    r = params.backscatter_r
    t = drop_transmission(params, comb, grid)
    rng = np.random.default_rng(rng_seed)
    phases = rng.uniform(0.0, 2 * np.pi, size=phase_samples)
    delta = phases[:, None] + params.backscatter_phase_slope * (grid[None, :] - comb.center(0))
    factor = backscatter_factor(r, delta) / (1 + r**2)
    if np.any(t * factor > 1.0):
        # a scan cannot transmit more than the injected power
        scans = np.minimum(t * factor, 1.0)
        mean, std = scans.mean(axis=0), scans.std(axis=0)
    else:
        mean, std = t * factor.mean(axis=0), t * factor.std(axis=0)
    return np.column_stack([grid, mean, std])
