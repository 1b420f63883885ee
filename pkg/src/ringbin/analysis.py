"""Sinusoidal fringe fitting, visibilities and the entanglement bound.

The fit model is ``y = C (1 + V cos(2 pi (x - x_ref) / T + phi))``, solved
as ``mean + amplitude * cos(...)`` by weighted Levenberg-Marquardt. The
visibility error is first-order propagation of ``amplitude / mean`` through
the parameter covariance (weights are absolute, so the covariance is not
rescaled by the reduced chi-square).
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import least_squares

from .timebin import CLASSICAL_VISIBILITY_BOUND

MAX_FIT_EVALUATIONS = 200


class FitError(RuntimeError):
    """A fringe fit failed to converge or its input is unusable."""


@dataclass(frozen=True)
class FringeFit:
    mean_level: float
    amplitude: float
    phase_offset: float
    period: float
    visibility: float
    visibility_err: float
    x_ref: float = 0.0
    mean_err: float = 0.0
    amplitude_err: float = 0.0
    phase_err: float = 0.0
    peak_err: float = 0.0
    chi2: float = 0.0
    dof: int = 0
    residuals: tuple = field(default=(), repr=False)

    @property
    def peak(self) -> float:
        return self.mean_level + self.amplitude

    def model(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.mean_level + self.amplitude * np.cos(2 * np.pi * (x - self.x_ref) / self.period
                                                         + self.phase_offset)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["residuals"] = list(self.residuals)
        return d


def _linear_fit(x, y, w, period):
    """Weighted fit of ``c + a cos(wx) + b sin(wx)`` at fixed period; returns (coef, chi2, cov)."""
    om = 2 * np.pi / period
    A = np.column_stack([np.ones_like(x), np.cos(om * x), np.sin(om * x)])
    Aw = A * w[:, None]
    coef, *_ = np.linalg.lstsq(Aw, y * w, rcond=None)
    chi2 = float(np.sum((Aw @ coef - y * w) ** 2))
    cov = np.linalg.pinv(Aw.T @ Aw)
    return coef, chi2, cov


def _period_guess(x, y, w):
    """Best single-sinusoid period on a log grid (generalised periodogram)."""
    span = x.max() - x.min()
    dx = np.median(np.diff(np.unique(x)))
    periods = np.geomspace(2.5 * dx, 1.5 * span, 300)
    chi = [_linear_fit(x, y, w, T)[1] for T in periods]
    return float(periods[int(np.argmin(chi))])


def fit_sinusoid(x, y, sigma=None) -> FringeFit:
    """Weighted least-squares sinusoid fit with unknown period.

    ``sigma`` defaults to Poisson ``sqrt(max(y, 1))``. Needs at least five
    points spanning a full period. Flat data give ``V = 0`` with the error of
    the fixed-period linear fit; all-zero data and non-convergence raise
    :class:`FitError`.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if x.size < 5:
        raise FitError(f"need at least 5 points, got {x.size}")
    if sigma is None:
        sigma = np.sqrt(np.maximum(y, 1.0))
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), x.shape)
    if np.any(~(sigma > 0)):
        raise ValueError("sigma must be > 0")
    if not np.any(y != 0):
        raise FitError("all counts are zero; no fringe to fit")
    w = 1.0 / sigma
    x_ref = float(0.5 * (x.min() + x.max()))
    xc = x - x_ref

    if np.ptp(y) == 0:
        period = float(np.ptp(x))
        coef, chi2, cov = _linear_fit(xc, y, w, period)
        amp_err = float(np.sqrt(0.5 * (cov[1, 1] + cov[2, 2])))
        mean = float(y[0])
        return FringeFit(mean, 0.0, 0.0, period, 0.0, amp_err / mean, x_ref,
                         mean_err=float(np.sqrt(cov[0, 0])), amplitude_err=amp_err,
                         phase_err=float("inf"), peak_err=float(np.hypot(np.sqrt(cov[0, 0]), amp_err)),
                         chi2=chi2, dof=x.size - 4, residuals=tuple(np.zeros(x.size)))

    period0 = _period_guess(xc, y, w)
    (c, a, b), _, _ = _linear_fit(xc, y, w, period0)
    p0 = np.array([c, np.hypot(a, b), period0, np.arctan2(-b, a)])

    def resid(p):
        mean, amp, T, phi = p
        return (mean + amp * np.cos(2 * np.pi * xc / T + phi) - y) * w

    scale = np.array([max(abs(c), 1.0), max(abs(p0[1]), 1e-3 * abs(c), 1e-12), period0, 1.0])
    sol = least_squares(resid, p0, method="lm", x_scale=scale, max_nfev=MAX_FIT_EVALUATIONS,
                        xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if sol.status <= 0 or not np.all(np.isfinite(sol.x)):
        raise FitError(f"sinusoid fit did not converge ({sol.message}); "
                       f"chi2 = {2 * sol.cost:.4g}, residuals = {np.round(sol.fun, 4).tolist()}")
    mean, amp, T, phi = sol.x
    if T < 0:
        T, phi = -T, -phi
    if amp < 0:
        amp, phi = -amp, phi + np.pi
    phi = float(np.angle(np.exp(1j * phi)))
    if not mean > 0:
        raise FitError(f"fitted mean level {mean:.4g} is not positive")

    J = sol.jac
    try:
        cov = np.linalg.inv(J.T @ J)
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(J.T @ J)
    grad = np.array([-amp / mean**2, 1.0 / mean, 0.0, 0.0])
    v_err = float(np.sqrt(max(grad @ cov @ grad, 0.0)))
    g_peak = np.array([1.0, 1.0, 0.0, 0.0])
    chi2 = float(np.sum(sol.fun**2))
    return FringeFit(float(mean), float(amp), phi, float(T), float(amp / mean), v_err, x_ref,
                     mean_err=float(np.sqrt(cov[0, 0])), amplitude_err=float(np.sqrt(cov[1, 1])),
                     phase_err=float(np.sqrt(cov[3, 3])),
                     peak_err=float(np.sqrt(max(g_peak @ cov @ g_peak, 0.0))),
                     chi2=chi2, dof=x.size - 4, residuals=tuple((sol.fun * sigma).tolist()))


# --- sweeps -----------------------------------------------------------------

@dataclass(frozen=True)
class FringeSweep:
    """X-basis coincidence counts versus PLC temperature.

    ``counts_00`` and ``counts_01`` have shape ``(points, repeats)``;
    ``accumulation`` is the time (s) of one measurement at each point.
    """

    temperature: np.ndarray
    counts_00: np.ndarray
    counts_01: np.ndarray
    accumulation: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.temperature, dtype=float)
        c0 = np.atleast_2d(np.asarray(self.counts_00))
        c1 = np.atleast_2d(np.asarray(self.counts_01))
        if c0.shape[0] != t.size:
            c0, c1 = c0.T, c1.T
        acc = np.broadcast_to(np.asarray(self.accumulation, dtype=float), t.shape).copy()
        if c0.shape != c1.shape or c0.shape[0] != t.size:
            raise ValueError("count arrays must have shape (points, repeats)")
        if np.any(acc <= 0):
            raise ValueError("accumulation must be > 0")
        if np.any(c0 < 0) or np.any(c1 < 0):
            raise ValueError("counts must be >= 0")
        object.__setattr__(self, "temperature", t)
        object.__setattr__(self, "counts_00", c0)
        object.__setattr__(self, "counts_01", c1)
        object.__setattr__(self, "accumulation", acc)

    @property
    def repeats(self) -> int:
        return self.counts_00.shape[1]

    @property
    def reference_accumulation(self) -> float:
        return float(np.median(self.accumulation))

    def column(self, which: str, weights: str = "poisson"):
        """``(x, y, sigma)`` for fitting: mean counts per measurement, scaled to the reference accumulation.

        ``weights="poisson"`` uses the Poisson error of the mean;
        ``weights="repeats"`` uses the repeat standard error, floored at Poisson.
        """
        counts = {"00": self.counts_00, "01": self.counts_01}[which].astype(float)
        scale = self.reference_accumulation / self.accumulation
        y = counts.mean(axis=1) * scale
        r = self.repeats
        sigma = np.sqrt(np.maximum(counts.mean(axis=1), 1.0) / r) * scale
        if weights == "repeats" and r > 1:
            sigma = np.maximum(sigma, counts.std(axis=1, ddof=1) / np.sqrt(r) * scale)
        elif weights not in ("poisson", "repeats"):
            raise ValueError(f"unknown weights {weights!r}")
        return self.temperature, y, sigma


class VisibilityPair(NamedTuple):
    fit_00: FringeFit
    fit_01: FringeFit
    phase_gap: float
    phase_gap_err: float
    anti_phase: bool


def visibility_pair(sweep: FringeSweep, weights: str = "poisson") -> VisibilityPair:
    """Independent fits of the X0-X'0 and X0-X'1 fringes plus an anti-phase diagnostic.

    ``phase_gap`` is the departure of the phase difference from pi, evaluated
    at the common sweep centre.
    """
    f00 = fit_sinusoid(*sweep.column("00", weights))
    f01 = fit_sinusoid(*sweep.column("01", weights))
    gap = float(np.angle(np.exp(1j * (f01.phase_offset - f00.phase_offset - np.pi))))
    err = float(np.hypot(f00.phase_err, f01.phase_err))
    return VisibilityPair(f00, f01, gap, err, bool(abs(gap) <= 3 * err))


def entanglement_check(fit: FringeFit, k: float = 1.0) -> str:
    """``"entangled"`` iff ``V - k * err`` exceeds ``1/sqrt(2)``."""
    if fit.visibility - k * fit.visibility_err > CLASSICAL_VISIBILITY_BOUND:
        return "entangled"
    return "inconclusive"


def peak_rate(sweep: FringeSweep, weights: str = "poisson") -> tuple[float, float]:
    """Average of the two fitted fringe peaks, in coincidences per second, with its error."""
    pair = visibility_pair(sweep, weights)
    acc = sweep.reference_accumulation
    rate = 0.5 * (pair.fit_00.peak + pair.fit_01.peak) / acc
    err = 0.5 * np.hypot(pair.fit_00.peak_err, pair.fit_01.peak_err) / acc
    return float(rate), float(err)


def rate_ratio(sweep_a: FringeSweep, sweep_b: FringeSweep) -> float:
    """Peak coincidence rate of ``sweep_b`` relative to ``sweep_a``."""
    return peak_rate(sweep_b)[0] / peak_rate(sweep_a)[0]


def rate_ratio_with_error(sweep_a: FringeSweep, sweep_b: FringeSweep) -> tuple[float, float]:
    ra, ea = peak_rate(sweep_a)
    rb, eb = peak_rate(sweep_b)
    ratio = rb / ra
    return ratio, ratio * float(np.hypot(ea / ra, eb / rb))


# --- files ------------------------------------------------------------------

SWEEP_COLUMNS = ["temperature_C", "counts_00", "counts_01", "accumulation_s", "repeats"]


def write_sweep_csv(path, sweep: FringeSweep) -> None:
    """One row per measurement; ``repeats`` is the number of measurements at that temperature."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for t, row0, row1, acc in zip(sweep.temperature, sweep.counts_00, sweep.counts_01,
                                      sweep.accumulation):
            for c0, c1 in zip(row0, row1):
                w.writerow([f"{t:.6f}", int(c0), int(c1), f"{acc:g}", sweep.repeats])


def read_sweep_csv(path) -> FringeSweep:
    rows: dict[float, list] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(SWEEP_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for lineno, rec in enumerate(reader, 2):
            try:
                t = float(rec["temperature_C"])
                entry = (int(rec["counts_00"]), int(rec["counts_01"]),
                         float(rec["accumulation_s"]), int(rec["repeats"]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            rows.setdefault(t, []).append(entry)
    temps = sorted(rows)
    reps = {len(rows[t]) for t in temps}
    if len(reps) != 1:
        raise ValueError(f"{path}: unequal repeats per temperature")
    for t in temps:
        if any(e[3] != len(rows[t]) for e in rows[t]):
            raise ValueError(f"{path}: repeats column disagrees with rows at {t}")
    c0 = np.array([[e[0] for e in rows[t]] for t in temps])
    c1 = np.array([[e[1] for e in rows[t]] for t in temps])
    acc = np.array([rows[t][0][2] for t in temps])
    return FringeSweep(np.array(temps), c0, c1, acc)


def fit_report(pair: VisibilityPair, k: float = 1.0) -> dict:
    """JSON-ready report of both fits with verdicts and the anti-phase diagnostic."""
    out = {}
    for name, fit in (("00", pair.fit_00), ("01", pair.fit_01)):
        d = fit.to_dict()
        d["verdict"] = entanglement_check(fit, k)
        out[name] = d
    out["phase_gap"] = pair.phase_gap
    out["phase_gap_err"] = pair.phase_gap_err
    out["anti_phase"] = pair.anti_phase
    return out


def write_fit_json(path, pair: VisibilityPair, k: float = 1.0) -> None:
    with open(path, "w") as fh:
        json.dump(fit_report(pair, k), fh, indent=2, sort_keys=True)
        fh.write("\n")
