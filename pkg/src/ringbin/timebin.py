"""Time-bin entangled state and the 2x4 AMZI decoder.

Each decoder splits a photon between the Z outputs (arrival-time
measurement) and an asymmetric Mach-Zehnder whose two X outputs measure
the early/late phase. Coincidences whose relative arrival difference is 0
(short-short or long-long) interfere; those at +/-tau do not.

Every coupler of an AMZI has the same power split ``kappa`` (fraction into
the short arm, and bar-port transmission at the output). ``kappa = 0.5`` is
the ideal decoder; other values give port-dependent fringe contrast.

Port codes used by the vectorised router: 0 = X0, 1 = X1, 2 = Z, -1 = lost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CLASSICAL_VISIBILITY_BOUND = 1 / np.sqrt(2)

PORT_NAMES = ("X0", "X1", "Z")
LOST = -1


@dataclass(frozen=True)
class TimeBinState:
    """Two-time-bin pair state ``(|t,t> + e^{i theta}|t+tau,t+tau>)/sqrt(2)``.

    ``visibility_source`` scales the interference term; it lumps together
    pump coherence and multi-pair degradation.
    """

    delay_tau: float = 800.0
    relative_phase_theta: float = 0.0
    visibility_source: float = 1.0

    def problems(self) -> list[tuple[str, str]]:
        out = []
        if not self.delay_tau > 0:
            out.append(("delay_tau", "must be > 0"))
        if not 0 <= self.visibility_source <= 1:
            out.append(("visibility_source", "must lie in [0, 1]"))
        return out

    def amplitudes(self) -> np.ndarray:
        """Amplitudes of the early-early and late-late components."""
        return np.array([1.0, np.exp(1j * self.relative_phase_theta)]) / np.sqrt(2)


@dataclass(frozen=True)
class AmziConfig:
    theta1: float = 0.0
    theta2: float = 0.0
    pump_phase_diff: float = 0.0
    intrinsic_loss_db: float = 6.0
    excess_loss_db: float = 2.0
    phase_per_kelvin: float = 2 * np.pi / 0.5
    reference_temperature: float = 25.0
    signal_coupler: float = 0.5
    idler_coupler: float = 0.5

    def problems(self) -> list[tuple[str, str]]:
        out = []
        if not self.intrinsic_loss_db >= 0:
            out.append(("intrinsic_loss_db", "must be >= 0"))
        if not self.excess_loss_db >= 0:
            out.append(("excess_loss_db", "must be >= 0"))
        for name in ("signal_coupler", "idler_coupler"):
            if not 0 < getattr(self, name) < 1:
                out.append((name, "must lie in (0, 1)"))
        return out

    @property
    def total_phase(self) -> float:
        return self.theta1 + self.theta2 + self.pump_phase_diff

    @property
    def survival(self) -> float:
        """Probability a photon is not absorbed by the decoder's excess loss."""
        return 10 ** (-self.excess_loss_db / 10)

    @property
    def x_fraction(self) -> float:
        """Share of photons sent to the X-basis AMZI.

        The intrinsic loss is the share reaching one given X output, which is
        half the X-basis share.
        """
        return min(1.0, 2 * 10 ** (-self.intrinsic_loss_db / 10))


@dataclass(frozen=True)
class XBasisProbabilities:
    p00: float
    p01: float
    p10: float
    p11: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.p00, self.p01], [self.p10, self.p11]])


def _port_amplitudes(kappa: float) -> tuple[np.ndarray, np.ndarray]:
    """Short-arm and long-arm amplitudes reaching X0 and X1."""
    t, r = np.sqrt(kappa), 1j * np.sqrt(1 - kappa)
    short = np.array([t * t, r * t])
    long_ = np.array([r * r, t * r])
    return short, long_


def _central_table(amzi: AmziConfig, visibility: float, phase: float) -> np.ndarray:
    """Unnormalised 2x2 port-pair weights for zero relative delay."""
    sa, sb = _port_amplitudes(amzi.signal_coupler)
    ia, ib = _port_amplitudes(amzi.idler_coupler)
    early = np.outer(sa, ia)
    late = np.outer(sb, ib) * np.exp(1j * phase)
    return np.abs(early) ** 2 + np.abs(late) ** 2 + 2 * visibility * np.real(np.conj(early) * late)


def xbasis_probabilities(state: TimeBinState, amzi: AmziConfig) -> XBasisProbabilities:
    """Port-pair probabilities for interfering (zero relative delay) coincidences.

    For ideal couplers this is ``(1 + V cos(phase))/4`` on X0-X'0 and X1-X'1
    and ``(1 - V cos(phase))/4`` on the crossed pairs, with phase
    ``theta1 + theta2 + pump_phase_diff``.
    """
    table = _central_table(amzi, state.visibility_source, amzi.total_phase)
    table = table / table.sum()
    return XBasisProbabilities(*(float(v) for v in table.ravel()))


def phase_from_temperature(amzi: AmziConfig, plc_temperature) -> np.ndarray:
    """Signal AMZI phase set by the PLC temperature (linear)."""
    return amzi.phase_per_kelvin * (np.asarray(plc_temperature, dtype=float) - amzi.reference_temperature)


def zbasis_coincidence_visibility(state: TimeBinState, background_ratio: float) -> float:
    """Arrival-time correlation contrast ``1 / (1 + 2 * background_ratio)``."""
    if background_ratio < 0:
        raise ValueError("background_ratio must be >= 0")
    if np.isinf(background_ratio):
        return 0.0
    return 1.0 / (1.0 + 2.0 * background_ratio)


def exceeds_classical_bound(visibility: float) -> bool:
    return bool(visibility > CLASSICAL_VISIBILITY_BOUND)


def outcome_table(state: TimeBinState, amzi: AmziConfig):
    """Joint routing distribution for a pair entering both decoders.

    Returns ``(s_port, s_delay, i_port, i_delay, prob)`` arrays covering every
    outcome; ``prob`` sums to one. Losses are not included.
    """
    tau = state.delay_tau
    xs = xi = amzi.x_fraction
    sa, sb = _port_amplitudes(amzi.signal_coupler)
    ia, ib = _port_amplitudes(amzi.idler_coupler)
    # single-photon (port, delay) weights given the X basis
    s_single = [(j, 0.0, abs(sa[j]) ** 2) for j in (0, 1)] + [(j, tau, abs(sb[j]) ** 2) for j in (0, 1)]
    i_single = [(k, 0.0, abs(ia[k]) ** 2) for k in (0, 1)] + [(k, tau, abs(ib[k]) ** 2) for k in (0, 1)]

    rows = [(2, 0.0, 2, 0.0, (1 - xs) * (1 - xi))]
    rows += [(2, 0.0, k, d, (1 - xs) * xi * w) for k, d, w in i_single]
    rows += [(j, d, 2, 0.0, xs * (1 - xi) * w) for j, d, w in s_single]

    central = _central_table(amzi, state.visibility_source, amzi.total_phase)
    k_s, k_i = amzi.signal_coupler, amzi.idler_coupler
    early_share = k_s * k_i / (k_s * k_i + (1 - k_s) * (1 - k_i))
    for j in (0, 1):
        for k in (0, 1):
            w = xs * xi * central[j, k]
            rows.append((j, 0.0, k, 0.0, w * early_share))
            rows.append((j, tau, k, tau, w * (1 - early_share)))
            rows.append((j, 0.0, k, tau, xs * xi * abs(sa[j]) ** 2 * abs(ib[k]) ** 2))
            rows.append((j, tau, k, 0.0, xs * xi * abs(sb[j]) ** 2 * abs(ia[k]) ** 2))

    s_port, s_delay, i_port, i_delay, prob = (np.array(c) for c in zip(*rows))
    return s_port.astype(int), s_delay, i_port.astype(int), i_delay, prob


def route_pairs(n: int, state: TimeBinState, amzi: AmziConfig, rng: np.random.Generator):
    """Route ``n`` pairs through both decoders, including excess loss.

    Returns ``(s_port, s_delay, i_port, i_delay)``; a dropped photon has port
    ``LOST``.
    """
    s_port, s_delay, i_port, i_delay, prob = outcome_table(state, amzi)
    pick = rng.choice(prob.size, size=n, p=prob / prob.sum())
    sp, ip = s_port[pick].copy(), i_port[pick].copy()
    sp[rng.random(n) >= amzi.survival] = LOST
    ip[rng.random(n) >= amzi.survival] = LOST
    return sp, s_delay[pick], ip, i_delay[pick]


def amzi_route(event_time: float, state: TimeBinState, amzi: AmziConfig,
               rng: np.random.Generator):
    """Route one pair created at ``event_time`` (ps).

    Returns ``((signal_port, signal_time), (idler_port, idler_time))`` with
    ``None`` in place of a dropped photon.
    """
    sp, sd, ip, idl = route_pairs(1, state, amzi, rng)
    sig = None if sp[0] == LOST else (PORT_NAMES[sp[0]], event_time + sd[0])
    idr = None if ip[0] == LOST else (PORT_NAMES[ip[0]], event_time + idl[0])
    return sig, idr
