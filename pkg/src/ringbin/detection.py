"""Time-tag simulation for a signal/idler detector pair and coincidence analysis.

Tags are integer picoseconds. Pair creation is a Poisson process; only pairs
that leave at least one recorded photon are ever drawn (splitting a Poisson
process by independent per-event marks keeps it Poisson), so the cost scales
with the number of clicks rather than the on-chip pair rate.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .timebin import LOST, PORT_NAMES, AmziConfig, TimeBinState, outcome_table

PS_PER_S = 10**12


@dataclass(frozen=True)
class DetectorParams:
    """One detection channel. ``dark_rate`` is per detector; ``dead_time`` is in ns."""

    channel_loss_db: float
    dark_rate: float = 100.0
    jitter_sigma: float = 12.0
    dead_time: float = 40.0

    def problems(self) -> list[tuple[str, str]]:
        return [(name, "must be >= 0") for name in
                ("channel_loss_db", "dark_rate", "jitter_sigma", "dead_time")
                if not getattr(self, name) >= 0]

    @property
    def transmission(self) -> float:
        return 10 ** (-self.channel_loss_db / 10)


@dataclass(frozen=True)
class Router:
    """AMZI decoders in front of the detectors.

    ``signal_ports`` / ``idler_ports`` list the decoder outputs (names from
    ``PORT_NAMES``) that carry a detector; photons leaving other outputs are
    never recorded.
    """

    state: TimeBinState
    amzi: AmziConfig
    signal_ports: tuple[str, ...] = ("X0", "X1", "Z")
    idler_ports: tuple[str, ...] = ("X0", "X1", "Z")


@dataclass
class TimeTagStream:
    tags: np.ndarray
    duration: float
    channel_id: str
    ports: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.tags = np.asarray(self.tags, dtype=np.int64)
        if self.ports is not None:
            self.ports = np.asarray(self.ports, dtype=np.int8)
            if self.ports.shape != self.tags.shape:
                raise ValueError("ports must match tags")

    def __len__(self):
        return self.tags.size

    def select(self, port: str) -> "TimeTagStream":
        """Sub-stream of the detector on decoder output ``port``."""
        if self.ports is None:
            raise ValueError(f"stream {self.channel_id!r} carries no port labels")
        code = PORT_NAMES.index(port)
        mask = self.ports == code
        return TimeTagStream(self.tags[mask], self.duration, f"{self.channel_id}:{port}")

    @property
    def rate(self) -> float:
        return self.tags.size / self.duration


def apply_dead_time(tags: np.ndarray, dead_ps: float, last: int | None = None) -> np.ndarray:
    """Non-paralysable dead time on sorted tags; returns the kept-tag mask.

    ``last`` is the most recent kept tag before ``tags`` (from an earlier block).
    """
    if last is not None and tags.size:
        return apply_dead_time(np.concatenate([[last], tags]), dead_ps)[1:]
    keep = np.ones(tags.size, dtype=bool)
    if dead_ps <= 0 or tags.size < 2:
        return keep
    # a tag farther than dead_ps from its raw predecessor is always kept
    close = np.flatnonzero(np.diff(tags) < dead_ps) + 1
    ref = 0
    for i in close:
        if keep[i - 1]:
            ref = tags[i - 1]
        if tags[i] - ref < dead_ps:
            keep[i] = False
        else:
            ref = tags[i]
    return keep


def _joint_outcomes(det_s: DetectorParams, det_i: DetectorParams, router: Router | None):
    """Outcome rows ``(s_port, s_delay, i_port, i_delay, prob)`` for one created pair.

    Ports are ``LOST`` for unrecorded photons; the all-lost outcome is omitted.
    """
    if router is None:
        s_port, s_delay, i_port, i_delay, prob = (np.zeros(1, int), np.zeros(1), np.zeros(1, int),
                                                  np.zeros(1), np.ones(1))
        s_ok = i_ok = np.ones(1, bool)
        surv = 1.0
    else:
        s_port, s_delay, i_port, i_delay, prob = outcome_table(router.state, router.amzi)
        s_ok = np.isin(s_port, [PORT_NAMES.index(p) for p in router.signal_ports])
        i_ok = np.isin(i_port, [PORT_NAMES.index(p) for p in router.idler_ports])
        surv = router.amzi.survival
    qs = np.where(s_ok, det_s.transmission * surv, 0.0)
    qi = np.where(i_ok, det_i.transmission * surv, 0.0)
    lost = np.full_like(s_port, LOST)
    rows = [
        (s_port, s_delay, i_port, i_delay, prob * qs * qi),
        (s_port, s_delay, lost, i_delay, prob * qs * (1 - qi)),
        (lost, s_delay, i_port, i_delay, prob * (1 - qs) * qi),
    ]
    cols = [np.concatenate(c) for c in zip(*rows)]
    nz = cols[4] > 0
    return [c[nz] for c in cols]


BLOCK_PAIRS = 1 << 20


def _sorted_uniform(a: float, b: float, m: int, rng: np.random.Generator) -> np.ndarray:
    # normalised exponential spacings are the order statistics of m uniforms
    gaps = np.cumsum(rng.standard_exponential(m + 1))
    return a + (b - a) * gaps[:-1] / gaps[-1]


def _side_block(created, delay, ports, det: DetectorParams, noise_rate, noise_ports, a, b, rng):
    """Clicks of one detector bank for pairs created in ``[a, b)`` ps, sorted."""
    hit = ports != LOST
    times = created[hit] + delay[hit]
    if det.jitter_sigma > 0:
        times = times + rng.normal(0.0, det.jitter_sigma, size=times.size)
    n_noise = rng.poisson(noise_rate * len(noise_ports) * (b - a) / PS_PER_S)
    times = np.concatenate([times, rng.uniform(a, b, size=n_noise)])
    labels = np.concatenate([ports[hit].astype(np.int8),
                             rng.choice(np.asarray(noise_ports, dtype=np.int8), size=n_noise)])
    tags = np.rint(times).astype(np.int64)
    order = np.argsort(tags, kind="stable")
    return tags[order], labels[order]


def _merge_seams(blocks):
    """Concatenate sorted blocks whose tails may overlap the next block's head.

    Only the out-of-order stretch around each seam is re-sorted (stably), which
    gives the same result as a stable sort of the whole concatenation.
    """
    tags = np.concatenate([b[0] for b in blocks])
    ports = np.concatenate([b[1] for b in blocks])
    blocks = [b for b in blocks if b[0].size]
    bounds = np.cumsum([0] + [b[0].size for b in blocks])
    stretches = []
    for j in range(1, len(blocks)):
        start, k, stop = bounds[j - 1], bounds[j], bounds[j + 1]
        if tags[k - 1] <= tags[k]:
            continue
        lo = start + int(np.searchsorted(tags[start:k], tags[k], side="right"))
        hi = k + int(np.searchsorted(tags[k:stop], tags[k - 1], side="left"))
        if hi == stop or (j > 1 and lo == start) or (stretches and lo <= stretches[-1][1]):
            # a block shorter than the overlap: give up on local repair
            order = np.argsort(tags, kind="stable")
            return tags[order], ports[order]
        stretches.append((lo, hi))
    for lo, hi in stretches:
        order = lo + np.argsort(tags[lo:hi], kind="stable")
        tags[lo:hi], ports[lo:hi] = tags[order], ports[order]
    return tags, ports


def _assemble(blocks, det: DetectorParams, t_ps: int):
    tags, ports = _merge_seams(blocks)
    inside = (tags >= 0) & (tags <= t_ps)
    if not inside.all():
        tags, ports = tags[inside], ports[inside]
    keep = np.zeros(tags.size, dtype=bool)
    dead_ps = det.dead_time * 1e3
    for code in (np.flatnonzero(np.bincount(ports)) if ports.size else ()):
        sel = np.flatnonzero(ports == code)
        keep[sel[apply_dead_time(tags[sel], dead_ps)]] = True
    return tags[keep], ports[keep]


def simulate_streams(pair_rate: float, det_signal: DetectorParams, det_idler: DetectorParams,
                     duration: float, seed: int, router: Router | None = None,
                     raman_background: float = 0.0) -> tuple[TimeTagStream, TimeTagStream]:
    """Simulate signal and idler click streams.

    Pairs arrive as a Poisson process at ``pair_rate``; each photon is kept
    with its channel transmission (and decoder survival when ``router`` is
    given), delayed by its AMZI arm, smeared by Gaussian jitter and rounded
    to 1 ps. Dark counts plus ``raman_background`` are added per detector and
    dead time is applied last, per detector.
    """
    if not duration > 0:
        raise ValueError("duration must be > 0")
    if not (np.isfinite(pair_rate) and pair_rate >= 0):
        raise ValueError("pair_rate must be finite and >= 0")
    rng = np.random.default_rng(seed)
    t_ps = int(round(duration * PS_PER_S))

    s_port, s_delay, i_port, i_delay, prob = _joint_outcomes(det_signal, det_idler, router)
    p_any = float(prob.sum())
    cdf = np.cumsum(prob / p_any) if p_any > 0 else None
    n = int(rng.poisson(pair_rate * duration * p_any)) if p_any > 0 else 0

    if router is None:
        s_noise = i_noise = (0,)
    else:
        s_noise = tuple(PORT_NAMES.index(p) for p in router.signal_ports)
        i_noise = tuple(PORT_NAMES.index(p) for p in router.idler_ports)
    s_bg = det_signal.dark_rate + raman_background
    i_bg = det_idler.dark_rate + raman_background

    n_blocks = max(1, -(-n // BLOCK_PAIRS))
    edges = np.linspace(0.0, t_ps, n_blocks + 1)
    per_block = rng.multinomial(n, np.full(n_blocks, 1.0 / n_blocks))
    s_blocks, i_blocks = [], []
    for a, b, m in zip(edges[:-1], edges[1:], per_block):
        created = _sorted_uniform(a, b, m, rng)
        pick = np.minimum(np.searchsorted(cdf, rng.random(m), side="right"), prob.size - 1) \
            if m else np.zeros(0, int)
        s_blocks.append(_side_block(created, s_delay[pick], s_port[pick], det_signal,
                                    s_bg, s_noise, a, b, rng))
        i_blocks.append(_side_block(created, i_delay[pick], i_port[pick], det_idler,
                                    i_bg, i_noise, a, b, rng))

    s_tags, s_ports = _assemble(s_blocks, det_signal, t_ps)
    i_tags, i_ports = _assemble(i_blocks, det_idler, t_ps)
    if router is None:
        s_ports = i_ports = None
    return (TimeTagStream(s_tags, duration, "signal", s_ports),
            TimeTagStream(i_tags, duration, "idler", i_ports))


@dataclass(frozen=True)
class CoincidenceHistogram:
    bin_width: float
    delays: np.ndarray
    counts: np.ndarray
    window: float

    def __post_init__(self):
        if not self.bin_width > 0:
            raise ValueError("bin_width must be > 0")
        if len(self.delays) != len(self.counts):
            raise ValueError("delays and counts differ in length")

    def count_at(self, delay: float) -> int:
        return int(self.counts[int(np.argmin(np.abs(self.delays - delay)))])


def _bin_index(d: np.ndarray, w: float) -> np.ndarray:
    # bin 0 is closed on both sides so that the binning is odd under d -> -d
    return (np.sign(d) * np.ceil(np.abs(d) / w - 0.5)).astype(np.int64)


def pair_delays(s: TimeTagStream, i: TimeTagStream, span: float) -> np.ndarray:
    """All differences ``t_i - t_s`` with ``|t_i - t_s| <= span``."""
    ts, ti = s.tags, i.tags
    # integer keys: float keys would make numpy cast all of ``ti`` on every call
    reach = np.int64(np.floor(span))
    lo = np.searchsorted(ti, ts - reach, side="left")
    hi = np.searchsorted(ti, ts + reach, side="right")
    n = hi - lo
    total = int(n.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    owner = np.repeat(np.arange(ts.size), n)
    offset = np.arange(total) - np.repeat(np.cumsum(n) - n, n)
    return ti[lo[owner] + offset] - ts[owner]


def coincidence_histogram(s: TimeTagStream, i: TimeTagStream, bin_width: float = 64.0,
                          span: float = 6400.0) -> CoincidenceHistogram:
    """Histogram of ``t_i - t_s`` over ``[-span, span]`` with bins centred on multiples of ``bin_width``."""
    if not bin_width > 0:
        raise ValueError("bin_width must be > 0")
    nb = int(np.floor(span / bin_width + 0.5))
    edge = (nb + 0.5) * bin_width
    d = pair_delays(s, i, edge)
    k = _bin_index(d, bin_width)
    k = k[np.abs(k) <= nb]
    counts = np.bincount(k + nb, minlength=2 * nb + 1).astype(np.int64)
    return CoincidenceHistogram(bin_width, np.arange(-nb, nb + 1) * bin_width, counts, span)


def window_count(s: TimeTagStream, i: TimeTagStream, bin_width: float = 64.0,
                 center: float = 0.0) -> int:
    """Coincidences in the single bin of width ``bin_width`` centred at ``center``."""
    # bin 0 is closed: integer delays with |d| <= bin_width / 2
    reach = np.int64(np.floor(bin_width / 2))
    ts = s.tags + np.int64(round(center))
    lo = np.searchsorted(i.tags, ts - reach, side="left")
    hi = np.searchsorted(i.tags, ts + reach, side="right")
    return int((hi - lo).sum())


def _peak_and_wings(h: CoincidenceHistogram, peak_window: float, exclude: float | None):
    peak = np.abs(h.delays) <= peak_window / 2
    if exclude is None:
        exclude = 5 * max(peak_window, h.bin_width)
    wings = np.abs(h.delays) > exclude
    if not peak.any():
        raise ValueError("peak window contains no bins")
    if not wings.any():
        raise ValueError("histogram has no wing bins outside the peak region")
    return peak, wings


def car(h: CoincidenceHistogram, peak_window: float = 64.0, exclude: float | None = None) -> float:
    """Coincidence-to-accidental ratio.

    Peak-window counts over the mean wing count of an equally wide window.
    Wing bins are those farther than ``exclude`` (default five peak windows)
    from zero delay. Returns ``inf`` when the wings are empty of counts.
    """
    peak, wings = _peak_and_wings(h, peak_window, exclude)
    accidental = h.counts[wings].mean() * peak.sum()
    if accidental == 0:
        return float("inf")
    return float(h.counts[peak].sum() / accidental)


def accidental_floor(h: CoincidenceHistogram, peak_window: float = 64.0,
                     exclude: float | None = None) -> float:
    """Mean counts per bin in the wings."""
    _, wings = _peak_and_wings(h, peak_window, exclude)
    return float(h.counts[wings].mean())


def analytic_accidentals(s: TimeTagStream, i: TimeTagStream, bin_width: float) -> float:
    """Expected accidental counts per bin, ``S1 * S2 * t_w * duration``."""
    return s.rate * i.rate * bin_width / PS_PER_S * s.duration


# --- text interchange -------------------------------------------------------

def write_time_tags(path, streams, seed: int | None = None) -> None:
    """Write streams as ``channel_id, tag_ps`` lines under a ``#`` metadata header."""
    streams = list(streams)
    duration = streams[0].duration if streams else 0.0
    entries = []
    for st in streams:
        if st.ports is None:
            entries.append((st.tags, np.full(st.tags.size, st.channel_id, dtype=object)))
        else:
            names = np.array([f"{st.channel_id}:{PORT_NAMES[c]}" for c in range(len(PORT_NAMES))],
                             dtype=object)
            entries.append((st.tags, names[st.ports]))
    with open(path, "w", newline="") as fh:
        fh.write(f"# duration_s={duration!r}\n# seed={seed}\n")
        fh.write("channel_id, tag_ps\n")
        for tags, names in entries:
            fh.writelines(f"{c}, {t}\n" for c, t in zip(names, tags.tolist()))


def read_time_tags(path) -> dict[str, TimeTagStream]:
    meta = {}
    chans: dict[str, list[int]] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                meta[key.strip()] = val.strip()
                continue
            if line.replace(" ", "") == "channel_id,tag_ps":
                continue
            try:
                cid, tag = (x.strip() for x in line.split(","))
                chans.setdefault(cid, []).append(int(tag))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed tag line {line!r}") from exc
    if "duration_s" not in meta:
        raise ValueError(f"{path}: missing duration_s header")
    duration = float(meta["duration_s"])
    return {cid: TimeTagStream(np.sort(np.array(t, dtype=np.int64)), duration, cid)
            for cid, t in chans.items()}


def write_histogram_csv(path, h: CoincidenceHistogram) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["delay_ps", "counts"])
        for d, c in zip(h.delays.tolist(), h.counts.tolist()):
            w.writerow([f"{d:g}", c])


def read_histogram_csv(path, bin_width: float | None = None) -> CoincidenceHistogram:
    data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    delays, counts = data[:, 0], data[:, 1].astype(np.int64)
    if bin_width is None:
        bin_width = float(np.median(np.diff(delays))) if delays.size > 1 else 1.0
    return CoincidenceHistogram(bin_width, delays, counts, float(np.abs(delays).max()))
