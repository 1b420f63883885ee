import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringbin import detection as det
from ringbin.detection import (DetectorParams, Router, TimeTagStream, accidental_floor,
                               analytic_accidentals, apply_dead_time, car, coincidence_histogram,
                               read_histogram_csv, read_time_tags, simulate_streams,
                               window_count, write_histogram_csv, write_time_tags)
from ringbin.timebin import AmziConfig, TimeBinState

IDEAL = DetectorParams(0.0, dark_rate=0.0, jitter_sigma=0.0, dead_time=0.0)


def _naive_dead_time(tags, dead):
    keep, last = [], None
    for t in tags:
        ok = last is None or t - last >= dead
        keep.append(ok)
        if ok:
            last = t
    return np.array(keep, dtype=bool)


@given(st.lists(st.integers(0, 10_000), max_size=80), st.integers(0, 500))
def test_dead_time_matches_naive(raw, dead):
    tags = np.sort(np.array(raw, dtype=np.int64))
    assert np.array_equal(apply_dead_time(tags, dead), _naive_dead_time(tags, dead))


@given(st.lists(st.integers(0, 10_000), min_size=1, max_size=80), st.integers(1, 500),
       st.integers(0, 79))
def test_dead_time_carry(raw, dead, cut):
    tags = np.sort(np.array(raw, dtype=np.int64))
    cut = min(cut, tags.size)
    full = apply_dead_time(tags, dead)
    head = apply_dead_time(tags[:cut], dead)
    last = tags[:cut][head][-1] if head.any() else None
    tail = apply_dead_time(tags[cut:], dead, last)
    assert np.array_equal(np.concatenate([head, tail]), full)


@given(st.lists(st.lists(st.integers(-60, 100), max_size=25), min_size=1, max_size=6),
       st.lists(st.integers(0, 100), min_size=6, max_size=6))
def test_merge_seams_equals_global_sort(chunks, steps):
    blocks, base = [], 0
    for k, chunk in enumerate(chunks):
        tags = np.sort(np.array(chunk, dtype=np.int64) + base)
        blocks.append((tags, (np.arange(tags.size) % 3).astype(np.int8)))
        base += steps[k]
    tags, ports = det._merge_seams(blocks)
    cat = np.concatenate([b[0] for b in blocks])
    lab = np.concatenate([b[1] for b in blocks])
    order = np.argsort(cat, kind="stable")
    assert np.array_equal(tags, cat[order]) and np.array_equal(ports, lab[order])


def test_poisson_pair_count():
    rate, duration = 2e5, 2.0
    counts = [len(simulate_streams(rate, IDEAL, IDEAL, duration, seed)[0]) for seed in range(5)]
    mean = rate * duration
    for n in counts:
        assert abs(n - mean) <= 5 * np.sqrt(mean)
    s, i = simulate_streams(rate, IDEAL, IDEAL, duration, 1)
    assert np.array_equal(s.tags, i.tags)


def test_tags_sorted_and_bounded():
    d = DetectorParams(3.0, dark_rate=500.0, jitter_sigma=20.0, dead_time=40.0)
    s, i = simulate_streams(1e6, d, d, 1.0, 2)
    for st_ in (s, i):
        assert np.all(np.diff(st_.tags) >= 0)
        assert st_.tags.min() >= 0 and st_.tags.max() <= 10**12
        assert np.all(np.diff(st_.tags) >= 40_000)


def test_dark_count_rate():
    d = DetectorParams(0.0, dark_rate=5000.0, jitter_sigma=0.0, dead_time=0.0)
    s, _ = simulate_streams(0.0, d, d, 10.0, 3)
    assert abs(len(s) - 50_000) <= 5 * np.sqrt(50_000)


def test_accidental_oracle():
    d = DetectorParams(0.0, dark_rate=2e5, jitter_sigma=0.0, dead_time=0.0)
    s, i = simulate_streams(0.0, d, d, 20.0, 4)
    h = coincidence_histogram(s, i, 64.0, 6400.0)
    expected = analytic_accidentals(s, i, 64.0)
    floor = accidental_floor(h, 64.0)
    wing_bins = np.sum(np.abs(h.delays) > 320)
    assert abs(floor - expected) <= 5 * np.sqrt(expected / wing_bins)


def test_jitter_width():
    d = DetectorParams(0.0, dark_rate=0.0, jitter_sigma=30.0, dead_time=0.0)
    s, i = simulate_streams(1e5, d, d, 1.0, 5)
    delays = det.pair_delays(s, i, 300.0)
    assert np.std(delays) == pytest.approx(30 * np.sqrt(2), rel=0.03)


def test_histogram_swap_invariance():
    d = DetectorParams(1.0, dark_rate=1e4, jitter_sigma=25.0, dead_time=10.0)
    s, i = simulate_streams(3e5, d, d, 1.0, 6)
    for w in (64.0, 50.0):
        a = coincidence_histogram(s, i, w, 3200.0)
        b = coincidence_histogram(i, s, w, 3200.0)
        assert np.array_equal(a.counts, b.counts[::-1])
        assert car(a, w) == car(b, w)


def test_window_count_is_centre_bin():
    d = DetectorParams(2.0, dark_rate=1e4, jitter_sigma=12.0, dead_time=40.0)
    s, i = simulate_streams(5e5, d, d, 1.0, 7)
    h = coincidence_histogram(s, i, 64.0, 640.0)
    assert window_count(s, i, 64.0) == h.count_at(0.0)
    assert window_count(s, i, 64.0, center=128.0) == h.count_at(128.0)


def test_car_edge_cases():
    h = det.CoincidenceHistogram(64.0, np.arange(-20, 21) * 64.0,
                                 np.where(np.arange(41) == 20, 50, 0), 1280.0)
    assert car(h) == float("inf")
    flat = det.CoincidenceHistogram(64.0, np.arange(-20, 21) * 64.0, np.full(41, 4), 1280.0)
    assert car(flat) == pytest.approx(1.0)


def test_router_ports_and_delays():
    state = TimeBinState(visibility_source=1.0)
    router = Router(state, AmziConfig(), ("X0",), ("X0", "X1"))
    # low rate: accidentals between different pairs stay negligible
    s, i = simulate_streams(4e4, IDEAL, IDEAL, 5.0, 8, router)
    assert set(np.unique(s.ports)) == {0}
    assert set(np.unique(i.ports)) == {0, 1}
    delays = det.pair_delays(s, i, 2000.0)
    assert np.isin(delays, (-800, 0, 800)).mean() >= 0.999
    # theta = 0: constructive on X0-X'0, dark on X0-X'1
    c00 = window_count(s.select("X0"), i.select("X0"), 64.0)
    c01 = window_count(s.select("X0"), i.select("X1"), 64.0)
    assert c00 > 1000 and c01 <= 2


def test_seed_determinism():
    d = DetectorParams(5.0, dark_rate=1e3, jitter_sigma=12.0, dead_time=40.0)
    a = simulate_streams(2e6, d, d, 1.0, 9)
    b = simulate_streams(2e6, d, d, 1.0, 9)
    c = simulate_streams(2e6, d, d, 1.0, 10)
    assert np.array_equal(a[0].tags, b[0].tags) and np.array_equal(a[1].tags, b[1].tags)
    assert not np.array_equal(a[0].tags, c[0].tags)


def test_tag_file_round_trip(tmp_path):
    d = DetectorParams(10.0)
    s, i = simulate_streams(1e6, d, d, 0.05, 11)
    path = tmp_path / "tags.txt"
    write_time_tags(path, [s, i], seed=11)
    back = read_time_tags(path)
    assert np.array_equal(back["signal"].tags, s.tags)
    assert np.array_equal(back["idler"].tags, i.tags)
    assert back["signal"].duration == s.duration
    assert path.read_text().splitlines()[:3] == ["# duration_s=0.05", "# seed=11", "channel_id, tag_ps"]


def test_histogram_csv_round_trip(tmp_path):
    h = det.CoincidenceHistogram(64.0, np.arange(-5, 6) * 64.0, np.arange(11), 320.0)
    path = tmp_path / "h.csv"
    write_histogram_csv(path, h)
    back = read_histogram_csv(path)
    assert np.array_equal(back.delays, h.delays) and np.array_equal(back.counts, h.counts)
    assert path.read_text().splitlines()[0] == "delay_ps,counts"


def test_invalid_inputs():
    with pytest.raises(ValueError):
        simulate_streams(1.0, IDEAL, IDEAL, 0.0, 1)
    with pytest.raises(ValueError):
        simulate_streams(-1.0, IDEAL, IDEAL, 1.0, 1)
    assert DetectorParams(-1.0).problems()
    with pytest.raises(ValueError):
        TimeTagStream(np.arange(3), 1.0, "x").select("X0")
