"""Partial-histogram-table meta construction: exactness at zero noise,
distribution match with the per-item tree composition, and suppression."""

import math

import numpy as np
import pytest
from scipy import stats as sstats

from contmech.known import known_base_run
from contmech.meta import PartialHistogramTable, QuadrantSelector, meta_run
from contmech.noise import NoiseSource
from contmech.releases import histogram_of_stream
from contmech.tree import TreeParams, cell_interval, decompose


def _random_events(rng, T, domain, p=0.35):
    return [{u for u in domain if rng.random() < p} for _ in range(T)]


def test_kr_noiseless_equals_known_base():
    events = [{"a"}, {"a", "b"}, {"b"}]
    params = TreeParams(T=3, r=2, tau=0.0)
    selector = QuadrantSelector(
        domain_known=True, restricted=True, delta0=2, domain=("a", "b")
    )
    got = meta_run(events, selector, 0.0, 0.5, params, NoiseSource(0))
    want = known_base_run(events, ["a", "b"], params, NoiseSource(0))
    assert [r.as_dict() for r in got] == [r.as_dict() for r in want]


def test_kr_per_round_distribution_matches_known_base():
    # both mechanisms sum |I_t| independent N(0, levels*tau^2) cell draws
    events = [{"a"}] * 8
    params = TreeParams(T=8, r=2, tau=1.0)
    selector = QuadrantSelector(
        domain_known=True, restricted=True, delta0=1, domain=("a",)
    )
    t = 7  # three cells
    meta_vals, base_vals = [], []
    for seed in range(2000):
        m = meta_run(events, selector, 1.0, 0.5, params, NoiseSource(seed))
        b = known_base_run(events, ["a"], params, NoiseSource(10_000 + seed))
        meta_vals.append(m[t - 1].as_dict()["a"] - t)
        base_vals.append(b[t - 1].as_dict()["a"] - t)
    expected_var = len(decompose(t, 2).cells) * params.levels
    assert abs(np.var(meta_vals) / expected_var - 1) < 0.15
    assert abs(np.var(base_vals) / expected_var - 1) < 0.15
    assert sstats.ks_2samp(meta_vals, base_vals).pvalue >= 0.01


def test_cell_histograms_match_brute_force():
    rng = np.random.default_rng(1)
    for r in (2, 3):
        for T in (7, 16, 64):
            events = _random_events(rng, T, ["a", "b", "c"])
            params = TreeParams(T=T, r=r, tau=0.0)
            selector = QuadrantSelector(
                domain_known=True, restricted=True, delta0=3, domain=("a", "b", "c")
            )
            table = PartialHistogramTable(
                [frozenset(e) for e in events], selector, 0.0, 0.5, params,
                NoiseSource(0),
            )
            for t in range(1, T + 1):
                for level, index in decompose(t, r).cells:
                    start, end = cell_interval(level, index, r)
                    want = histogram_of_stream(events[start - 1 : end], ("a", "b", "c"))
                    assert table.cell_counts(level, index) == want


def test_neighbor_streams_change_few_cell_histograms():
    rng = np.random.default_rng(2)
    domain = ("a", "b")
    for T in (8, 27):
        for r in (2, 3):
            events = _random_events(rng, T, domain)
            t0 = int(rng.integers(0, T))
            neighbor = list(events)
            neighbor[t0] = set()
            params = TreeParams(T=T, r=r, tau=0.0)
            selector = QuadrantSelector(
                domain_known=True, restricted=True, delta0=2, domain=domain
            )
            ta = PartialHistogramTable(
                [frozenset(e) for e in events], selector, 0.0, 0.5, params, NoiseSource(0)
            )
            tb = PartialHistogramTable(
                [frozenset(e) for e in neighbor], selector, 0.0, 0.5, params, NoiseSource(0)
            )
            changed = 0
            all_cells = {c for t in range(1, T + 1) for c in decompose(t, r).cells}
            for level, index in all_cells:
                if ta.cell_counts(level, index) != tb.cell_counts(level, index):
                    changed += 1
            assert changed <= params.levels


def test_unknown_quadrant_suppresses_below_threshold():
    # all counts sit at or below cutoff + 1 in every cell: nothing released
    events = [{"a"}, {"b"}, {"c"}, {"d"}]
    params = TreeParams(T=4, r=2, tau=0.0)
    selector = QuadrantSelector(
        domain_known=False, restricted=True, delta0=1, k_bar=2
    )
    rel = meta_run(events, selector, 0.0, 0.5, params, NoiseSource(0))
    assert all(not r.entries for r in rel)


def test_unknown_restricted_noiseless_aggregation_rule():
    # a label's round value is the sum of its surviving cell counts; cells
    # that suppressed it contribute zero
    events = [{"a"}, {"a"}, {"a"}, {"a"}, {"a"}, {"a"}, {"a"}, set()]
    params = TreeParams(T=8, r=2, tau=0.0)
    selector = QuadrantSelector(
        domain_known=False, restricted=True, delta0=1, k_bar=3
    )
    rel = meta_run(events, selector, 0.0, 0.5, params, NoiseSource(0))
    for t in (4, 6, 7):
        expected = 0.0
        for level, index in decompose(t, 2).cells:
            start, end = cell_interval(level, index, 2)
            partial = sum(1 for e in events[start - 1 : end] if "a" in e)
            if partial > 1:  # cell cutoff 0 (+1 threshold), strict
                expected += partial
        got = rel[t - 1].as_dict().get("a", 0.0)
        assert got == expected


def test_meta_quadrants_run_with_noise():
    rng = np.random.default_rng(3)
    events = _random_events(rng, 16, ["a", "b", "c"])
    params = TreeParams(T=16, r=2, tau=0.0)
    for quadrant, kwargs in [
        ("kr", dict(domain_known=True, restricted=True, delta0=3, domain=("a", "b", "c"))),
        ("ku", dict(domain_known=True, restricted=False, k=2, domain=("a", "b", "c"))),
        ("ur", dict(domain_known=False, restricted=True, delta0=3, k_bar=2)),
        ("uu", dict(domain_known=False, restricted=False, k=1, k_bar=2)),
    ]:
        selector = QuadrantSelector(**kwargs)
        rel = meta_run(events, selector, 1.0, 0.1, params, NoiseSource(4))
        assert len(rel) == 16


def test_selector_validation():
    with pytest.raises(ValueError):
        QuadrantSelector(domain_known=True, restricted=True, delta0=1)  # no domain
    with pytest.raises(ValueError):
        QuadrantSelector(domain_known=False, restricted=True, k_bar=2)  # no delta0
    with pytest.raises(ValueError):
        QuadrantSelector(domain_known=False, restricted=False, k=1)  # no k_bar


def test_ku_top_k_cells_limit_labels():
    events = [{"a", "b", "c"}] * 4
    params = TreeParams(T=4, r=2, tau=0.0)
    selector = QuadrantSelector(
        domain_known=True, restricted=False, k=1, domain=("a", "b", "c")
    )
    rel = meta_run(events, selector, 0.0, 0.5, params, NoiseSource(0))
    # noiseless: every cell picks the lexicographic max-count winner "a"
    for t, release in enumerate(rel, start=1):
        assert release.labels() == ["a"]
        assert release.as_dict()["a"] == float(t)
