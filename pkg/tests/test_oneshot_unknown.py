"""One-shot unknown-domain mechanisms: threshold arithmetic, suppression
soundness, and the dummy-padding equivalence."""

import math

import numpy as np
import pytest

from contmech.noise import NoiseSource, normal_quantile
from contmech.oneshot_unknown import (
    LimitedHistogram,
    ThresholdSpec,
    unk_gauss,
    unk_gumbel,
)
from contmech.oracles import clopper_pearson_upper, unk_gauss_with_dummy_padding
from contmech.verification import check_dummy_equivalence


def test_limited_histogram_construction():
    lh = LimitedHistogram.from_counts({"a": 5, "b": 9, "c": 1, "d": 0}, k_bar=2)
    assert lh.top == (("b", 9), ("a", 5), ("c", 1))
    assert lh.cutoff_count == 1
    assert lh.candidates() == (("b", 9), ("a", 5))


def test_limited_histogram_tie_break_and_short():
    lh = LimitedHistogram.from_counts({"b": 5, "a": 5, "c": 5}, k_bar=1)
    assert lh.top == (("a", 5), ("b", 5))
    short = LimitedHistogram.from_counts({"a": 2}, k_bar=3)
    assert short.cutoff_count == 0
    assert short.candidates() == (("a", 2),)


def test_limited_histogram_validation():
    with pytest.raises(ValueError):
        LimitedHistogram(top=(("a", 0),), k_bar=1)
    with pytest.raises(ValueError):
        LimitedHistogram(top=(("a", 1), ("b", 2)), k_bar=1)


def test_threshold_specs():
    t = ThresholdSpec.gaussian(5, 1.0, 0.01)
    assert math.isclose(t.h_bottom, 6 + math.sqrt(2) * normal_quantile(0.99))
    assert math.isclose(ThresholdSpec.gaussian(5, 0.0, 0.5).h_bottom, 6.0)
    assert math.isclose(ThresholdSpec.gumbel(3, 2.0, 0.1).h_bottom, 4 + 2 * math.log(10))
    # quantile term non-negative whenever delta <= 1/2
    for delta in (0.5, 0.25, 0.01):
        assert ThresholdSpec.gaussian(0, 1.0, delta).h_bottom >= 1.0


def test_unk_gauss_noiseless_truncation():
    lh = LimitedHistogram.from_counts({"i1": 10, "i2": 8, "i3": 5}, k_bar=2)
    out = unk_gauss(lh, 0.0, 0.5, NoiseSource(0))
    assert out.entries == [("i1", 10.0), ("i2", 8.0)]
    # threshold sits at 5 + 1; a candidate at exactly 6 is suppressed
    lh = LimitedHistogram.from_counts({"i1": 6, "i2": 6, "i3": 5}, k_bar=2)
    out = unk_gauss(lh, 0.0, 0.5, NoiseSource(0))
    assert out.entries == []


def test_unk_gauss_threshold_value():
    lh = LimitedHistogram.from_counts({"i1": 10, "i2": 8, "i3": 5, "i4": 3}, k_bar=2)
    expected = 6 + math.sqrt(2) * normal_quantile(0.99)
    assert math.isclose(
        ThresholdSpec.gaussian(lh.cutoff_count, 1.0, 0.01).h_bottom, expected
    )
    assert math.isclose(expected, 9.29, abs_tol=0.01)


def test_unk_gauss_suppression_soundness():
    src = NoiseSource(1)
    lh = LimitedHistogram.from_counts({"a": 6, "b": 5, "c": 4, "d": 3}, k_bar=3)
    for i in range(2000):
        trial = src.child(i)
        out = unk_gauss(lh, 1.0, 0.1, trial)
        v_bottom = ThresholdSpec.gaussian(3, 1.0, 0.1).h_bottom + trial.gaussian(1.0, "bottom")
        for _, v in out.entries:
            assert v > v_bottom


def test_unk_gauss_never_releases_unknown_labels():
    src = NoiseSource(2)
    lh = LimitedHistogram.from_counts({"a": 9, "b": 2}, k_bar=4)
    for i in range(500):
        out = unk_gauss(lh, 2.0, 0.2, src.child(i))
        assert set(out.labels()) <= {"a", "b"}


def test_unk_gauss_single_item_bad_mass_below_delta():
    # an item at the cutoff count clears the noisy bar w.p. < delta thanks
    # to the +1 margin; Clopper-Pearson 99% upper must stay below delta
    delta, tau = 0.05, 1.0
    lh = LimitedHistogram.from_counts(
        {"a": 8, "b": 6, "x": 1, "y": 1}, k_bar=3
    )
    assert lh.cutoff_count == 1  # "y" holds rank k_bar + 1
    src = NoiseSource(3)
    n = 100_000
    hits = 0
    for i in range(n):
        if "x" in unk_gauss(lh, tau, delta, src.child(i)).labels():
            hits += 1
    assert clopper_pearson_upper(hits, n) <= delta


def test_unk_gumbel_noiseless():
    lh = LimitedHistogram.from_counts({"i1": 10, "i2": 8, "i3": 5, "i4": 3}, k_bar=3)
    out = unk_gumbel(lh, 2, 0.0, 0.5, NoiseSource(0))
    assert out.entries == [("i1", 10.0), ("i2", 8.0)]
    assert not out.bottom_present


def test_unk_gumbel_all_tied_returns_only_bottom():
    lh = LimitedHistogram.from_counts({"a": 4, "b": 4, "c": 4, "d": 4}, k_bar=3)
    out = unk_gumbel(lh, 2, 0.0, 0.5, NoiseSource(0))
    assert out.entries == []
    assert out.bottom_present


def test_unk_gumbel_k_validation():
    lh = LimitedHistogram.from_counts({"a": 4}, k_bar=2)
    with pytest.raises(ValueError):
        unk_gumbel(lh, 3, 1.0, 0.1, NoiseSource(0))


def test_unk_gumbel_bottom_rate_grows_as_delta_shrinks():
    lh = LimitedHistogram.from_counts({"a": 9, "b": 8, "c": 6, "d": 2}, k_bar=3)
    src = NoiseSource(4)
    rates = []
    for delta in (0.1, 0.01, 0.001):
        hits = 0
        n = 20_000
        for i in range(n):
            out = unk_gumbel(lh, 2, 2.0, delta, src.child(str(delta), i))
            hits += out.bottom_present
        rates.append(hits / n)
    assert rates[0] < rates[1] < rates[2]


def test_dummy_padding_equivalence():
    report = check_dummy_equivalence(trials=100_000, seed=5)
    assert report["passed"], report["failures"]


def test_padded_variant_noiseless_agrees():
    lh = LimitedHistogram.from_counts({"a": 9, "b": 3}, k_bar=4)
    plain = unk_gauss(lh, 0.0, 0.5, NoiseSource(0)).entries
    padded = unk_gauss_with_dummy_padding(lh, 0.0, 0.5, NoiseSource(0))
    assert plain == padded
