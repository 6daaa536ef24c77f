"""Named verification workflows behind the ``verify`` CLI subcommand.

Each check builds its own adversarial instance, runs a Monte Carlo or
exhaustive sweep, and returns a JSON-able report with a ``passed`` flag.
Statistical checks compare one-sided 99% Clopper-Pearson bounds against the
analytic bound they target, with trial counts sized so a real violation of
twice the bound is essentially always caught.
"""

from __future__ import annotations

import math

import numpy as np

from .continual_unknown import UnkBase
from .noise import NoiseSource
from .oneshot_unknown import LimitedHistogram, unk_gauss
from .oracles import (
    NeighborHistograms,
    NeighborStreams,
    brute_force_cell_diff,
    clopper_pearson_upper,
    good_outcome_equivalence_base,
    good_outcome_equivalence_gauss,
    unk_gauss_with_dummy_padding,
)
from .tree import TreeParams, decompose, tree_levels

__all__ = ["run_check", "CHECKS", "round_deviation_samples"]


def round_deviation_samples(params: TreeParams, t: int, seed: int, trials: int) -> np.ndarray:
    """Samples of (noisy count - true count) at round t over independent runs.

    Draws exactly the cell noise a full run would use for round t (same
    stream ids, same summation order), skipping cells the round never reads.
    """
    src = NoiseSource(seed)
    cells = decompose(t, params.r).cells
    sigma = params.cell_sigma
    out = np.empty(trials)
    for i in range(trials):
        trial = src.child("trial", i)
        acc = 0.0
        for level, index in cells:
            acc += trial.gaussian(sigma, "cell", level, index)
        out[i] = acc
    return out


def check_sensitivity(trials: int = 2000, seed: int = 0) -> dict:
    """Neighbor sweep: zeroing one event changes at most ``levels`` table
    cells, each by at most 1."""
    rng = np.random.default_rng(seed)
    checked = 0
    violations = []
    for r in (2, 3, 4):
        for _ in range(max(1, trials // (3 * 8))):
            T = int(rng.integers(2, 65))
            params = TreeParams(T=T, r=min(r, T), tau=0.0)
            stream = rng.integers(0, 2, size=T).tolist()
            for t0 in range(T):
                if stream[t0] == 0:
                    continue
                neighbor = list(stream)
                neighbor[t0] = 0
                changed, worst = brute_force_cell_diff(stream, neighbor, params)
                checked += 1
                if changed > params.levels or worst > 1:
                    violations.append({"T": T, "r": params.r, "t0": t0 + 1,
                                       "changed": changed, "worst": worst})
    return {
        "check": "sensitivity",
        "pairs_checked": checked,
        "violations": violations,
        "passed": not violations,
    }


def check_bad_outcomes_unkgauss(trials: int = 100_000, seed: int = 0) -> dict:
    """One event adds two fresh items, one entering the released slice; the
    chance any of them is shown must stay under delta0 * delta."""
    k_bar, tau, delta, delta0 = 3, 1.0, 0.02, 2
    h0 = {"a": 8, "b": 6}
    h1 = {"a": 8, "b": 6, "x": 1, "y": 1}
    NeighborHistograms(h0, h1, delta0)  # construction sanity
    fresh = {"x", "y"}
    limited = LimitedHistogram.from_counts(h1, k_bar)
    src = NoiseSource(seed)
    bad = 0
    for i in range(trials):
        out = unk_gauss(limited, tau, delta, src.child("trial", i))
        if fresh.intersection(out.labels()):
            bad += 1
    upper = clopper_pearson_upper(bad, trials)
    bound = delta0 * delta
    return {
        "check": "bad-outcomes-unkgauss",
        "trials": trials,
        "bad_frequency": bad / trials,
        "cp99_upper": upper,
        "bound": bound,
        "passed": upper <= bound,
    }


def check_bad_outcomes_unkbase(trials: int = 100_000, seed: int = 0) -> dict:
    """Fresh-item neighbor for the continual mechanism: the chance a
    single-appearance item is ever shown across all rounds stays under
    delta0 * delta."""
    T, r, tau, delta, delta0 = 32, 2, 1.0, 0.05, 2
    params = TreeParams(T=T, r=r, tau=tau)
    event = frozenset({"x", "y"})
    src = NoiseSource(seed)
    bad = 0
    for i in range(trials):
        mech = UnkBase(params, delta, src.child("trial", i), delta0=delta0)
        hit = False
        for t in range(T):
            release = mech.step(event if t == 0 else frozenset())
            if release.entries:
                hit = True
        if hit:
            bad += 1
    upper = clopper_pearson_upper(bad, trials)
    bound = delta0 * delta
    return {
        "check": "bad-outcomes-unkbase",
        "trials": trials,
        "bad_frequency": bad / trials,
        "cp99_upper": upper,
        "bound": bound,
        "passed": upper <= bound,
    }


def good_equivalence_instances():
    """The small fixed instances used by the good-outcome comparisons."""
    hist_pair = NeighborHistograms(
        {"a": 8, "b": 6}, {"a": 8, "b": 6, "x": 1, "y": 1}, delta0=2
    )
    stream1 = [
        {"a"}, {"a", "b"}, {"a"}, {"b"}, {"a"}, {"a", "b"}, {"a"}, {"a"},
    ]
    stream0 = [e if t != 1 else set() for t, e in enumerate(stream1)]
    stream_pair = NeighborStreams.from_lists(stream0, stream1)
    return hist_pair, stream_pair


def check_good_equivalence(trials: int = 100_000, seed: int = 0) -> dict:
    hist_pair, stream_pair = good_equivalence_instances()
    src = NoiseSource(seed)
    gauss = good_outcome_equivalence_gauss(
        hist_pair, k_bar=3, tau=1.0, delta=0.05, src=src.child("gauss"),
        trials=trials, side=1,
    )
    base = good_outcome_equivalence_base(
        stream_pair, TreeParams(T=8, r=2, tau=0.5), delta=0.5,
        src=src.child("base"), trials=max(1000, trials // 5), side=1,
    )
    return {
        "check": "good-equivalence",
        "gauss": {
            "trials": gauss.trials,
            "label_freqs": gauss.label_freqs,
            "ks_pvalue": gauss.ks_pvalue,
            "bad_upper": gauss.bad_upper,
            "bad_bound": gauss.bad_bound,
            "failures": gauss.failures,
        },
        "base": {
            "trials": base.trials,
            "label_freqs": base.label_freqs,
            "failures": base.failures,
        },
        "passed": gauss.passed and base.passed,
    }


def check_dummy_equivalence(trials: int = 100_000, seed: int = 0) -> dict:
    """Zero-count padding, noising, then dropping the padding must leave the
    release distribution unchanged (two-sample KS per label + frequency)."""
    from scipy import stats as _sstats

    h = LimitedHistogram.from_counts({"a": 10, "b": 7, "c": 4}, k_bar=5)
    tau, delta = 1.0, 0.05
    src = NoiseSource(seed)
    plain_values: dict[str, list[float]] = {}
    padded_values: dict[str, list[float]] = {}
    plain_hits: dict[str, int] = {}
    padded_hits: dict[str, int] = {}
    for i in range(trials):
        out = unk_gauss(h, tau, delta, src.child("plain", i))
        for u, v in out.entries:
            plain_values.setdefault(u, []).append(v)
            plain_hits[u] = plain_hits.get(u, 0) + 1
        padded = unk_gauss_with_dummy_padding(h, tau, delta, src.child("padded", i))
        for u, v in padded:
            padded_values.setdefault(u, []).append(v)
            padded_hits[u] = padded_hits.get(u, 0) + 1
    failures = []
    ks = {}
    for label in sorted(set(plain_hits) | set(padded_hits)):
        f_p = plain_hits.get(label, 0) / trials
        f_q = padded_hits.get(label, 0) / trials
        pooled = 0.5 * (f_p + f_q)
        tol = 3.0 * math.sqrt(max(2.0 * pooled * (1.0 - pooled) / trials, 1e-12))
        if abs(f_p - f_q) > tol:
            failures.append(f"frequency mismatch on {label!r}: {f_p:.5f} vs {f_q:.5f}")
        a, b = plain_values.get(label, []), padded_values.get(label, [])
        if len(a) >= 30 and len(b) >= 30:
            p = float(_sstats.ks_2samp(a, b).pvalue)
            ks[label] = p
            if p < 0.01:
                failures.append(f"KS rejection on {label!r}: p={p:.4f}")
    return {
        "check": "dummy-equivalence",
        "trials": trials,
        "ks_pvalues": ks,
        "failures": failures,
        "passed": not failures,
    }


CHECKS = {
    "sensitivity": check_sensitivity,
    "bad-outcomes-unkgauss": check_bad_outcomes_unkgauss,
    "bad-outcomes-unkbase": check_bad_outcomes_unkbase,
    "good-equivalence": check_good_equivalence,
    "dummy-equivalence": check_dummy_equivalence,
}


def run_check(name: str, trials: int | None = None, seed: int = 0) -> dict:
    if name not in CHECKS:
        raise ValueError(f"unknown check {name!r}; options: {sorted(CHECKS)}")
    kwargs = {"seed": seed}
    if trials is not None:
        kwargs["trials"] = trials
    return CHECKS[name](**kwargs)
