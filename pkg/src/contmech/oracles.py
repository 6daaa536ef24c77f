"""Two-neighbor oracle mechanisms and brute-force / Monte Carlo verifiers.

The oracle mechanisms receive BOTH neighboring inputs and relabel the bins
that differ, which makes their release a plain Gaussian mechanism on a
fixed domain.  Comparing the real mechanisms against them on outcomes both
neighbors can produce, and bounding the frequency of outcomes only one side
can produce, empirically validates the privacy decomposition the release
thresholds are calibrated for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import stats as _sstats

from .continual_unknown import UnkBase, release_threshold
from .noise import NoiseSource, normal_quantile
from .oneshot_unknown import LimitedHistogram, unk_gauss
from .releases import BOTTOM, histogram_of_stream
from .tree import TreeParams, build_table, cell_interval, decompose, tree_levels

__all__ = [
    "DUMMY_PREFIX",
    "BAD_PREFIX",
    "NeighborStreams",
    "NeighborHistograms",
    "padded_domain",
    "gauss_mech_bot",
    "postprocess_bot",
    "gauss_mech_full",
    "unk_base_oracle_run",
    "unk_gauss_with_dummy_padding",
    "good_outcome_equivalence_gauss",
    "good_outcome_equivalence_base",
    "brute_force_prefix",
    "brute_force_cell_diff",
    "clopper_pearson_upper",
    "EquivalenceReport",
]

DUMMY_PREFIX = "⊤"  # zero-count padding labels
BAD_PREFIX = "✗"  # relabeled bins that differ between the two neighbors


def _check_labels(counts: dict[str, int]):
    for label in counts:
        if label.startswith((DUMMY_PREFIX, BAD_PREFIX)) or label == BOTTOM:
            raise ValueError(f"label {label!r} collides with a reserved sentinel")


@dataclass(frozen=True)
class NeighborHistograms:
    """Histogram pair with bounded bin-wise and support difference."""

    h0: dict[str, int]
    h1: dict[str, int]
    delta0: int

    def __post_init__(self):
        _check_labels(self.h0)
        _check_labels(self.h1)
        labels = set(self.h0) | set(self.h1)
        diffs = [
            abs(self.h0.get(u, 0) - self.h1.get(u, 0)) for u in labels
        ]
        if sum(d > 0 for d in diffs) > self.delta0:
            raise ValueError("histograms differ in more bins than delta0")
        if any(d > 1 for d in diffs):
            raise ValueError("histograms differ by more than 1 in a bin")

    def side(self, b: int) -> dict[str, int]:
        return self.h0 if b == 0 else self.h1


@dataclass(frozen=True)
class NeighborStreams:
    """Event-stream pair equal everywhere except one round, where one side
    is the empty event."""

    stream0: tuple[frozenset, ...]
    stream1: tuple[frozenset, ...]

    def __post_init__(self):
        if len(self.stream0) != len(self.stream1):
            raise ValueError("neighboring streams must have equal length")
        diff = [
            t for t, (a, b) in enumerate(zip(self.stream0, self.stream1)) if a != b
        ]
        if len(diff) > 1:
            raise ValueError("streams differ at more than one round")
        if diff and self.stream0[diff[0]] and self.stream1[diff[0]]:
            raise ValueError("at the differing round one side must be empty")

    @classmethod
    def from_lists(cls, stream0, stream1) -> "NeighborStreams":
        return cls(
            tuple(frozenset(e) for e in stream0),
            tuple(frozenset(e) for e in stream1),
        )

    def side(self, b: int):
        return self.stream0 if b == 0 else self.stream1


def padded_domain(counts: dict[str, int], cut: int) -> list[str]:
    """The noised label slots: top-``cut`` positive items, padded with
    zero-count dummy labels when fewer positives exist."""
    positive = sorted(
        ((u, c) for u, c in counts.items() if c > 0), key=lambda kv: (-kv[1], kv[0])
    )
    if len(positive) >= cut:
        return [u for u, _ in positive[:cut]]
    labels = [u for u, _ in positive]
    labels += [f"{DUMMY_PREFIX}{j}" for j in range(1, cut - len(positive) + 1)]
    return labels


def _ranked_count(counts: dict[str, int], rank: int) -> int:
    """Count of the rank-th largest bin (1-based); 0 past the end."""
    ordered = sorted((c for c in counts.values() if c > 0), reverse=True)
    return ordered[rank - 1] if rank <= len(ordered) else 0


def gauss_mech_bot(
    b: int,
    pair: NeighborHistograms,
    k_bar: int,
    tau: float,
    delta: float,
    src: NoiseSource,
) -> dict[str, float]:
    """Limited-domain oracle: N(0, tau^2) on every relabeled bin.

    Bins: labels common to both sides' padded domains keep their names;
    labels unique to the active side are renamed to shared bad labels; the
    bottom bin gets the side's threshold base.  Returns label -> noisy value.
    """
    hb = pair.side(b)
    dom_b = set(padded_domain(hb, k_bar))
    dom_other = set(padded_domain(pair.side(1 - b), k_bar))
    bins: dict[str, float] = {}
    for label in dom_b & dom_other:
        bins[label] = float(hb.get(label, 0))
    for rank, label in enumerate(sorted(dom_b - dom_other), start=1):
        bins[f"{BAD_PREFIX}{rank}"] = float(hb.get(label, 0))
    base = _ranked_count(hb, k_bar + 1) + 1 + math.sqrt(2.0) * tau * normal_quantile(1.0 - delta)
    bins[BOTTOM] = base
    return {label: v + src.gaussian(tau, "bin", label) for label, v in bins.items()}


def postprocess_bot(noisy_bins: dict[str, float]) -> list[tuple[str, float]]:
    """Sort descending, keep strictly above the bottom bin, drop dummies."""
    cut = noisy_bins[BOTTOM]
    kept = [
        (u, v)
        for u, v in noisy_bins.items()
        if u != BOTTOM and v > cut and not u.startswith(DUMMY_PREFIX)
    ]
    return sorted(kept, key=lambda kv: (-kv[1], kv[0]))


def gauss_mech_full(
    b: int,
    h0: dict[str, int],
    h1: dict[str, int],
    d_bar: int,
    tau: float,
    src: NoiseSource,
) -> dict[str, float]:
    """Full-domain oracle: relabeled Gaussian mechanism over ``d_bar`` slots.

    Unique labels whose count did not drop keep their own names; unique
    labels whose count dropped take a shared bad label with count 0.  No
    bottom bin here: the release threshold is applied by the caller on the
    aggregated sums.
    """
    hb = h0 if b == 0 else h1
    other = h1 if b == 0 else h0
    dom_b = set(padded_domain(hb, d_bar))
    dom_other = set(padded_domain(other, d_bar))
    bad_pool = sorted(
        u for u in (dom_b ^ dom_other) if not u.startswith(DUMMY_PREFIX)
    )
    bins: dict[str, float] = {}
    for label in dom_b & dom_other:
        bins[label] = float(hb.get(label, 0))
    for label in sorted(dom_b - dom_other):
        own = hb.get(label, 0)
        if own >= other.get(label, 0):
            bins[label] = float(own)
        else:
            bins[bad_pool.pop(0)] = 0.0
    return {label: v + src.gaussian(tau, "bin", label) for label, v in bins.items()}


def unk_base_oracle_run(
    b: int,
    pair: NeighborStreams,
    params: TreeParams,
    delta: float,
    d_bar: int,
    src: NoiseSource,
) -> list[list[tuple[str, float]]]:
    """Per-round releases of the padded continual construction.

    Every tree cell's histogram pair goes through the full-domain oracle at
    the cell noise scale; items absent from a cell read the value of one of
    the cell's dummy bins (assigned by first appearance, consuming the
    highest-index dummy first); round sums above the release threshold are
    shown, dummies dropped.  On outcomes both neighbors can produce this is
    distributed exactly as the streaming unknown-domain mechanism.
    """
    events = pair.side(b)
    T, r = params.T, params.r
    if len(events) > T:
        raise ValueError("stream exceeds T")
    m_delta = release_threshold(params, delta)
    cell_tau = params.cell_sigma

    # first-appearance order of the run side's items
    first_seen: dict[str, int] = {}
    for t, event in enumerate(events, start=1):
        for u in sorted(event):
            first_seen.setdefault(u, t)
    appearance = sorted(first_seen, key=lambda u: (first_seen[u], u))

    all_cells = set()
    for t in range(1, len(events) + 1):
        all_cells.update(decompose(t, r).cells)

    cell_bins: dict[tuple[int, int], dict[str, float]] = {}
    cell_assign: dict[tuple[int, int], dict[str, str]] = {}
    for cell in sorted(all_cells):
        start, end = cell_interval(cell[0], cell[1], r)
        hc0 = histogram_of_stream(pair.stream0[start - 1 : end])
        hc1 = histogram_of_stream(pair.stream1[start - 1 : end])
        bins = gauss_mech_full(
            b, hc0, hc1, d_bar, cell_tau, src.child("cell", cell[0], cell[1])
        )
        dummies = sorted(
            (u for u in bins if u.startswith(DUMMY_PREFIX)),
            key=lambda u: int(u[len(DUMMY_PREFIX):]),
            reverse=True,
        )
        assign: dict[str, str] = {}
        for u in appearance:
            if u not in bins:
                if not dummies:
                    raise ValueError("d_bar too small for dummy relabeling")
                assign[u] = dummies.pop(0)
        cell_bins[cell] = bins
        cell_assign[cell] = assign

    releases = []
    seen: set[str] = set()
    for t, event in enumerate(events, start=1):
        seen |= set(event)
        cells = decompose(t, r).cells
        shown = []
        for u in sorted(seen):
            total = 0.0
            for cell in cells:
                bins = cell_bins[cell]
                if u in bins:
                    total += bins[u]
                else:
                    total += bins[cell_assign[cell][u]]
            if total > m_delta:
                shown.append((u, total))
        shown.sort(key=lambda kv: (-kv[1], kv[0]))
        releases.append(shown)
    return releases


def unk_gauss_with_dummy_padding(
    h: LimitedHistogram, tau: float, delta: float, src: NoiseSource
) -> list[tuple[str, float]]:
    """Variant that pads the candidate slots with zero-count dummies, noises
    them too, then drops them after the threshold cut.  Distributionally
    identical to the unpadded mechanism; used to validate exactly that."""
    v_bottom = (
        h.cutoff_count
        + 1.0
        + math.sqrt(2.0) * tau * normal_quantile(1.0 - delta)
        + src.gaussian(tau, "bottom")
    )
    padded: list[tuple[str, float]] = [
        (u, c + src.gaussian(tau, "count", u)) for u, c in h.candidates()
    ]
    for j in range(1, h.k_bar - len(h.candidates()) + 1):
        label = f"{DUMMY_PREFIX}{j}"
        padded.append((label, src.gaussian(tau, "count", label)))
    padded.sort(key=lambda kv: (-kv[1], kv[0]))
    return [
        (u, v) for u, v in padded if v > v_bottom and not u.startswith(DUMMY_PREFIX)
    ]


def clopper_pearson_upper(successes: int, trials: int, confidence: float = 0.99) -> float:
    """One-sided upper confidence bound on a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if successes >= trials:
        return 1.0
    return float(_sstats.beta.ppf(confidence, successes + 1, trials - successes))


@dataclass
class EquivalenceReport:
    """Outcome of a mechanism-vs-oracle distribution comparison."""

    trials: int
    label_freqs: dict[str, tuple[float, float, float]] = field(default_factory=dict)
    ks_pvalue: float | None = None
    bad_freq_mech: float = 0.0
    bad_freq_oracle: float = 0.0
    bad_bound: float | None = None
    bad_upper: float | None = None
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _compare_label_freqs(
    report: EquivalenceReport,
    mech_hits: dict[str, int],
    oracle_hits: dict[str, int],
    n: int,
    sigmas: float = 3.0,
):
    for label in sorted(set(mech_hits) | set(oracle_hits)):
        f_m = mech_hits.get(label, 0) / n
        f_a = oracle_hits.get(label, 0) / n
        pooled = (mech_hits.get(label, 0) + oracle_hits.get(label, 0)) / (2 * n)
        tol = sigmas * math.sqrt(max(2.0 * pooled * (1.0 - pooled) / n, 1e-12))
        report.label_freqs[label] = (f_m, f_a, tol)
        if abs(f_m - f_a) > tol:
            report.failures.append(
                f"label {label!r}: mech {f_m:.5f} vs oracle {f_a:.5f} beyond {tol:.5f}"
            )


def good_outcome_equivalence_gauss(
    pair: NeighborHistograms,
    k_bar: int,
    tau: float,
    delta: float,
    src: NoiseSource,
    trials: int = 100_000,
    side: int = 1,
) -> EquivalenceReport:
    """Compare the limited-domain mechanism with its two-neighbor oracle.

    Counts per-label 'released and outcome possible on both sides'
    frequencies for both, checks 3-sigma agreement, KS-tests the released
    values of the most frequent label, and Clopper-Pearson-bounds the bad
    outcome mass against delta0 * delta.
    """
    hb = pair.side(side)
    other_real = {
        u for u in padded_domain(pair.side(1 - side), k_bar)
        if not u.startswith(DUMMY_PREFIX)
    }
    limited = LimitedHistogram.from_counts(hb, k_bar)

    mech_hits: dict[str, int] = {}
    oracle_hits: dict[str, int] = {}
    mech_bad = 0
    oracle_bad = 0
    mech_values: dict[str, list[float]] = {}
    oracle_values: dict[str, list[float]] = {}
    for i in range(trials):
        out = unk_gauss(limited, tau, delta, src.child("mech", i))
        labels = out.labels()
        if any(u not in other_real for u in labels):
            mech_bad += 1
        else:
            for u, v in out.entries:
                mech_hits[u] = mech_hits.get(u, 0) + 1
                mech_values.setdefault(u, []).append(v)
        bins = gauss_mech_bot(side, pair, k_bar, tau, delta, src.child("oracle", i))
        post = postprocess_bot(bins)
        if any(u.startswith(BAD_PREFIX) for u, _ in post):
            oracle_bad += 1
        else:
            for u, v in post:
                oracle_hits[u] = oracle_hits.get(u, 0) + 1
                oracle_values.setdefault(u, []).append(v)

    report = EquivalenceReport(
        trials=trials,
        bad_freq_mech=mech_bad / trials,
        bad_freq_oracle=oracle_bad / trials,
        bad_bound=pair.delta0 * delta,
        bad_upper=clopper_pearson_upper(mech_bad, trials),
    )
    _compare_label_freqs(report, mech_hits, oracle_hits, trials)
    if mech_hits:
        top_label = max(mech_hits, key=mech_hits.get)
        a, b2 = mech_values.get(top_label, []), oracle_values.get(top_label, [])
        if len(a) >= 30 and len(b2) >= 30:
            report.ks_pvalue = float(_sstats.ks_2samp(a, b2).pvalue)
            if report.ks_pvalue < 0.01:
                report.failures.append(
                    f"KS rejection on label {top_label!r}: p={report.ks_pvalue:.4f}"
                )
    if report.bad_upper is not None and report.bad_bound is not None:
        if report.bad_upper > report.bad_bound:
            report.failures.append(
                f"bad-outcome mass {report.bad_upper:.5f} above bound {report.bad_bound:.5f}"
            )
    return report


def good_outcome_equivalence_base(
    pair: NeighborStreams,
    params: TreeParams,
    delta: float,
    src: NoiseSource,
    trials: int = 20_000,
    side: int = 1,
    d_bar: int | None = None,
) -> EquivalenceReport:
    """Compare the streaming unknown-domain mechanism with the padded
    two-neighbor construction, on any-round release frequencies."""
    other_items = set().union(*pair.side(1 - side)) if pair.side(1 - side) else set()
    if d_bar is None:
        all_items = set().union(*pair.stream0, *pair.stream1, frozenset())
        d_bar = len(all_items) + 1

    mech_hits: dict[str, int] = {}
    oracle_hits: dict[str, int] = {}
    mech_bad = 0
    oracle_bad = 0
    for i in range(trials):
        mech = UnkBase(params, delta, src.child("mech", i))
        released: set[str] = set()
        for event in pair.side(side):
            released |= set(mech.step(event).labels())
        if released - other_items:
            mech_bad += 1
        else:
            for u in released:
                mech_hits[u] = mech_hits.get(u, 0) + 1
        rounds = unk_base_oracle_run(
            side, pair, params, delta, d_bar, src.child("oracle", i)
        )
        oracle_released = {u for shown in rounds for u, _ in shown}
        if any(u.startswith(BAD_PREFIX) for u in oracle_released) or (
            {u for u in oracle_released if not u.startswith(BAD_PREFIX)} - other_items
        ):
            oracle_bad += 1
        else:
            for u in oracle_released:
                oracle_hits[u] = oracle_hits.get(u, 0) + 1

    report = EquivalenceReport(
        trials=trials,
        bad_freq_mech=mech_bad / trials,
        bad_freq_oracle=oracle_bad / trials,
        bad_upper=clopper_pearson_upper(mech_bad, trials),
    )
    _compare_label_freqs(report, mech_hits, oracle_hits, trials)
    return report


def brute_force_prefix(stream) -> list[int]:
    """Exact running count of a bit stream (independent of the tree path)."""
    out, acc = [], 0
    for bit in stream:
        acc += bit
        out.append(acc)
    return out


def brute_force_cell_diff(stream_a, stream_b, params: TreeParams) -> tuple[int, int]:
    """(number of differing table cells, max per-cell absolute difference)
    between the partial-sum tables of two streams."""
    ta = build_table(stream_a, params)
    tb = build_table(stream_b, params)
    changed = 0
    worst = 0
    for cell in set(ta.cells) | set(tb.cells):
        d = abs(ta.cells.get(cell, 0) - tb.cells.get(cell, 0))
        if d:
            changed += 1
            worst = max(worst, d)
    return changed, worst
