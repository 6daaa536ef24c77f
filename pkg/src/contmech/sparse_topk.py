"""Continual top-k over a known domain with unrestricted per-event size.

One Gumbel-race selection picks the top-k; the selected items' counts are
then released every round from per-item partial-sum trees.  An
above-threshold scan watches the remaining items, and only when one noisily
beats the current top-k's minimum (plus a margin) does the mechanism pay for
a fresh selection.  At most ``switches`` reselections ever happen, capping
the total budget regardless of stream length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .noise import NoiseSource
from .releases import NoisyRelease, descending, histogram_of_stream
from .tree import TreeParams, tree_levels, tree_run

__all__ = [
    "SparseGumbConfig",
    "RunLog",
    "ErrorReport",
    "sparse_gumb_run",
    "recommended_eta",
    "error_metric",
]


@dataclass(frozen=True)
class SparseGumbConfig:
    """Switch budget, list size, margins, and noise scale.

    ``eta`` is the per-round threshold margin: a non-negative scalar or a
    sequence indexed by round (1-based round t uses eta[t-1]).
    """

    k: int
    switches: int
    tau: float
    eta: float | Sequence[float] = 0.0
    r: int = 2

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.switches < 0:
            raise ValueError("switch budget must be non-negative")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")

    @property
    def tau_threshold(self) -> float:
        """Scale feeding the threshold/query Laplace noise: sqrt(s) * tau."""
        return math.sqrt(self.switches) * self.tau

    @property
    def tau_release(self) -> float:
        """Scale feeding selections and count trees: sqrt(s + 1) * tau."""
        return math.sqrt(self.switches + 1) * self.tau

    def eta_at(self, t: int) -> float:
        value = self.eta[t - 1] if isinstance(self.eta, Sequence) else self.eta
        if value < 0:
            raise ValueError("eta must be non-negative")
        return float(value)


@dataclass
class RunLog:
    """Audit trail: every selection event and the per-round selected set.

    ``threshold_draws`` holds the one Laplace realization drawn per segment,
    so tests can confirm the threshold noise is redrawn exactly on switches.
    """

    switch_rounds: list[int] = field(default_factory=list)
    selection_count: int = 0
    tree_instances: int = 0
    selected_per_round: list[tuple[str, ...]] = field(default_factory=list)
    threshold_draws: list[float] = field(default_factory=list)


@dataclass
class ErrorReport:
    """Per-round |released count - true max count| and its maximum."""

    per_round: list[float]
    err_max: float


def _select_topk(counts: dict[str, int], k: int, scale: float, src: NoiseSource) -> list[str]:
    race = {u: c + src.gumbel(scale / 2.0, "race", u) for u, c in counts.items()}
    return [u for u, _ in descending(race)[:k]]


def sparse_gumb_run(
    events,
    domain,
    config: SparseGumbConfig,
    src: NoiseSource,
    T: int | None = None,
) -> tuple[list[NoisyRelease], RunLog]:
    """Run the switch-budgeted continual top-k over a full event stream.

    Count trees are started over each selected item's entire bit stream, so
    a reselected set's counts are consistent from the switch round onward.
    Once the switch budget hits zero the scan stops, but count releases for
    the last selected set continue through the end of the stream.
    """
    labels = sorted(domain)
    if config.k > len(labels):
        raise ValueError(f"k={config.k} exceeds domain size {len(labels)}")
    label_set = set(labels)
    events = [frozenset(e) for e in events]
    T = len(events) if T is None else T
    if len(events) > T:
        raise ValueError(f"stream length {len(events)} exceeds T={T}")
    for event in events:
        for item in event:
            if item not in label_set:
                raise ValueError(f"item {item!r} outside the declared domain")

    params = TreeParams(T=T, r=config.r, tau=config.tau_release)
    bits = {u: [1 if u in e else 0 for e in events] for u in labels}
    log = RunLog()

    def start_segment(segment: int, counts: dict[str, int]):
        selected = _select_topk(
            counts, config.k, config.tau_release, src.child("select", segment)
        )
        trees = {}
        for u in selected:
            trees[u] = tree_run(bits[u], params, src.child("tree", segment, u))
            log.tree_instances += 1
        log.selection_count += 1
        z = src.laplace(2.0 * config.tau_threshold, "threshold", segment)
        log.threshold_draws.append(z)
        return selected, trees, z

    counts: dict[str, int] = dict.fromkeys(labels, 0)
    for item in events[0]:
        counts[item] += 1
    segment = 0
    topk, trees, z = start_segment(segment, counts)
    remaining = config.switches

    releases = [NoisyRelease(entries=descending({u: trees[u][0] for u in topk}))]
    log.selected_per_round.append(tuple(topk))

    for t in range(2, len(events) + 1):
        for item in events[t - 1]:
            counts[item] += 1
        if remaining > 0:
            current = {u: trees[u][t - 1] for u in topk}
            floor_label = min(current, key=lambda u: (current[u], u))
            threshold = current[floor_label] + config.eta_at(t) + z
            topk_set = set(topk)
            candidates = [u for u in labels if u not in topk_set]
            if config.tau_threshold > 0:
                query_noise = src.sequence("scan", t).laplace(
                    scale=4.0 * config.tau_threshold, size=len(candidates)
                )
            else:
                query_noise = [0.0] * len(candidates)
            for u, noise in zip(candidates, query_noise):
                if counts[u] + noise > threshold:
                    segment += 1
                    topk, trees, z = start_segment(segment, counts)
                    remaining -= 1
                    log.switch_rounds.append(t)
                    break
        releases.append(NoisyRelease(entries=descending({u: trees[u][t - 1] for u in topk})))
        log.selected_per_round.append(tuple(topk))
    return releases, log


def recommended_eta(config: SparseGumbConfig, d: int, T: int, beta: float) -> float:
    """Margin making spurious switches unlikely on well-separated streams.

    Sum of three deviation scales: the selection race's utility slack, the
    count trees' worst deviation, and the above-threshold noise spread
    (each at confidence beta, natural logs).
    """
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must be in (0, 1)")
    s, tau, r = config.switches, config.tau, config.r
    levels = tree_levels(T, r)
    alpha_select = math.sqrt(s) * tau * math.log(d / beta)
    alpha_tree = tau * levels * math.sqrt(2.0 * (s + 1) * (r - 1) * math.log(6.0 * T / beta))
    alpha_scan = 8.0 * tau * math.sqrt(s) * math.log(6.0 * d * T / beta)
    return alpha_select + alpha_tree + alpha_scan


def error_metric(releases: list[NoisyRelease], events, domain) -> ErrorReport:
    """Distance from each round's released top count to the true max count."""
    counts: dict[str, int] = dict.fromkeys(domain, 0)
    per_round = []
    for release, event in zip(releases, events):
        for item in event:
            counts[item] += 1
        true_max = max(counts.values())
        top = release.top()
        shown = top[1] if top is not None else 0.0
        per_round.append(abs(shown - true_max))
    return ErrorReport(per_round=per_round, err_max=max(per_round) if per_round else 0.0)
