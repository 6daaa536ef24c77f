"""Partial-histogram-table construction: any one-shot release mechanism,
applied once per tree cell and aggregated per round.

Each cell of the base-r table holds the histogram of its substream; a
one-shot mechanism (picked by the domain-known x restricted quadrant) noises
each cell once, at scale sqrt(levels) * tau, and round t sums the noisy
histograms of the cells composing [1, t].  This needs the full event stream
up front, which is what the streaming mechanisms avoid.
"""

from __future__ import annotations

from dataclasses import dataclass

from .known import known_gauss, known_gumbel_topk
from .noise import NoiseSource
from .oneshot_unknown import LimitedHistogram, unk_gauss, unk_gumbel
from .releases import NoisyRelease, descending, histogram_of_stream, validate_event
from .tree import TreeParams, cell_interval, decompose

__all__ = ["QuadrantSelector", "PartialHistogramTable", "meta_run"]


@dataclass(frozen=True)
class QuadrantSelector:
    """Chooses the per-cell mechanism: known/unknown domain x restricted/not.

    Restricted quadrants need ``delta0`` (used to validate events); the
    unrestricted ones need ``k``; the unknown-domain ones need ``k_bar``;
    known-domain ones need the ``domain``.
    """

    domain_known: bool
    restricted: bool
    delta0: int | None = None
    k: int | None = None
    k_bar: int | None = None
    domain: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.domain_known and self.domain is None:
            raise ValueError("known-domain quadrants require the domain")
        if self.restricted and self.delta0 is None:
            raise ValueError("restricted quadrants require delta0")
        if not self.restricted and self.k is None:
            raise ValueError("unrestricted quadrants require k")
        if not self.domain_known and self.k_bar is None:
            raise ValueError("unknown-domain quadrants require k_bar")


class PartialHistogramTable:
    """Lazy per-cell histograms and their noisy releases.

    A cell is noised the first time a round references it and the result is
    cached, so repeated rounds see one consistent realization per cell.
    """

    def __init__(self, events, selector: QuadrantSelector, tau: float, delta: float,
                 params: TreeParams, src: NoiseSource):
        self.events = events
        self.selector = selector
        self.params = params
        self.cell_tau = params.levels ** 0.5 * tau
        self.cell_delta = delta / params.levels
        self.src = src
        self._releases: dict[tuple[int, int], dict[str, float]] = {}

    def cell_counts(self, level: int, index: int) -> dict[str, int]:
        start, end = cell_interval(level, index, self.params.r)
        sub = self.events[start - 1 : end]
        if self.selector.domain_known:
            return histogram_of_stream(sub, self.selector.domain)
        return histogram_of_stream(sub)

    def cell_release(self, level: int, index: int) -> dict[str, float]:
        key = (level, index)
        cached = self._releases.get(key)
        if cached is not None:
            return cached
        counts = self.cell_counts(level, index)
        sel = self.selector
        cell_src = self.src.child("cell", level, index)
        if sel.domain_known and sel.restricted:
            release = known_gauss(counts, self.cell_tau, cell_src)
        elif sel.domain_known:
            release = known_gumbel_topk(counts, sel.k, self.cell_tau, cell_src)
        elif sel.restricted:
            limited = LimitedHistogram.from_counts(counts, sel.k_bar)
            release = unk_gauss(limited, self.cell_tau, self.cell_delta, cell_src)
        else:
            limited = LimitedHistogram.from_counts(counts, sel.k_bar)
            release = unk_gumbel(limited, sel.k, self.cell_tau, self.cell_delta, cell_src)
        result = release.as_dict()
        self._releases[key] = result
        return result


def meta_run(
    events,
    selector: QuadrantSelector,
    tau: float,
    delta: float,
    params: TreeParams,
    src: NoiseSource,
) -> list[NoisyRelease]:
    """Aggregate the noisy partial histograms into one release per round.

    A label present in any contributing cell's release is shown with the sum
    of its present noisy counts; cells that suppressed the label contribute 0.
    """
    domain = set(selector.domain) if selector.domain_known else None
    events = [
        validate_event(e, selector.delta0 if selector.restricted else None, domain)
        for e in events
    ]
    if len(events) > params.T:
        raise ValueError(f"stream length {len(events)} exceeds T={params.T}")
    table = PartialHistogramTable(events, selector, tau, delta, params, src)
    releases = []
    for t in range(1, len(events) + 1):
        totals: dict[str, float] = {}
        for level, index in decompose(t, params.r).cells:
            for label, value in table.cell_release(level, index).items():
                totals[label] = totals.get(label, 0.0) + value
        releases.append(NoisyRelease(entries=descending(totals)))
    return releases
