"""Continual histograms over an unknown domain.

Items exist only once seen in the stream.  Each seen item's running count is
noised through the partial-sum tree decomposition (re-using each cell's
realization across rounds by recomputing it from the keyed noise source, so
per-item state is just the running count), and a fixed threshold keeps
fresh items invisible except with small probability.
"""

from __future__ import annotations

import math

from .noise import NoiseSource, normal_cdf, normal_quantile
from .releases import NoisyRelease, descending, validate_event
from .tree import TreeParams, decompose

__all__ = [
    "release_threshold",
    "UnkBase",
    "unk_base_run",
    "discovery_probability_bound",
    "conditional_error_bound",
]


def release_threshold(params: TreeParams, delta: float) -> float:
    """Suppression bar: tau * levels * sqrt(r-1) * quantile(1 - delta/T) + 1.

    Calibrated so that across all T rounds, an item one user contributed
    once clears the bar with probability at most delta.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    return (
        params.tau
        * params.levels
        * math.sqrt(params.r - 1)
        * normal_quantile(1.0 - delta / params.T)
        + 1.0
    )


class UnkBase:
    """Streaming unknown-domain histogram release.

    ``persistent_discovery=False`` (default) recomputes the shown set fresh
    each round; with it on, an item once shown stays shown (both settings
    carry the same privacy guarantee, the latter trades memory for a
    steadier display).
    """

    def __init__(
        self,
        params: TreeParams,
        delta: float,
        src: NoiseSource,
        delta0: int | None = None,
        persistent_discovery: bool = False,
    ):
        self.params = params
        self.delta = delta
        self.delta0 = delta0
        self.persistent_discovery = persistent_discovery
        self.m_delta = release_threshold(params, delta)
        self.src = src
        self.t = 0
        self.counts: dict[str, int] = {}
        self.discovered: set[str] = set()

    def noisy_count(self, item: str, t: int | None = None) -> float:
        """Current noisy count of a seen item; cell draws are recomputed
        from their keys, so rounds sharing a cell share its realization."""
        t = self.t if t is None else t
        sigma = self.params.cell_sigma
        total = float(self.counts[item])
        for level, index in decompose(t, self.params.r).cells:
            total += self.src.gaussian(sigma, "item", item, "cell", level, index)
        return total

    def step(self, event) -> NoisyRelease:
        if self.t >= self.params.T:
            raise ValueError(f"stream exceeds T={self.params.T}")
        items = validate_event(event, self.delta0)
        self.t += 1
        for u in items:
            self.counts[u] = self.counts.get(u, 0) + 1
        noisy = {u: self.noisy_count(u) for u in self.counts}
        shown = {u for u, v in noisy.items() if v > self.m_delta}
        if self.persistent_discovery:
            self.discovered |= shown
            shown = set(self.discovered)
        return NoisyRelease(entries=descending({u: noisy[u] for u in shown}))

    def run(self, events) -> list[NoisyRelease]:
        return [self.step(e) for e in events]


def unk_base_run(
    events,
    params: TreeParams,
    delta: float,
    src: NoiseSource,
    delta0: int | None = None,
    persistent_discovery: bool = False,
) -> list[NoisyRelease]:
    mech = UnkBase(params, delta, src, delta0, persistent_discovery)
    return mech.run(events)


def discovery_probability_bound(margin: float, params: TreeParams) -> float:
    """Lower bound on the chance an item with true count
    threshold + margin * tau is shown at that round."""
    if margin <= 0:
        raise ValueError("margin must be positive")
    return normal_cdf(margin / (math.sqrt(params.r - 1) * params.levels))


def conditional_error_bound(margin: float, eta: float, params: TreeParams) -> float:
    """Upper bound on Pr[|count error| >= eta * tau | item shown] for an item
    with true count threshold + margin * tau."""
    if not 0.0 < margin < eta:
        raise ValueError("need 0 < margin < eta")
    spread = math.sqrt(params.r - 1) * params.levels
    return (1.0 - normal_cdf(eta / spread)) / normal_cdf(margin / spread)
