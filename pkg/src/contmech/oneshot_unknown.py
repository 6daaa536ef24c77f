"""One-shot unknown-domain mechanisms.

Only items that actually appear in the data exist here, and the mechanism
sees just the highest-ranked slice of the histogram.  A data-dependent noisy
threshold keeps items whose presence itself would leak (single-appearance
items) out of the release, except with probability controlled by delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .noise import NoiseSource, normal_quantile
from .releases import NoisyRelease

__all__ = ["LimitedHistogram", "ThresholdSpec", "unk_gauss", "unk_gumbel"]


@dataclass(frozen=True)
class LimitedHistogram:
    """The top slice of a histogram: up to k_bar + 1 positive-count items,
    descending by count with lexicographic tie-break."""

    top: tuple[tuple[str, int], ...]
    k_bar: int

    def __post_init__(self):
        if self.k_bar < 1:
            raise ValueError("k_bar must be positive")
        if len(self.top) > self.k_bar + 1:
            raise ValueError("limited histogram longer than k_bar + 1")
        counts = [c for _, c in self.top]
        if any(c <= 0 for c in counts):
            raise ValueError("limited histogram requires strictly positive counts")
        if counts != sorted(counts, reverse=True):
            raise ValueError("limited histogram must be sorted descending")

    @classmethod
    def from_counts(cls, counts: dict[str, int], k_bar: int) -> "LimitedHistogram":
        positive = sorted(
            ((u, c) for u, c in counts.items() if c > 0),
            key=lambda kv: (-kv[1], kv[0]),
        )
        return cls(top=tuple(positive[: k_bar + 1]), k_bar=k_bar)

    @property
    def cutoff_count(self) -> int:
        """Count of the (k_bar + 1)-ranked item; 0 when fewer items exist."""
        if len(self.top) == self.k_bar + 1:
            return self.top[-1][1]
        return 0

    def candidates(self) -> tuple[tuple[str, int], ...]:
        """The noised part: the top k_bar entries."""
        return self.top[: self.k_bar]


@dataclass(frozen=True)
class ThresholdSpec:
    """Base value of the suppression threshold (before its own noise)."""

    h_bottom: float

    @classmethod
    def gaussian(cls, cutoff_count: float, tau: float, delta: float) -> "ThresholdSpec":
        return cls(cutoff_count + 1.0 + math.sqrt(2.0) * tau * normal_quantile(1.0 - delta))

    @classmethod
    def gumbel(cls, cutoff_count: float, tau: float, delta: float) -> "ThresholdSpec":
        return cls(cutoff_count + 1.0 + tau * math.log(1.0 / delta))


def unk_gauss(h: LimitedHistogram, tau: float, delta: float, src: NoiseSource) -> NoisyRelease:
    """Gaussian release over a limited domain with a noisy suppression bar.

    Every candidate gets N(count, tau^2); the threshold gets its own
    independent N(0, tau^2) on top of cutoff + 1 + sqrt(2)*tau*quantile(1-delta).
    Only candidates sorting strictly above the noisy threshold are returned,
    descending; ties against the threshold suppress.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    v_bottom = ThresholdSpec.gaussian(h.cutoff_count, tau, delta).h_bottom + src.gaussian(
        tau, "bottom"
    )
    noisy = [(u, c + src.gaussian(tau, "count", u)) for u, c in h.candidates()]
    noisy.sort(key=lambda kv: (-kv[1], kv[0]))
    released = [(u, v) for u, v in noisy if v > v_bottom]
    return NoisyRelease(entries=released)


def unk_gumbel(
    h: LimitedHistogram,
    k: int,
    tau: float,
    delta: float,
    src: NoiseSource,
) -> NoisyRelease:
    """Gumbel-race top-k over a limited domain.

    Only items strictly above the cutoff count may race; the threshold races
    too, with base cutoff + 1 + tau*ln(1/delta).  Race survivors above the
    threshold get fresh Gaussian counts.  If fewer than k survive, all
    survivors are returned and the bottom sentinel is flagged.
    """
    if k > h.k_bar:
        raise ValueError(f"k={k} exceeds k_bar={h.k_bar}")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    cutoff = h.cutoff_count
    v_bottom = ThresholdSpec.gumbel(cutoff, tau, delta).h_bottom + src.gumbel(
        tau / 2.0, "bottom"
    )
    race = [
        (u, c + src.gumbel(tau / 2.0, "race", u))
        for u, c in h.candidates()
        if c > cutoff
    ]
    race.sort(key=lambda kv: (-kv[1], kv[0]))
    survivors = [(u, v) for u, v in race if v > v_bottom]
    counts = dict(h.top)
    if len(survivors) < k:
        entries = [(u, counts[u] + src.gaussian(tau, "count", u)) for u, _ in survivors]
        return NoisyRelease(entries=entries, bottom_present=True)
    entries = [(u, counts[u] + src.gaussian(tau, "count", u)) for u, _ in survivors[:k]]
    return NoisyRelease(entries=entries)
