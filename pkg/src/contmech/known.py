"""Known-domain mechanisms: one-shot Gaussian and Gumbel top-k releases,
and the continual per-item tree composition.

The domain is supplied up front, so zero counts are representable and every
round's release can cover the full domain.
"""

from __future__ import annotations

import numpy as np

from .noise import NoiseSource
from .releases import NoisyRelease, descending, validate_event
from .tree import TreeParams, TreeRunner, decompose

__all__ = ["known_gauss", "known_gumbel_topk", "known_base_run", "KnownBase"]


def known_gauss(counts: dict[str, int], tau: float, src: NoiseSource) -> NoisyRelease:
    """Add N(0, tau^2) to every count of the supplied (full) domain.

    The output always has one entry per domain label, descending by noisy
    count with lexicographic tie-break.
    """
    noisy = {u: c + src.gaussian(tau, "count", u) for u, c in counts.items()}
    return NoisyRelease(entries=descending(noisy))


def known_gumbel_topk(counts: dict[str, int], k: int, tau: float, src: NoiseSource) -> NoisyRelease:
    """Gumbel-race top-k selection with fresh Gaussian counts.

    Each label races with count + Gumbel(tau/2); the k winners are released
    in race order with fresh N(count, tau^2) values.  With tau == 0 this is
    the exact top-k by count with lexicographic tie-break.
    """
    if k > len(counts):
        raise ValueError(f"k={k} exceeds domain size {len(counts)}")
    race = {u: c + src.gumbel(tau / 2.0, "race", u) for u, c in counts.items()}
    winners = [u for u, _ in descending(race)[:k]]
    entries = [(u, counts[u] + src.gaussian(tau, "count", u)) for u in winners]
    return NoisyRelease(entries=entries)


def _bit_matrix(events, labels: list[str], T: int) -> np.ndarray:
    index = {u: i for i, u in enumerate(labels)}
    bits = np.zeros((len(labels), T), dtype=np.int64)
    for t, event in enumerate(events):
        for item in event:
            bits[index[item], t] = 1
    return bits


def known_base_run(
    events,
    domain,
    params: TreeParams,
    src: NoiseSource,
    delta0: int | None = None,
) -> list[NoisyRelease]:
    """One independent tree per domain item; each round releases every
    item's noisy running count.

    Per-item noise streams are disjoint (namespaced by label), so each
    item's outputs match a standalone tree run under the same source.
    Events larger than the declared delta0 bound, or containing items
    outside the domain, are rejected.
    """
    labels = sorted(domain)
    label_set = set(labels)
    events = [validate_event(e, delta0, label_set) for e in events]
    T, r = params.T, params.r
    if len(events) > T:
        raise ValueError(f"stream length {len(events)} exceeds T={T}")
    bits = _bit_matrix(events, labels, T)

    # Per-level interval sums for all items at once: level i has floor(T/r^(i-1))
    # full blocks of the level below.
    level_counts: list[np.ndarray] = [bits]
    while level_counts[-1].shape[1] >= r:
        prev = level_counts[-1]
        n = prev.shape[1] // r
        level_counts.append(prev[:, : n * r].reshape(len(labels), n, r).sum(axis=2))

    sigma = params.cell_sigma
    if sigma == 0.0:
        noisy_levels = [c.astype(float) for c in level_counts]
    else:
        noisy_levels = []
        n_rounds = len(events)
        for lvl, cells in enumerate(level_counts, start=1):
            noise = np.zeros(cells.shape, dtype=float)
            # cells ending after the last provided round are never queried
            used = min(cells.shape[1], n_rounds // r ** (lvl - 1))
            for i, label in enumerate(labels):
                item_src = src.child("item", label)
                for j in range(used):
                    noise[i, j] = item_src.gaussian(sigma, "cell", lvl, j + 1)
            noisy_levels.append(cells + noise)

    releases = []
    for t in range(1, len(events) + 1):
        totals = np.zeros(len(labels))
        for level, index in decompose(t, r).cells:
            totals += noisy_levels[level - 1][:, index - 1]
        releases.append(NoisyRelease(entries=descending(zip(labels, totals.tolist()))))
    return releases


class KnownBase:
    """Streaming form of ``known_base_run``: O(r * levels) state per item."""

    def __init__(self, domain, params: TreeParams, src: NoiseSource, delta0: int | None = None):
        self.labels = sorted(domain)
        self.params = params
        self.delta0 = delta0
        self._runners = {
            u: TreeRunner(params, src.child("item", u)) for u in self.labels
        }

    def step(self, event) -> NoisyRelease:
        items = validate_event(event, self.delta0, set(self.labels))
        noisy = {
            u: runner.step(1 if u in items else 0)
            for u, runner in self._runners.items()
        }
        return NoisyRelease(entries=descending(noisy))

    def run(self, events) -> list[NoisyRelease]:
        return [self.step(e) for e in events]
