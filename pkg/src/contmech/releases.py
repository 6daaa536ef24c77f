"""Shared output and histogram types.

A histogram is a plain mapping from item label to non-negative integer
count.  A release is an ordered list of (label, noisy count) pairs, plus a
flag for the bottom sentinel that unknown-domain top-k mechanisms emit when
the noisy threshold cut off the list early.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

__all__ = ["BOTTOM", "NoisyRelease", "histogram_of_stream", "event_stream_counts"]

BOTTOM = "⊥"  # reserved sentinel label


@dataclass
class NoisyRelease:
    """One round's output: (label, noisy count) pairs in release order."""

    entries: list[tuple[str, float]] = field(default_factory=list)
    bottom_present: bool = False

    def labels(self) -> list[str]:
        return [label for label, _ in self.entries]

    def as_dict(self) -> dict[str, float]:
        return dict(self.entries)

    def top(self) -> tuple[str, float] | None:
        return self.entries[0] if self.entries else None


def histogram_of_stream(events: Iterable[Iterable[str]], domain=None) -> dict[str, int]:
    """Counts of every item over a full event stream.

    With a domain, absent items appear with count 0 and foreign items raise.
    """
    counts: dict[str, int] = dict.fromkeys(domain, 0) if domain is not None else {}
    for event in events:
        for item in event:
            if domain is not None and item not in counts:
                raise ValueError(f"item {item!r} outside the declared domain")
            counts[item] = counts.get(item, 0) + 1
    return counts


def event_stream_counts(events, domain=None) -> list[dict[str, int]]:
    """Running histogram after each round (list of dict snapshots)."""
    counts: dict[str, int] = dict.fromkeys(domain, 0) if domain is not None else {}
    out = []
    for event in events:
        for item in event:
            if domain is not None and item not in counts:
                raise ValueError(f"item {item!r} outside the declared domain")
            counts[item] = counts.get(item, 0) + 1
        out.append(dict(counts))
    return out


def validate_event(event, delta0: int | None, domain=None) -> frozenset:
    """Check one round's item set against the declared bounds."""
    items = frozenset(event)
    if delta0 is not None and len(items) > delta0:
        raise ValueError(f"event has {len(items)} items, exceeding the declared bound {delta0}")
    if domain is not None:
        for item in items:
            if item not in domain:
                raise ValueError(f"item {item!r} outside the declared domain")
    return items


def descending(entries: Mapping[str, float] | Iterable[tuple[str, float]]) -> list[tuple[str, float]]:
    """Sort (label, value) pairs by value descending, label ascending on ties."""
    pairs = entries.items() if isinstance(entries, Mapping) else entries
    return sorted(pairs, key=lambda kv: (-kv[1], kv[0]))
