"""Synthetic event-stream generation and validation.

Streams are lists of per-round item sets.  Zipf streams model organically
skewed data; switching variants rotate which items are favored so the true
top-k changes mid-stream; the well-separated kind builds deterministic count
trajectories whose leader epochs, crossover windows, and separation margins
are wide enough for the switch-budgeted top-k mechanism's utility guarantee
to apply (and ships with a validator that re-checks every interval condition
from scratch).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .tree import tree_levels

__all__ = [
    "StreamSpec",
    "generate",
    "item_label",
    "AssumptionStream",
    "separation_margins",
    "generate_assumption_stream",
    "validate_assumption_stream",
]


def item_label(i: int, d: int) -> str:
    """Zero-padded labels so lexicographic and numeric order agree."""
    width = max(3, len(str(d - 1)))
    return f"i{i:0{width}d}"


@dataclass(frozen=True)
class StreamSpec:
    """Recipe for a synthetic stream.

    kinds: ``zipf`` (one Zipf-sampled item per round), ``switching-zipf``
    (rank-to-item map rotates at each switch time), ``assumption1``
    (deterministic well-separated epochs; uses ``switches`` and ``alphas``),
    ``adversarial`` (round-robin leader churn), ``file`` (JSON list of item
    lists at ``path``).
    """

    kind: str
    d: int = 1
    T: int = 0
    zipf_exponent: float = 1.0
    switch_times: tuple[int, ...] = ()
    switches: int = 0
    alphas: tuple[float, float, float] | None = None
    period: int = 5
    seed: int = 0
    path: str | None = None


def _zipf_weights(d: int, exponent: float) -> np.ndarray:
    ranks = np.arange(1, d + 1, dtype=float)
    w = ranks ** -exponent
    return w / w.sum()


def generate(spec: StreamSpec) -> list[frozenset]:
    if spec.kind == "file":
        if spec.path is None:
            raise ValueError("file streams need a path")
        with open(spec.path, encoding="utf-8") as fh:
            rounds = json.load(fh)
        return [frozenset(str(u) for u in event) for event in rounds]
    if spec.d < 1 or (spec.T < 1 and spec.kind != "assumption1"):
        raise ValueError("stream spec needs positive d and T")
    if spec.kind == "zipf":
        return _zipf_stream(spec, ())
    if spec.kind == "switching-zipf":
        return _zipf_stream(spec, tuple(spec.switch_times))
    if spec.kind == "adversarial":
        return [
            frozenset({item_label((t // spec.period) % spec.d, spec.d)})
            for t in range(spec.T)
        ]
    if spec.kind == "assumption1":
        return generate_assumption_stream(spec).events
    raise ValueError(f"unknown stream kind {spec.kind!r}")


def _zipf_stream(spec: StreamSpec, switch_times: tuple[int, ...]) -> list[frozenset]:
    """One Zipf-sampled item per round; each switch time shifts which item
    sits at which rank, so the favored item changes."""
    rng = np.random.default_rng(spec.seed)
    weights = _zipf_weights(spec.d, spec.zipf_exponent)
    ranks = rng.choice(spec.d, size=spec.T, p=weights)
    switches = sorted(t for t in switch_times if t > 0)
    shift_step = max(1, spec.d // (len(switches) + 1)) if switches else 0
    events = []
    phase = 0
    for t in range(1, spec.T + 1):
        while phase < len(switches) and t >= switches[phase]:
            phase += 1
        item = (int(ranks[t - 1]) + phase * shift_step) % spec.d
        events.append(frozenset({item_label(item, spec.d)}))
    return events


@dataclass
class AssumptionStream:
    """A well-separated stream plus the interval structure that certifies it.

    ``epochs[l] = (a, b)`` is the l-th leader interval, ``primes[l]`` its
    strongly separated subinterval, ``buffers[l] = (a, b)`` the window where
    no new leader should be adopted; ``buffers[0]`` is the opening interval
    with no clear leader.  ``clusters[l]`` is the leader set of epoch l.
    """

    events: list[frozenset]
    alphas: tuple[float, float, float]
    buffers: list[tuple[int, int]]
    epochs: list[tuple[int, int]] = field(default_factory=list)
    primes: list[tuple[int, int]] = field(default_factory=list)
    clusters: list[set] = field(default_factory=list)

    @property
    def T(self) -> int:
        return len(self.events)


def separation_margins(
    tau: float, switches: int, d: int, beta: float, r: int = 2, rounds_hint: int = 1000
) -> tuple[int, int, int]:
    """Margins (close, hold, clear) sized to the mechanism's noise scales.

    close: the selection race stays inside a cluster this tight.
    hold:  the scan should never fire while the leader is this close to top.
    clear: a challenger this far ahead must trigger a reselection.
    The stream length depends on the margins and vice versa (log terms), so
    the fixed point is iterated.
    """
    if switches < 1:
        raise ValueError("switches must be >= 1")
    T = max(rounds_hint, 2)
    for _ in range(8):
        levels = tree_levels(T, r)
        a1 = math.sqrt(switches) * tau * math.log(d / beta)
        a_tree = tau * levels * math.sqrt(2 * (switches + 1) * (r - 1) * math.log(6 * T / beta))
        a_scan = 8 * tau * math.sqrt(switches) * math.log(6 * d * T / beta)
        alpha1 = max(1, math.ceil(a1))
        alpha2 = 2 * alpha1 + 1
        alpha3 = math.ceil(alpha2 + 2 * (a_tree + a_scan)) + 1
        gap = alpha3 + alpha2 + 2
        T_new = gap * switches * (switches + 1) // 2
        if T_new == T:
            break
        T = T_new
    return alpha1, alpha2, alpha3


def generate_assumption_stream(spec: StreamSpec) -> AssumptionStream:
    """Deterministic epochs: leader l appears every round of phase l, phases
    long enough that each new leader overtakes the old one and builds a
    ``clear``-sized lead before its phase ends."""
    s = spec.switches
    if s < 1:
        raise ValueError("assumption1 streams need switches >= 1")
    if spec.d < s:
        raise ValueError("assumption1 streams need d >= switches")
    alphas = spec.alphas or (1, 3, 8)
    a1, a2, a3 = alphas
    if not a1 < a2 < a3:
        raise ValueError("alphas must be strictly increasing")
    gap = int(a3 + a2 + 2)

    events: list[frozenset] = []
    phase_start = []
    for ell in range(1, s + 1):
        phase_start.append(len(events) + 1)
        leader = item_label(ell - 1, spec.d)
        events.extend([frozenset({leader})] * (ell * gap))
    T = len(events)

    # leader l's count crosses leader (l-1)'s frozen total 'gap * (l-1)'
    # rounds into phase l; cross_1 is 0 (no previous leader)
    cross = [0] * (s + 2)
    for ell in range(2, s + 1):
        cross[ell] = phase_start[ell - 1] + (ell - 1) * gap - 1
    cross[s + 1] = T + int(a3) + 1  # sentinel: no further crossover

    a1i, a2i, a3i = int(math.ceil(a1)), int(math.ceil(a2)), int(math.ceil(a3))
    buffers = [(1, min(a2i, T))]
    epochs, primes, clusters = [], [], []
    for ell in range(1, s + 1):
        start = cross[ell] + a1i + 1
        end = min(cross[ell + 1] - a1i - 1, T)
        epochs.append((start, end))
        primes.append((cross[ell] + a3i, min(cross[ell + 1] - a3i, T)))
        clusters.append({item_label(ell - 1, spec.d)})
        if ell < s:
            buffers.append((end, min(cross[ell + 1] + a2i, T)))
    buffers.append((T, T))
    return AssumptionStream(
        events=events,
        alphas=(float(a1), float(a2), float(a3)),
        buffers=buffers,
        epochs=epochs,
        primes=primes,
        clusters=clusters,
    )


def validate_assumption_stream(stream: AssumptionStream, d: int) -> list[str]:
    """Re-check every interval condition from the raw events.

    Returns a list of violation messages (empty = valid).
    """
    a1, a2, a3 = stream.alphas
    problems = []
    if not a1 < a2 < a3:
        problems.append("alphas not strictly increasing")
    T = stream.T
    labels = [item_label(i, d) for i in range(d)]
    counts = dict.fromkeys(labels, 0)
    history = [dict(counts)]
    for event in stream.events:
        for u in event:
            if u not in counts:
                problems.append(f"event item {u!r} outside domain")
                counts[u] = 0
            counts[u] += 1
        history.append(dict(counts))

    def close_set(t: int) -> set:
        h = history[t]
        top = max(h.values())
        return {u for u, c in h.items() if c >= top - a1}

    covered = set()
    for a, b in stream.buffers + stream.epochs:
        covered.update(range(a, b + 1))
    if covered != set(range(1, T + 1)):
        problems.append("intervals do not cover every round")

    b0_start, b0_end = stream.buffers[0]
    for t in range(b0_start, b0_end + 1):
        h = history[t]
        if max(h.values()) - min(h.values()) > a2:
            problems.append(f"opening interval separation exceeded at round {t}")
            break

    for ell, (a, b) in enumerate(stream.epochs, start=1):
        if a > b:
            problems.append(f"epoch {ell} empty")
            continue
        cluster = close_set(a)
        for t in range(a, b + 1):
            h = history[t]
            if close_set(t) != cluster:
                problems.append(f"epoch {ell} cluster changes at round {t}")
                break
            worst_out = max(
                (h[v] for v in h if v not in cluster), default=-math.inf
            )
            if any(h[u] <= worst_out for u in cluster):
                problems.append(f"epoch {ell} leader not strict at round {t}")
                break
        if stream.clusters[ell - 1] != cluster:
            problems.append(f"epoch {ell} declared cluster mismatch")
        pa, pb = stream.primes[ell - 1]
        if pa > pb:
            problems.append(f"epoch {ell} has no strongly separated subinterval")
        elif not (a <= pa and pb <= b):
            problems.append(f"epoch {ell} subinterval escapes the epoch")
        else:
            for t in range(pa, pb + 1):
                h = history[t]
                worst_out = max(
                    (h[v] for v in h if v not in cluster), default=-math.inf
                )
                if any(h[u] < worst_out + a3 for u in cluster):
                    problems.append(f"epoch {ell} separation below margin at round {t}")
                    break
        ba, bb = stream.buffers[ell]
        for t in range(ba, bb + 1):
            h = history[t]
            top = max(h.values())
            if any(h[u] < top - a2 for u in cluster):
                problems.append(f"buffer {ell} leader drops too far at round {t}")
                break
    return problems
