"""Stream generation: Zipf frequencies, determinism, and the well-separated
stream generator plus its validator."""

import json

import numpy as np
import pytest

from contmech.streams import (
    AssumptionStream,
    StreamSpec,
    generate,
    generate_assumption_stream,
    item_label,
    separation_margins,
    validate_assumption_stream,
)


def test_single_item_domain():
    events = generate(StreamSpec(kind="zipf", d=1, T=50, seed=0))
    assert all(e == {item_label(0, 1)} for e in events)


def test_zipf_top_frequency_matches_harmonic():
    d, T = 100, 100_000
    events = generate(StreamSpec(kind="zipf", d=d, T=T, zipf_exponent=1.0, seed=1))
    counts = {}
    for e in events:
        (u,) = e
        counts[u] = counts.get(u, 0) + 1
    harmonic = sum(1.0 / i for i in range(1, d + 1))
    top_freq = max(counts.values()) / T
    assert abs(top_freq - 1.0 / harmonic) < 0.01


def test_generate_deterministic():
    spec = StreamSpec(kind="switching-zipf", d=20, T=500, switch_times=(100, 300), seed=7)
    assert generate(spec) == generate(spec)


def test_switching_changes_favorite():
    spec = StreamSpec(kind="switching-zipf", d=30, T=3000, switch_times=(1001, 2001), seed=2)
    events = generate(spec)
    def favorite(chunk):
        counts = {}
        for e in chunk:
            (u,) = e
            counts[u] = counts.get(u, 0) + 1
        return max(counts, key=counts.get)
    f1 = favorite(events[:1000])
    f2 = favorite(events[1000:2000])
    f3 = favorite(events[2000:])
    assert len({f1, f2, f3}) == 3


def test_adversarial_rotates_leader():
    events = generate(StreamSpec(kind="adversarial", d=3, T=12, period=2))
    assert events[0] == events[1] == {item_label(0, 3)}
    assert events[2] == {item_label(1, 3)}


def test_file_stream_roundtrip(tmp_path):
    path = tmp_path / "events.json"
    path.write_text(json.dumps([["a"], ["a", "b"], []]))
    events = generate(StreamSpec(kind="file", path=str(path)))
    assert events == [frozenset({"a"}), frozenset({"a", "b"}), frozenset()]


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        generate(StreamSpec(kind="nope", d=2, T=2))


def test_assumption_stream_validates():
    for s in (1, 2, 3):
        spec = StreamSpec(kind="assumption1", d=6, switches=s, alphas=(2, 5, 11))
        stream = generate_assumption_stream(spec)
        assert validate_assumption_stream(stream, 6) == []
        assert len(stream.epochs) == s
        gap = 11 + 5 + 2  # clear + hold margins + slack
        assert stream.T == gap * s * (s + 1) // 2


def test_assumption_margins_fixed_point():
    a1, a2, a3 = separation_margins(1.0, 2, 10, 0.02)
    assert 0 < a1 < a2 < a3
    spec = StreamSpec(kind="assumption1", d=10, switches=2, alphas=(a1, a2, a3))
    stream = generate_assumption_stream(spec)
    assert validate_assumption_stream(stream, 10) == []


def test_assumption_validator_rejects_bad_alphas():
    spec = StreamSpec(kind="assumption1", d=4, switches=1, alphas=(2, 5, 11))
    stream = generate_assumption_stream(spec)
    broken = AssumptionStream(
        events=stream.events,
        alphas=(5.0, 2.0, 11.0),
        buffers=stream.buffers,
        epochs=stream.epochs,
        primes=stream.primes,
        clusters=stream.clusters,
    )
    assert validate_assumption_stream(broken, 4)


def test_assumption_validator_rejects_shifted_epoch():
    spec = StreamSpec(kind="assumption1", d=4, switches=2, alphas=(2, 5, 11))
    stream = generate_assumption_stream(spec)
    # drag the second epoch's start into the crossover window
    a, b = stream.epochs[1]
    broken = AssumptionStream(
        events=stream.events,
        alphas=stream.alphas,
        buffers=stream.buffers,
        epochs=[stream.epochs[0], (a - 2 * int(stream.alphas[0]) - 2, b)],
        primes=stream.primes,
        clusters=stream.clusters,
    )
    problems = validate_assumption_stream(broken, 4)
    assert problems


def test_assumption_validator_rejects_empty_prime():
    spec = StreamSpec(kind="assumption1", d=4, switches=1, alphas=(2, 5, 11))
    stream = generate_assumption_stream(spec)
    broken = AssumptionStream(
        events=stream.events,
        alphas=stream.alphas,
        buffers=stream.buffers,
        epochs=stream.epochs,
        primes=[(10, 5)],
        clusters=stream.clusters,
    )
    assert any("subinterval" in p for p in validate_assumption_stream(broken, 4))


def test_assumption_validator_rejects_foreign_items():
    spec = StreamSpec(kind="assumption1", d=4, switches=1, alphas=(2, 5, 11))
    stream = generate_assumption_stream(spec)
    events = list(stream.events)
    events[0] = frozenset({"zzz"})
    broken = AssumptionStream(
        events=events,
        alphas=stream.alphas,
        buffers=stream.buffers,
        epochs=stream.epochs,
        primes=stream.primes,
        clusters=stream.clusters,
    )
    assert any("outside domain" in p for p in validate_assumption_stream(broken, 4))


def test_assumption_requires_enough_items():
    with pytest.raises(ValueError):
        generate_assumption_stream(StreamSpec(kind="assumption1", d=1, switches=2))
