"""Experiment harness: base-vs-noise tables, error-trace comparisons, and
the versioned CSV format every downstream consumer reads.

All experiments are deterministic under a fixed seed: trial seeds derive
from the base seed by offset, aggregation order is fixed, and floats are
serialized with a fixed format, so identical invocations produce
byte-identical CSV files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .known import known_base_run
from .meta import QuadrantSelector, meta_run
from .noise import NoiseSource
from .sparse_topk import SparseGumbConfig, error_metric, recommended_eta, sparse_gumb_run
from .streams import StreamSpec, generate, item_label
from .tree import TreeParams, base_objective, optimal_base, tree_levels

__all__ = [
    "SCHEMA_TAG",
    "write_csv",
    "read_csv",
    "base_noise_table",
    "base_noise_sweep",
    "fig4_error_traces",
    "ExperimentResult",
]

SCHEMA_TAG = "# contmech-v1"


def write_csv(path: str, header: list[str], rows) -> None:
    """Versioned CSV: schema tag line, header row, data rows (UTF-8, LF)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SCHEMA_TAG + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


def read_csv(path: str) -> tuple[list[str], list[list[str]]]:
    """Read a versioned CSV; rejects files without the schema tag."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != SCHEMA_TAG:
            raise ValueError(f"unsupported CSV schema: {first!r}")
        header = fh.readline().rstrip("\n").split(",")
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    return header, rows


@dataclass
class ExperimentResult:
    """One experiment's record: identity, outputs, and provenance."""

    mechanism: str
    parameters: dict
    seed: int
    trials: int
    err_max: float
    trace: list[float] = field(default_factory=list)
    wall_clock: float = 0.0  # informational; excluded from any output file


def base_noise_table(T: int) -> tuple[list[str], list[tuple]]:
    """Per-base objective and noise-std ratio against base 2, for one T."""
    header = ["r", "objective", "std_ratio_vs_base2"]
    ref = base_objective(T, 2)
    rows = []
    for r in range(2, min(T, 64) + 1):
        obj = base_objective(T, r)
        rows.append((r, obj, f"{math.sqrt(obj / ref):.6f}"))
    return header, rows


def base_noise_sweep(T_grid) -> tuple[list[str], list[tuple]]:
    """Noise-std factors across stream lengths, for plotting std vs T."""
    header = ["T", "r", "std_factor", "std_ratio_vs_base2"]
    rows = []
    for T in T_grid:
        ref = math.sqrt(base_objective(T, 2))
        for r in range(2, min(T, 16) + 1):
            std = tree_levels(T, r) * math.sqrt(r - 1)
            rows.append((T, r, f"{std:.6f}", f"{std / ref:.6f}"))
        best_r, best_obj = optimal_base(T)
        rows.append((T, best_r, f"{math.sqrt(best_obj):.6f}",
                     f"{math.sqrt(best_obj) / ref:.6f}"))
    return header, rows


def _mean_traces(traces: list[list[float]]) -> list[float]:
    n = len(traces)
    return [sum(t[i] for t in traces) / n for i in range(len(traces[0]))]


def fig4_error_traces(
    d: int = 100,
    T: int = 1000,
    trials: int = 200,
    tau: float = 1.0,
    seed: int = 0,
    switch_times: tuple[int, int] = (201, 401),
    s_values: tuple[int, ...] = (1, 3, 5),
    eta_factors: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0),
    beta: float = 0.05,
) -> tuple[list[str], list[tuple]]:
    """Mean per-round error of the three continual top-1 approaches on a
    switching Zipf stream, at equalized privacy.

    The scalings tau*sqrt(d) (per-item trees), tau*sqrt(2) (table meta),
    and tau*sqrt(6) (switch-budgeted, k=1) put every mechanism at the same
    1/(2 tau^2) budget.  The early switch times leave the last favored item
    enough rounds to overtake the previous leaders decisively, so a run
    that spent its switch budget shows steadily growing error.
    """
    domain = [item_label(j, d) for j in range(d)]
    series_traces: dict[str, list[list[float]]] = {}
    for trial in range(trials):
        spec = StreamSpec(
            kind="switching-zipf", d=d, T=T, zipf_exponent=1.0,
            switch_times=switch_times, seed=seed + 1000 + trial,
        )
        events = generate(spec)
        src = NoiseSource(seed + trial)

        kb_params = TreeParams(T=T, r=2, tau=tau * math.sqrt(d))
        kb = known_base_run(events, domain, kb_params, src.child("known-base"))
        series_traces.setdefault("known-base", []).append(
            error_metric(kb, events, domain).per_round
        )

        meta_params = TreeParams(T=T, r=2, tau=0.0)
        selector = QuadrantSelector(
            domain_known=True, restricted=False, k=1, domain=tuple(domain)
        )
        mk = meta_run(events, selector, tau * math.sqrt(2), 0.5,
                      meta_params, src.child("meta"))
        series_traces.setdefault("meta-known-gumbel", []).append(
            error_metric(mk, events, domain).per_round
        )

        for s in s_values:
            config = SparseGumbConfig(k=1, switches=s, tau=tau * math.sqrt(6))
            eta_ref = recommended_eta(config, d, T, beta)
            for factor in eta_factors:
                run_cfg = SparseGumbConfig(
                    k=1, switches=s, tau=tau * math.sqrt(6), eta=eta_ref * factor
                )
                rel, _ = sparse_gumb_run(
                    events, domain, run_cfg, src.child("sparse", s, str(factor))
                )
                name = f"sparse-gumb-s{s}-eta{factor:g}x"
                series_traces.setdefault(name, []).append(
                    error_metric(rel, events, domain).per_round
                )

    header = ["t", "series", "mean_error"]
    rows = []
    for name in sorted(series_traces):
        mean = _mean_traces(series_traces[name])
        for t, value in enumerate(mean, start=1):
            rows.append((t, name, f"{value:.6f}"))
    return header, rows
