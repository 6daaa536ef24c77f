"""Command-line interface.

Subcommands: ``calibrate`` (budget arithmetic to noise scale), ``simulate``
(run a mechanism over a synthetic or file stream, release log to CSV),
``optimize-base`` (per-base variance table), ``verify`` (statistical and
exhaustive checks, JSON report), ``experiment`` (canned experiment CSVs).

Exit codes: 0 success, 1 check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .accounting import (
    DpBudget,
    MechanismSpec,
    PrivacyParams,
    calibrate_rho,
    mechanism_budget,
    zcdp_to_dp,
)
from .continual_unknown import unk_base_run
from .experiments import (
    SCHEMA_TAG,
    base_noise_sweep,
    base_noise_table,
    fig4_error_traces,
    write_csv,
)
from .known import known_base_run, known_gauss, known_gumbel_topk
from .meta import QuadrantSelector, meta_run
from .noise import NoiseSource
from .oneshot_unknown import LimitedHistogram, unk_gauss, unk_gumbel
from .releases import histogram_of_stream
from .sparse_topk import SparseGumbConfig, recommended_eta, sparse_gumb_run
from .streams import StreamSpec, generate, item_label
from .tree import TreeParams
from .verification import run_check

# how a unit of zCDP budget maps back to a noise scale, per mechanism
_RHO_TO_TAU = {
    "bin-mech": lambda rho, a: math.sqrt(1.0 / (2.0 * rho)),
    "known-base": lambda rho, a: math.sqrt(a.delta0 / (2.0 * rho)),
    "known-gauss": lambda rho, a: math.sqrt(a.delta0 / (2.0 * rho)),
    "meta-kr": lambda rho, a: math.sqrt(a.delta0 / (2.0 * rho)),
    "unk-gauss": lambda rho, a: math.sqrt(a.delta0 / (2.0 * rho)),
    "unk-base": lambda rho, a: math.sqrt(a.delta0 / (2.0 * rho)),
    "meta-ur": lambda rho, a: math.sqrt(a.delta0 / (2.0 * rho)),
    "known-gumbel": lambda rho, a: math.sqrt(a.k / rho),
    "meta-ku": lambda rho, a: math.sqrt(a.k / rho),
    "unk-gumbel": lambda rho, a: math.sqrt(a.k / rho),
    "meta-uu": lambda rho, a: math.sqrt(a.k / rho),
    "sparse-gumb": lambda rho, a: math.sqrt((2.0 * a.k + 4.0) / (2.0 * rho)),
}

# multiplier on the per-item threshold mass in the total delta
_DELTA_MULTIPLIER = {
    "unk-gauss": lambda a: a.delta0,
    "unk-base": lambda a: a.delta0,
    "meta-ur": lambda a: a.delta0,
    "meta-uu": lambda a: 2 * a.k,
    "unk-gumbel": lambda a: a.k_bar,
}


def _cmd_calibrate(args) -> int:
    kind = args.mechanism
    if kind not in _RHO_TO_TAU:
        raise ValueError(f"unknown mechanism {kind!r}")
    if kind in _DELTA_MULTIPLIER:
        # the total delta splits evenly between conversion slack and
        # threshold mass; the paper-side split is unspecified, this is a
        # documented default
        delta_prime = args.delta / 2.0
        multiplier = _DELTA_MULTIPLIER[kind](args)
        delta_threshold = args.delta / 2.0 / multiplier
    else:
        delta_prime = args.delta
        delta_threshold = None
    rho = calibrate_rho(DpBudget(args.epsilon, args.delta), delta_prime)
    tau = _RHO_TO_TAU[kind](rho, args)
    spec = MechanismSpec(
        kind=kind, delta0=args.delta0, k=args.k, k_bar=args.kbar,
        switches=args.switches,
    )
    params = PrivacyParams(
        tau=tau, delta=delta_threshold if delta_threshold is not None else 0.5,
        delta_prime=delta_prime,
    )
    budget = mechanism_budget(spec, params)
    achieved = zcdp_to_dp(budget, delta_prime)
    print(json.dumps({
        "mechanism": kind,
        "target_epsilon": args.epsilon,
        "target_delta": args.delta,
        "tau": tau,
        "rho": budget.rho,
        "delta_prime": delta_prime,
        "delta_threshold_per_item": delta_threshold,
        "delta_event": budget.delta_event,
        "achieved_epsilon": achieved.epsilon,
        "achieved_delta": achieved.delta,
    }, indent=2))
    return 0


def _stream_from_args(args):
    spec = StreamSpec(
        kind=args.stream,
        d=args.d,
        T=args.t_max,
        zipf_exponent=args.exponent,
        switch_times=tuple(args.switch_times or ()),
        switches=args.switches or 0,
        seed=args.seed,
        path=args.path,
    )
    return generate(spec)


def _cmd_simulate(args) -> int:
    events = _stream_from_args(args)
    T = max(args.t_max, len(events))
    domain = sorted({item_label(i, args.d) for i in range(args.d)} | set().union(*events, frozenset()))
    src = NoiseSource(args.seed)
    params = TreeParams(T=T, r=args.base, tau=args.tau)
    mech = args.mechanism

    if mech == "sparse-gumb":
        config = SparseGumbConfig(
            k=args.k, switches=args.switches, tau=args.tau, r=args.base,
            eta=(recommended_eta(
                SparseGumbConfig(k=args.k, switches=args.switches, tau=args.tau, r=args.base),
                len(domain), T, 0.05,
            ) if args.eta == "auto" else float(args.eta)),
        )
        releases, log = sparse_gumb_run(events, domain, config, src)
        header = ["t", "selected_labels", "counts", "switch_flag"]
        switch_rounds = set(log.switch_rounds)
        rows = []
        for t, release in enumerate(releases, start=1):
            rows.append((
                t,
                ";".join(u for u, _ in release.entries),
                ";".join(f"{v:.4f}" for _, v in release.entries),
                1 if t in switch_rounds else 0,
            ))
        _emit(args.out, header, rows)
        return 0

    if mech == "known-base":
        releases = known_base_run(events, domain, params, src, delta0=args.delta0)
    elif mech == "unk-base":
        releases = unk_base_run(events, params, args.delta, src, delta0=args.delta0)
    elif mech == "meta":
        selector = QuadrantSelector(
            domain_known=args.quadrant in ("kr", "ku"),
            restricted=args.quadrant in ("kr", "ur"),
            delta0=args.delta0, k=args.k, k_bar=args.kbar,
            domain=tuple(domain) if args.quadrant in ("kr", "ku") else None,
        )
        releases = meta_run(events, selector, args.tau, args.delta, params, src)
    elif mech in ("known-gauss", "known-gumbel", "unk-gauss", "unk-gumbel"):
        counts = histogram_of_stream(
            events, domain if mech.startswith("known") else None
        )
        if mech == "known-gauss":
            one = known_gauss(counts, args.tau, src)
        elif mech == "known-gumbel":
            one = known_gumbel_topk(counts, args.k, args.tau, src)
        elif mech == "unk-gauss":
            one = unk_gauss(LimitedHistogram.from_counts(counts, args.kbar),
                            args.tau, args.delta, src)
        else:
            one = unk_gumbel(LimitedHistogram.from_counts(counts, args.kbar),
                             args.k, args.tau, args.delta, src)
        releases = [one]
    else:
        raise ValueError(f"unknown mechanism {mech!r}")

    header = ["t", "label", "noisy_count"]
    rows = []
    start_t = len(events) if len(releases) == 1 else 1
    for t, release in enumerate(releases, start=start_t):
        for label, value in release.entries:
            rows.append((t, label, f"{value:.6f}"))
    _emit(args.out, header, rows)
    return 0


def _emit(out: str | None, header, rows):
    if out:
        write_csv(out, header, rows)
    else:
        print(SCHEMA_TAG)
        print(",".join(header))
        for row in rows:
            print(",".join(str(v) for v in row))


def _cmd_optimize_base(args) -> int:
    if args.sweep:
        grid = args.t_grid or [10 ** k for k in range(3, 7)]
        header, rows = base_noise_sweep(grid)
    else:
        header, rows = base_noise_table(args.t_max)
    _emit(args.out, header, rows)
    return 0


def _cmd_verify(args) -> int:
    report = run_check(args.check, trials=args.trials, seed=args.seed)
    print(json.dumps(report, indent=2, default=str))
    return 0 if report["passed"] else 1


def _cmd_experiment(args) -> int:
    if args.which == "fig1":
        grid = args.t_grid or [10 ** k for k in range(3, 7)]
        header, rows = base_noise_sweep(grid)
    elif args.which == "fig4":
        header, rows = fig4_error_traces(trials=args.trials, seed=args.seed)
    else:
        raise ValueError(f"unknown experiment {args.which!r}")
    _emit(args.out, header, rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contmech",
        description="Differentially private running histograms under continual observation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cal = sub.add_parser("calibrate", help="noise scale from a target (epsilon, delta)")
    cal.add_argument("--epsilon", type=float, required=True)
    cal.add_argument("--delta", type=float, required=True)
    cal.add_argument("--mechanism", required=True)
    cal.add_argument("--k", type=int, default=1)
    cal.add_argument("--delta0", type=int, default=1)
    cal.add_argument("--kbar", type=int, default=10)
    cal.add_argument("--switches", type=int, default=1)
    cal.set_defaults(func=_cmd_calibrate)

    sim = sub.add_parser("simulate", help="run a mechanism over a stream")
    sim.add_argument("--mechanism", required=True)
    sim.add_argument("--quadrant", choices=("kr", "ku", "ur", "uu"), default="kr")
    sim.add_argument("--stream", default="zipf")
    sim.add_argument("--path", default=None, help="event file for --stream file")
    sim.add_argument("--d", type=int, default=20)
    sim.add_argument("--t-max", dest="t_max", type=int, default=100)
    sim.add_argument("--tau", type=float, default=1.0)
    sim.add_argument("--delta", type=float, default=0.05)
    sim.add_argument("--delta0", type=int, default=None)
    sim.add_argument("--k", type=int, default=1)
    sim.add_argument("--kbar", type=int, default=10)
    sim.add_argument("--switches", type=int, default=1)
    sim.add_argument("--eta", default="auto")
    sim.add_argument("--base", type=int, default=2)
    sim.add_argument("--exponent", type=float, default=1.0)
    sim.add_argument("--switch-times", dest="switch_times", type=int, nargs="*")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", default=None)
    sim.set_defaults(func=_cmd_simulate)

    opt = sub.add_parser("optimize-base", help="per-base variance objective table")
    opt.add_argument("--t-max", dest="t_max", type=int, required=True)
    opt.add_argument("--sweep", action="store_true")
    opt.add_argument("--t-grid", dest="t_grid", type=int, nargs="*")
    opt.add_argument("--out", default=None)
    opt.set_defaults(func=_cmd_optimize_base)

    ver = sub.add_parser("verify", help="statistical/exhaustive verification checks")
    ver.add_argument("--check", required=True)
    ver.add_argument("--trials", type=int, default=None)
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=_cmd_verify)

    exp = sub.add_parser("experiment", help="canned experiment CSVs")
    exp.add_argument("which", choices=("fig1", "fig4"))
    exp.add_argument("--out", default=None)
    exp.add_argument("--trials", type=int, default=200)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--t-grid", dest="t_grid", type=int, nargs="*")
    exp.set_defaults(func=_cmd_experiment)
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
