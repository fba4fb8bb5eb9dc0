"""Command-line front end.

Subcommands:

* ``threshold`` — Monte Carlo failure-rate sweep and crossing estimate.
* ``analytic``  — solve critical-curve slices, emit CSV.
* ``match``     — run the matching solver on an edge-list file (debug).
* ``oracle``    — brute-force checks: ``duality`` and ``mle-vs-mwpm``.
* ``figure2``   — canned end-to-end bias-plane reproduction.

Options may come from a flat ``key=value`` config file (``--config``);
explicit flags override file values.  All emitted files embed the
resolved configuration; see FORMATS.md for column layouts.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import analytic, report
from .exact import duality_identity_check, mle_decode_success
from .decoder import decode_and_classify
from .harness import (
    FIXED,
    MATCHED,
    SYMMETRIC_AVERAGE,
    AssumedPolicy,
    ExperimentConfig,
    InsufficientDataError,
    biased_grid,
    estimate_threshold,
    run_sweep,
)
from .lattice import LatticeGeometry
from .matching import (
    InfeasibleMatchingError,
    brute_force_matching,
    min_weight_perfect_matching,
    read_edge_list,
)
from .noise import IndependentXZModel, RngSeedPolicy, sample_xz


def _parse_sizes(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part)


def _parse_grid(text: str) -> list[float]:
    """Total-rate grid: 'start:stop:step' or a comma-separated list."""
    if ":" in text:
        start, stop, step = (float(part) for part in text.split(":"))
        values = []
        value = start
        while value <= stop + 1e-12:
            values.append(round(value, 12))
            value += step
        return values
    return [float(part) for part in text.split(",") if part]


def _parse_assumed(text: str) -> AssumedPolicy:
    if text == "matched":
        return AssumedPolicy(MATCHED)
    if text == "symmetric":
        return AssumedPolicy(SYMMETRIC_AVERAGE)
    try:
        p_x, p_z = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--assumed must be 'matched', 'symmetric', or 'px,pz'; got {text!r}"
        )
    return AssumedPolicy(FIXED, (p_x, p_z))


def _load_config_file(path: str) -> dict[str, str]:
    values = {}
    with open(path) as stream:
        for raw in stream:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {raw.rstrip()!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = _coerce(value.strip())
    return values


def _coerce(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def _cmd_threshold(args) -> int:
    totals = _parse_grid(args.grid) if args.grid else None
    if totals is None:
        if args.px is None or args.pz is None:
            print("threshold: need --grid or both --px and --pz", file=sys.stderr)
            return 2
        grid = (IndependentXZModel(args.px, args.pz),)
        config = ExperimentConfig(
            sizes=_parse_sizes(args.n),
            actual_grid=grid,
            assumed_policy=args.assumed,
            trials=args.trials,
            master_seed=args.seed,
            workers=args.workers,
        )
    else:
        config = biased_grid(
            args.ratio,
            totals,
            _parse_sizes(args.n),
            args.trials,
            args.seed,
            policy=args.assumed,
            workers=args.workers,
        )

    curves = run_sweep(config, log=print)
    estimate = None
    if len(config.sizes) >= 2 and len(config.actual_grid) >= 2:
        try:
            estimate = estimate_threshold(curves)
            print(
                f"threshold (sum rate): {estimate.rate:.5f} "
                f"+- {estimate.uncertainty:.5f}"
            )
        except InsufficientDataError as exc:
            print(f"no crossing estimate: {exc}")
    paths = report.emit_report(args.out, args.prefix, curves, config, estimate)
    for path in paths:
        print(f"wrote {path}")
    return 0


def _cmd_analytic(args) -> int:
    ratios = [float(part) for part in args.ratios.split(",") if part]
    assumption = "matched" if args.assumed.kind == MATCHED else "symmetric_assumption"
    fixed = None
    if args.assumed.kind == FIXED:
        assumption = "fixed_assumed"
        fixed = args.assumed.fixed_rates
    points = analytic.solve_critical_curve(
        args.equation, ratios, assumption=assumption, fixed_assumed=fixed
    )
    report.write_analytic_csv(args.out, points)
    for pt in points:
        status = f"root={pt.root:.6f}" if pt.found else "no root in bracket"
        print(f"ratio={pt.slice_param:g} equation={pt.equation} {status}")
    print(f"wrote {args.out}")
    return 0


def _cmd_match(args) -> int:
    with open(args.edges) as stream:
        graph = read_edge_list(stream)
    try:
        matching = min_weight_perfect_matching(graph)
    except InfeasibleMatchingError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    for u, v in matching.pairs:
        print(f"{u} {v}")
    print(f"total weight: {matching.total_weight!r}")
    if args.brute:
        reference = brute_force_matching(graph)
        delta = abs(matching.total_weight - reference.total_weight)
        print(f"brute-force weight: {reference.total_weight!r} (|delta|={delta:.3g})")
    return 0


def _cmd_oracle(args) -> int:
    if args.mode == "duality":
        rng_js = [0.2 + 0.08 * k for k in range(args.pairs)]
        print("j_h,j_v,n,relative_error")
        worst = 0.0
        for k, j_h in enumerate(rng_js):
            j_v = math.atanh(math.exp(-2.0 * j_h))
            n = 2 + k % 2 if args.n is None else args.n
            error = duality_identity_check(analytic.CouplingsXZ(j_h, j_v), n)
            worst = max(worst, error)
            print(f"{j_h!r},{j_v!r},{n},{error!r}")
        print(f"worst relative error: {worst:.3e}")
        return 0 if worst <= 1e-9 else 1

    # mle-vs-mwpm
    n = args.n or 3
    geometry = LatticeGeometry(n)
    model = IndependentXZModel(args.px, args.pz)
    mle_failures = mwpm_failures = 0
    for trial in range(args.trials):
        pattern = sample_xz(model, geometry, RngSeedPolicy(args.seed, 0, trial))
        if not mle_decode_success(pattern, model, geometry):
            mle_failures += 1
        if not decode_and_classify(pattern, model, geometry).success:
            mwpm_failures += 1
    print("decoder,trials,failures,failure_rate")
    print(f"mle,{args.trials},{mle_failures},{mle_failures/args.trials!r}")
    print(f"mwpm,{args.trials},{mwpm_failures},{mwpm_failures/args.trials!r}")
    ordered = mle_failures <= mwpm_failures
    print(f"mle <= mwpm: {ordered}")
    return 0 if ordered else 1


def _cmd_figure2(args) -> int:
    """Reduced end-to-end reproduction: measured thresholds at several
    bias ratios overlaid on the analytic curves."""
    sizes = _parse_sizes(args.n)
    markers = []
    for ratio in (1.0, 2.0, 4.0):
        # center the sweep near the analytic matched prediction, scaled
        # toward the (lower) measured matching threshold
        predicted = analytic.solve_critical_curve("zero_order", [ratio])[0].root
        predicted *= args.grid_center / 0.110

        totals = [predicted * f for f in (0.82, 0.92, 1.02, 1.12)]
        config = biased_grid(
            ratio, totals, sizes, args.trials, args.seed + int(ratio), workers=args.workers
        )
        curves = run_sweep(config, log=print)
        try:
            estimate = estimate_threshold(curves)
        except InsufficientDataError as exc:
            print(f"ratio {ratio:g}: {exc}")
            continue
        print(f"ratio {ratio:g}: sum threshold {estimate.rate:.4f}")
        markers.append(
            report.ThresholdMarker(
                ratio, estimate.rate, estimate.uncertainty, f"measured ratio {ratio:g}"
            )
        )
        report.emit_report(
            args.out, f"figure2_ratio{ratio:g}", curves, config, estimate, markers=[]
        )
    svg = f"{args.out}/figure2.svg"
    report.write_overlay_svg(svg, markers)
    print(f"wrote {svg}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toricbias",
        description="Threshold analysis of the rotated toric code under "
        "actual-vs-assumed noise mismatch.",
    )
    parser.add_argument("--config", help="flat key=value file with option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    threshold = sub.add_parser(
        "threshold",
        help="Monte Carlo sweep; CSV columns: "
        + ",".join(report.THRESHOLD_COLUMNS),
    )
    threshold.add_argument("--n", default="16,24,32", help="comma-separated sizes")
    threshold.add_argument("--trials", type=int, default=2000)
    threshold.add_argument("--px", type=float, help="single-point actual X rate")
    threshold.add_argument("--pz", type=float, help="single-point actual Z rate")
    threshold.add_argument(
        "--assumed",
        type=_parse_assumed,
        default=AssumedPolicy(MATCHED),
        help="matched | symmetric | px,pz",
    )
    threshold.add_argument("--ratio", type=float, default=1.0, help="actual p_x/p_z")
    threshold.add_argument(
        "--grid", help="total-rate grid: start:stop:step or comma list"
    )
    threshold.add_argument("--seed", type=int, default=2024)
    threshold.add_argument("--workers", type=int, default=1)
    threshold.add_argument("--out", default="out")
    threshold.add_argument("--prefix", default="threshold")
    threshold.set_defaults(func=_cmd_threshold)

    analytic_cmd = sub.add_parser(
        "analytic",
        help="critical-curve solver; CSV columns: "
        + ",".join(report.ANALYTIC_COLUMNS),
    )
    analytic_cmd.add_argument(
        "--equation", choices=["zero_order", "first_order"], default="zero_order"
    )
    analytic_cmd.add_argument(
        "--ratios", default="0.125,0.25,0.5,1,2,4,8", help="bias ratios p_x/p_z"
    )
    analytic_cmd.add_argument(
        "--assumed", type=_parse_assumed, default=AssumedPolicy(MATCHED)
    )
    analytic_cmd.add_argument("--out", default="analytic.csv")
    analytic_cmd.set_defaults(func=_cmd_analytic)

    match = sub.add_parser("match", help="matching solver debug on an edge list")
    match.add_argument("edges", help="file of 'u v weight' lines")
    match.add_argument("--brute", action="store_true", help="cross-check small graphs")
    match.set_defaults(func=_cmd_match)

    oracle = sub.add_parser("oracle", help="brute-force oracle checks")
    oracle.add_argument("mode", choices=["duality", "mle-vs-mwpm"])
    oracle.add_argument("--n", type=int)
    oracle.add_argument("--pairs", type=int, default=10, help="self-dual pairs to test")
    oracle.add_argument("--trials", type=int, default=500)
    oracle.add_argument("--px", type=float, default=0.15)
    oracle.add_argument("--pz", type=float, default=0.15)
    oracle.add_argument("--seed", type=int, default=2024)
    oracle.set_defaults(func=_cmd_oracle)

    figure2 = sub.add_parser("figure2", help="canned bias-plane reproduction")
    figure2.add_argument("--n", default="12,16", help="comma-separated sizes")
    figure2.add_argument("--trials", type=int, default=400)
    figure2.add_argument("--grid-center", type=float, default=0.105)
    figure2.add_argument("--seed", type=int, default=2024)
    figure2.add_argument("--workers", type=int, default=1)
    figure2.add_argument("--out", default="out")
    figure2.set_defaults(func=_cmd_figure2)

    return parser


def _apply_config_defaults(parser, defaults):
    # subparsers re-apply their own defaults over the shared namespace,
    # so file-supplied values must be installed on every matching action
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                _apply_config_defaults(sub, defaults)
        elif action.dest in defaults:
            value = defaults[action.dest]
            if action.type is not None:
                value = action.type(str(value))
            elif isinstance(action.default, str):
                value = str(value)
            action.default = value


def main(argv=None) -> int:
    parser = build_parser()
    args, _ = parser.parse_known_args(argv)
    if args.config:
        _apply_config_defaults(parser, _load_config_file(args.config))
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
