"""Report emission: CSV tables, JSON summaries, and SVG figure overlays.

CSV bodies are written field-by-field with repr-stable formatting so a
given sweep result serializes byte-identically; every file embeds the
resolved configuration.  The figure overlay draws the Monte Carlo
threshold estimates against the analytic critical curves (zero-order,
first-order, the symmetric-assumption sum line, and the max-rate box of
the unrotated code).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

from . import analytic
from .harness import CrossingEstimate, ExperimentConfig, ThresholdCurve

THRESHOLD_COLUMNS = [
    "n",
    "p_x_actual",
    "p_z_actual",
    "p_x_assumed",
    "p_z_assumed",
    "sum_rate",
    "trials",
    "failures",
    "failure_probability",
    "stderr",
    "failures_lattice1",
    "failures_lattice2",
]

ANALYTIC_COLUMNS = [
    "slice_param",
    "p_x_actual",
    "p_z_actual",
    "p_x_assumed",
    "p_z_assumed",
    "equation",
    "root",
    "residual",
]


def _config_header_lines(config: ExperimentConfig) -> list[str]:
    policy = config.assumed_policy
    lines = [
        f"# sizes={','.join(str(n) for n in config.sizes)}",
        f"# trials={config.trials}",
        f"# master_seed={config.master_seed}",
        f"# assumed_policy={policy.kind}",
    ]
    if policy.fixed_rates is not None:
        lines.append(
            f"# assumed_fixed={policy.fixed_rates[0]!r},{policy.fixed_rates[1]!r}"
        )
    lines.append(
        "# grid=" + ";".join(f"{m.p_x!r},{m.p_z!r}" for m in config.actual_grid)
    )
    return lines


def write_threshold_csv(
    path: str, curves: list[ThresholdCurve], config: ExperimentConfig
) -> None:
    """Per-point sweep data with the resolved config echoed as comments."""
    try:
        with open(path, "w") as stream:
            for line in _config_header_lines(config):
                stream.write(line + "\n")
            stream.write(",".join(THRESHOLD_COLUMNS) + "\n")
            for curve in curves:
                for p in curve.points:
                    row = [
                        str(p.n),
                        repr(p.actual.p_x),
                        repr(p.actual.p_z),
                        repr(p.assumed.p_x),
                        repr(p.assumed.p_z),
                        repr(p.actual.p_x + p.actual.p_z),
                        str(p.trials),
                        str(p.failures),
                        repr(p.failure_probability),
                        repr(p.stderr),
                        str(p.lattice_failures[0]),
                        str(p.lattice_failures[1]),
                    ]
                    stream.write(",".join(row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write threshold CSV to {path!r}: {exc}") from exc


def write_analytic_csv(path: str, points: list[analytic.CriticalPoint]) -> None:
    """Solved critical-curve slices in the documented column layout."""
    try:
        with open(path, "w") as stream:
            stream.write(",".join(ANALYTIC_COLUMNS) + "\n")
            for pt in points:
                row = [
                    repr(pt.slice_param),
                    repr(pt.actual[0]),
                    repr(pt.actual[1]),
                    repr(pt.assumed[0]),
                    repr(pt.assumed[1]),
                    pt.equation,
                    repr(pt.root),
                    repr(pt.residual),
                ]
                stream.write(",".join(row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write analytic CSV to {path!r}: {exc}") from exc


def write_summary_json(
    path: str,
    config: ExperimentConfig,
    estimate: CrossingEstimate | None,
) -> None:
    """Machine-readable run summary including every seed input."""
    payload = {
        "sizes": list(config.sizes),
        "trials": config.trials,
        "master_seed": config.master_seed,
        "assumed_policy": config.assumed_policy.kind,
        "assumed_fixed": config.assumed_policy.fixed_rates,
        "grid": [[m.p_x, m.p_z] for m in config.actual_grid],
        "threshold": None
        if estimate is None
        else {
            "sum_rate": estimate.rate,
            "uncertainty": estimate.uncertainty,
            "pairwise_crossings": estimate.pairwise,
        },
    }
    try:
        with open(path, "w") as stream:
            json.dump(payload, stream, indent=2, sort_keys=True)
            stream.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write summary to {path!r}: {exc}") from exc


@dataclass
class ThresholdMarker:
    """One measured threshold point for the bias-plane figure."""

    ratio: float  # actual p_x / p_z
    sum_rate: float
    uncertainty: float
    label: str


def write_overlay_svg(path: str, markers: list[ThresholdMarker]) -> None:
    """Bias-plane figure: analytic curves plus Monte Carlo markers.

    Axes are (p_x, p_z) of the actual rates.  Curves: zero-order and
    first-order matched critical curves, the symmetric-assumption line
    p_x + p_z = 2 * 0.1092, and the per-channel box p < 0.1092 of the
    unrotated construction.
    """
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    ratios = [2.0**k for k in (-3, -2.5, -2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5, 2, 2.5, 3)]
    fig, ax = plt.subplots(figsize=(6, 6))

    for equation, style, label in (
        ("zero_order", "-", "zero-order critical curve"),
        ("first_order", "--", "first-order critical curve"),
    ):
        points = analytic.solve_critical_curve(equation, ratios)
        xs = [pt.actual[0] for pt in points if pt.found]
        zs = [pt.actual[1] for pt in points if pt.found]
        ax.plot(xs, zs, style, label=label)

    line = analytic.symmetric_assumption_threshold()
    ax.plot([0.0, line], [line, 0.0], ":", label="symmetric-assumption sum line")
    box = analytic.P_C_MULTICRITICAL
    ax.plot(
        [0.0, box, box], [box, box, 0.0], "-.", label="unrotated per-channel box"
    )

    for marker in markers:
        p_z = marker.sum_rate / (1.0 + marker.ratio)
        p_x = marker.sum_rate - p_z
        err = marker.uncertainty / (1.0 + marker.ratio)
        ax.errorbar(
            [p_x],
            [p_z],
            xerr=[err * marker.ratio],
            yerr=[err],
            fmt="o",
            capsize=3,
            label=marker.label,
        )

    ax.set_xlabel("actual X rate")
    ax.set_ylabel("actual Z rate")
    ax.set_xlim(0.0, 0.27)
    ax.set_ylim(0.0, 0.27)
    ax.legend(fontsize=8)
    ax.set_title("Threshold estimates in the bias plane")
    fig.tight_layout()
    try:
        fig.savefig(path, format="svg")
    except OSError as exc:
        raise OSError(f"cannot write figure to {path!r}: {exc}") from exc
    finally:
        plt.close(fig)


def emit_report(
    out_dir: str,
    prefix: str,
    curves: list[ThresholdCurve],
    config: ExperimentConfig,
    estimate: CrossingEstimate | None,
    markers: list[ThresholdMarker] | None = None,
) -> list[str]:
    """Write the CSV/JSON/SVG artifact set; returns the created paths."""
    os.makedirs(out_dir, exist_ok=True)
    created = []
    csv_path = os.path.join(out_dir, f"{prefix}.csv")
    write_threshold_csv(csv_path, curves, config)
    created.append(csv_path)
    json_path = os.path.join(out_dir, f"{prefix}.json")
    write_summary_json(json_path, config, estimate)
    created.append(json_path)
    if not any(curve.points for curve in curves):
        return created  # header-only CSV; nothing to draw
    if markers is None and estimate is not None and math.isfinite(estimate.rate):
        first = curves[0].points[0]
        ratio = (
            first.actual.p_x / first.actual.p_z
            if first.actual.p_z > 0
            else math.inf
        )
        markers = [
            ThresholdMarker(ratio, estimate.rate, estimate.uncertainty, "measured")
        ]
    if markers:
        svg_path = os.path.join(out_dir, f"{prefix}.svg")
        write_overlay_svg(svg_path, markers)
        created.append(svg_path)
    return created
