"""Render benchmark figures from banditlab CSV outputs.

Three figure kinds, one per CSV schema:

* ``regret``  — normalized regret vs t per policy, with standard-error
  bands, from ``regret.csv`` (policy,t,mean_cum_regret,norm_regret,stderr,
  n_runs).
* ``rewards`` — per-step mean instantaneous reward per policy from
  ``rewards.csv`` (policy,t,mean_inst_reward); rows labeled ``oracle``
  are drawn as a dashed staircase envelope rather than a policy curve.
* ``sweep``   — terminal normalized regret vs the swept parameter from
  ``sweep.csv`` (param,policy,terminal_norm_regret,stderr).

Rendering is read-only on its inputs and deterministic: identical CSVs
produce byte-identical images (fixed style, no embedded timestamps).
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIGURE_KINDS = ("rewards", "regret", "sweep")

# Stable ids inside SVG output, independent of process state.
matplotlib.rcParams["svg.hashsalt"] = "banditlab"


class SchemaError(ValueError):
    """Input CSV does not match the documented schema."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_path: str
    output_path: str
    title: str | None = None

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(
                f"unknown figure kind {self.kind!r}; valid: {', '.join(FIGURE_KINDS)}"
            )


def _read_rows(path, required: tuple[str, ...]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise SchemaError(f"{path}: missing required column {column!r}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _series_by_policy(rows, x_key, y_key):
    series: dict[str, tuple[list, list]] = {}
    for row in rows:
        xs, ys = series.setdefault(row["policy"], ([], []))
        try:
            xs.append(float(row[x_key]))
            ys.append(float(row[y_key]))
        except ValueError as exc:
            raise SchemaError(f"bad numeric value in column {x_key!r}/{y_key!r}: {exc}")
    return series


def build_figure(spec: FigureSpec):
    """Construct the matplotlib Figure for a spec (no file output)."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5), dpi=120)
    if spec.kind == "regret":
        rows = _read_rows(
            spec.input_path,
            ("policy", "t", "mean_cum_regret", "norm_regret", "stderr", "n_runs"),
        )
        for policy, (ts, norms) in _series_by_policy(rows, "t", "norm_regret").items():
            ax.plot(ts, norms, label=policy, linewidth=1.4)
        bands = _series_by_policy(rows, "t", "stderr")
        for line in ax.get_lines():
            policy = line.get_label()
            ts, norms = _series_by_policy(rows, "t", "norm_regret")[policy]
            errs = [e / t for e, t in zip(bands[policy][1], ts)]
            low = [n - e for n, e in zip(norms, errs)]
            high = [n + e for n, e in zip(norms, errs)]
            ax.fill_between(ts, low, high, alpha=0.18, color=line.get_color(), linewidth=0)
        ax.set_xlabel("t")
        ax.set_ylabel("normalized regret")
    elif spec.kind == "rewards":
        rows = _read_rows(spec.input_path, ("policy", "t", "mean_inst_reward"))
        series = _series_by_policy(rows, "t", "mean_inst_reward")
        oracle = series.pop("oracle", None)
        for policy, (ts, values) in series.items():
            ax.plot(ts, values, label=policy, linewidth=1.2)
        if oracle is not None:
            ax.plot(oracle[0], oracle[1], label="oracle", color="black",
                    linestyle="--", linewidth=1.2, drawstyle="steps-post")
        ax.set_xlabel("t")
        ax.set_ylabel("instantaneous average reward")
    else:
        rows = _read_rows(
            spec.input_path, ("param", "policy", "terminal_norm_regret", "stderr")
        )
        series = _series_by_policy(rows, "param", "terminal_norm_regret")
        bands = _series_by_policy(rows, "param", "stderr")
        for policy, (xs, ys) in series.items():
            ax.errorbar(xs, ys, yerr=bands[policy][1], label=policy,
                        marker="o", markersize=3.5, linewidth=1.2, capsize=2)
        ax.set_xlabel("parameter")
        ax.set_ylabel("terminal normalized regret")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(loc="best", fontsize=9)
    ax.grid(True, alpha=0.25)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> str:
    """Render the figure to ``spec.output_path``; returns the path."""
    fig = build_figure(spec)
    try:
        if spec.output_path.endswith(".svg"):
            fig.savefig(spec.output_path, format="svg", metadata={"Date": None})
        else:
            fig.savefig(spec.output_path)
    finally:
        plt.close(fig)
    return spec.output_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="banditlab-render",
        description="Render benchmark figures from banditlab CSV files.",
    )
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument("--in", dest="input_path", required=True,
                        help="input CSV (regret/rewards/sweep schema)")
    parser.add_argument("--out", dest="output_path", required=True,
                        help="output image path (.svg or .png)")
    parser.add_argument("--title")
    args = parser.parse_args(argv)
    try:
        path = render(FigureSpec(args.kind, args.input_path, args.output_path, args.title))
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
