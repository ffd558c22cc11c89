"""Report emission: delimited files with fixed headers, JSON with a schema
version, and matplotlib figures rendered alongside the delimited output."""

from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1

LLN_FIELDS = ["n", "mean", "var", "se", "target", "bias"]
CDF_FIELDS = ["k", "lhs_cdf", "rhs_cdf", "ci_lo", "ci_hi", "n_replicas"]
MC_CDF_FIELDS = ["k", "lhs", "rhs", "band"]
HIST_FIELDS = ["bin_lo", "bin_hi", "count"]


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_json(path, obj) -> None:
    payload = _jsonable(obj)
    if isinstance(payload, dict):
        payload.setdefault("schema_version", SCHEMA_VERSION)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_csv(path, fieldnames, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fieldnames, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(row.get(k)) for k in fieldnames})


def _fmt(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


# ---------------------------------------------------------------------------
# Figures.  Import of matplotlib is deferred so the solvers and the oracle
# never pay for it; every renderer writes a PNG next to the CSV it mirrors.
# ---------------------------------------------------------------------------

def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_lln_figure(report, path) -> None:
    plt = _plt()
    ns = [r["n"] for r in report.rows]
    means = [r["mean"] / r["n"] for r in report.rows]
    ses = [r["se"] / r["n"] for r in report.rows]
    target = report.rows[0]["target"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(ns, means, yerr=[2 * s for s in ses], fmt="o-", capsize=3, label="mean / n")
    if not math.isnan(target):
        ax.axhline(target, color="crimson", ls="--", label=f"limit {target:.6g}")
    ax.set_xlabel("size")
    ax.set_ylabel("normalized mean length")
    ax.set_title(f"{report.kind}: mean length per unit size")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_cdf_figure(report, path) -> None:
    plt = _plt()
    ks = [r["k"] for r in report.rows]
    lhs = [r["lhs_cdf"] for r in report.rows]
    rhs = [r["rhs_cdf"] for r in report.rows]
    band = report.extra.get("band", 0.0)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(ks, lhs, where="post", marker="o", label="lhs CDF")
    ax.step(ks, rhs, where="post", marker="x", label="rhs CDF")
    ax.fill_between(ks, [v - band for v in rhs], [v + band for v in rhs], alpha=0.15, label="DKW band")
    ax.set_xlabel("k")
    ax.set_ylabel("P(length <= k)")
    ax.set_title(f"coupling CDFs (max gap {report.extra.get('max_gap', float('nan')):.4f})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_variance_figure(report, path) -> None:
    plt = _plt()
    ns = np.array([r["n"] for r in report.rows])
    vs = np.array([r["var"] for r in report.rows])
    slope = report.extra["slope"]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(ns, vs, "o", label="Var(length)")
    anchor = vs[0]
    ax.loglog(ns, anchor * (ns / ns[0]) ** slope, "-", label=f"fit slope {slope:.3f}")
    ax.loglog(ns, anchor * (ns / ns[0]) ** (2 / 3), "--", label="slope 2/3")
    ax.set_xlabel("size")
    ax.set_ylabel("variance")
    ax.set_title("variance scaling")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_histogram_figure(report, path, table=None) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    if report.extra.get("mode") == "sandwich":
        xs = [r["x"] for r in report.rows]
        ax.plot(xs, [r["lower"] for r in report.rows], label="lower bound")
        ax.plot(xs, [r["upper"] for r in report.rows], label="upper bound")
        ax.set_xlabel("x")
        ax.set_ylabel("limit CDF bounds")
        ax.set_title("fluctuation CDF sandwich")
    else:
        los = [r["bin_lo"] for r in report.rows]
        widths = [r["bin_hi"] - r["bin_lo"] for r in report.rows]
        counts = [r["count"] for r in report.rows]
        total = sum(counts) or 1
        dens = [c / (total * w) if w else 0.0 for c, w in zip(counts, widths)]
        ax.bar(los, dens, width=widths, align="edge", alpha=0.7, label="standardized samples")
        if table is not None:
            xs = np.linspace(min(los), max(r["bin_hi"] for r in report.rows), 300)
            fs = np.array([table.cdf(x) for x in xs])
            dens_ref = np.gradient(fs, xs)
            ax.plot(xs, dens_ref, "r-", label="reference density")
        ax.set_xlabel("standardized fluctuation")
        ax.set_ylabel("density")
        ax.set_title(f"fluctuation histogram (mean {report.extra.get('mean_z', float('nan')):.3f})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_lines_figure(lineset, path, cloud=None) -> None:
    """Draw staircase lines (and optionally the generating points)."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5, 5))
    for ell, line in enumerate(lineset.lines, start=1):
        xs, ys = [], []
        cx, cy = line.cx, line.cy
        for i in range(len(cx)):
            if i > 0:
                xs.append(cx[i])
                ys.append(cy[i - 1])
            xs.append(cx[i])
            ys.append(cy[i])
        ax.plot(xs, ys, "-", lw=1.2, label=f"line {ell}" if ell <= 8 else None)
    if cloud is not None:
        ax.plot(cloud.xs, cloud.ys, "k.", ms=4)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("staircase lines")
    if len(lineset.lines) <= 8:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def emit_report(report, out_prefix, figures: bool = True, table=None) -> list[str]:
    """Write a StatReport as CSV(s) + JSON summary + figure; returns paths."""
    out_prefix = str(out_prefix)
    written = []
    kind = report.kind
    if kind in ("lln_cont", "lln_disc", "flat_edge", "regime"):
        fields = list(LLN_FIELDS) + (["prob_dev2"] if kind == "flat_edge" else [])
        write_csv(out_prefix + ".csv", fields, report.rows)
        written.append(out_prefix + ".csv")
        if figures:
            render_lln_figure(report, out_prefix + ".png")
            written.append(out_prefix + ".png")
    elif kind == "coupling_cdf":
        band = report.extra.get("band", float("nan"))
        rows = [
            {"k": r["k"], "lhs": r["lhs_cdf"], "rhs": r["rhs_cdf"], "band": band}
            for r in report.rows
        ]
        write_csv(out_prefix + ".csv", MC_CDF_FIELDS, rows)
        written.append(out_prefix + ".csv")
        if figures:
            render_cdf_figure(report, out_prefix + ".png")
            written.append(out_prefix + ".png")
    elif kind == "variance_scaling":
        write_csv(out_prefix + ".csv", LLN_FIELDS, report.rows)
        written.append(out_prefix + ".csv")
        if figures:
            render_variance_figure(report, out_prefix + ".png")
            written.append(out_prefix + ".png")
    elif kind == "fluct_histogram":
        if report.extra.get("mode") == "sandwich":
            write_csv(out_prefix + ".csv", ["x", "lower", "upper"], report.rows)
        else:
            write_csv(out_prefix + ".csv", HIST_FIELDS, report.rows)
        written.append(out_prefix + ".csv")
        if figures:
            render_histogram_figure(report, out_prefix + ".png", table=table)
            written.append(out_prefix + ".png")
    summary = report.to_jsonable()
    summary["extra"] = {k: v for k, v in summary["extra"].items() if k != "samples"}
    write_json(out_prefix + ".json", summary)
    written.append(out_prefix + ".json")
    return written
