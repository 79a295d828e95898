"""Report rendering: aligned text tables to stdout, CSV files, and
matplotlib figures written alongside them."""

from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_table(headers: list[str], rows: list[list]) -> str:
    cells = [[str(c) for c in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
              for i, h in enumerate(headers)]
    def fmt(row):
        return "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()
    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(r) for r in cells)
    return "\n".join(lines)


def write_csv(path: str, headers: list[str], rows: list[list]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(headers)
        writer.writerows(rows)


def write_json(path: str, payload: dict) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def figure_gate_counts(path: str, names: list[str], ours: list[int],
                       reference: list[int | None]) -> None:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    x = range(len(names))
    ax.bar([i - 0.2 for i in x], ours, width=0.4, label="this build")
    ref_pts = [(i, p) for i, p in zip(x, reference) if p]
    if ref_pts:
        ax.bar([i + 0.2 for i, _ in ref_pts], [p for _, p in ref_pts],
               width=0.4, label="reference table")
    ax.set_yscale("log")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("AND gates")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def figure_cover_sweep(path: str, rows: list[dict]) -> None:
    fig, ax = plt.subplots(figsize=(6, 6))
    xs = [r["closed_form"] for r in rows]
    ys = [r["mc_estimate"] for r in rows]
    err = [[max(0.0, r["mc_estimate"] - r["ci_low"]) for r in rows],
           [max(0.0, r["ci_high"] - r["mc_estimate"]) for r in rows]]
    ax.errorbar(xs, ys, yerr=err, fmt="o", markersize=3, linewidth=0.7,
                capsize=2)
    ax.plot([0, 1], [0, 1], linestyle="--", linewidth=0.8, color="gray")
    ax.set_xlabel("closed-form probability")
    ax.set_ylabel("Monte-Carlo estimate (95% CI)")
    ax.set_title("secure-cover probability: formula vs sampling")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def figure_pcc_curves(path: str, anchor_bs: int) -> None:
    from .verify import estimate_pcc_times

    sizes = list(range(0, max(2 * anchor_bs, 12_000) + 1, 250))
    gen = [estimate_pcc_times(b).gen_seconds for b in sizes]
    ver = [estimate_pcc_times(b).verify_seconds for b in sizes]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(sizes, gen, label="proof generation")
    ax.plot(sizes, ver, label="proof verification")
    est = estimate_pcc_times(anchor_bs)
    ax.scatter([anchor_bs, anchor_bs], [est.gen_seconds, est.verify_seconds],
               zorder=3, color="black", s=18)
    ax.set_xlabel("bytecode size (bytes)")
    ax.set_ylabel("seconds")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def figure_run_phases(path: str, timings: dict[str, float]) -> None:
    fig, ax = plt.subplots(figsize=(6, 3.2))
    names = list(timings)
    ax.barh(names, [timings[n] for n in names])
    ax.set_xlabel("seconds")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
