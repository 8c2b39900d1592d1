"""Figure rendering for the CLI report path.

Plotting lives here and only here; the core modules emit CSV/JSON and the
`report` command turns a sweep into PNG figures next to the CSV.
"""

from __future__ import annotations

import math
from typing import Dict, List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def fit_through_origin(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of y = c x."""
    sxx = sum(x * x for x in xs)
    if sxx == 0:
        return 0.0
    return sum(x * y for x, y in zip(xs, ys)) / sxx


def render_ratio_figure(rows: List[Dict], path: str) -> float:
    """log2(top-fanin ratio)/n against n, with the fitted floor line.

    Returns the floor (minimum of the per-n values).
    """
    ns = [row["n"] for row in rows]
    vals = [row["log2_ratio_per_n"] for row in rows]
    floor = min(vals)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, vals, "o-", label="log2(ratio) / n")
    ax.axhline(floor, linestyle="--", color="gray", label=f"floor = {floor:.3f}")
    ax.axhline(0.0, linewidth=0.8, color="black")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("n")
    ax.set_ylabel("log2(top fan-in bound) / n")
    ax.set_title("Exponential top fan-in bound per n")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return floor


def render_composed_figure(records: List[Dict], path: str) -> float:
    """Composed size bound against log2(n) * log2(log2(n)) with a linear
    fit through the origin; returns the fitted coefficient."""
    xs = [math.log2(rec["n"]) * math.log2(math.log2(rec["n"])) for rec in records]
    ys = [rec["size_log2"] for rec in records]
    c = fit_through_origin(xs, ys)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, "o", label="log2(size bound)")
    ax.plot(xs, [c * x for x in xs], "-", label=f"fit {c:.4f} * log2(n) log2(log2(n))")
    ax.set_xlabel("log2(n) * log2(log2(n))")
    ax.set_ylabel("log2(size bound)")
    ax.set_title("Composed size bound growth")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return c
