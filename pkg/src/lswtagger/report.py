"""Learning-curve output: CSV (canonical), hand-written SVG, and matplotlib figures."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from .evaluate import CurvePoint, LearningCurve

CSV_COLUMNS = ["tagger", "train_tokens", "accuracy", "ambiguous_accuracy"]
DETAIL_COLUMNS = ["tagger", "seed", "train_tokens", "accuracy", "ambiguous_accuracy",
                  "parameters", "parameter_bound"]

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"]


def write_csv(curves: Sequence[LearningCurve], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for c in curves:
            for p in c.points:
                w.writerow([c.label, p.train_tokens, repr(p.accuracy), repr(p.ambiguous_accuracy)])


def read_csv(path) -> list[LearningCurve]:
    curves: dict[str, LearningCurve] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        for row in reader:
            curve = curves.setdefault(row["tagger"], LearningCurve(row["tagger"]))
            curve.points.append(CurvePoint(int(row["train_tokens"]), float(row["accuracy"]),
                                           float(row["ambiguous_accuracy"])))
    return list(curves.values())


def write_detail_csv(curves: Sequence[LearningCurve], path) -> None:
    """Per-seed rows including realised parameter counts and their ceilings."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(DETAIL_COLUMNS)
        for c in curves:
            for p in c.points:
                w.writerow([c.label, "" if c.seed is None else c.seed, p.train_tokens,
                            repr(p.accuracy), repr(p.ambiguous_accuracy), p.parameters, p.bound])


def _fmt_tokens(n: float) -> str:
    if n >= 1_000_000:
        return f"{n / 1e6:g}M"
    if n >= 1000:
        return f"{n / 1e3:g}k"
    return f"{n:g}"


def write_svg(curves: Sequence[LearningCurve], path, metric: str = "accuracy",
              title: str = "", width: int = 640, height: int = 420) -> None:
    """Line chart with one ``<polyline>`` per tagger."""
    left, right, top, bottom = 70, 190, 40, 60
    pw, ph = width - left - right, height - top - bottom
    xs = [p.train_tokens for c in curves for p in c.points]
    ys = [getattr(p, metric) for c in curves for p in c.points]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    pad = max((y1 - y0) * 0.1, 0.005)
    y0, y1 = max(0.0, y0 - pad), min(1.0, y1 + pad)

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (1 - (y - y0) / (y1 - y0)) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for i in range(5):
        yv = y0 + (y1 - y0) * i / 4
        xv = x0 + (x1 - x0) * i / 4
        out.append(f'<text x="{left - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end">{100 * yv:.1f}</text>')
        out.append(f'<text x="{sx(xv):.1f}" y="{top + ph + 18}" text-anchor="middle">{_fmt_tokens(xv)}</text>')
    label = "Ambiguous-token accuracy (%)" if metric == "ambiguous_accuracy" else "Accuracy (%)"
    out.append(f'<text x="{left + pw / 2}" y="{height - 15}" text-anchor="middle">Training tokens</text>')
    out.append(f'<text x="18" y="{top + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2})">{label}</text>')
    if title:
        out.append(f'<text x="{left + pw / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    for i, c in enumerate(curves):
        colour = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{sx(p.train_tokens):.2f},{sy(getattr(p, metric)):.2f}" for p in c.points)
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{pts}"/>')
        ly = top + 10 + 18 * i
        out.append(f'<line x1="{left + pw + 15}" y1="{ly}" x2="{left + pw + 35}" y2="{ly}" '
                   f'stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 40}" y="{ly + 4}">{escape(c.label)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def write_figure(curves: Sequence[LearningCurve], path, metric: str = "accuracy", title: str = "") -> None:
    """Render the curves with matplotlib; the format follows the file suffix (png, pdf, ...)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for c in curves:
        ax.plot([p.train_tokens for p in c.points],
                [100 * getattr(p, metric) for p in c.points], marker="o", ms=3, label=c.label)
    ax.set_xlabel("Training tokens")
    ax.set_ylabel("Ambiguous-token accuracy (%)" if metric == "ambiguous_accuracy" else "Accuracy (%)")
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def emit(curves: Sequence[LearningCurve], fmt: str, path, **kwargs) -> Path:
    if not curves:
        raise ValueError("nothing to emit: no curves")
    writers = {"csv": write_csv, "svg": write_svg, "png": write_figure, "pdf": write_figure}
    if fmt not in writers:
        raise ValueError(f"unknown output format {fmt!r}")
    path = Path(path)
    if fmt == "csv":
        write_csv(curves, path)
    else:
        writers[fmt](curves, path, **kwargs)
    return path
