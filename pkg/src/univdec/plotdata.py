"""Turn redundancy and error reports into plottable CSV series and small SVG charts."""
from __future__ import annotations

import json
import math
import os
from collections import defaultdict
from xml.sax.saxutils import escape

from .reports import REPORT_COLUMNS, parse_number, read_csv, write_csv

SLACK_COLUMNS = ("n", "K_n", "slack_per_symbol", "source")
ERROR_COLUMNS = ("decoder", "n", "R", "P_e", "log2_P_e", "source")


class PlotDataError(ValueError):
    pass


def _load(path):
    if path.endswith(".json"):
        with open(path) as fh:
            data = json.load(fh)
        if isinstance(data, dict) and "K" in data and "n" in data:
            return "redundancy", data
        raise PlotDataError(f"{path}: not a redundancy report")
    if path.endswith(".csv"):
        rows = read_csv(path)
        if rows and set(REPORT_COLUMNS) <= set(rows[0]):
            return "report", rows
        raise PlotDataError(f"{path}: not an error report CSV")
    raise PlotDataError(f"{path}: expected a .json redundancy report or a .csv error report")


def collect_series(paths):
    """Return (slack rows, error rows) gathered from the given report files."""
    if not paths:
        raise PlotDataError("no report files given")
    slack, errors = [], []
    for path in paths:
        kind, data = _load(path)
        src = os.path.basename(path)
        if kind == "redundancy":
            slack.append({"n": int(data["n"]), "K_n": data["K"],
                          "slack_per_symbol": parse_number(data.get("slack_per_symbol")), "source": src})
            continue
        for row in data:
            if row.get("K_n") and row.get("decoder") == "gmet":
                slack.append({"n": int(row["n"]), "K_n": row["K_n"],
                              "slack_per_symbol": parse_number(row["slack_per_symbol"]), "source": src})
            pe = parse_number(row.get("P_e_exact")) if row.get("P_e_exact") else parse_number(row.get("P_e_mc"))
            if pe is None:
                continue
            errors.append({"decoder": row["decoder"], "n": int(row["n"]), "R": parse_number(row["R"]),
                           "P_e": pe, "log2_P_e": math.log2(pe) if pe > 0 else "-inf", "source": src})
    if not slack and not errors:
        raise PlotDataError("the report files contain no data points")
    slack.sort(key=lambda r: r["n"])
    errors.sort(key=lambda r: (r["decoder"], r["R"], r["n"]))
    return slack, errors


def svg_chart(series, title, xlabel, ylabel, width=480, height=320):
    """A minimal line chart; ``series`` maps a name to a list of (x, y) points."""
    pts = [(x, y) for s in series.values() for x, y in s if math.isfinite(x) and math.isfinite(y)]
    left, right, top, bottom = 60, 20, 30, 45
    if pts:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    else:
        x0 = x1 = y0 = y1 = 0.0
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1

    def sx(x):
        return left + (x - x0) / (x1 - x0) * (width - left - right)

    def sy(y):
        return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<text x="{width / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
           f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" y2="{height - bottom}" stroke="black"/>',
           f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" stroke="black"/>',
           f'<text x="{(left + width - right) / 2}" y="{height - 8}" text-anchor="middle" font-size="11">'
           f'{escape(xlabel)}</text>',
           f'<text x="14" y="{(top + height - bottom) / 2}" font-size="11" text-anchor="middle" '
           f'transform="rotate(-90 14 {(top + height - bottom) / 2})">{escape(ylabel)}</text>']
    for v, anchor in ((x0, "start"), (x1, "end")):
        out.append(f'<text x="{sx(v):.1f}" y="{height - bottom + 14}" font-size="10" '
                   f'text-anchor="{anchor}">{v:.4g}</text>')
    for v in (y0, y1):
        out.append(f'<text x="{left - 4}" y="{sy(v):.1f}" font-size="10" text-anchor="end">{v:.4g}</text>')
    for i, (name, s) in enumerate(sorted(series.items())):
        c = colors[i % len(colors)]
        good = sorted((x, y) for x, y in s if math.isfinite(x) and math.isfinite(y))
        if len(good) > 1:
            path = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in good)
            out.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{path}"/>')
        for x, y in good:
            out.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" fill="{c}"/>')
        out.append(f'<text x="{width - right - 4}" y="{top + 14 * (i + 1)}" font-size="10" fill="{c}" '
                   f'text-anchor="end">{escape(str(name))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_plotdata(paths, out_dir):
    """Write slack-vs-n and error-vs-rate CSVs plus SVGs; returns the written paths."""
    slack, errors = collect_series(paths)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if slack:
        p = write_csv(os.path.join(out_dir, "slack_vs_n.csv"), slack, SLACK_COLUMNS)
        svg = svg_chart({"slack": [(r["n"], r["slack_per_symbol"]) for r in slack]},
                        "redundancy slack per symbol", "n", "(1/n) log2 K_n")
        q = os.path.join(out_dir, "slack_vs_n.svg")
        with open(q, "w") as fh:
            fh.write(svg)
        written += [p, q]
    if errors:
        p = write_csv(os.path.join(out_dir, "error_vs_rate.csv"), errors, ERROR_COLUMNS)
        by = defaultdict(list)
        for r in errors:
            if r["P_e"] > 0:
                by[f"{r['decoder']} n={r['n']}"].append((r["R"], r["log2_P_e"]))
        q = os.path.join(out_dir, "error_vs_rate.svg")
        with open(q, "w") as fh:
            fh.write(svg_chart(by, "average error probability", "R (bits/symbol)", "log2 P_e"))
        written += [p, q]
    return written
