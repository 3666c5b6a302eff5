"""CSV and SVG report writing for the experiment commands.

CSV files are UTF-8 with a header row and RFC-4180 quoting; every file
carries a ``schema_version`` column.  SVG charts are standalone SVG 1.1
documents rendered as a pure function of the tabulated data, so regenerating
a chart from the same rows yields identical bytes.  All writes go through a
temp-file-and-rename so partial runs never leave corrupt reports.
"""

import csv
import io
import os

SCHEMA_VERSION = 1

_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22",
)


def write_atomic(path: str, data) -> None:
    """Write bytes or text to ``path`` via a temp file and atomic rename."""
    tmp = path + ".tmp"
    if isinstance(data, bytes):
        with open(tmp, "wb") as fh:
            fh.write(data)
    else:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
    os.replace(tmp, path)


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def write_csv(path: str, header, rows) -> None:
    """Render rows (header prefixed with schema_version) and write atomically."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["schema_version"] + list(header))
    for row in rows:
        writer.writerow([SCHEMA_VERSION] + [format_value(v) for v in row])
    write_atomic(path, buf.getvalue())


def read_csv(path: str):
    """Read a CSV written by `write_csv`; returns (header, rows) without the version column."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [row[1:] for row in reader]
    return header[1:], rows


def svg_line_chart(series, title: str, x_label: str, y_label: str) -> str:
    """Standalone SVG 1.1 line chart.

    ``series`` is an ordered list of (label, [(x, y), ...]) pairs; one
    polyline (plus point markers) per entry, colors from a fixed palette.
    """
    width, height = 640, 440
    left, right, top, bottom = 70, 200, 50, 50
    plot_w = width - left - right
    plot_h = height - top - bottom

    xs = [p[0] for _, pts in series for p in pts]
    ys = [p[1] for _, pts in series for p in pts]
    if not xs:
        raise ValueError("chart needs at least one data point")
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(ys), max(ys)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max == y_min:
        y_max = y_min + 1.0
    pad = 0.05 * (y_max - y_min)
    y_min -= pad
    y_max += pad

    def px(x: float) -> float:
        return left + (x - x_min) / (x_max - x_min) * plot_w

    def py(y: float) -> float:
        return top + plot_h - (y - y_min) / (y_max - y_min) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + plot_w / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" '
        f'y2="{top + plot_h}" stroke="black" stroke-width="1"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" '
        f'stroke="black" stroke-width="1"/>',
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{x_label}</text>',
        f'<text x="18" y="{top + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 18 {top + plot_h / 2:.1f})">{y_label}</text>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        gx = x_min + frac * (x_max - x_min)
        gy = y_min + frac * (y_max - y_min)
        out.append(
            f'<text x="{px(gx):.1f}" y="{top + plot_h + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{gx:.2f}</text>'
        )
        out.append(
            f'<text x="{left - 6}" y="{py(gy) + 3:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{gy:.3f}</text>'
        )
        out.append(
            f'<line x1="{left}" y1="{py(gy):.1f}" x2="{left + plot_w}" y2="{py(gy):.1f}" '
            f'stroke="#dddddd" stroke-width="0.5"/>'
        )
    for idx, (label, pts) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>'
        )
        for x, y in pts:
            out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.5" fill="{color}"/>')
        ly = top + 16 * idx
        lx = left + plot_w + 12
        out.append(
            f'<line x1="{lx}" y1="{ly + 4}" x2="{lx + 18}" y2="{ly + 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{lx + 24}" y="{ly + 8}" font-family="sans-serif" '
            f'font-size="11">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
