"""Run records, plot-data files and a static SVG chart for bound curves."""

from __future__ import annotations

import datetime as _dt
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .bounds import fmt

__all__ = ["RunRecord", "timestamp", "write_json", "plot_data", "svg_chart"]


def timestamp():
    """UTC time in ISO form; honours ``SOURCE_DATE_EPOCH`` for reproducible records."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        t = _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc)
    else:
        t = _dt.datetime.now(_dt.timezone.utc)
    return t.replace(microsecond=0).isoformat()


@dataclass(frozen=True)
class RunRecord:
    command: str
    params: dict
    payload: dict
    version: str = __version__
    timestamp: str = field(default_factory=timestamp)

    def to_dict(self):
        return {
            "command": self.command,
            "params": self.params,
            "version": self.version,
            "timestamp": self.timestamp,
            "payload": self.payload,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(d["command"], d["params"], d["payload"], d["version"], d["timestamp"])

    def write(self, path):
        write_json(path, self.to_dict())


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def plot_data(curve):
    """Whitespace-separated blocks (gnuplot ``index 0`` = lower, ``index 1`` = upper)."""
    lines = ["# gamma lower"]
    lines += [f"{fmt(r.gamma)} {fmt(r.lower)}" for r in curve.rows if r.lower is not None]
    lines += ["", "", "# gamma upper"]
    lines += [f"{fmt(r.gamma)} {fmt(r.upper)}" for r in curve.rows if r.upper is not None]
    return "\n".join(lines) + "\n"


def svg_chart(curve, width=640, height=400):
    """Self-contained line chart of L(gamma) and U(gamma) with the pi^2 level."""
    pad = 56
    pts = [(r.gamma, v) for r in curve.rows for v in (r.lower, r.upper) if v is not None]
    pi2 = math.pi ** 2
    gs = [r.gamma for r in curve.rows] or [0.0, 1.0]
    g0, g1 = min(gs), max(gs)
    if g1 == g0:
        g0, g1 = g0 - 0.05, g1 + 0.05
    ys = [v for _, v in pts] + [pi2]
    y0, y1 = min(ys), max(ys)
    span = max(y1 - y0, 1e-3)
    y0, y1 = y0 - 0.05 * span, y1 + 0.05 * span

    def sx(g):
        return pad + (g - g0) / (g1 - g0) * (width - 2 * pad)

    def sy(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    def line(key, colour):
        xy = [(sx(r.gamma), sy(getattr(r, key))) for r in curve.rows if getattr(r, key) is not None]
        if not xy:
            return ""
        p = " ".join(f"{x:.2f},{y:.2f}" for x, y in xy)
        dots = "".join(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{colour}"/>' for x, y in xy)
        return f'<polyline fill="none" stroke="{colour}" stroke-width="2" points="{p}"/>{dots}'

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{sy(pi2):.2f}" x2="{width - pad}" y2="{sy(pi2):.2f}" '
        'stroke="grey" stroke-dasharray="4 4"/>',
        f'<text x="{width - pad}" y="{sy(pi2) - 4:.2f}" font-size="11" text-anchor="end">pi^2</text>',
        line("lower", "#1f77b4"),
        line("upper", "#d62728"),
        f'<text x="{width / 2:.0f}" y="{height - 16}" font-size="12" text-anchor="middle">gamma</text>',
        f'<text x="{pad}" y="{height - pad + 16}" font-size="11" text-anchor="middle">{g0:.3g}</text>',
        f'<text x="{width - pad}" y="{height - pad + 16}" font-size="11" text-anchor="middle">{g1:.3g}</text>',
        f'<text x="{pad - 4}" y="{sy(y1):.2f}" font-size="11" text-anchor="end">{y1:.4g}</text>',
        f'<text x="{pad - 4}" y="{sy(y0):.2f}" font-size="11" text-anchor="end">{y0:.4g}</text>',
        f'<text x="{pad + 8}" y="{pad - 20}" font-size="12" fill="#1f77b4">L(gamma) search</text>',
        f'<text x="{pad + 140}" y="{pad - 20}" font-size="12" fill="#d62728">U(gamma) explicit bound</text>',
        "</svg>",
    ]
    return "\n".join(p for p in parts if p) + "\n"
