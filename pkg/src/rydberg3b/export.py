"""CSV, JSON and SVG writers used by the command-line front end.

CSV floats use 17 significant digits so values survive a round trip; the
column order is whatever the caller passes and is never sorted.  SVG output
is plain text and only meant for looking at.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

FLOAT_FMT = "{:.17g}"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT.format(float(v))
    return str(v)


def write_csv(path, columns: dict) -> Path:
    """Write equal-length columns ``{name: values}`` in the given order."""
    path = Path(path)
    names = list(columns)
    data = [np.asarray(columns[n]).ravel() for n in names]
    n = len(data[0]) if data else 0
    if any(len(d) != n for d in data):
        raise ValueError("CSV columns must have equal length")
    lines = [",".join(names)]
    lines += [",".join(_fmt(d[i]) for d in data) for i in range(n)]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path) -> dict:
    """Inverse of :func:`write_csv` for numeric columns."""
    text = Path(path).read_text().splitlines()
    names = text[0].split(",")
    rows = np.array([[float(v) for v in line.split(",")] for line in text[1:]]).reshape(-1, len(names))
    return {n: rows[:, i] for i, n in enumerate(names)}


def write_field_csv(path, eta, zeta, fields: dict) -> Path:
    """Fields over a tensor grid as long-format rows ``eta, zeta, <fields>``."""
    E, Z = np.meshgrid(eta, zeta, indexing="ij")
    return write_csv(path, {"eta": E, "zeta": Z, **fields})


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
    return path


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    """Record of one command: inputs, outputs and solver diagnostics.

    Wall time is kept apart from the deterministic part so two identical
    runs produce identical ``deterministic`` sections.
    """

    command: str
    parameters: dict
    version: str
    artifacts: list = field(default_factory=list)
    convergence: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def add(self, path) -> Path:
        self.artifacts.append(Path(path).name)
        return Path(path)

    def deterministic(self, out_dir) -> dict:
        d = asdict(self)
        d.pop("wall_time")
        d["digests"] = {name: file_digest(Path(out_dir) / name) for name in self.artifacts}
        return d


# --- SVG -----------------------------------------------------------------

def _colour(t: float) -> str:
    """Diverging blue-white-red for t in [-1, 1]."""
    t = max(-1.0, min(1.0, t))
    if t >= 0:
        r, g, b = 255, int(255 * (1 - t)), int(255 * (1 - t))
    else:
        r, g, b = int(255 * (1 + t)), int(255 * (1 + t)), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def svg_heatmap(path, x, y, values, title: str = "", xlabel: str = "eta", ylabel: str = "zeta",
                size: int = 480) -> Path:
    """Heatmap of ``values[i, j]`` at ``(x[i], y[j])`` with a symmetric colour
    scale around zero."""
    values = np.asarray(values, dtype=float)
    nx, ny = values.shape
    vmax = float(np.nanmax(np.abs(values))) or 1.0
    pad = 50
    cw, ch = size / nx, size / ny
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size + 2 * pad}" height="{size + 2 * pad}">',
             f'<text x="{pad}" y="{pad / 2}" font-size="14">{title} (max |v| = {vmax:.4g})</text>']
    for i in range(nx):
        for j in range(ny):
            px = pad + i * cw
            py = pad + (ny - 1 - j) * ch
            parts.append(f'<rect x="{px:.2f}" y="{py:.2f}" width="{cw + 0.05:.2f}" height="{ch + 0.05:.2f}" '
                         f'fill="{_colour(values[i, j] / vmax)}"/>')
    parts.append(f'<text x="{pad + size / 2}" y="{size + 1.6 * pad}" font-size="12">{xlabel} '
                 f'[{x[0]:.3g}, {x[-1]:.3g}]</text>')
    parts.append(f'<text x="5" y="{pad + size / 2}" font-size="12">{ylabel} [{y[0]:.3g}, {y[-1]:.3g}]</text>')
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n")
    return path


def svg_curves(path, x, curves: dict, title: str = "", xlabel: str = "", ylabel: str = "",
               ylim=None, width: int = 560, height: int = 400) -> Path:
    """Line plot of ``{label: y}`` against a shared ``x``."""
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in curves.items()}
    finite = np.concatenate([v[np.isfinite(v)] for v in ys.values()]) if ys else np.zeros(1)
    lo, hi = ylim if ylim is not None else (float(finite.min()), float(finite.max()))
    if hi <= lo:
        hi = lo + 1.0
    pad = 50
    sx = lambda v: pad + (v - x[0]) / ((x[-1] - x[0]) or 1.0) * (width - 2 * pad)
    sy = lambda v: height - pad - (min(max(v, lo), hi) - lo) / (hi - lo) * (height - 2 * pad)
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<text x="{pad}" y="{pad / 2}" font-size="14">{title}</text>',
             f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
             f'fill="none" stroke="black"/>']
    if lo < 0 < hi:
        parts.append(f'<line x1="{pad}" x2="{width - pad}" y1="{sy(0):.2f}" y2="{sy(0):.2f}" '
                     f'stroke="#999" stroke-dasharray="4 3"/>')
    for n, (label, y) in enumerate(ys.items()):
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y) if math.isfinite(b))
        col = palette[n % len(palette)]
        parts.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{width - pad + 4}" y="{pad + 14 * (n + 1)}" font-size="11" fill="{col}">'
                     f'{label}</text>')
    parts.append(f'<text x="{width / 2}" y="{height - 10}" font-size="12">{xlabel}</text>')
    parts.append(f'<text x="5" y="{pad - 8}" font-size="12">{ylabel} [{lo:.3g}, {hi:.3g}]</text>')
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n")
    return path
