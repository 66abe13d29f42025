"""CSV readers/writers for the package's tabular outputs and minimal SVG plots."""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .spectrum import Spectrum
from .synthesis import SwitchedWaveform

WAVEFORM_HEADER = ("t_seconds", "level_volts")
SPECTRUM_HEADER = ("n", "f_hz", "a_n", "b_n", "magnitude")
SIDEBAND_HEADER = ("n", "j", "f_hz", "magnitude")
SWEEP_HEADER = ("k", "mean_order", "A_over_wm", "thd", "wthd", "df", "fundamental", "edge_count")


def fmt(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return f"{float(value):.12g}"


def _write(path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def _read(path, header):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        got = tuple(next(reader))
        if got[: len(header)] != tuple(header):
            raise ValueError(f"{path}: expected header {','.join(header)}, got {','.join(got)}")
        return got, [row for row in reader if row]


def write_waveform_csv(path, waveform: SwitchedWaveform) -> None:
    """One row for the level at ``t = 0`` followed by one row per edge."""
    rows = []
    if waveform.edge_count == 0 or waveform.times[0] > 0.0:
        rows.append((0.0, waveform.initial_level))
    rows.extend(zip(waveform.times.tolist(), waveform.values.tolist()))
    _write(path, WAVEFORM_HEADER, rows)


def read_waveform_csv(path, period: float) -> SwitchedWaveform:
    _, rows = _read(path, WAVEFORM_HEADER)
    t = np.array([float(r[0]) for r in rows])
    v = np.array([float(r[1]) for r in rows])
    initial = v[-1]
    if len(t) and t[0] == 0.0 and v[0] == initial:
        # level row at t = 0, not an edge
        t, v = t[1:], v[1:]
    levels = tuple(sorted(set(v.tolist()) | {float(initial)}))
    return SwitchedWaveform(period, float(initial), t, v, levels)


def write_spectrum_csv(path, spectrum: Spectrum) -> None:
    """Harmonic table; row ``n = 0`` carries the DC term in ``a_n``."""
    rows = [(0, 0.0, spectrum.dc, 0.0, abs(spectrum.dc))]
    for n, f, a, b, m in zip(spectrum.harmonics.tolist(), spectrum.frequencies.tolist(),
                             spectrum.a.tolist(), spectrum.b.tolist(), spectrum.magnitude.tolist()):
        rows.append((n, f, a, b, m))
    _write(path, SPECTRUM_HEADER, rows)


def read_spectrum_csv(path) -> Spectrum:
    _, rows = _read(path, SPECTRUM_HEADER)
    dc = float(rows[0][2])
    lines = rows[1:]
    f0 = float(lines[0][1]) / int(lines[0][0]) if lines else 0.0
    a = np.array([float(r[2]) for r in lines])
    b = np.array([float(r[3]) for r in lines])
    return Spectrum(f0, dc, a, b)


def write_sideband_csv(path, rows) -> None:
    _write(path, SIDEBAND_HEADER, rows)


def read_sideband_csv(path) -> list:
    _, rows = _read(path, SIDEBAND_HEADER)
    return [(int(r[0]), int(r[1]), float(r[2]), float(r[3])) for r in rows]


def write_sweep_csv(path, result) -> None:
    n_bands = len(result.bands)
    header = SWEEP_HEADER + tuple(f"band_{i}" for i in range(n_bands))
    rows = []
    for r in result.rows:
        energies = list(r.band_energies) or [float("nan")] * n_bands
        rows.append((r.k, r.mean_order, r.A_over_wm, r.thd, r.wthd, r.df, r.fundamental,
                     int(r.edge_count), *energies))
    _write(path, header, rows)


def read_sweep_csv(path) -> list:
    header, rows = _read(path, SWEEP_HEADER)
    out = []
    for r in rows:
        rec = {h: float(v) for h, v in zip(header, r)}
        rec["edge_count"] = int(rec["edge_count"])
        out.append(rec)
    return out


# ---------------------------------------------------------------------------
# SVG

_W, _H, _PAD = 800, 360, 50


def _frame(title, xlabel, ylabel, x0, x1, y0, y1):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{_W / 2}" y="{_H - 8}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{_H / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {_H / 2})">{escape(ylabel)}</text>',
        f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" height="{_H - 2 * _PAD}" '
        'fill="none" stroke="#444"/>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv = x0 + frac * (x1 - x0)
        px = _PAD + frac * (_W - 2 * _PAD)
        parts.append(f'<text x="{px:.1f}" y="{_H - _PAD + 16}" text-anchor="middle">{xv:.4g}</text>')
        yv = y0 + frac * (y1 - y0)
        py = _H - _PAD - frac * (_H - 2 * _PAD)
        parts.append(f'<text x="{_PAD - 4}" y="{py + 4:.1f}" text-anchor="end">{yv:.3g}</text>')
    return parts


def _mapper(x0, x1, y0, y1):
    sx = (_W - 2 * _PAD) / ((x1 - x0) or 1.0)
    sy = (_H - 2 * _PAD) / ((y1 - y0) or 1.0)

    def m(x, y):
        return _PAD + (x - x0) * sx, _H - _PAD - (y - y0) * sy

    return m


def waveform_svg(waveform: SwitchedWaveform, title: str = "Switched waveform") -> str:
    """Step plot of one period."""
    starts, ends, lv = waveform.segments()
    lo, hi = min(waveform.levels), max(waveform.levels)
    margin = 0.1 * (hi - lo or 1.0)
    y0, y1 = lo - margin, hi + margin
    to_px = _mapper(0.0, waveform.period * 1e3, y0, y1)
    pts = []
    for s, e, v in zip(starts.tolist(), ends.tolist(), lv.tolist()):
        pts.append(to_px(s * 1e3, v))
        pts.append(to_px(e * 1e3, v))
    path = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
    parts = _frame(title, "t (ms)", "level (V)", 0.0, waveform.period * 1e3, y0, y1)
    parts.append(f'<polyline points="{path}" fill="none" stroke="#1f5fa8" stroke-width="1"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def spectrum_svg(spectrum: Spectrum, title: str = "Harmonic spectrum") -> str:
    """Stem plot of line magnitudes against frequency."""
    f = spectrum.frequencies
    m = spectrum.magnitude
    x1 = float(f[-1]) if len(f) else 1.0
    y1 = float(np.max(m)) * 1.05 if len(m) and np.max(m) > 0 else 1.0
    to_px = _mapper(0.0, x1, 0.0, y1)
    parts = _frame(title, "f (Hz)", "magnitude (V)", 0.0, x1, 0.0, y1)
    for fi, mi in zip(f.tolist(), m.tolist()):
        if mi <= 1e-9 * y1:
            continue
        xa, ya = to_px(fi, 0.0)
        xb, yb = to_px(fi, mi)
        parts.append(f'<line x1="{xa:.2f}" y1="{ya:.2f}" x2="{xb:.2f}" y2="{yb:.2f}" '
                     'stroke="#a8321f" stroke-width="1"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="")


def metrics_text(pairs) -> str:
    lines = []
    for key, value in pairs:
        if isinstance(value, float) and not math.isnan(value):
            value = fmt(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
