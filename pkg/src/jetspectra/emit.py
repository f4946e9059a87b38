"""Deterministic CSV, JSON, and SVG emission.

CSV is RFC-4180-style with a mandatory header row and CRLF line ends; JSON
keeps construction order and full float precision; SVG uses plain geometric
primitives only, with no timestamps or generator metadata, so re-running a
configuration reproduces every byte.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .jets import TWO_PI, wrap_delta

__all__ = [
    "csv_text",
    "json_text",
    "loop_csv",
    "spectrum_csv",
    "cerf_csv",
    "contact_curve_csv",
    "lambda_scan_csv",
    "crossings_csv",
    "pencil_csv",
    "front_svg",
    "cerf_svg",
    "contact_curve_svg",
    "isotopy_front_frames",
]


def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) if isinstance(v, (bool, int, float, np.generic)) else v
                         for v in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# --- tabular views -----------------------------------------------------------


def loop_csv(loop) -> str:
    rows = zip(loop.s, loop.q, loop.p, loop.u)
    return csv_text(["s", "q", "p", "u"], rows)


def spectrum_csv(spectrum) -> str:
    rows = [
        (k + 1, spectrum.values[k], spectrum.degrees[k], spectrum.boundary_attained[k])
        for k in range(len(spectrum.values))
    ]
    return csv_text(["k", "c_k", "degree", "boundary_flag"], rows)


def cerf_csv(diagram) -> str:
    rows = []
    for br in diagram.branches:
        for t, z in zip(br.ts, br.zs):
            rows.append((br.id, t, z))
    return csv_text(["branch_id", "t", "z"], rows)


def contact_curve_csv(curve) -> str:
    rows = zip(curve.s, curve.xs[:, 0], curve.xs[:, 1], curve.thetas)
    return csv_text(["s", "x1", "x2", "theta"], rows)


def lambda_scan_csv(scan) -> str:
    header = ["lambda"] + [f"c_{k + 1}" for k in range(scan.b)]
    rows = [(lam, *vals) for lam, vals in zip(scan.lambdas, scan.curves)]
    return csv_text(header, rows)


def crossings_csv(scan) -> str:
    rows = [
        (c.k, c.lam, c.q, c.residual_value, c.residual_grad, c.interior)
        for c in scan.crossings
    ]
    return csv_text(["k", "lambda", "q", "residual_value", "residual_grad", "interior"],
                    rows)


def pencil_csv(result) -> str:
    rows = [(pt.s, pt.q, pt.lam, pt.residual) for pt in result.points]
    return csv_text(["s", "q", "lambda", "residual"], rows)


# --- SVG ----------------------------------------------------------------------


def _f(x) -> str:
    return f"{x:.6g}"


class _Canvas:
    """Maps world coordinates to a fixed-size viewport, y axis up."""

    def __init__(self, x_range, y_range, width=640, height=440, pad=0.08):
        x0, x1 = x_range
        y0, y1 = y_range
        dx = (x1 - x0) or 1.0
        dy = (y1 - y0) or 1.0
        x0, x1 = x0 - pad * dx, x1 + pad * dx
        y0, y1 = y0 - pad * dy, y1 + pad * dy
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1
        self.width, self.height = width, height
        self.parts: list[str] = []

    def map(self, x, y):
        px = (x - self.x0) / (self.x1 - self.x0) * self.width
        py = self.height - (y - self.y0) / (self.y1 - self.y0) * self.height
        return px, py

    def polyline(self, xs, ys, stroke="black", width=1.2):
        pts = " ".join(f"{_f(px)},{_f(py)}"
                       for px, py in (self.map(x, y) for x, y in zip(xs, ys)))
        self.parts.append(
            f'<polyline fill="none" stroke="{stroke}" stroke-width="{width}" '
            f'points="{pts}"/>')

    def segment(self, x0, y0, x1, y1, stroke="black", width=1.0):
        a = self.map(x0, y0)
        b = self.map(x1, y1)
        self.parts.append(
            f'<line x1="{_f(a[0])}" y1="{_f(a[1])}" x2="{_f(b[0])}" y2="{_f(b[1])}" '
            f'stroke="{stroke}" stroke-width="{width}"/>')

    def dot(self, x, y, r=3.0, fill="crimson"):
        px, py = self.map(x, y)
        self.parts.append(f'<circle cx="{_f(px)}" cy="{_f(py)}" r="{r}" fill="{fill}"/>')

    def render(self) -> str:
        body = "\n".join(self.parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect width="{self.width}" height="{self.height}" fill="white"/>\n'
            f"{body}\n</svg>\n"
        )


def _wrapped_runs(q):
    """Split cyclic angle samples into index runs without wrap jumps."""
    jumps = np.nonzero(np.abs(np.diff(q)) > np.pi)[0]
    runs = []
    start = 0
    for j in jumps:
        runs.append(range(start, j + 1))
        start = j + 1
    runs.append(range(start, q.shape[0]))
    return runs


def front_svg(front, width=640, height=440) -> str:
    u_lo, u_hi = float(front.u.min()), float(front.u.max())
    canvas = _Canvas((0.0, TWO_PI), (u_lo, u_hi), width, height)
    canvas.segment(0, 0, TWO_PI, 0, stroke="#cccccc", width=0.8)
    for run in _wrapped_runs(front.q):
        idx = list(run)
        if len(idx) >= 2:
            canvas.polyline(front.q[idx], front.u[idx])
    for i in front.cusp_indices:
        canvas.dot(front.q[i], front.u[i])
    return canvas.render()


def cerf_svg(diagram, curves=None, times=None, width=640, height=440) -> str:
    all_z = [z for br in diagram.branches for z in br.zs]
    if not all_z:
        all_z = [0.0]
    t0, t1 = float(diagram.times[0]), float(diagram.times[-1])
    canvas = _Canvas((t0, t1), (min(all_z), max(all_z)), width, height)
    for br in diagram.branches:
        if len(br.ts) >= 2:
            canvas.polyline(br.ts, br.zs, stroke="#444444", width=1.0)
    if curves is not None and times is not None:
        for k in range(curves.shape[1]):
            canvas.polyline(times, curves[:, k], stroke="royalblue", width=2.0)
    for e in diagram.events:
        canvas.dot(e.t, e.z)
    return canvas.render()


def contact_curve_svg(curve, tick_every=8, width=480, height=480) -> str:
    xs = curve.xs
    span = max(float(np.ptp(xs[:, 0])), float(np.ptp(xs[:, 1])), 1e-6)
    canvas = _Canvas((xs[:, 0].min(), xs[:, 0].max()),
                     (xs[:, 1].min(), xs[:, 1].max()), width, height)
    closed_x = np.append(xs[:, 0], xs[0, 0])
    closed_y = np.append(xs[:, 1], xs[0, 1])
    canvas.polyline(closed_x, closed_y)
    tick = 0.06 * span
    for i in range(0, curve.n, tick_every):
        nx, ny = np.cos(curve.thetas[i]), np.sin(curve.thetas[i])
        canvas.segment(xs[i, 0], xs[i, 1], xs[i, 0] + tick * nx, xs[i, 1] + tick * ny,
                       stroke="seagreen", width=1.0)
    return canvas.render()


def isotopy_front_frames(iso, count=12):
    """A sample of front SVGs along an isotopy, with a common value window."""
    from .jets import front_projection

    n = len(iso.frames)
    picks = sorted(set(int(round(i * (n - 1) / max(1, count - 1))) for i in range(count)))
    u_lo = min(float(fr.u.min()) for fr in iso.frames)
    u_hi = max(float(fr.u.max()) for fr in iso.frames)
    frames = []
    for j, i in enumerate(picks):
        front = front_projection(iso.frames[i])
        canvas = _Canvas((0.0, TWO_PI), (u_lo, u_hi))
        canvas.segment(0, 0, TWO_PI, 0, stroke="#cccccc", width=0.8)
        for run in _wrapped_runs(front.q):
            idx = list(run)
            if len(idx) >= 2:
                canvas.polyline(front.q[idx], front.u[idx])
        for c in front.cusp_indices:
            canvas.dot(front.q[c], front.u[c])
        frames.append((f"front_{j:03d}.svg", canvas.render()))
    return frames
