"""Pictures: hand-written SVG for complexes and curves, matplotlib for numerics.

The SVG writer is deterministic (fixed layout, fixed number formatting), so
its output can be diffed in tests.  Each face is drawn on its own as a
regular polygon; faces with fewer than three sides are drawn as circles cut
into arcs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

from .curve import Multicurve, boundary_key, crossing_report
from .surface import SideRef, SurfaceComplex, natural_key

__all__ = ["RenderOptions", "render_svg", "plot_volume_sweep", "plot_flow", "plot_unit_ball"]


@dataclass(frozen=True)
class RenderOptions:
    cell: float = 260.0
    radius: float = 95.0
    columns: int = 4
    tick: float = 9.0
    show_points: bool = True


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _boundary_xy(k: int, side: int, pos: float) -> Tuple[float, float]:
    """Point at fraction ``pos`` along ``side`` of the unit k-gon (math orientation)."""
    if k < 3:
        t = 2 * math.pi * (side + pos) / k
        return math.cos(t), math.sin(t)
    t0, t1 = 2 * math.pi * side / k, 2 * math.pi * (side + 1) / k
    return (
        (1 - pos) * math.cos(t0) + pos * math.cos(t1),
        (1 - pos) * math.sin(t0) + pos * math.sin(t1),
    )


def _segment_hit(p, q, r, s) -> Optional[Tuple[float, float]]:
    d = (q[0] - p[0]) * (s[1] - r[1]) - (q[1] - p[1]) * (s[0] - r[0])
    if abs(d) < 1e-12:
        return None
    t = ((r[0] - p[0]) * (s[1] - r[1]) - (r[1] - p[1]) * (s[0] - r[0])) / d
    return p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])


def render_svg(c: SurfaceComplex, m: Optional[Multicurve] = None, options: RenderOptions = RenderOptions()) -> str:
    faces = sorted(c.faces, key=lambda t: natural_key(t[0]))
    cols = max(1, min(options.columns, len(faces)))
    rows = max(1, math.ceil(len(faces) / cols))
    W, H = cols * options.cell, rows * options.cell
    R = options.radius
    centers: Dict[str, Tuple[float, float]] = {}
    for i, (f, _) in enumerate(faces):
        centers[f] = ((i % cols + 0.5) * options.cell, (i // cols + 0.5) * options.cell)

    def to_px(face: str, xy) -> Tuple[float, float]:
        cx, cy = centers[face]
        return cx + R * xy[0], cy - R * xy[1]

    side_label = {}
    for g in c.gluings:
        side_label[g.a] = g.id if g.compatible else g.id + "~"
        side_label[g.b] = g.id if g.compatible else g.id + "~"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(W)}" height="{_f(H)}" '
        f'viewBox="0 0 {_f(W)} {_f(H)}" font-family="sans-serif" font-size="11">',
        f'<rect width="{_f(W)}" height="{_f(H)}" fill="white"/>',
    ]
    for f, k in faces:
        out.append(f'<g class="face" id="face-{escape(f)}">')
        cx, cy = centers[f]
        if k < 3:
            out.append(f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(R)}" fill="#f4f4f4" stroke="black"/>')
            for s in range(k):
                x, y = to_px(f, _boundary_xy(k, s, 0.0))
                out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="2.50" fill="black"/>')
        else:
            pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in (to_px(f, _boundary_xy(k, s, 0.0)) for s in range(k)))
            out.append(f'<polygon points="{pts}" fill="#f4f4f4" stroke="black"/>')
        for s in range(k):
            mx, my = _boundary_xy(k, s, 0.5)
            norm = math.hypot(mx, my) or 1.0
            lx, ly = to_px(f, (mx / norm * 1.18, my / norm * 1.18))
            text = f"{s}"
            lab = side_label.get(SideRef(f, s))
            text += f" {lab}" if lab else " free"
            out.append(f'<text x="{_f(lx)}" y="{_f(ly)}" text-anchor="middle">{escape(text)}</text>')
        out.append(f'<text x="{_f(cx)}" y="{_f(cy + R + 28)}" text-anchor="middle" font-weight="bold">{escape(f)}</text>')
        out.append("</g>")

    if m is not None:
        ends: Dict[str, Tuple[Tuple[float, float], Tuple[float, float]]] = {}
        out.append('<g class="curve" stroke="#1f5fbf" stroke-width="2" fill="none">')
        for ch in m.chords:
            k = c.side_count(ch.face)
            n = ch.normalized()
            a = _boundary_xy(k, *map(float, boundary_key(m, n.tail)))
            b = _boundary_xy(k, *map(float, boundary_key(m, n.head)))
            ends[ch.id] = (a, b)
            (x0, y0), (x1, y1) = to_px(ch.face, a), to_px(ch.face, b)
            out.append(f'<line class="chord" id="chord-{escape(ch.id)}" x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x1)}" y2="{_f(y1)}"/>')
            # the normal points to the left of the tail-to-head direction
            mx, my = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
            dx, dy = b[0] - a[0], b[1] - a[1]
            ln = math.hypot(dx, dy) or 1.0
            tip = (mx - dy / ln * options.tick / R, my + dx / ln * options.tick / R)
            (px, py), (qx, qy) = to_px(ch.face, (mx, my)), to_px(ch.face, tip)
            out.append(f'<line class="tick" x1="{_f(px)}" y1="{_f(py)}" x2="{_f(qx)}" y2="{_f(qy)}" stroke-width="1.5"/>')
        out.append("</g>")
        for ci in m.circles:
            cx, cy = centers[ci.face]
            out.append(
                f'<circle class="null-circle" cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(R / 6)}" fill="none" '
                f'stroke="#1f5fbf" stroke-dasharray="{"4,2" if ci.sign > 0 else "1,2"}"/>'
            )
        if options.show_points:
            out.append('<g class="points" fill="#1f5fbf">')
            for ch in m.chords:
                for xy in ends[ch.id]:
                    x, y = to_px(ch.face, xy)
                    out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="2.50"/>')
            out.append("</g>")
        report = crossing_report(m)
        out.append('<g class="crossings" fill="none" stroke="#d62728" stroke-width="2">')
        for face, x, y in report.crossings:
            hit = _segment_hit(*ends[x], *ends[y])
            if hit is None:
                continue
            px, py = to_px(face, hit)
            out.append(f'<circle class="crossing" cx="{_f(px)}" cy="{_f(py)}" r="6.00"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------- matplotlib


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "quasitopy"
    fig, ax = plt.subplots(figsize=(5.5, 4.0), dpi=100)
    return plt, fig, ax


def _save(plt, fig, path: str) -> None:
    fmt = path.rsplit(".", 1)[-1].lower() if "." in path else "png"
    meta = {"svg": {"Date": None}, "pdf": {"CreationDate": None, "ModDate": None}, "png": {"Software": None}}
    fig.tight_layout()
    fig.savefig(path, format=fmt, metadata=meta.get(fmt))
    plt.close(fig)


def plot_volume_sweep(rows: Sequence[Tuple[float, float, float]], q: int, path: str) -> None:
    """Rows are ``(epsilon, vol0, vol_eps)``."""
    plt, fig, ax = _figure()
    eps = [r[0] for r in rows]
    ax.plot(eps, [r[2] for r in rows], "o-", label="level set")
    ax.plot(eps, [r[1] for r in rows], "--", label="coordinate planes")
    ax.set_xscale("log")
    ax.set_xlabel("epsilon")
    ax.set_ylabel(f"{q - 1}-volume in window")
    ax.legend()
    _save(plt, fig, path)


def plot_flow(levels: Sequence, q: int, path: str) -> None:
    plt, fig, ax = _figure()
    ax.plot([lv.epsilon for lv in levels], [lv.volume for lv in levels], "o-")
    ax.set_xlabel("level epsilon")
    ax.set_ylabel("arc length" if q == 2 else "patch area")
    _save(plt, fig, path)


def plot_unit_ball(report, path: str) -> None:
    plt, fig, ax = _figure()
    b = report.boundary
    ax.plot(list(b[:, 0]) + [b[0, 0]], list(b[:, 1]) + [b[0, 1]], "-", lw=1)
    ax.set_aspect("equal")
    ax.set_title(f"unit ball, min midpoint margin {report.min_margin:.3e}")
    _save(plt, fig, path)
