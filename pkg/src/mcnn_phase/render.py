"""Deterministic standalone SVG rendering of portrait documents.

The renderer draws only what the document records — angles, radii and
color indices come straight from the stored values, never recomputed —
so the figure is a faithful projection of the data and two renders of
the same document are byte-identical.  Visual conventions: the voltage
nullcline is dashed blue, the state nullcline dotted gray, trajectories
are solid with a circle marker at the start and a cross at the end,
arrows share one ellipse and are colored by the log-norm index, and
zero-vector nodes are drawn as dots.

Everything is assembled from strings with fixed float formatting; there
is no imaging dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "RenderStyle",
    "render_portrait",
    "render_sdr",
    "COLORMAP_STOPS",
    "colormap_color",
]

# 9-stop perceptually uniform monotone-luminance ramp (dark violet -> yellow).
COLORMAP_STOPS: tuple[str, ...] = (
    "#440154",
    "#472d7b",
    "#3b528b",
    "#2c728e",
    "#21918c",
    "#28ae80",
    "#5ec962",
    "#addc30",
    "#fde725",
)


@dataclass(frozen=True)
class RenderStyle:
    width: int = 900
    height: int = 700
    margin: int = 70
    colorbar_width: int = 16
    colorbar_gap: int = 56
    font_size: int = 13
    font_family: str = "Helvetica, Arial, sans-serif"
    background: str = "#ffffff"
    axis_color: str = "#222222"
    arrow_width: float = 1.4
    arrow_head: float = 5.0
    zero_dot_radius: float = 2.4
    zero_dot_color: str = "#555555"
    nullcline_v_color: str = "#1f5fbf"
    nullcline_v_dash: str = "8 5"
    nullcline_n_color: str = "#8a8a8a"
    nullcline_n_dash: str = "2 4"
    nullcline_width: float = 1.8
    trajectory_width: float = 2.2
    trajectory_colors: tuple[str, ...] = (
        "#d62728",
        "#2ca02c",
        "#9467bd",
        "#ff7f0e",
        "#17becf",
        "#8c564b",
        "#e377c2",
        "#7f7f7f",
    )
    failed_trajectory_color: str = "#d62728"
    marker_radius: float = 4.5
    equilibrium_size: float = 5.0
    equilibrium_color: str = "#000000"
    tick_length: float = 6.0


def _hex_to_rgb(stop: str) -> tuple[int, int, int]:
    return (int(stop[1:3], 16), int(stop[3:5], 16), int(stop[5:7], 16))


def colormap_color(t: float, stops=COLORMAP_STOPS) -> str:
    """Linear interpolation through the stop table at t in [0, 1]."""
    t = min(1.0, max(0.0, float(t)))
    pos = t * (len(stops) - 1)
    low = min(int(pos), len(stops) - 2)
    frac = pos - low
    r1, g1, b1 = _hex_to_rgb(stops[low])
    r2, g2, b2 = _hex_to_rgb(stops[low + 1])
    return "#%02x%02x%02x" % (
        round(r1 + (r2 - r1) * frac),
        round(g1 + (g2 - g1) * frac),
        round(b1 + (b2 - b1) * frac),
    )


def _px(x: float) -> str:
    """Fixed, deterministic pixel formatting."""
    out = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if out in ("-0", "") else out


def _nice_ticks(lo: float, hi: float, target: int = 7) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / max(1, target)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = 10.0 * mag
    for mult in (1.0, 2.0, 5.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    value = first
    while value <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(value) < 1e-12 * span else value)
        value += step
    return ticks


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


class _Canvas:
    """Accumulates SVG elements with deterministic formatting."""

    def __init__(self):
        self.parts: list[str] = []

    def add(self, fragment: str) -> None:
        self.parts.append(fragment)

    def line(self, x1, y1, x2, y2, stroke, width, cls="", dash="") -> None:
        attrs = [
            f'x1="{_px(x1)}" y1="{_px(y1)}" x2="{_px(x2)}" y2="{_px(y2)}"',
            f'stroke="{stroke}" stroke-width="{_px(width)}"',
        ]
        if dash:
            attrs.append(f'stroke-dasharray="{dash}"')
        if cls:
            attrs.insert(0, f'class="{cls}"')
        self.add(f"<line {' '.join(attrs)} />")

    def path(self, d: str, stroke, width, cls="", dash="", fill="none") -> None:
        attrs = [f'd="{d}"', f'fill="{fill}"',
                 f'stroke="{stroke}" stroke-width="{_px(width)}"']
        if dash:
            attrs.append(f'stroke-dasharray="{dash}"')
        if cls:
            attrs.insert(0, f'class="{cls}"')
        self.add(f"<path {' '.join(attrs)} />")

    def circle(self, cx, cy, r, cls="", fill="none", stroke="none",
               width=1.0) -> None:
        attrs = [f'cx="{_px(cx)}" cy="{_px(cy)}" r="{_px(r)}"', f'fill="{fill}"']
        if stroke != "none":
            attrs.append(f'stroke="{stroke}" stroke-width="{_px(width)}"')
        if cls:
            attrs.insert(0, f'class="{cls}"')
        self.add(f"<circle {' '.join(attrs)} />")

    def rect(self, x, y, w, h, fill, cls="", stroke="none", width=1.0) -> None:
        attrs = [
            f'x="{_px(x)}" y="{_px(y)}" width="{_px(w)}" height="{_px(h)}"',
            f'fill="{fill}"',
        ]
        if stroke != "none":
            attrs.append(f'stroke="{stroke}" stroke-width="{_px(width)}"')
        if cls:
            attrs.insert(0, f'class="{cls}"')
        self.add(f"<rect {' '.join(attrs)} />")

    def text(self, x, y, content, size, cls="", anchor="middle", fill="#222222",
             family="Helvetica, Arial, sans-serif", rotate=None) -> None:
        attrs = [
            f'x="{_px(x)}" y="{_px(y)}"',
            f'font-size="{size}" font-family="{family}"',
            f'text-anchor="{anchor}" fill="{fill}"',
        ]
        if rotate is not None:
            attrs.append(f'transform="rotate({_px(rotate)} {_px(x)} {_px(y)})"')
        if cls:
            attrs.insert(0, f'class="{cls}"')
        self.add(f"<text {' '.join(attrs)}>{_esc(content)}</text>")


def render_portrait(doc, style: RenderStyle | None = None) -> bytes:
    """Compose the full phase-portrait SVG for a document, as bytes."""
    st = style or RenderStyle()
    g = doc.grid
    norm = doc.normalization

    plot_x = float(st.margin)
    plot_y = float(st.margin)
    plot_w = st.width - 2 * st.margin - st.colorbar_gap - st.colorbar_width
    plot_h = st.height - 2 * st.margin
    if plot_w <= 0 or plot_h <= 0:
        raise ValueError("style leaves no plotting area")

    v_lo, v_hi = g.v_c_range
    y_lo = float(g.n_to_axis(g.n_d_range[0]))
    y_hi = float(g.n_to_axis(g.n_d_range[1]))

    def sx(v: float) -> float:
        return plot_x + (v - v_lo) / (v_hi - v_lo) * plot_w

    def sy_axis(y: float) -> float:
        return plot_y + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    def sy(n: float) -> float:
        return sy_axis(float(g.n_to_axis(n)))

    radius_v = float(norm["radius_v"])
    radius_n = float(norm["radius_n"])
    a_px = radius_v / (v_hi - v_lo) * plot_w
    b_px = radius_n / (y_hi - y_lo) * plot_h

    canvas = _Canvas()
    canvas.add(
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{st.width}" height="{st.height}" '
        f'viewBox="0 0 {st.width} {st.height}" '
        f'data-config-hash="{doc.config_hash}" '
        f'data-v-min="{v_lo!r}" data-v-max="{v_hi!r}" '
        f'data-n-min="{g.n_d_range[0]!r}" data-n-max="{g.n_d_range[1]!r}" '
        f'data-axis-scale="{"log" if g.log_axis else "linear"}" '
        f'data-plot-x="{_px(plot_x)}" data-plot-y="{_px(plot_y)}" '
        f'data-plot-width="{_px(plot_w)}" data-plot-height="{_px(plot_h)}">'
    )
    canvas.add(f"<!-- config sha256 {doc.config_hash} -->")
    canvas.rect(0, 0, st.width, st.height, st.background, cls="background")

    # --- axes, ticks, labels -------------------------------------------------
    canvas.rect(plot_x, plot_y, plot_w, plot_h, "none", cls="frame",
                stroke=st.axis_color, width=1.0)
    for v in _nice_ticks(v_lo, v_hi):
        x = sx(v)
        canvas.line(x, plot_y + plot_h, x, plot_y + plot_h + st.tick_length,
                    st.axis_color, 1.0, cls="tick")
        canvas.text(x, plot_y + plot_h + st.tick_length + st.font_size,
                    "%g" % v, st.font_size, cls="tick-label",
                    family=st.font_family)
    if g.log_axis:
        decades = range(
            math.ceil(math.log10(g.n_d_range[0]) - 1e-9),
            math.floor(math.log10(g.n_d_range[1]) + 1e-9) + 1,
        )
        n_ticks = [(10.0**k, f"1e{k}") for k in decades]
    else:
        n_ticks = [(n, "%g" % n)
                   for n in _nice_ticks(g.n_d_range[0], g.n_d_range[1])]
    for n_value, label in n_ticks:
        y = sy(n_value)
        canvas.line(plot_x - st.tick_length, y, plot_x, y, st.axis_color, 1.0,
                    cls="tick")
        canvas.text(plot_x - st.tick_length - 4, y + st.font_size * 0.35,
                    label, st.font_size, cls="tick-label", anchor="end",
                    family=st.font_family)
    canvas.text(plot_x + plot_w / 2, st.height - st.margin / 2 + st.font_size,
                "V_C [V]", st.font_size + 1, cls="axis-label",
                family=st.font_family)
    canvas.text(st.margin / 2 - st.font_size, plot_y + plot_h / 2,
                "N_d [m^-3]", st.font_size + 1, cls="axis-label",
                family=st.font_family, rotate=-90.0)

    # --- vector field ---------------------------------------------------------
    head = st.arrow_head
    for s in doc.field:
        cx = sx(s.point.v_c)
        cy = sy(s.point.n_d)
        if s.theta is None:
            canvas.circle(cx, cy, st.zero_dot_radius, cls="zero-vector",
                          fill=st.zero_dot_color)
            continue
        tip_x = cx + a_px * math.cos(s.theta)
        tip_y = cy - b_px * math.sin(s.theta)
        phi = math.atan2(tip_y - cy, tip_x - cx)
        barb1 = (tip_x + head * math.cos(phi + 2.6),
                 tip_y + head * math.sin(phi + 2.6))
        barb2 = (tip_x + head * math.cos(phi - 2.6),
                 tip_y + head * math.sin(phi - 2.6))
        d = (
            f"M {_px(cx)} {_px(cy)} L {_px(tip_x)} {_px(tip_y)} "
            f"M {_px(barb1[0])} {_px(barb1[1])} L {_px(tip_x)} {_px(tip_y)} "
            f"L {_px(barb2[0])} {_px(barb2[1])}"
        )
        canvas.path(d, colormap_color(s.color_index), st.arrow_width,
                    cls="arrow")

    # --- nullclines -----------------------------------------------------------
    for nc, cls, color, dash in (
        (doc.nullcline_v, "nullcline-v", st.nullcline_v_color, st.nullcline_v_dash),
        (doc.nullcline_n, "nullcline-n", st.nullcline_n_color, st.nullcline_n_dash),
    ):
        for line in nc.polylines:
            if len(line) < 2:
                continue
            d = "M " + " L ".join(
                f"{_px(sx(v))} {_px(sy(n))}" for v, n in line
            )
            canvas.path(d, color, st.nullcline_width, cls=cls, dash=dash)

    # --- equilibria (isolated and boundary; the continuum is the axis line) ---
    half = st.equilibrium_size
    for eq in doc.equilibria:
        if eq.kind == "on-continuum":
            continue
        x = sx(eq.point.v_c)
        y = sy(eq.point.n_d)
        d = (
            f"M {_px(x)} {_px(y - half)} L {_px(x + half)} {_px(y)} "
            f"L {_px(x)} {_px(y + half)} L {_px(x - half)} {_px(y)} Z"
        )
        fill = st.equilibrium_color if eq.classification == "stable" else "none"
        canvas.path(d, st.equilibrium_color, 1.2, cls=f"equilibrium {eq.kind}",
                    fill=fill)

    # --- trajectories ----------------------------------------------------------
    for idx, traj in enumerate(doc.trajectories):
        color = st.trajectory_colors[idx % len(st.trajectory_colors)]
        failed = traj.status != "ok"
        if failed:
            color = st.failed_trajectory_color
        pts = [(sx(s.v_c), sy(s.n_d)) for _, s in traj.points]
        if len(pts) >= 2:
            d = "M " + " L ".join(f"{_px(x)} {_px(y)}" for x, y in pts)
            canvas.path(
                d, color, st.trajectory_width,
                cls="trajectory trajectory-failed" if failed else "trajectory",
                dash="6 4" if failed else "",
            )
        start_x, start_y = pts[0]
        end_x, end_y = pts[-1]
        canvas.circle(start_x, start_y, st.marker_radius,
                      cls="trajectory-start", stroke=color, width=1.6)
        r = st.marker_radius
        cross = (
            f"M {_px(end_x - r)} {_px(end_y - r)} L {_px(end_x + r)} {_px(end_y + r)} "
            f"M {_px(end_x + r)} {_px(end_y - r)} L {_px(end_x - r)} {_px(end_y + r)}"
        )
        canvas.path(cross, color, 1.6, cls="trajectory-end")

    # --- colorbar ---------------------------------------------------------------
    bar_x = st.width - st.margin - st.colorbar_width
    bar_y = plot_y
    bar_h = plot_h
    n_slats = 64
    for k in range(n_slats):
        t0 = k / n_slats
        t1 = (k + 1) / n_slats
        y_top = bar_y + bar_h * (1.0 - t1)
        canvas.rect(bar_x, y_top, st.colorbar_width, bar_h / n_slats + 0.5,
                    colormap_color((t0 + t1) / 2), cls="colorbar-slat")
    canvas.rect(bar_x, bar_y, st.colorbar_width, bar_h, "none",
                cls="colorbar-frame", stroke=st.axis_color, width=1.0)
    m_min = norm.get("norm_min")
    m_max = norm.get("norm_max")
    if m_min and m_max and m_max > m_min:
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            value = 10.0 ** (
                math.log10(m_min) + frac * (math.log10(m_max) - math.log10(m_min))
            )
            y = bar_y + bar_h * (1.0 - frac)
            canvas.line(bar_x + st.colorbar_width, y,
                        bar_x + st.colorbar_width + 4, y, st.axis_color, 1.0,
                        cls="colorbar-tick")
            canvas.text(bar_x + st.colorbar_width + 6, y + st.font_size * 0.35,
                        "%.2e" % value, st.font_size - 2, cls="colorbar-label",
                        anchor="start", family=st.font_family)
    canvas.text(bar_x + st.colorbar_width / 2, bar_y - 10, "|rate|",
                st.font_size - 1, cls="colorbar-title", family=st.font_family)

    canvas.add("</svg>")
    return ("\n".join(canvas.parts) + "\n").encode("utf-8")


def render_sdr(route, config_hash: str = "", style: RenderStyle | None = None) -> bytes:
    """Single frozen-state route (dV_C/dt vs V_C) as a standalone SVG."""
    st = style or RenderStyle()
    plot_x = float(st.margin)
    plot_y = float(st.margin)
    plot_w = st.width - 2 * st.margin
    plot_h = st.height - 2 * st.margin

    vs = [v for v, _ in route.samples]
    ds = [d for _, d in route.samples]
    v_lo, v_hi = min(vs), max(vs)
    d_lo, d_hi = min(ds), max(ds)
    if d_lo == d_hi:
        d_lo, d_hi = d_lo - 1.0, d_hi + 1.0
    pad = 0.05 * (d_hi - d_lo)
    d_lo, d_hi = d_lo - pad, d_hi + pad

    def sx(v: float) -> float:
        return plot_x + (v - v_lo) / (v_hi - v_lo) * plot_w

    def sy(d: float) -> float:
        return plot_y + plot_h - (d - d_lo) / (d_hi - d_lo) * plot_h

    canvas = _Canvas()
    canvas.add(
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{st.width}" height="{st.height}" '
        f'viewBox="0 0 {st.width} {st.height}" '
        f'data-config-hash="{config_hash}">'
    )
    canvas.rect(0, 0, st.width, st.height, st.background, cls="background")
    canvas.rect(plot_x, plot_y, plot_w, plot_h, "none", cls="frame",
                stroke=st.axis_color, width=1.0)
    if d_lo < 0.0 < d_hi:
        canvas.line(plot_x, sy(0.0), plot_x + plot_w, sy(0.0), "#999999", 1.0,
                    cls="zero-axis", dash="4 4")
    for v in _nice_ticks(v_lo, v_hi):
        x = sx(v)
        canvas.line(x, plot_y + plot_h, x, plot_y + plot_h + st.tick_length,
                    st.axis_color, 1.0, cls="tick")
        canvas.text(x, plot_y + plot_h + st.tick_length + st.font_size,
                    "%g" % v, st.font_size, cls="tick-label",
                    family=st.font_family)
    for d in _nice_ticks(d_lo, d_hi, target=6):
        yy = sy(d)
        canvas.line(plot_x - st.tick_length, yy, plot_x, yy, st.axis_color,
                    1.0, cls="tick")
        canvas.text(plot_x - st.tick_length - 4, yy + st.font_size * 0.35,
                    "%.2e" % d, st.font_size - 2, cls="tick-label",
                    anchor="end", family=st.font_family)
    d = "M " + " L ".join(f"{_px(sx(v))} {_px(sy(dd))}" for v, dd in route.samples)
    canvas.path(d, "#1f5fbf", 2.0, cls="sdr-curve")
    for v_star, stability in route.zero_crossings:
        fill = st.equilibrium_color if stability == "stable" else "none"
        canvas.circle(sx(v_star), sy(0.0), 4.0, cls=f"sdr-crossing {stability}",
                      fill=fill, stroke=st.equilibrium_color, width=1.4)
    canvas.text(plot_x + plot_w / 2, st.height - st.margin / 2 + st.font_size,
                "V_C [V]", st.font_size + 1, cls="axis-label",
                family=st.font_family)
    canvas.text(st.margin / 2 - st.font_size, plot_y + plot_h / 2,
                "dV_C/dt [V/s]", st.font_size + 1, cls="axis-label",
                family=st.font_family, rotate=-90.0)
    canvas.text(plot_x + plot_w / 2, plot_y - 10,
                "n_d = %.4e m^-3" % route.n_d_fixed, st.font_size,
                cls="title", family=st.font_family)
    canvas.add("</svg>")
    return ("\n".join(canvas.parts) + "\n").encode("utf-8")
