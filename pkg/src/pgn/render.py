"""SVG sketches of template periods.

Floating point is used here for layout only.
"""
from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .exactnum import QuadExt
from .template import Template, phi_limits

__all__ = ["render_svg", "ray_slopes"]

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]
_GREEK = {
    "t": "t", "s": "s", "mu": "μ", "nu": "ν", "theta": "θ", "vartheta": "ϑ",
    "sigma": "σ", "gamma": "γ", "eta": "η", "psi": "ψ",
}
_LABEL_TEXT = {"q0": "q₀", "q1": "q₁", "q~1": "q̃₁", "q~2": "q̃₂", "q~3": "q̃₃", "r~": "r̃"}


def _named_values(T: Template) -> list[tuple[str, QuadExt]]:
    n, p = T.n, T.params
    out: list[tuple[str, QuadExt]] = []
    if T.kind == "simultaneous":
        t, mu = p["t"], p["mu"]
        theta = -(t + (n - 1) * mu)
        sigma = (1 - n) * (t + n * mu) / (n + 1 + 2 * t + (n - 1) * mu)
        out = [("t", t), ("mu", mu), ("theta", theta), ("sigma", sigma)]
        if p.get("eta", sigma) != sigma:
            out.append(("eta", p["eta"]))
    elif T.kind == "dual":
        s, nu = p["s"], p["nu"]
        vt = -(s + (n - 1) * nu)
        gamma = (1 - n) * (s + n * nu) / (n + 1 + 2 * s + (n - 1) * nu)
        out = [("s", s), ("nu", nu), ("vartheta", vt), ("gamma", gamma)]
        if p.get("eta", gamma) != gamma:
            out.append(("eta", p["eta"]))
    return out


def ray_slopes(T: Template) -> list[tuple[str, QuadExt]]:
    """Distinct slopes of the dotted rays: every liminf/limsup value plus the
    construction parameters, with coinciding names joined by '='."""
    lim = phi_limits(T)
    named = _named_values(T)
    slopes: dict[QuadExt, list[str]] = {}
    for name, v in named:
        slopes.setdefault(v, []).append(name)
    for v in lim.lower + lim.upper:
        slopes.setdefault(v, [])
    out = []
    for v in sorted(slopes):
        names = slopes[v] or ["psi"]
        out.append(("=".join(dict.fromkeys(names)), v))
    return out


def render_svg(T: Template, periods: int = 2, width: int = 800, height: int = 500) -> str:
    if width <= 0 or height <= 0:
        raise ValueError("degenerate zero-length axes: width and height must be positive")
    if periods < 1:
        raise ValueError("at least one period must be drawn")
    n = T.n
    lam = T.scale_ratio
    # exact breakpoints of preperiod and the requested periods
    pts = [(bp.q, bp.values) for bp in T.preperiod]
    marks: list[tuple[int, str, QuadExt]] = []
    scale = QuadExt(1)
    for k in range(periods):
        for i, bp in enumerate(T.period):
            q = bp.q * scale
            marks.append((k, bp.label, q))
            if i > 0:
                pts.append((q, tuple(v * scale for v in bp.values)))
        scale = scale * lam
    rays = ray_slopes(T)

    x_max = float(pts[-1][0])
    ys = [float(v) for _, vals in pts for v in vals]
    ys += [float(s) * x_max for _, s in rays] + [0.0]
    y_min, y_max = min(ys), max(ys)
    if y_max - y_min == 0:
        y_min, y_max = -1.0, 1.0
    if x_max <= 0:
        raise ValueError("degenerate zero-length axes: empty q-range")
    pad = 40.0

    def sx(x: float) -> float:
        return pad + (width - 2 * pad) * x / x_max

    def sy(y: float) -> float:
        return height - pad - (height - 2 * pad) * (y - y_min) / (y_max - y_min)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" data-n="{n}" data-kind={quoteattr(T.kind)}>',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line class="axis" x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(x_max):.2f}" '
        f'y2="{sy(0):.2f}" stroke="#888" stroke-width="1"/>',
    ]
    for name, s in rays:
        label = "".join(_GREEK.get(part, part) + "=" for part in name.split("="))[:-1]
        x_end = x_max
        y_end = float(s) * x_max
        out.append(
            f'<line class="ray" data-label={quoteattr(name)} data-slope={quoteattr(str(s))} '
            f'x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(x_end):.2f}" y2="{sy(y_end):.2f}" '
            f'stroke="#aaa" stroke-width="1" stroke-dasharray="2,4"/>'
        )
        out.append(
            f'<text class="ray-label" x="{sx(x_end) - 4:.2f}" y="{sy(y_end) - 4:.2f}" '
            f'font-size="11" text-anchor="end">{escape(label)}</text>'
        )
    for j in range(n + 1):
        color = _COLORS[j % len(_COLORS)]
        out.append(f'<g class="component" data-index="{j + 1}" stroke="{color}" fill="none">')
        for (qa, va), (qb, vb) in zip(pts, pts[1:]):
            if qa == qb:
                continue
            # glued block: drawn once, by its lowest member, with width by size
            if j > 0 and va[j] == va[j - 1] and vb[j] == vb[j - 1]:
                continue
            size = 1
            while j + size <= n and va[j + size] == va[j] and vb[j + size] == vb[j]:
                size += 1
            w = 1.5 + 1.5 * (size - 1)
            out.append(
                f'<line class="segment" data-glued="{size}" x1="{sx(float(qa)):.2f}" '
                f'y1="{sy(float(va[j])):.2f}" x2="{sx(float(qb)):.2f}" y2="{sy(float(vb[j])):.2f}" '
                f'stroke-width="{w:.1f}"/>'
            )
        out.append("</g>")
    for k, label, q in marks:
        x = sx(float(q))
        out.append(
            f'<circle class="breakpoint" data-period="{k}" data-label={quoteattr(label)} '
            f'data-q={quoteattr(str(q))} cx="{x:.2f}" cy="{sy(0):.2f}" r="2.5" fill="black"/>'
        )
        if label:
            out.append(
                f'<text class="q-label" x="{x:.2f}" y="{sy(0) + 14:.2f}" font-size="10" '
                f'text-anchor="middle">{escape(_LABEL_TEXT.get(label, label))}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
