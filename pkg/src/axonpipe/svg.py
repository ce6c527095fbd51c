"""Deterministic SVG 1.1 output: mm user units, fixed 3-decimal formatting,
viewBox fitted to content plus a 10 mm margin."""

from __future__ import annotations

from .render import Drawable, Primitive, RenderSettings, DEFAULT_STROKES, _bounds

MARGIN = 10.0

STYLE_COLOR = {
    "pipe": "#000000",
    "block": "#000000",
    "dimension": "#000000",
    "leader": "#000000",
    "grid": "#555555",
    "glyph": "#000000",
    "construction": "#888888",
}

STYLE_DASH = {
    "grid": "4 1 0.5 1",
    "construction": "2 1",
}


def _fmt(v: float) -> str:
    text = f"{v:.3f}"
    return "0.000" if text == "-0.000" else text


def _pts(points, flip_y: bool) -> str:
    sign = -1.0 if flip_y else 1.0
    return " ".join(f"{_fmt(x)},{_fmt(sign * y)}" for x, y in points)


def _style(prim: Primitive, strokes: dict[str, float]) -> str:
    width = strokes.get(prim.cls, 0.25)
    color = STYLE_COLOR.get(prim.cls, "#000000")
    fill = color if prim.filled else "none"
    parts = [f'stroke="{color}"', f'stroke-width="{_fmt(width)}"', f'fill="{fill}"']
    dash = STYLE_DASH.get(prim.cls)
    if dash:
        parts.append(f'stroke-dasharray="{dash}"')
    return " ".join(parts)


def emit_svg(drawable: Drawable, settings: RenderSettings | None = None) -> bytes:
    """Byte-deterministic SVG for a drawable (identical input, identical
    bytes). Model +y is drawing-up, so y coordinates are negated for SVG."""
    strokes = settings.strokes if settings is not None else dict(DEFAULT_STROKES)
    bounds = _bounds(drawable)
    if bounds is None:
        bounds = (0.0, 0.0, 0.0, 0.0)
    min_x, min_y, max_x, max_y = bounds
    vb_x = min_x - MARGIN
    vb_y = -(max_y + MARGIN)
    vb_w = (max_x - min_x) + 2 * MARGIN
    vb_h = (max_y - min_y) + 2 * MARGIN

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(vb_w)}mm" height="{_fmt(vb_h)}mm" '
        f'viewBox="{_fmt(vb_x)} {_fmt(vb_y)} {_fmt(vb_w)} {_fmt(vb_h)}">',
    ]
    for prim in drawable.primitives:
        style = _style(prim, strokes)
        if prim.kind == "line":
            (x1, y1), (x2, y2) = prim.points[0], prim.points[-1]
            lines.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(-y1)}" '
                f'x2="{_fmt(x2)}" y2="{_fmt(-y2)}" {style}/>')
        elif prim.kind == "arrow":
            (x1, y1), (x2, y2) = prim.points[0], prim.points[-1]
            head = _arrow_head(prim.points[0], prim.points[-1])
            lines.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(-y1)}" '
                f'x2="{_fmt(x2)}" y2="{_fmt(-y2)}" {style}/>')
            if head:
                lines.append(f'<polyline points="{_pts(head, True)}" {style}/>')
        elif prim.kind == "polyline":
            tag = "polygon" if prim.closed else "polyline"
            lines.append(f'<{tag} points="{_pts(prim.points, True)}" {style}/>')
        elif prim.kind == "text":
            x, y = prim.points[0]
            color = STYLE_COLOR.get(prim.cls, "#000000")
            lines.append(
                f'<text x="{_fmt(x)}" y="{_fmt(-y)}" font-size="{_fmt(prim.height)}" '
                f'font-family="sans-serif" fill="{color}">{_escape(prim.text)}</text>')
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _arrow_head(start, end) -> list:
    from .geometry import v2_add, v2_norm, v2_scale, v2_sub, v2_unit

    vec = v2_sub(start, end)
    if v2_norm(vec) < 1e-9:
        return []
    back = v2_unit(vec)
    side = (-back[1], back[0])
    tip = end
    return [
        v2_add(tip, v2_add(v2_scale(back, 2.0), v2_scale(side, 0.7))),
        tip,
        v2_add(tip, v2_sub(v2_scale(back, 2.0), v2_scale(side, 0.7))),
    ]


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))
