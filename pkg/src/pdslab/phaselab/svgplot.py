"""Deterministic SVG rendering of the phase diagram with empirical overlay.

Hand-rolled on purpose: no plotting library embeds versions, ids, or
timestamps here, so identical sweeps produce byte-identical files.  The
background shows the three analytic regimes (simple green above the
computational line, hard red between it and the diagonal, impossible gray
below both); empirical Type-I+II sums are alpha-blended squares on top,
dark where detection fails.
"""

from __future__ import annotations

from ..reduction import beta_sharp, beta_star

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 170, 30, 50
_ALPHA_MAX = 2.0

_GREEN = "#7fca7f"
_RED = "#e06666"
_GRAY = "#b3b3b3"


def _x(alpha: float) -> float:
    return _ML + (alpha / _ALPHA_MAX) * (_W - _ML - _MR)


def _y(beta: float) -> float:
    return _H - _MB - beta * (_H - _MT - _MB)


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _poly(points, fill: str) -> str:
    coords = " ".join(f"{_fmt(_x(a))},{_fmt(_y(b))}" for a, b in points)
    return f'<polygon points="{coords}" fill="{fill}" stroke="none"/>'


def render_sweep_svg(rows, alpha_grid, beta_grid) -> str:
    """Render sweep rows (dicts with alpha, beta, type1, type2) to SVG text."""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="#ffffff"/>',
        "<!-- analytic regimes -->",
        _poly([(0, 0), (2, 0), (2, 1), (2 / 3, 2 / 3)], _GRAY),
        _poly([(0, 0), (2 / 3, 2 / 3), (0, 0.5)], _RED),
        _poly([(0, 0.5), (2, 1), (0, 1)], _GREEN),
    ]

    # empirical overlay: one translucent cell per grid point
    cell_w = (_W - _ML - _MR) / max(len(alpha_grid), 1) * (
        (max(alpha_grid) - min(alpha_grid)) / _ALPHA_MAX if len(alpha_grid) > 1 else 0.08
    )
    cell_w = max(cell_w, 14.0)
    cell_h = max((_H - _MT - _MB) / max(len(beta_grid), 1) * 0.12, 14.0)
    parts.append("<!-- empirical type1+type2 overlay -->")
    for row in rows:
        err = min(max(row["type1"] + row["type2"], 0.0), 1.0)
        shade = int(round(255 * (1.0 - err)))
        cx, cy = _x(row["alpha"]), _y(row["beta"])
        parts.append(
            f'<rect x="{_fmt(cx - cell_w / 2)}" y="{_fmt(cy - cell_h / 2)}" '
            f'width="{_fmt(cell_w)}" height="{_fmt(cell_h)}" '
            f'fill="rgb({shade},{shade},{shade})" fill-opacity="0.8" '
            f'stroke="#333333" stroke-width="0.5"/>'
        )

    # boundary curves on a dense alpha mesh
    mesh = [i * _ALPHA_MAX / 400 for i in range(401)]
    star = " ".join(f"{_fmt(_x(a))},{_fmt(_y(beta_star(a)))}" for a in mesh)
    sharp = " ".join(f"{_fmt(_x(a))},{_fmt(_y(beta_sharp(a)))}" for a in mesh)
    parts.append(f'<polyline points="{star}" fill="none" stroke="#000000" stroke-width="2"/>')
    parts.append(
        f'<polyline points="{sharp}" fill="none" stroke="#1f4e99" '
        f'stroke-width="2" stroke-dasharray="6,4"/>'
    )

    # axes and labels
    parts.append(
        f'<line x1="{_fmt(_x(0))}" y1="{_fmt(_y(0))}" x2="{_fmt(_x(2))}" y2="{_fmt(_y(0))}" '
        f'stroke="#000000" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_fmt(_x(0))}" y1="{_fmt(_y(0))}" x2="{_fmt(_x(0))}" y2="{_fmt(_y(1))}" '
        f'stroke="#000000" stroke-width="1"/>'
    )
    for a in (0.0, 2 / 3, 1.0, 2.0):
        parts.append(
            f'<text x="{_fmt(_x(a))}" y="{_fmt(_y(0) + 18)}" font-size="11" '
            f'text-anchor="middle" font-family="monospace">{a:.3g}</text>'
        )
    for b in (0.0, 0.5, 1.0):
        parts.append(
            f'<text x="{_fmt(_x(0) - 8)}" y="{_fmt(_y(b) + 4)}" font-size="11" '
            f'text-anchor="end" font-family="monospace">{b:.2g}</text>'
        )
    parts.append(
        f'<text x="{_fmt(_x(1.0))}" y="{_fmt(_H - 8)}" font-size="12" text-anchor="middle" '
        f'font-family="monospace">alpha (sparsity: q = N^-alpha)</text>'
    )
    parts.append(
        f'<text x="16" y="{_fmt(_y(0.5))}" font-size="12" text-anchor="middle" '
        f'font-family="monospace" transform="rotate(-90 16 {_fmt(_y(0.5))})">'
        f"beta (size: K = N^beta)</text>"
    )

    legend_x = _W - _MR + 12
    legend = [
        (_GREEN, "simple"),
        (_RED, "hard"),
        (_GRAY, "impossible"),
    ]
    for i, (color, label) in enumerate(legend):
        ly = _MT + 12 + 20 * i
        parts.append(f'<rect x="{legend_x}" y="{ly}" width="14" height="14" fill="{color}"/>')
        parts.append(
            f'<text x="{legend_x + 20}" y="{ly + 11}" font-size="11" '
            f'font-family="monospace">{label}</text>'
        )
    ly = _MT + 12 + 20 * len(legend)
    parts.append(
        f'<text x="{legend_x}" y="{ly + 11}" font-size="11" font-family="monospace">'
        f"solid: detection limit</text>"
    )
    parts.append(
        f'<text x="{legend_x}" y="{ly + 27}" font-size="11" font-family="monospace">'
        f"dashed: poly-time limit</text>"
    )
    parts.append(
        f'<text x="{legend_x}" y="{ly + 47}" font-size="11" font-family="monospace">'
        f"cells: dark = errors</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
