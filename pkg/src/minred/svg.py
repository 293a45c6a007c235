"""SVG dump of a search tree in the Poincare disk model."""

from __future__ import annotations

import math

R_PX = 240
PAD = 20


def to_disk(z: complex) -> complex:
    """Cayley map from the upper half-plane to the unit disk, j -> 0."""
    return (z - 1j) / (z + 1j)


def _xy(w: complex) -> tuple[float, float]:
    return PAD + R_PX * (1 + w.real), PAD + R_PX * (1 - w.imag)


def _dot(z: complex, color: str, r: float = 2.5) -> str:
    x, y = _xy(to_disk(z))
    return f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{color}"/>'


def render_tree(stats, title: str = "") -> str:
    """Expanded nodes red, pruned gray, z(F) blue, the minimizer green.

    `stats` must come from a search run with record=True.
    """
    side = 2 * (R_PX + PAD)
    c = stats.final_bound
    rad = math.tanh(math.acosh(max(c, 1.0)) / 2)
    cx = cy = PAD + R_PX
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" '
        f'viewBox="0 0 {side} {side}">',
        f'<circle cx="{cx}" cy="{cy}" r="{R_PX}" fill="none" stroke="black"/>',
        f'<circle cx="{cx}" cy="{cy}" r="{R_PX * rad:.2f}" fill="#f4f4ff" stroke="#88a" '
        'stroke-dasharray="4 3"/>',
    ]
    if title:
        out.append(f'<text x="{PAD}" y="{PAD - 6}" font-size="12">{title}</text>')
    for node in stats.expanded:
        if node.parent is not None:
            x1, y1 = _xy(to_disk(complex(node.parent.point)))
            x2, y2 = _xy(to_disk(complex(node.point)))
            out.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                       'stroke="#c66" stroke-width="0.7"/>')
    out += [_dot(complex(n.point), "#999", 1.5) for n in stats.pruned]
    out += [_dot(complex(n.point), "#d22") for n in stats.expanded]
    if stats.z_reduced is not None:
        out.append(_dot(complex(stats.z_reduced), "#22d", 4))
    if stats.best_node is not None:
        out.append(_dot(complex(stats.best_node.point), "#2a2", 4))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_tree(stats, path, title: str = ""):
    with open(path, "w") as fh:
        fh.write(render_tree(stats, title))
