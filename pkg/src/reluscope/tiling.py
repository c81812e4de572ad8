"""Tiling exports for two-input networks: a JSON document and an SVG picture.

The document lists every full-dimensional region with its polygon, affine
piece, atom counts and (when applicable) per-region Lipschitz bound, and is
only produced when the polygon areas add back up to the box area, so a
rendering can never silently drop part of the partition.

The SVG uses world coordinates directly in the viewBox with the sign of y
flipped (a point (x, y) is written as (x, -y)) so the picture keeps the
usual mathematical orientation; consumers can invert the transform exactly.
Region fills encode the first hidden layer's bit block in the fill opacity;
first-layer hyperplanes are drawn solid across the whole box, deeper-layer
hyperplanes dashed and clipped to the region they refine.
"""

from __future__ import annotations

import numpy as np

from .affine import affine_piece, atomic_decomposition
from .bounds import lipschitz_config_bound
from .errors import GeometryError
from .geometry import box_corners, clip_line_to_polygon, polygon_area
from .netio import config_to_string
from .network import NetworkSpec
from .regions import RegionTree, Verdict, polygon_of_region_2d

AREA_RTOL = 1e-9

_FILL = "#e8731a"
_STROKE = "#1f1f1f"


def _fmt(value: float) -> str:
    value = float(value)
    if value == 0.0:
        value = 0.0  # avoid "-0" in coordinates
    return "%.9g" % value


def build_tiling_document(net: NetworkSpec, tree: RegionTree) -> dict:
    """JSON-ready description of the 2-d partition carried by ``tree``.

    Raises GeometryError for networks without exactly two inputs, and
    ArithmeticError when the region areas fail to add up to the box area
    (which would mean the clipping lost part of the partition).
    """
    if net.input_dim != 2:
        raise GeometryError(f"tiling needs a 2-input network, got {net.input_dim} inputs")
    regions = []
    area_sum = 0.0
    for leaf in tree.leaves():
        if leaf.verdict is not Verdict.FEASIBLE_INTERIOR:
            continue
        ring = polygon_of_region_2d(leaf.system)
        area = polygon_area(ring)
        area_sum += area
        piece = affine_piece(net, leaf.config)
        deco = atomic_decomposition(net, leaf.config)
        if net.depth > 3:
            bound = lipschitz_config_bound(net, leaf.config).value
        else:
            bound = None
        regions.append(
            {
                "configuration": config_to_string(leaf.config),
                "polygon": ring.tolist(),
                "area": area,
                "linear": piece.linear.tolist(),
                "bias": piece.bias.tolist(),
                "atom_count": deco.atom_count,
                "nonzero_atom_count": deco.nonzero_atom_count,
                "lipschitz_bound": bound,
            }
        )
    box = tree.box
    box_area = float(np.prod(box.hi - box.lo))
    if abs(area_sum - box_area) > AREA_RTOL * box_area:
        raise ArithmeticError(
            f"tiling areas sum to {area_sum!r} but the box has area {box_area!r}; "
            "the partition was not recovered exactly"
        )
    return {
        "box": {"lo": box.lo.tolist(), "hi": box.hi.tolist()},
        "box_area": box_area,
        "region_area_sum": area_sum,
        "regions": regions,
    }


def _polygon_element(region: dict, denom: int) -> str:
    first_block = region["configuration"].split("|")[0]
    level = int(first_block, 2)
    opacity = 0.10 + 0.75 * (level / denom)
    points = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in region["polygon"])
    return (
        f'<polygon points="{points}" fill="{_FILL}" '
        f'fill-opacity="{opacity:.4f}" stroke="none"/>'
    )


def render_tiling_svg(net: NetworkSpec, tree: RegionTree, document: dict | None = None) -> str:
    """Deterministic SVG rendering of the tiling (same input, same bytes)."""
    if document is None:
        document = build_tiling_document(net, tree)
    lo, hi = tree.box.lo, tree.box.hi
    w, h = float(hi[0] - lo[0]), float(hi[1] - lo[1])
    span = max(w, h)
    height_px = int(round(640.0 * h / w))

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(lo[0])} {_fmt(-hi[1])} {_fmt(w)} {_fmt(h)}" '
        f'width="640" height="{height_px}">'
    ]

    denom = max((1 << net.hidden_widths[0]) - 1, 1)
    for region in document["regions"]:
        parts.append(_polygon_element(region, denom))

    solid: list[str] = []
    dashed: list[str] = []
    solid_width = _fmt(0.010 * span)
    dashed_width = _fmt(0.006 * span)
    dash_pattern = f"{_fmt(0.030 * span)} {_fmt(0.020 * span)}"
    for depth in range(net.depth - 1):
        for node in tree.nodes_at_depth(depth):
            if node.next_layer_form is None:
                continue
            if depth == 0:
                ring = box_corners(lo, hi)
            else:
                if node.verdict is not Verdict.FEASIBLE_INTERIOR:
                    continue
                try:
                    ring = polygon_of_region_2d(node.system)
                except GeometryError:
                    continue
            a, c = node.next_layer_form
            for i in range(a.shape[0]):
                if not np.any(a[i]):
                    continue
                seg = clip_line_to_polygon(a[i], float(c[i]), ring)
                if seg is None:
                    continue
                (x1, y1), (x2, y2) = seg
                attrs = (
                    f'x1="{_fmt(x1)}" y1="{_fmt(-y1)}" x2="{_fmt(x2)}" y2="{_fmt(-y2)}" '
                    f'stroke="{_STROKE}"'
                )
                if depth == 0:
                    solid.append(f'<line {attrs} stroke-width="{solid_width}"/>')
                else:
                    dashed.append(
                        f'<line {attrs} stroke-width="{dashed_width}" '
                        f'stroke-dasharray="{dash_pattern}"/>'
                    )

    parts.extend(dashed)
    parts.extend(solid)
    parts.append(
        f'<rect x="{_fmt(lo[0])}" y="{_fmt(-hi[1])}" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'fill="none" stroke="{_STROKE}" stroke-width="{solid_width}"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
