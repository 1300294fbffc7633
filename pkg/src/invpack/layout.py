"""Develop a packed surface into the plane (or Poincaré disk) as an SVG net.

Faces are unfolded along a breadth-first spanning tree of the dual graph.
Each placed face keeps its own copy of the vertex positions, so seam edges
appear twice with equal length.  Euclidean nets are exact; hyperbolic nets
place vertices exactly in the unit-disk model and draw vertex circles as
their Euclidean images, but render edges as straight chords rather than
geodesic arcs (a documented approximation of this renderer, not of the
underlying positions).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import Geometry, angles, lengths_of_triangle
from .mesh import WeightedTriangulation, edge_key, face_weights

__all__ = ["PlacedFace", "Net", "develop_net", "net_to_svg", "layout_svg"]

_SCALE = 100.0           # SVG user units per model unit
_EDGE_WIDTH = 1.0
_CIRCLE_WIDTH = 0.5


@dataclass
class PlacedFace:
    face_index: int
    face: tuple[int, int, int]
    points: list[complex]     # points[m] is the position of vertex face[m]


@dataclass
class Net:
    geometry: Geometry
    placed: list[PlacedFace]
    circles: list[tuple[complex, float, int]]   # (center, euclidean radius, vertex)


def _euclid_third(p: complex, q: complex, dp: float, dq: float,
                  opposite_to: complex | None) -> complex:
    d = abs(q - p)
    ex = (q - p) / d
    x = (d * d + dp * dp - dq * dq) / (2.0 * d)
    h2 = dp * dp - x * x
    if h2 < 0.0:
        if h2 < -1e-9 * dp * dp:
            raise DomainError("triangle cannot be laid out: circle intersection failed")
        h2 = 0.0
    h = math.sqrt(h2)
    base = p + x * ex
    normal = 1j * ex
    if opposite_to is None:
        return base + h * normal
    side = ((opposite_to - p) / ex).imag
    return base - h * normal if side > 0 else base + h * normal


def _mob_to_origin(center: complex, z: complex) -> complex:
    return (z - center) / (1.0 - center.conjugate() * z)


def _mob_from_origin(center: complex, z: complex) -> complex:
    return (z + center) / (1.0 + center.conjugate() * z)


def _hyp_third(p: complex, q: complex, dp: float, angle_p: float,
               opposite_to: complex | None) -> complex:
    qq = _mob_to_origin(p, q)
    theta = cmath.phase(qq)
    rho = math.tanh(dp / 2.0)
    if opposite_to is None:
        side = 1.0
    else:
        ss = _mob_to_origin(p, opposite_to)
        side = -1.0 if (ss * cmath.exp(-1j * theta)).imag > 0 else 1.0
    tt = rho * cmath.exp(1j * (theta + side * angle_p))
    return _mob_from_origin(p, tt)


def _hyp_circle(center: complex, radius: float) -> tuple[complex, float]:
    """Euclidean image of a hyperbolic circle in the Poincaré disk."""
    t = math.tanh(radius / 2.0)
    denom = 1.0 - t * t * abs(center) ** 2
    return center * (1.0 - t * t) / denom, t * (1.0 - abs(center) ** 2) / denom


def develop_net(geometry: Geometry, wt: WeightedTriangulation, radii,
                root_face: int = 0) -> Net:
    """Unfold the faces along a dual BFS tree from ``root_face``."""
    radii = np.asarray(radii, dtype=float)
    faces = wt.faces
    if not (0 <= root_face < len(faces)):
        raise DomainError(f"root face {root_face} out of range 0..{len(faces) - 1}")

    face_lengths: list[np.ndarray] = []
    face_angles: list[np.ndarray] = []
    for fi, f in enumerate(faces):
        l = lengths_of_triangle(geometry, radii[list(f)], face_weights(wt, f))
        s = l.sum()
        if not all(s - 2.0 * l[m] > 0.0 for m in range(3)):
            raise DomainError(f"face {fi} {f} is inadmissible at the given radii")
        face_lengths.append(l)
        face_angles.append(angles(geometry, l))

    def length_between(fi: int, a: int, b: int) -> float:
        f = faces[fi]
        for m in range(3):
            if f[m] not in (a, b):
                return float(face_lengths[fi][m])
        raise DomainError(f"face {fi} does not contain edge ({a}, {b})")

    edge_faces: dict[tuple[int, int], list[int]] = {}
    for fi, f in enumerate(faces):
        for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
            edge_faces.setdefault(edge_key(a, b), []).append(fi)

    placed: list[PlacedFace | None] = [None] * len(faces)

    def place_root() -> PlacedFace:
        i, j, k = faces[root_face]
        l = face_lengths[root_face]
        if geometry is Geometry.EUCLIDEAN:
            pi = 0.0 + 0.0j
            pj = complex(l[2], 0.0)
            pk = _euclid_third(pi, pj, float(l[1]), float(l[0]), None)
        else:
            pi = 0.0 + 0.0j
            pj = complex(math.tanh(l[2] / 2.0), 0.0)
            pk = cmath.rect(math.tanh(l[1] / 2.0), float(face_angles[root_face][0]))
        return PlacedFace(root_face, (i, j, k), [pi, pj, pk])

    placed[root_face] = place_root()
    queue = [root_face]
    while queue:
        cur = queue.pop(0)
        cur_face = placed[cur]
        f = faces[cur]
        pos = {f[m]: cur_face.points[m] for m in range(3)}
        for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
            for nb in edge_faces[edge_key(a, b)]:
                if nb == cur or placed[nb] is not None:
                    continue
                g = faces[nb]
                t = next(v for v in g if v not in (a, b))
                third_of_cur = next(v for v in f if v not in (a, b))
                p, q, s = pos[a], pos[b], pos[third_of_cur]
                if geometry is Geometry.EUCLIDEAN:
                    pt = _euclid_third(p, q, length_between(nb, a, t),
                                       length_between(nb, b, t), s)
                else:
                    m_a = g.index(a)
                    pt = _hyp_third(p, q, length_between(nb, a, t),
                                    float(face_angles[nb][m_a]), s)
                coords = {a: p, b: q, t: pt}
                placed[nb] = PlacedFace(nb, tuple(g), [coords[v] for v in g])
                queue.append(nb)
    if any(pf is None for pf in placed):
        missing = [fi for fi, pf in enumerate(placed) if pf is None]
        raise DomainError(f"dual graph is disconnected; faces {missing} unreachable")

    circles: list[tuple[complex, float, int]] = []
    seen: set[tuple[int, int, int]] = set()
    for pf in placed:
        for m, v in enumerate(pf.face):
            z = pf.points[m]
            key = (round(z.real * 1e9), round(z.imag * 1e9), v)
            if key in seen:
                continue
            seen.add(key)
            if geometry is Geometry.EUCLIDEAN:
                circles.append((z, float(radii[v]), v))
            else:
                ce, re = _hyp_circle(z, float(radii[v]))
                circles.append((ce, re, v))
    return Net(geometry, [pf for pf in placed], circles)


def _fmt(x: float) -> str:
    return format(x, ".10g")


def net_to_svg(net: Net) -> str:
    """Render a net at 100 user units per model unit (y axis flipped up)."""
    xs: list[float] = []
    ys: list[float] = []
    for pf in net.placed:
        for z in pf.points:
            xs.append(z.real * _SCALE)
            ys.append(-z.imag * _SCALE)
    for c, r, _ in net.circles:
        xs.extend([(c.real - r) * _SCALE, (c.real + r) * _SCALE])
        ys.extend([(-c.imag - r) * _SCALE, (-c.imag + r) * _SCALE])
    if net.geometry is Geometry.HYPERBOLIC:
        xs.extend([-_SCALE, _SCALE])
        ys.extend([-_SCALE, _SCALE])
    margin = 10.0
    x0, x1 = min(xs) - margin, max(xs) + margin
    y0, y1 = min(ys) - margin, max(ys) + margin
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(x1 - x0)} {_fmt(y1 - y0)}">',
    ]
    if net.geometry is Geometry.HYPERBOLIC:
        lines.append(f'  <circle cx="0" cy="0" r="{_fmt(_SCALE)}" fill="none" '
                     f'stroke="#999999" stroke-width="0.5" stroke-dasharray="4 4"/>')
    for pf in net.placed:
        pts = " ".join(f"{_fmt(z.real * _SCALE)},{_fmt(-z.imag * _SCALE)}"
                       for z in pf.points)
        lines.append(f'  <polygon points="{pts}" fill="none" stroke="#000000" '
                     f'stroke-width="{_EDGE_WIDTH}" data-face="{pf.face_index}"/>')
    for c, r, v in net.circles:
        lines.append(f'  <circle cx="{_fmt(c.real * _SCALE)}" cy="{_fmt(-c.imag * _SCALE)}" '
                     f'r="{_fmt(r * _SCALE)}" fill="none" stroke="#4682b4" '
                     f'stroke-width="{_CIRCLE_WIDTH}" data-vertex="{v}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def layout_svg(geometry: Geometry, wt: WeightedTriangulation, radii,
               root_face: int = 0) -> str:
    return net_to_svg(develop_net(geometry, wt, radii, root_face))
