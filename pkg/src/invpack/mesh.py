"""Closed triangulated weighted surfaces and global assembly.

Faces are ordered vertex triples indexing ``0..vertex_count-1``; edges are
unordered pairs stored canonically as ``(min, max)``.  Face orientation is
not required to be globally consistent: all computations here use only
unoriented metric data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DomainError, PathError, RangeError
from .geometry import (
    Geometry,
    angle_jacobian,
    angles,
    lengths_of_triangle,
    r_from_u,
    triangle_energy,
)

__all__ = [
    "Triangulation",
    "WeightedTriangulation",
    "MeshProblem",
    "ValidationReport",
    "edge_key",
    "validate",
    "weight_problems",
    "face_weights",
    "cone_angles",
    "first_inadmissible_face",
    "is_configuration_admissible",
    "global_hessian",
    "total_energy",
]


def edge_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass
class Triangulation:
    """A triangulated surface given by vertex count and face list."""

    vertex_count: int
    faces: list[tuple[int, int, int]]

    def __post_init__(self):
        self.faces = [tuple(int(v) for v in f) for f in self.faces]

    @property
    def edges(self) -> list[tuple[int, int]]:
        seen = set()
        for f in self.faces:
            for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                seen.add(edge_key(a, b))
        return sorted(seen)

    def edge_face_degrees(self) -> dict[tuple[int, int], int]:
        deg: dict[tuple[int, int], int] = {}
        for f in self.faces:
            for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                k = edge_key(a, b)
                deg[k] = deg.get(k, 0) + 1
        return deg

    @property
    def euler_characteristic(self) -> int:
        return self.vertex_count - len(self.edges) + len(self.faces)


@dataclass
class MeshProblem:
    kind: str       # "face" | "edge" | "vertex" | "surface" | "weight"
    simplex: tuple
    message: str

    def __str__(self):
        return f"[{self.kind} {self.simplex}] {self.message}"


@dataclass
class ValidationReport:
    problems: list[MeshProblem] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __str__(self):
        if self.ok:
            return "valid closed surface"
        return "\n".join(str(p) for p in self.problems)


def validate(t: Triangulation) -> ValidationReport:
    """Check every closed-surface invariant, reporting all violations."""
    problems: list[MeshProblem] = []
    structural_ok = True
    for fi, f in enumerate(t.faces):
        if len(set(f)) != 3:
            problems.append(MeshProblem("face", (fi,) + tuple(f),
                                        "face has repeated vertices"))
            structural_ok = False
        if any(v < 0 or v >= t.vertex_count for v in f):
            problems.append(MeshProblem("face", (fi,) + tuple(f),
                                        "vertex index out of range"))
            structural_ok = False
    if not structural_ok:
        return ValidationReport(problems)

    for e, deg in sorted(t.edge_face_degrees().items()):
        if deg != 2:
            problems.append(MeshProblem("edge", e,
                                        f"edge belongs to {deg} faces, expected 2"))

    incident: list[list[tuple[int, int, int]]] = [[] for _ in range(t.vertex_count)]
    for f in t.faces:
        for v in f:
            incident[v].append(f)
    for v in range(t.vertex_count):
        faces_v = incident[v]
        if len(faces_v) < 3:
            problems.append(MeshProblem("vertex", (v,),
                                        f"vertex appears in {len(faces_v)} faces, expected >= 3"))
            continue
        # link graph: each incident face contributes its edge opposite v
        adjacency: dict[int, list[int]] = {}
        for f in faces_v:
            a, b = (x for x in f if x != v)
            adjacency.setdefault(a, []).append(b)
            adjacency.setdefault(b, []).append(a)
        if any(len(nbrs) != 2 for nbrs in adjacency.values()):
            problems.append(MeshProblem("vertex", (v,),
                                        "vertex link is not a union of cycles"))
            continue
        start = next(iter(adjacency))
        visited = {start}
        prev, cur = None, start
        while True:
            nxt = [n for n in adjacency[cur] if n != prev]
            step = nxt[0] if nxt else adjacency[cur][0]
            if step in visited:
                break
            visited.add(step)
            prev, cur = cur, step
        if len(visited) != len(adjacency):
            problems.append(MeshProblem("vertex", (v,),
                                        "vertex link is not a single cycle"))

    chi = t.euler_characteristic
    if chi % 2 != 0 or chi > 2:
        problems.append(MeshProblem("surface", (chi,),
                                    f"Euler characteristic {chi} is not an even integer <= 2"))
    return ValidationReport(problems)


@dataclass
class WeightedTriangulation:
    """Triangulation plus one non-negative inversive distance per edge."""

    triangulation: Triangulation
    weights: dict[tuple[int, int], float]

    def __post_init__(self):
        self.weights = {edge_key(*k): float(v) for k, v in self.weights.items()}

    def weight(self, a: int, b: int) -> float:
        return self.weights[edge_key(a, b)]

    @property
    def vertex_count(self) -> int:
        return self.triangulation.vertex_count

    @property
    def faces(self) -> list[tuple[int, int, int]]:
        return self.triangulation.faces


def weight_problems(wt: WeightedTriangulation) -> list[MeshProblem]:
    """Weight-coverage violations: missing, extra, or negative weights."""
    problems = []
    edge_set = set(wt.triangulation.edges)
    for e in sorted(edge_set - set(wt.weights)):
        problems.append(MeshProblem("weight", e, "edge has no weight"))
    for e in sorted(set(wt.weights) - edge_set):
        problems.append(MeshProblem("weight", e, "weight on a non-edge"))
    for e in sorted(edge_set & set(wt.weights)):
        v = wt.weights[e]
        if not (v >= 0.0) or not np.isfinite(v):
            problems.append(MeshProblem("weight", e, f"weight {v!r} must be finite and >= 0"))
    return problems


def face_weights(wt: WeightedTriangulation, face: tuple[int, int, int]) -> np.ndarray:
    """Per-face weight triple in opposite-vertex order."""
    i, j, k = face
    return np.array([wt.weight(j, k), wt.weight(k, i), wt.weight(i, j)])


def _face_radii(geometry: Geometry, u: np.ndarray, face) -> np.ndarray:
    return np.asarray(r_from_u(geometry, u[list(face)]))


def first_inadmissible_face(geometry: Geometry, wt: WeightedTriangulation,
                            u: np.ndarray) -> int | None:
    """Index of the first face (in face-list order) violating admissibility.

    Faces whose radii overflow the numeric range count as inadmissible, so
    wildly infeasible trial configurations are rejected rather than raising.
    """
    u = np.asarray(u, dtype=float)
    if geometry is Geometry.HYPERBOLIC and np.any(u >= 0.0):
        # coordinate domain violated before any face is reached
        bad = int(np.argmax(u >= 0.0))
        for fi, f in enumerate(wt.faces):
            if bad in f:
                return fi
        return 0
    for fi, f in enumerate(wt.faces):
        try:
            r = _face_radii(geometry, u, f)
            l = lengths_of_triangle(geometry, r, face_weights(wt, f))
        except (DomainError, RangeError):
            return fi
        s = l[0] + l[1] + l[2]
        if not all(s - 2.0 * l[i] > 0.0 for i in range(3)):
            return fi
    return None


def is_configuration_admissible(geometry: Geometry, wt: WeightedTriangulation,
                                u: np.ndarray) -> bool:
    return first_inadmissible_face(geometry, wt, u) is None


def cone_angles(geometry: Geometry, wt: WeightedTriangulation, u) -> np.ndarray:
    """Cone angle at each vertex: the sum of incident inner angles."""
    u = np.asarray(u, dtype=float)
    if u.shape != (wt.vertex_count,):
        raise DomainError(f"expected {wt.vertex_count} log-radii, got shape {u.shape}")
    a = np.zeros(wt.vertex_count)
    for fi, f in enumerate(wt.faces):
        r = _face_radii(geometry, u, f)
        w = face_weights(wt, f)
        l = lengths_of_triangle(geometry, r, w)
        s = l[0] + l[1] + l[2]
        if not all(s - 2.0 * l[i] > 0.0 for i in range(3)):
            raise DomainError(f"face {fi} {f} is inadmissible at the given radii")
        al = angles(geometry, l)
        a[f[0]] += al[0]
        a[f[1]] += al[1]
        a[f[2]] += al[2]
    return a


def global_hessian(geometry: Geometry, wt: WeightedTriangulation, u) -> sp.csr_matrix:
    """Hessian of the total energy: per-face angle Jacobians scattered to
    global indices. Symmetric; Euclidean kernel contains (1,...,1)."""
    u = np.asarray(u, dtype=float)
    n = wt.vertex_count
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for fi, f in enumerate(wt.faces):
        r = _face_radii(geometry, u, f)
        w = face_weights(wt, f)
        try:
            J = angle_jacobian(geometry, r, w)
        except DomainError as exc:
            raise DomainError(f"face {fi} {f}: {exc}") from None
        for p in range(3):
            for q in range(3):
                rows.append(f[p])
                cols.append(f[q])
                vals.append(J[p, q])
    H = sp.coo_matrix((vals, (rows, cols)), shape=(n, n))
    return H.tocsr()


def total_energy(geometry: Geometry, wt: WeightedTriangulation, u, base) -> float:
    """Sum of per-triangle energies; its gradient is the cone-angle vector."""
    u = np.asarray(u, dtype=float)
    base = np.asarray(base, dtype=float)
    total = 0.0
    for fi, f in enumerate(wt.faces):
        idx = list(f)
        try:
            total += triangle_energy(geometry, u[idx], face_weights(wt, f), base[idx])
        except PathError as exc:
            raise PathError(f"face {fi} {f}: {exc}") from None
    return total
