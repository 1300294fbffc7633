"""Surface and result files.

A surface file is a JSON document:

.. code-block:: json

    {
      "geometry": "euclidean",
      "vertex_count": 4,
      "faces": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]],
      "weights": [[0, 1, 1.0], [0, 2, 1.0], ...],
      "radii": [1.0, 1.0, 1.0, 1.0],
      "target_angles": [3.14, ...],
      "face_lengths": [[2.0, 2.0, 2.0], ...]
    }

``radii``, ``target_angles``, and ``face_lengths`` are optional.  Weight
rows are ``[i, j, I]`` with ``i < j``.  Results are serialized with
17 significant digits, so parse/serialize round trips are lossless.
An import shim reads OFF meshes, defaulting every weight to 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import FormatError
from .geometry import Geometry
from .mesh import Triangulation, WeightedTriangulation, edge_key

__all__ = [
    "SurfaceData",
    "parse_surface",
    "load_surface",
    "surface_to_json",
    "surface_from_off",
    "dumps_canonical",
]


@dataclass
class SurfaceData:
    geometry: Geometry
    triangulation: Triangulation
    weights: dict[tuple[int, int], float]
    radii: list[float] | None = None
    target_angles: list[float] | None = None
    face_lengths: list[tuple[float, float, float]] | None = None

    def weighted(self) -> WeightedTriangulation:
        return WeightedTriangulation(self.triangulation, self.weights)


def _require(doc: dict, field: str, kind):
    if field not in doc:
        raise FormatError(f"missing field {field!r}")
    value = doc[field]
    if not isinstance(value, kind):
        raise FormatError(f"field {field!r} must be {kind.__name__}, "
                          f"got {type(value).__name__}")
    return value


def _float_list(doc: dict, field: str, expect_len: int) -> list[float] | None:
    if field not in doc or doc[field] is None:
        return None
    value = doc[field]
    if not isinstance(value, list) or len(value) != expect_len:
        raise FormatError(f"field {field!r} must be a list of {expect_len} numbers")
    out = []
    for i, x in enumerate(value):
        if not isinstance(x, (int, float)) or isinstance(x, bool):
            raise FormatError(f"field {field!r}[{i}] must be a number")
        out.append(float(x))
    return out


def parse_surface(text: str) -> SurfaceData:
    """Parse a surface document; raises FormatError with field context."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FormatError("top level must be a JSON object")
    geometry = Geometry.from_name(_require(doc, "geometry", str))
    nv = _require(doc, "vertex_count", int)
    if nv <= 0:
        raise FormatError(f"vertex_count must be positive, got {nv}")
    raw_faces = _require(doc, "faces", list)
    faces = []
    for fi, f in enumerate(raw_faces):
        if (not isinstance(f, list) or len(f) != 3
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in f)):
            raise FormatError(f"faces[{fi}] must be a triple of integers")
        if any(v < 0 or v >= nv for v in f):
            raise FormatError(f"faces[{fi}] = {f} has a vertex index out of range")
        faces.append(tuple(f))
    raw_weights = _require(doc, "weights", list)
    weights: dict[tuple[int, int], float] = {}
    for wi, row in enumerate(raw_weights):
        if not isinstance(row, list) or len(row) != 3:
            raise FormatError(f"weights[{wi}] must be [i, j, I]")
        i, j, value = row
        if not isinstance(i, int) or not isinstance(j, int) or isinstance(value, bool) \
                or not isinstance(value, (int, float)):
            raise FormatError(f"weights[{wi}] must be [int, int, number]")
        if not (0 <= i < j < nv):
            raise FormatError(f"weights[{wi}] edge ({i}, {j}) must satisfy 0 <= i < j < {nv}")
        if (i, j) in weights:
            raise FormatError(f"weights[{wi}] repeats edge ({i}, {j})")
        weights[(i, j)] = float(value)
    radii = _float_list(doc, "radii", nv)
    if radii is not None and any(x <= 0 for x in radii):
        raise FormatError("field 'radii' entries must be > 0")
    target = _float_list(doc, "target_angles", nv)
    face_lengths = None
    if doc.get("face_lengths") is not None:
        raw = doc["face_lengths"]
        if not isinstance(raw, list) or len(raw) != len(faces):
            raise FormatError(f"field 'face_lengths' must list {len(faces)} length triples")
        face_lengths = []
        for fi, row in enumerate(raw):
            if (not isinstance(row, list) or len(row) != 3
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                               for x in row)):
                raise FormatError(f"face_lengths[{fi}] must be a triple of numbers")
            if any(x <= 0 for x in row):
                raise FormatError(f"face_lengths[{fi}] entries must be > 0")
            face_lengths.append(tuple(float(x) for x in row))
    return SurfaceData(geometry, Triangulation(nv, faces), weights,
                       radii, target, face_lengths)


def load_surface(path: str, geometry_override: str | None = None) -> SurfaceData:
    """Load a surface file; ``.off`` files go through the OFF shim."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path!r}: {exc}") from None
    stripped = text.lstrip()
    if path.lower().endswith(".off") or stripped.startswith("OFF"):
        data = surface_from_off(text)
    else:
        data = parse_surface(text)
    if geometry_override:
        data.geometry = Geometry.from_name(geometry_override)
    return data


def surface_from_off(text: str) -> SurfaceData:
    """OFF import shim: triangulated OFF mesh, every weight defaulted to 1."""
    tokens: list[str] = []
    for line in text.splitlines():
        body = line.split("#", 1)[0].strip()
        if body:
            tokens.extend(body.split())
    if not tokens or tokens[0] != "OFF":
        raise FormatError("OFF file must start with the token 'OFF'")
    try:
        nv, nf = int(tokens[1]), int(tokens[2])
        pos = 4  # skip the edge count
        pos += 3 * nv  # skip coordinates
        faces = []
        for _ in range(nf):
            arity = int(tokens[pos])
            if arity != 3:
                raise FormatError(f"OFF face with {arity} vertices; only triangles supported")
            faces.append(tuple(int(x) for x in tokens[pos + 1:pos + 4]))
            pos += 1 + arity
    except (IndexError, ValueError) as exc:
        raise FormatError(f"malformed OFF file: {exc}") from None
    tri = Triangulation(nv, faces)
    weights = {e: 1.0 for e in tri.edges}
    return SurfaceData(Geometry.EUCLIDEAN, tri, weights)


def surface_to_json(data: SurfaceData) -> str:
    doc = {
        "geometry": data.geometry.value,
        "vertex_count": data.triangulation.vertex_count,
        "faces": [list(f) for f in data.triangulation.faces],
        "weights": [[i, j, data.weights[edge_key(i, j)]]
                    for i, j in sorted(data.weights)],
    }
    if data.radii is not None:
        doc["radii"] = list(data.radii)
    if data.target_angles is not None:
        doc["target_angles"] = list(data.target_angles)
    if data.face_lengths is not None:
        doc["face_lengths"] = [list(row) for row in data.face_lengths]
    return dumps_canonical(doc)


def _write_value(value, out: list[str], indent: int) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = list(value.items())
        for n, (key, sub) in enumerate(items):
            out.append(f'{pad}  {json.dumps(str(key))}: ')
            _write_value(sub, out, indent + 1)
            out.append(",\n" if n + 1 < len(items) else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        parts: list[str] = []
        for sub in value:
            chunk: list[str] = []
            _write_value(sub, chunk, indent + 1)
            parts.append("".join(chunk))
        body = ", ".join(parts)
        if len(body) <= 100 and "\n" not in body:
            out.append(f"[{body}]")
        else:
            out.append("[\n")
            for n, part in enumerate(parts):
                out.append(f"{pad}  {part}")
                out.append(",\n" if n + 1 < len(parts) else "\n")
            out.append(pad + "]")
    elif isinstance(value, bool) or value is None:
        out.append(json.dumps(value))
    elif isinstance(value, float):
        out.append(format(value, ".17g"))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_canonical(doc) -> str:
    """Deterministic JSON writer; floats carry 17 significant digits."""
    out: list[str] = []
    _write_value(doc, out, 0)
    out.append("\n")
    return "".join(out)
