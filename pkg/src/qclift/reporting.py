"""Deterministic writers: JSON reports, CSV samples, OBJ meshes.

Identical configuration and seed must produce byte-identical files, so
floats are written with shortest-roundtrip repr and no timestamps or
environment data are embedded.
"""

from __future__ import annotations

import json
import math

from .extension import extend, fiber_point, reflect
from .geometry import is_infinite
from .lift import lift_point
from .maps import GridSpec, MapSpec


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_obj(path, vertices, faces, name="surface") -> None:
    """ASCII OBJ, vertices in row-major polar order, 1-based face indices."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"o {name}\n")
        for v in vertices:
            fh.write(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}\n")
        for f in faces:
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")


def polar_parameter_points(grid: GridSpec):
    """Center followed by rings, row-major (radius-major, angle-minor)."""
    pts = [0j]
    for r in grid.radii():
        for t in grid.angles():
            pts.append(complex(r * math.cos(t), r * math.sin(t)))
    return pts


def polar_faces(n_radii: int, n_angles: int):
    """Fan around the center plus split quads between consecutive rings."""
    faces = []
    for j in range(n_angles):
        faces.append((0, 1 + j, 1 + (j + 1) % n_angles))
    for i in range(n_radii - 1):
        ring = 1 + i * n_angles
        nxt = ring + n_angles
        for j in range(n_angles):
            jn = (j + 1) % n_angles
            faces.append((ring + j, nxt + j, nxt + jn))
            faces.append((ring + j, nxt + jn, ring + jn))
    return faces


SURFACE_KINDS = ("sigma", "sigma-star", "shell", "sphere-image")


def surface_vertex(spec: MapSpec, kind: str, z: complex, t: float):
    if kind == "sigma":
        return lift_point(spec, z)
    if kind == "sigma-star":
        return reflect(spec, z)
    if kind == "shell":
        return fiber_point(z, t)
    if kind == "sphere-image":
        return extend(spec, fiber_point(z, t))
    raise ValueError(f"unknown surface kind {kind!r}")


def build_surface_mesh(spec: MapSpec, kind: str, grid: GridSpec, t: float = 0.0):
    """(vertices, faces, dropped) for the requested surface over the grid.

    Vertices that land at infinity are dropped together with their incident
    faces; remaining faces are reindexed.
    """
    params = polar_parameter_points(grid)
    raw = []
    for z in params:
        v = surface_vertex(spec, kind, z, t)
        raw.append(None if is_infinite(v) else v.as_tuple())
    faces = polar_faces(grid.n_radii, grid.n_angles)
    index = {}
    vertices = []
    for i, v in enumerate(raw):
        if v is not None:
            index[i] = len(vertices)
            vertices.append(v)
    kept_faces = []
    for f in faces:
        if all(i in index for i in f):
            kept_faces.append(tuple(index[i] for i in f))
    dropped = len(raw) - len(vertices)
    return vertices, kept_faces, dropped
