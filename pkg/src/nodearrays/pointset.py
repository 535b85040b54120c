"""JSON point-set files.

Layout::

    {"schema_version": 1, "d": 2, "n": 4, "provenance": "padua",
     "points": [[[re, im], [re, im]], ...]}

Each point is a list of d coordinates, each coordinate an [re, im] pair,
also for real sets. Output is deterministic: sorted keys and shortest
round-trip float repr.
"""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from .basis import as_points
from .meshes import Mesh
from .vandermonde import PROVENANCES, NodeArrayStage

SCHEMA_VERSION = 1


class PointSetFormatError(ValueError):
    """Malformed point-set document."""


def _encode_points(points: np.ndarray) -> list:
    return [[[float(c.real) + 0.0, float(c.imag) + 0.0] for c in row] for row in points]


def pointset_document(points, n: int, provenance: str, extra: Optional[dict] = None) -> dict:
    pts = as_points(points)
    doc = {"schema_version": SCHEMA_VERSION, "d": int(pts.shape[1]), "n": int(n),
           "provenance": provenance, "points": _encode_points(pts)}
    if extra:
        doc.update(extra)
    return doc


def stage_document(stage: NodeArrayStage) -> dict:
    return pointset_document(stage.points, stage.degree, stage.provenance)


def mesh_document(mesh: Mesh) -> dict:
    return pointset_document(mesh.points, mesh.degree_n, "mesh",
                             {"compact_id": mesh.compact_id,
                              "norming_constant": mesh.norming_constant})


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PointSetFormatError(f"not valid JSON: {exc}") from exc
    for key in ("schema_version", "d", "n", "provenance", "points"):
        if key not in doc:
            raise PointSetFormatError(f"missing key {key!r}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise PointSetFormatError(f"unsupported schema_version {doc['schema_version']!r}")
    return doc


def decode_points(doc: dict) -> np.ndarray:
    d = doc["d"]
    try:
        arr = np.array(doc["points"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise PointSetFormatError("points must be [[[re, im], ...], ...]") from exc
    if arr.ndim != 3 or arr.shape[1:] != (d, 2):
        raise PointSetFormatError(f"points array has shape {arr.shape}, expected (P, {d}, 2)")
    return arr[..., 0] + 1j * arr[..., 1]


def stage_from_document(doc: dict, validate: bool = True) -> NodeArrayStage:
    prov = doc["provenance"] if doc["provenance"] in PROVENANCES else "custom"
    return NodeArrayStage(decode_points(doc), doc["n"], provenance=prov,
                          meta={"source": "file"}, validate=validate)


def save(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))


def load(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
