"""Text formats: XYZ point clouds, OBJ line wireframes, JSON predictions/reports."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

import numpy as np

from .errors import ParseError
from .geometry import PointCloud, Wireframe
from .losses import DEFAULT_LOGIT_MARGIN, PredictionSet

PathLike = Union[str, Path]


def parse_xyz(text: str) -> PointCloud:
    """Rows of ``x y z`` or ``x y z r g b reflectance``; ``#`` starts a comment line."""
    rows = []
    arity = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) not in (3, 7):
            raise ParseError(f"expected 3 or 7 fields, got {len(fields)}", lineno)
        if arity is None:
            arity = len(fields)
        elif len(fields) != arity:
            raise ParseError(f"mixed row lengths ({arity} and {len(fields)})", lineno)
        try:
            values = [float(f) for f in fields]
        except ValueError as exc:
            raise ParseError(f"non-numeric field: {exc}", lineno) from None
        if not all(np.isfinite(values)):
            raise ParseError("non-finite value", lineno)
        rows.append(values)
    if not rows:
        return PointCloud(np.zeros((0, 3)))
    data = np.array(rows)
    return PointCloud(data[:, :3], data[:, 3:] if arity == 7 else None)


def write_xyz(cloud: PointCloud) -> str:
    data = cloud.points if cloud.attrs is None else np.hstack([cloud.points, cloud.attrs])
    return "".join(" ".join(f"{x:.6f}" for x in row) + "\n" for row in data)


def _obj_index(token: str, n_vertices: int, lineno: int) -> int:
    head = token.split("/")[0]
    try:
        idx = int(head)
    except ValueError:
        raise ParseError(f"bad vertex index {token!r}", lineno) from None
    if not 1 <= idx <= n_vertices:
        raise ParseError(f"vertex index {idx} out of range (have {n_vertices})", lineno)
    return idx - 1


def parse_obj_wireframe(text: str) -> Wireframe:
    """Read ``v x y z`` vertices and ``l i j ...`` polylines (1-based indices).

    A polyline with more than two indices contributes each consecutive pair.
    Repeated edges are kept once; every other directive is ignored.
    """
    vertices = []
    edges = []
    seen = set()
    pending = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields or fields[0].startswith("#"):
            continue
        if fields[0] == "v":
            if len(fields) < 4:
                raise ParseError("vertex needs 3 coordinates", lineno)
            try:
                vertices.append([float(x) for x in fields[1:4]])
            except ValueError:
                raise ParseError("non-numeric vertex coordinate", lineno) from None
        elif fields[0] == "l":
            if len(fields) < 3:
                raise ParseError("line element needs at least 2 indices", lineno)
            pending.append((lineno, fields[1:]))
    for lineno, tokens in pending:
        idx = [_obj_index(t, len(vertices), lineno) for t in tokens]
        for i, j in zip(idx[:-1], idx[1:]):
            if i == j:
                raise ParseError(f"self-loop on vertex {i + 1}", lineno)
            key = (min(i, j), max(i, j))
            if key not in seen:
                seen.add(key)
                edges.append((i, j))
    return Wireframe(np.array(vertices).reshape(-1, 3), edges)


def write_obj_wireframe(wf: Wireframe) -> str:
    lines = [f"v {x:.6f} {y:.6f} {z:.6f}" for x, y, z in wf.vertices]
    lines += [f"l {i + 1} {j + 1}" for i, j in sorted(wf.edge_keys())]
    return "".join(line + "\n" for line in lines)


def predictions_to_dict(preds: PredictionSet) -> dict:
    edges = []
    for k in range(len(preds)):
        edges.append(
            {
                "comp": preds.comps[k].tolist(),
                "confidence": float(preds.confidences[k]),
                "midpoint": preds.midpoints[k].tolist(),
                "quadrant": int(preds.quadrants[k]),
                "quadrant_logits": preds.quadrant_logits[k].tolist(),
            }
        )
    return {"edges": edges}


def predictions_from_dict(data: dict) -> PredictionSet:
    try:
        edges = data["edges"]
        if not edges:
            return PredictionSet(np.zeros((0, 3)), np.zeros((0, 3)), [], np.zeros((0, 4)))
        logits = []
        for e in edges:
            if "quadrant_logits" in e:
                logits.append(e["quadrant_logits"])
            else:
                row = [0.0] * 4
                row[int(e["quadrant"])] = DEFAULT_LOGIT_MARGIN
                logits.append(row)
        return PredictionSet(
            [e["midpoint"] for e in edges],
            [e["comp"] for e in edges],
            [e["confidence"] for e in edges],
            logits,
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"malformed prediction file: {exc}") from None


def dumps_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def read_text(path: PathLike) -> str:
    return Path(path).read_text(encoding="utf-8")


def write_text(path: PathLike, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
