"""Versioned JSON persistence of space-time drawings."""

from __future__ import annotations

import json
import math

import numpy as np

from ..model.cube import MonotonicityError, SpaceTimeDrawing, Trajectory

FORMAT = "stcube-drawing"
VERSION = 1


class SchemaError(ValueError):
    pass


def drawing_to_dict(drawing: SpaceTimeDrawing) -> dict:
    return {
        "format": FORMAT,
        "version": VERSION,
        "tau": float(drawing.tau),
        "delta": float(drawing.delta),
        "meta": drawing.meta,
        "nodes": [
            {"id": node, "runs": [run.tolist() for run in traj.runs]}
            for node, traj in drawing.trajectories.items()
        ],
    }


def dumps(drawing: SpaceTimeDrawing) -> str:
    return json.dumps(drawing_to_dict(drawing), sort_keys=True, separators=(",", ":")) + "\n"


def save_drawing(drawing: SpaceTimeDrawing, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(drawing))


def _require(data, key, kind):
    if key not in data:
        raise SchemaError(f"missing field {key!r}")
    val = data[key]
    if not isinstance(val, kind) or isinstance(val, bool):
        raise SchemaError(f"field {key!r} has type {type(val).__name__}")
    return val


def drawing_from_dict(data) -> SpaceTimeDrawing:
    if not isinstance(data, dict):
        raise SchemaError("drawing must be a JSON object")
    if data.get("format") != FORMAT:
        raise SchemaError(f"not a drawing file (format {data.get('format')!r})")
    version = _require(data, "version", int)
    if version != VERSION:
        raise SchemaError(f"unsupported drawing version {version}, expected {VERSION}")
    tau = float(_require(data, "tau", (int, float)))
    delta = float(_require(data, "delta", (int, float)))
    meta = data.get("meta", {})
    if not isinstance(meta, dict):
        raise SchemaError("field 'meta' must be an object")
    trajs = {}
    for k, item in enumerate(_require(data, "nodes", list)):
        if not isinstance(item, dict) or "id" not in item:
            raise SchemaError(f"nodes[{k}]: missing field 'id'")
        node = item["id"]
        if isinstance(node, list):
            node = tuple(node)
        runs = []
        for r, run in enumerate(_require(item, "runs", list)):
            arr = np.asarray(run, dtype=float)
            if arr.ndim != 2 or arr.shape[1] != 3 or len(arr) == 0:
                raise SchemaError(f"nodes[{k}].runs[{r}]: expected a non-empty list of [x, y, t]")
            if not np.all(np.isfinite(arr)):
                raise SchemaError(f"nodes[{k}].runs[{r}]: non-finite coordinate")
            runs.append(arr)
        if node in trajs:
            raise SchemaError(f"duplicate node id {node!r}")
        trajs[node] = Trajectory(node, runs)
    try:
        drawing = SpaceTimeDrawing(trajs, tau=tau, delta=delta, meta=meta)
        drawing.check()
    except MonotonicityError as exc:
        raise SchemaError(str(exc)) from None
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    return drawing


def loads(text: str) -> SpaceTimeDrawing:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return drawing_from_dict(data)


def load_drawing(path) -> SpaceTimeDrawing:
    with open(path) as fh:
        return loads(fh.read())


def save_timing(path, seconds: float) -> str:
    """Write runtime next to a drawing so the drawing itself stays reproducible."""
    side = f"{path}.timing.json"
    with open(side, "w") as fh:
        json.dump({"runtime_seconds": float(seconds)}, fh)
        fh.write("\n")
    return side


def load_timing(path) -> float:
    try:
        with open(f"{path}.timing.json") as fh:
            val = json.load(fh).get("runtime_seconds", 0.0)
    except (OSError, ValueError):
        return 0.0
    return float(val) if isinstance(val, (int, float)) and math.isfinite(val) else 0.0
