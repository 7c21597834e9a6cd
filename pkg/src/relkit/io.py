"""Wire formats: line-delimited scene files and tabular error-sample files.

Scene files hold one JSON record per line; floats are normalized to 9
significant digits on write, so write(parse(f)) is stable byte-for-byte after
one normalization pass. Sample files are CSV with the exact header
``condition,run_index,scene_token,min_ade_m``.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path

from .core import Category, EgoCapabilities, ObjectState, Scene, Vec2
from .harness import ErrorSample

SAMPLE_COLUMNS = ("condition", "run_index", "scene_token", "min_ade_m")


def _f9(value: float) -> float:
    return float(f"{value:.9g}")


def _object_to_array(obj: ObjectState) -> list:
    return [obj.id, obj.category.value, _f9(obj.position.x), _f9(obj.position.y),
            _f9(obj.heading), _f9(obj.velocity.x), _f9(obj.velocity.y),
            _f9(obj.half_extent_long), _f9(obj.half_extent_lat)]


def _object_from_array(record: list) -> ObjectState:
    if len(record) != 9:
        raise ValueError(f"object record needs 9 fields, got {len(record)}")
    obj_id, category, x, y, heading, vx, vy, se_long, se_lat = record
    return ObjectState(id=str(obj_id), category=Category(category),
                       position=Vec2(float(x), float(y)), heading=float(heading),
                       velocity=Vec2(float(vx), float(vy)),
                       half_extent_long=float(se_long), half_extent_lat=float(se_lat))


def scene_to_record(scene: Scene) -> dict:
    record = {
        "token": scene.token,
        "ego": _object_to_array(scene.ego),
        "capabilities": None,
        "objects": [_object_to_array(o) for o in scene.objects],
        "target": scene.target_agent,
        "future": [[_f9(w.x), _f9(w.y)] for w in scene.ground_truth_future],
    }
    if scene.capabilities is not None:
        caps = scene.capabilities
        record["capabilities"] = {
            "reaction_time": _f9(caps.reaction_time),
            "guaranteed_brake": _f9(caps.guaranteed_brake),
            "guaranteed_lateral_brake": _f9(caps.guaranteed_lateral_brake),
            "guaranteed_accel": _f9(caps.guaranteed_accel),
        }
    return record


def scene_from_record(record: dict) -> Scene:
    caps = None
    if record.get("capabilities") is not None:
        caps = EgoCapabilities(**{k: float(v) for k, v in record["capabilities"].items()})
    return Scene(
        token=str(record["token"]),
        ego=_object_from_array(record["ego"]),
        objects=tuple(_object_from_array(o) for o in record["objects"]),
        target_agent=str(record["target"]),
        ground_truth_future=tuple(Vec2(float(x), float(y)) for x, y in record["future"]),
        capabilities=caps,
    )


def write_scenes(scenes, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for scene in scenes:
            json.dump(scene_to_record(scene), handle, separators=(",", ":"))
            handle.write("\n")


def read_scenes(path: str | Path) -> list[Scene]:
    scenes = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                scenes.append(scene_from_record(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad scene record: {exc}") from exc
    if not scenes:
        raise ValueError(f"{path}: no scenes found")
    return scenes


def _write_sample_rows(handle, samples) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(SAMPLE_COLUMNS)
    for s in samples:
        writer.writerow([s.condition, s.run_index, s.scene_token, f"{s.min_ade:.9g}"])


def write_samples(samples, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        _write_sample_rows(handle, samples)


def samples_to_text(samples) -> str:
    buffer = _io.StringIO()
    _write_sample_rows(buffer, samples)
    return buffer.getvalue()


def read_samples(path: str | Path) -> list[ErrorSample]:
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty sample file") from None
        if tuple(header) != SAMPLE_COLUMNS:
            raise ValueError(f"{path}: header must be {','.join(SAMPLE_COLUMNS)!r}, "
                             f"got {','.join(header)!r}")
        samples = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            try:
                samples.append(ErrorSample(condition=row[0], run_index=int(row[1]),
                                           scene_token=row[2], min_ade=float(row[3])))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad sample row: {exc}") from exc
    if not samples:
        raise ValueError(f"{path}: no samples found")
    return samples
