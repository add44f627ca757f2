"""File formats and run manifests.

All pipeline files are UTF-8 JSON Lines with a schema-tag header line; see
docs/FORMATS.md. Writes are atomic (temp file + rename).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import asdict
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from .boxes import BoundingBox, RawDetection
from .generate import BenchmarkEntry
from .scene import SceneError, StructuredScene, scene_from_record, scene_to_record
from .scoring import ScoreReport
from .stats import ReportRow

BENCH_SCHEMA = "scenebench/bench/1"
DETECTION_SCHEMA = "scenebench/detections/1"
SCORE_SCHEMA = "scenebench/score/1"
ENFORCE_SCHEMA = "scenebench/enforce/1"

VERSION = "0.1.0"


class FormatError(ValueError):
    """Malformed pipeline file; message carries file/line context."""


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "), sort_keys=False)


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_lines(path, expect_schema: str) -> List[Tuple[int, dict]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append((lineno, json.loads(line)))
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON ({exc})") from None
    if not rows or rows[0][1].get("schema") != expect_schema:
        raise FormatError(f"{path}:1: expected header with schema {expect_schema!r}")
    return rows[1:]


# --- benchmark files ---------------------------------------------------------


def benchmark_lines(entries: Iterable[BenchmarkEntry]) -> str:
    lines = [_dump({"schema": BENCH_SCHEMA})]
    for e in entries:
        record = {"id": e.id, "seed": e.seed, **scene_to_record(e.scene), "prompt": e.prompt}
        lines.append(_dump(record))
    return "\n".join(lines) + "\n"


def write_benchmark(path, entries: Iterable[BenchmarkEntry]) -> None:
    atomic_write_text(path, benchmark_lines(entries))


def read_benchmark(path) -> List[BenchmarkEntry]:
    entries = []
    for lineno, record in _read_lines(path, BENCH_SCHEMA):
        try:
            scene = scene_from_record(record)
            entries.append(
                BenchmarkEntry(int(record["id"]), int(record["seed"]), scene, record["prompt"])
            )
        except (SceneError, KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
    return entries


# --- detection record files --------------------------------------------------


def write_detections(path, image_id: int, detections: Iterable[RawDetection]) -> None:
    lines = [_dump({"schema": DETECTION_SCHEMA, "image_id": image_id})]
    for d in detections:
        lines.append(
            _dump(
                {
                    "category": d.category,
                    "confidence": d.confidence,
                    "box": [d.box.cx, d.box.cy, d.box.w, d.box.h],
                    "color_scores": dict(d.color_scores),
                }
            )
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_detections(path) -> Tuple[int, List[RawDetection]]:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
    try:
        header = json.loads(first)
    except json.JSONDecodeError:
        raise FormatError(f"{path}:1: invalid JSON header") from None
    if header.get("schema") != DETECTION_SCHEMA or "image_id" not in header:
        raise FormatError(f"{path}:1: expected schema {DETECTION_SCHEMA!r} with image_id")
    detections = []
    for lineno, record in _read_lines(path, DETECTION_SCHEMA):
        try:
            cx, cy, w, h = record["box"]
            detections.append(
                RawDetection(
                    category=record["category"],
                    confidence=float(record["confidence"]),
                    box=BoundingBox(float(cx), float(cy), float(w), float(h)),
                    color_scores={k: float(v) for k, v in record["color_scores"].items()},
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
    return int(header["image_id"]), detections


# --- score report files ------------------------------------------------------


def report_row_record(entry: BenchmarkEntry, report: ScoreReport, missing: bool = False) -> dict:
    scene = entry.scene
    return {
        "id": entry.id,
        "bias": report.bias,
        "acc": report.acc,
        "align_score": report.align_score,
        "normalizer": report.normalizer,
        "matching": [
            {"instance": list(inst.ref), "target": target}
            for inst, target in zip(scene.instances, report.matching)
        ],
        "counts": {cat: list(pair) for cat, pair in report.counts.items()},
        "color_verdicts": [asdict(v) | {"instance": list(v.instance)} for v in report.color_verdicts],
        "relation_verdicts": [
            asdict(v) | {"subject": list(v.subject), "object": list(v.object),
                         "detected": list(v.detected) if v.detected is not None else None}
            for v in report.relation_verdicts
        ],
        "scene": {
            "total_instances": scene.total,
            "category_count": len(scene.categories),
            "relation_count": len(scene.relations),
            "max_same_category": max(scene.category_counts.values()),
        },
        "missing_detections": missing,
    }


def aggregate_record(rows: List[dict]) -> dict:
    n = len(rows)
    mean_acc = sum(r["acc"] for r in rows) / n
    mean_bias = sum(r["bias"] for r in rows) / n
    mean_inv_bias = sum(1.0 / (r["bias"] + 1.0) for r in rows) / n
    return {
        "aggregate": True,
        "count": n,
        "mean_acc": mean_acc,
        "mean_bias": mean_bias,
        # Dataset-level combination (default headline): Eq-3 on the column means.
        "align_score": 0.5 * (mean_acc + 1.0 / (mean_bias + 1.0)),
        # Per-prompt mean of the combined score, exposed alongside.
        "mean_align_score_per_prompt": 0.5 * (mean_acc + mean_inv_bias),
    }


def write_score_report(path, rows: List[dict]) -> dict:
    aggregate = aggregate_record(rows)
    lines = [_dump({"schema": SCORE_SCHEMA})]
    lines.extend(_dump(r) for r in rows)
    lines.append(_dump(aggregate))
    atomic_write_text(path, "\n".join(lines) + "\n")
    return aggregate


def read_score_report(path) -> Tuple[List[dict], Optional[dict]]:
    rows, aggregate = [], None
    for lineno, record in _read_lines(path, SCORE_SCHEMA):
        if record.get("aggregate"):
            aggregate = record
        else:
            rows.append(record)
    return rows, aggregate


def report_rows_for_stats(rows: List[dict]) -> List[ReportRow]:
    out = []
    for r in rows:
        scene = r["scene"]
        out.append(
            ReportRow(
                id=r["id"],
                acc=r["acc"],
                bias=r["bias"],
                align_score=r["align_score"],
                total_instances=scene["total_instances"],
                category_count=scene["category_count"],
                relation_count=scene["relation_count"],
                max_same_category=scene["max_same_category"],
                relation_verdicts=tuple((v["kind"], v["ok"]) for v in r["relation_verdicts"]),
            )
        )
    return out


# --- enforce-pair files ------------------------------------------------------


def write_enforce_pairs(path, rows: List[dict], notice: Optional[str] = None) -> None:
    header = {"schema": ENFORCE_SCHEMA}
    if notice:
        header["notice"] = notice
    lines = [_dump(header)]
    lines.extend(_dump(r) for r in rows)
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_enforce_pairs(path) -> List[dict]:
    return [record for _, record in _read_lines(path, ENFORCE_SCHEMA)]


# --- run manifests -----------------------------------------------------------


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(output_path, command: str, flags: Dict, inputs: List[str]) -> None:
    manifest = {
        "command": command,
        "flags": {k: v for k, v in sorted(flags.items())},
        "version": VERSION,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "output": str(output_path),
        "output_sha256": sha256_file(output_path),
    }
    atomic_write_text(str(output_path) + ".manifest.json", json.dumps(manifest, indent=2) + "\n")
