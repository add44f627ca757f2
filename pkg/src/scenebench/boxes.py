"""Detection post-processing: filters, color classification, relation geometry.

Raw detector output is filtered in three steps (confidence threshold,
same-category IoU dedup scanning from high to low confidence, tiny-box
removal), then each survivor's color is the argmax of its palette score
vector. Spatial relations are derived from box centers with the offset rule:
centers must differ by more than c * (combined extent) along an axis before a
relation is declared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Tuple

import numpy as np

from . import _kernels
from .vocab import PALETTE, PALETTE_SET


class DetectionError(ValueError):
    pass


@dataclass(frozen=True)
class BoundingBox:
    """Center/size box in pixels; y grows downward (image convention)."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise DetectionError(f"box sides must be positive: w={self.w}, h={self.h}")

    def as_array(self) -> np.ndarray:
        return np.array([self.cx, self.cy, self.w, self.h], dtype=np.float64)


@dataclass(frozen=True)
class RawDetection:
    category: str
    confidence: float
    box: BoundingBox
    color_scores: Mapping[str, float]

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise DetectionError(f"confidence outside [0, 1]: {self.confidence}")
        if set(self.color_scores) != PALETTE_SET:
            raise DetectionError(
                f"color_scores must cover the 7-color palette exactly, got {sorted(self.color_scores)}"
            )


@dataclass(frozen=True)
class DetectedInstance:
    category: str
    box: BoundingBox
    color: str
    confidence: float


@dataclass(frozen=True)
class DetectionSet:
    instances: Tuple[DetectedInstance, ...]

    def __init__(self, instances):
        object.__setattr__(self, "instances", tuple(instances))

    @property
    def total(self) -> int:
        return len(self.instances)

    @property
    def category_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for inst in self.instances:
            counts[inst.category] = counts.get(inst.category, 0) + 1
        return counts

    def boxes_array(self) -> np.ndarray:
        if not self.instances:
            return np.zeros((0, 4), dtype=np.float64)
        return np.stack([inst.box.as_array() for inst in self.instances])


@dataclass(frozen=True)
class PostProcessConfig:
    confidence_threshold: float = 0.3
    dedup_iou: float = 0.9
    min_side: float = 5.0
    offset_coefficient: float = 0.1  # fraction of combined extent before a relation holds

    def __post_init__(self):
        if not 0.0 <= self.confidence_threshold <= 1.0:
            raise DetectionError("confidence threshold outside [0, 1]")
        if not 0.0 <= self.dedup_iou <= 1.0:
            raise DetectionError("dedup IoU threshold outside [0, 1]")
        if self.min_side < 0 or self.offset_coefficient < 0:
            raise DetectionError("min side and offset coefficient must be >= 0")


def iou(a: BoundingBox, b: BoundingBox) -> float:
    boxes = np.stack([a.as_array(), b.as_array()])
    return float(_kernels.iou_matrix(boxes)[0, 1])


def classify_color(scores: Mapping[str, float]) -> str:
    """Argmax over the palette; ties break by fixed palette order."""
    missing = PALETTE_SET - set(scores)
    if missing:
        raise DetectionError(f"missing color scores: {sorted(missing)}")
    return max(PALETTE, key=lambda c: (scores[c], -PALETTE.index(c)))


def post_process(raw: List[RawDetection], cfg: PostProcessConfig = PostProcessConfig()) -> DetectionSet:
    """Confidence filter, same-category IoU dedup (descending confidence), size filter."""
    survivors = [d for d in raw if d.confidence >= cfg.confidence_threshold]
    # Stable sort keeps input order among equal confidences.
    survivors.sort(key=lambda d: -d.confidence)
    if survivors:
        boxes = np.stack([d.box.as_array() for d in survivors])
        ious = _kernels.iou_matrix(boxes)
        kept_idx: List[int] = []
        for i, det in enumerate(survivors):
            if any(
                ious[i, j] > cfg.dedup_iou and survivors[j].category == det.category
                for j in kept_idx
            ):
                continue
            kept_idx.append(i)
        survivors = [survivors[i] for i in kept_idx]
    survivors = [d for d in survivors if min(d.box.w, d.box.h) >= cfg.min_side]
    return DetectionSet(
        DetectedInstance(d.category, d.box, classify_color(d.color_scores), d.confidence)
        for d in survivors
    )


RelationMap = Dict[Tuple[int, int], FrozenSet[str]]


def extract_relations(dets: DetectionSet, cfg: PostProcessConfig = PostProcessConfig()) -> RelationMap:
    """Map ordered index pair (i, j) to the detected position of j relative to i.

    A pair may carry at most one horizontal and one vertical kind. Pairs with
    no offset along either axis are omitted.
    """
    n = dets.total
    if n < 2:
        return {}
    horiz, vert = _kernels.offset_signs(dets.boxes_array(), cfg.offset_coefficient)
    out: RelationMap = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            kinds = []
            if horiz[i, j] == _kernels.HORIZ_RIGHT:
                kinds.append("right")
            elif horiz[i, j] == _kernels.HORIZ_LEFT:
                kinds.append("left")
            if vert[i, j] == _kernels.VERT_BELOW:
                kinds.append("below")
            elif vert[i, j] == _kernels.VERT_ABOVE:
                kinds.append("above")
            if kinds:
                out[(i, j)] = frozenset(kinds)
    return out


def subject_kinds(relations: RelationMap, subject: int, obj: int) -> FrozenSet[str]:
    """Detected kinds K such that 'subject is K of obj'."""
    return relations.get((obj, subject), frozenset())
