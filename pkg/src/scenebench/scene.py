"""Structured scene types, validation, and canonical record conversion.

A scene lists object instances (category, 1-based ordinal within the category,
optional color) and directed spatial relations between them. Instances are
addressed by (category, ordinal); serialized records use 0-based per-category
ids, matching the benchmark file convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .graph import axis_is_acyclic
from .vocab import PALETTE_SET, RELATION_KINDS, CompatibilityTable

InstanceRef = Tuple[str, int]  # (category, ordinal >= 1)

DEFAULT_MAX_INSTANCES = 5
DEFAULT_MAX_RELATIONS = 6


class SceneError(ValueError):
    """Raised when a scene record is structurally malformed."""


@dataclass(frozen=True)
class InstanceSpec:
    category: str
    ordinal: int  # 1-based within its category
    color: Optional[str] = None

    def __post_init__(self):
        if self.ordinal < 1:
            raise SceneError(f"ordinal must be >= 1, got {self.ordinal}")

    @property
    def ref(self) -> InstanceRef:
        return (self.category, self.ordinal)


@dataclass(frozen=True)
class RelationSpec:
    """Directed relation: the subject is <kind> of the object."""

    subject: InstanceRef
    object: InstanceRef
    kind: str

    def __post_init__(self):
        if self.kind not in RELATION_KINDS:
            raise SceneError(f"unknown relation kind: {self.kind!r}")
        if self.subject == self.object:
            raise SceneError(f"relation subject equals object: {self.subject}")

    @property
    def pair(self) -> frozenset:
        return frozenset((self.subject, self.object))


@dataclass(frozen=True)
class StructuredScene:
    instances: Tuple[InstanceSpec, ...]
    relations: Tuple[RelationSpec, ...] = ()

    def __init__(self, instances, relations=()):
        object.__setattr__(self, "instances", tuple(instances))
        object.__setattr__(self, "relations", tuple(relations))

    @property
    def total(self) -> int:
        return len(self.instances)

    @property
    def categories(self) -> Tuple[str, ...]:
        """Categories in first-appearance order."""
        seen: Dict[str, None] = {}
        for inst in self.instances:
            seen.setdefault(inst.category, None)
        return tuple(seen)

    @property
    def category_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for inst in self.instances:
            counts[inst.category] = counts.get(inst.category, 0) + 1
        return counts

    def index_of(self, ref: InstanceRef) -> int:
        for i, inst in enumerate(self.instances):
            if inst.ref == ref:
                return i
        raise SceneError(f"unresolved instance reference: {ref}")

    def specified_color_count(self) -> int:
        return sum(1 for inst in self.instances if inst.color is not None)


def validate_scene(
    scene: StructuredScene,
    table: CompatibilityTable,
    max_instances: int = DEFAULT_MAX_INSTANCES,
    max_relations: int = DEFAULT_MAX_RELATIONS,
) -> List[str]:
    """Check all scene invariants; returns a list of violations (empty = ok)."""
    violations: List[str] = []
    refs = set()
    per_cat: Dict[str, List[int]] = {}
    for inst in scene.instances:
        if inst.category not in table:
            violations.append(f"unknown category {inst.category!r}")
        elif inst.color is not None and inst.color not in table.permitted(inst.category):
            violations.append(f"color not permitted: {inst.color!r} for {inst.category!r}")
        if inst.color is not None and inst.color not in PALETTE_SET:
            violations.append(f"color outside palette: {inst.color!r}")
        if inst.ref in refs:
            violations.append(f"duplicate instance {inst.ref}")
        refs.add(inst.ref)
        per_cat.setdefault(inst.category, []).append(inst.ordinal)

    for cat, ordinals in per_cat.items():
        expected = list(range(1, len(ordinals) + 1))
        if sorted(ordinals) != expected:
            violations.append(f"ordinals for {cat!r} are not 1..{len(ordinals)}: {sorted(ordinals)}")

    n = scene.total
    if not 1 <= n <= max_instances:
        violations.append(f"instance count {n} outside [1, {max_instances}]")
    if len(scene.relations) > max_relations:
        violations.append(f"relation count {len(scene.relations)} exceeds {max_relations}")

    pairs = set()
    for rel in scene.relations:
        for ref in (rel.subject, rel.object):
            if ref not in refs:
                violations.append(f"relation references missing instance {ref}")
        if rel.pair in pairs:
            violations.append(f"multiple relations for pair {sorted(rel.pair)}")
        pairs.add(rel.pair)

    resolvable = [r for r in scene.relations if r.subject in refs and r.object in refs]
    if not axis_is_acyclic(scene.instances, resolvable, "horizontal"):
        violations.append("horizontal cycle (left/right relations form a ring)")
    if not axis_is_acyclic(scene.instances, resolvable, "vertical"):
        violations.append("vertical cycle (above/below relations form a ring)")
    return violations


def scene_to_record(scene: StructuredScene) -> dict:
    """Canonical nested record: per-category instance lists with 0-based ids."""
    cats: Dict[str, List[dict]] = {}
    for inst in scene.instances:
        rels = [
            {"kind": rel.kind, "category": rel.object[0], "id": rel.object[1] - 1}
            for rel in scene.relations
            if rel.subject == inst.ref
        ]
        entry = {"id": inst.ordinal - 1, "color": inst.color, "relations": rels}
        cats.setdefault(inst.category, []).append(entry)
    for items in cats.values():
        items.sort(key=lambda d: d["id"])
    return {
        "total_number": scene.total,
        "categories": [{"category": c, "instances": items} for c, items in cats.items()],
    }


def scene_from_record(record: dict) -> StructuredScene:
    """Inverse of scene_to_record. Raises SceneError naming the offending field."""
    try:
        cat_blocks = record["categories"]
    except (KeyError, TypeError):
        raise SceneError("record missing 'categories'") from None
    instances: List[InstanceSpec] = []
    relations: List[RelationSpec] = []
    for block in cat_blocks:
        try:
            cat = block["category"]
            items = block["instances"]
        except (KeyError, TypeError):
            raise SceneError(f"malformed category block: {block!r}") from None
        for item in items:
            try:
                ordinal = int(item["id"]) + 1
            except (KeyError, TypeError, ValueError):
                raise SceneError(f"malformed instance in {cat!r}: {item!r}") from None
            instances.append(InstanceSpec(cat, ordinal, item.get("color")))
            for rel in item.get("relations", ()):
                try:
                    relations.append(
                        RelationSpec(
                            subject=(cat, ordinal),
                            object=(rel["category"], int(rel["id"]) + 1),
                            kind=rel["kind"],
                        )
                    )
                except (KeyError, TypeError, ValueError):
                    raise SceneError(f"malformed relation on {(cat, ordinal)}: {rel!r}") from None
    scene = StructuredScene(instances, relations)
    if "total_number" in record and record["total_number"] != scene.total:
        raise SceneError(
            f"total_number {record['total_number']} does not match {scene.total} instances"
        )
    return scene
