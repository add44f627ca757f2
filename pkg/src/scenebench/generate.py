"""Procedural benchmark generation: sample scenes, relations, and prompts.

Each benchmark entry owns an independent integer seed derived from the master
seed and the entry id, so entries are reproducible in isolation and the whole
benchmark is a pure function of (master seed, config).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .graph import axis_is_acyclic
from .scene import (
    DEFAULT_MAX_INSTANCES,
    DEFAULT_MAX_RELATIONS,
    InstanceSpec,
    RelationSpec,
    StructuredScene,
    validate_scene,
)
from .template import fill_template, word_count
from .vocab import RELATION_KINDS, CompatibilityTable, default_table

MAX_PROMPT_WORDS = 78
_RESAMPLE_ATTEMPTS = 16


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    relation_probability: float = 0.05  # per unordered pair, per kind
    max_instances: int = DEFAULT_MAX_INSTANCES
    max_relations: int = DEFAULT_MAX_RELATIONS
    max_categories: int = DEFAULT_MAX_INSTANCES
    table: CompatibilityTable = field(default_factory=default_table)

    def __post_init__(self):
        if not 0.0 <= self.relation_probability <= 0.25:
            raise ConfigError("relation probability must be in [0, 0.25] (four kinds share one draw)")
        if min(self.max_instances, self.max_relations, self.max_categories) < 1:
            raise ConfigError("maxima must be >= 1")
        if self.max_categories > len(self.table.categories):
            raise ConfigError("max categories exceeds vocabulary size")


@dataclass(frozen=True)
class BenchmarkEntry:
    id: int
    seed: int
    scene: StructuredScene
    prompt: str


@dataclass
class BenchmarkStats:
    total_instances: Dict[int, int]
    category_counts: Dict[int, int]
    relation_counts: Dict[int, int]
    max_same_category: Dict[int, int]

    @property
    def size(self) -> int:
        return sum(self.total_instances.values())


def entry_seed(master_seed: int, entry_id: int) -> int:
    return int(np.random.SeedSequence([master_seed, entry_id]).generate_state(1, np.uint64)[0])


def sample_scene(config: GeneratorConfig, rng: np.random.Generator) -> StructuredScene:
    """Sample categories, per-category instance counts, and colors (no relations)."""
    total = int(rng.integers(1, config.max_instances + 1))
    n_cats = int(rng.integers(1, min(total, config.max_categories) + 1))
    # Random composition of `total` into n_cats positive parts.
    counts = [1] * n_cats
    for _ in range(total - n_cats):
        counts[int(rng.integers(0, n_cats))] += 1
    cats = rng.choice(len(config.table.categories), size=n_cats, replace=False)
    instances: List[InstanceSpec] = []
    for cat_idx, count in zip(cats, counts):
        category = config.table.categories[int(cat_idx)]
        permitted = sorted(config.table.permitted(category))
        for ordinal in range(1, count + 1):
            color = permitted[int(rng.integers(0, len(permitted)))]
            instances.append(InstanceSpec(category, ordinal, color))
    return StructuredScene(instances)


def _sample_relations_once(
    scene: StructuredScene, p: float, rng: np.random.Generator
) -> List[RelationSpec]:
    relations = []
    insts = scene.instances
    for i in range(len(insts)):
        for j in range(i + 1, len(insts)):
            u = rng.random()
            if u < 4 * p:
                kind = RELATION_KINDS[int(u / p)]
                relations.append(RelationSpec(insts[i].ref, insts[j].ref, kind))
    return relations


def _axes_ok(scene: StructuredScene, relations) -> bool:
    return axis_is_acyclic(scene.instances, relations, "horizontal") and axis_is_acyclic(
        scene.instances, relations, "vertical"
    )


def check_acyclic(scene: StructuredScene, relations, axis: str) -> bool:
    """True iff the given axis's relation subgraph has no ring."""
    return axis_is_acyclic(scene.instances, relations, axis)


def generate_relations(
    scene: StructuredScene, config: GeneratorConfig, rng: np.random.Generator
) -> List[RelationSpec]:
    """Sample per-pair relations; resample on rings, then drop offenders.

    Each unordered pair gets each kind with probability p (none with 1-4p).
    If either axis forms a ring, relations are resampled up to 16 times; as a
    last resort the latest-sampled relations are dropped until acyclic.
    Excess relations beyond the cap are dropped uniformly at random.
    """
    relations: List[RelationSpec] = []
    for _ in range(_RESAMPLE_ATTEMPTS):
        relations = _sample_relations_once(scene, config.relation_probability, rng)
        if _axes_ok(scene, relations):
            break
    else:
        while relations and not _axes_ok(scene, relations):
            relations.pop()
    while len(relations) > config.max_relations:
        relations.pop(int(rng.integers(0, len(relations))))
    return relations


def build_entry(config: GeneratorConfig, entry_id: int, seed: int) -> BenchmarkEntry:
    rng = np.random.default_rng(seed)
    scene = sample_scene(config, rng)
    relations = generate_relations(scene, config, rng)
    scene = replace(scene, relations=tuple(relations))
    # Table 1 word bound; relations only add words, so trimming always terminates.
    while word_count(fill_template(scene)) > MAX_PROMPT_WORDS:
        scene = replace(scene, relations=scene.relations[:-1])
    return BenchmarkEntry(entry_id, seed, scene, fill_template(scene))


def build_benchmark(
    config: GeneratorConfig, count: int, master_seed: int = 0
) -> List[BenchmarkEntry]:
    if count < 1:
        raise ConfigError(f"count must be >= 1, got {count}")
    entries = []
    for entry_id in range(count):
        entry = build_entry(config, entry_id, entry_seed(master_seed, entry_id))
        violations = validate_scene(
            entry.scene, config.table, config.max_instances, config.max_relations
        )
        if violations:  # pragma: no cover - generator/validator agreement
            raise RuntimeError(f"generated invalid scene (entry {entry_id}): {violations}")
        entries.append(entry)
    return entries


def benchmark_stats(entries: List[BenchmarkEntry]) -> BenchmarkStats:
    if not entries:
        raise ValueError("cannot compute statistics of an empty benchmark")

    def histogram(values) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for v in values:
            out[v] = out.get(v, 0) + 1
        return dict(sorted(out.items()))

    return BenchmarkStats(
        total_instances=histogram(e.scene.total for e in entries),
        category_counts=histogram(len(e.scene.categories) for e in entries),
        relation_counts=histogram(len(e.scene.relations) for e in entries),
        max_same_category=histogram(max(e.scene.category_counts.values()) for e in entries),
    )
