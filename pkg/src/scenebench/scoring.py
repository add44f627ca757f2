"""Alignment scoring: count bias, best injection matching, combined score.

Bias sums absolute count mismatch over prompt categories. Acc is the fraction
of specified colors and relation pairs satisfied under the best
category-respecting injection from prompt instances to detected instances
(padded with blanks when a category is under-detected). The combined score is
(Acc + 1/(Bias+1)) / 2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .boxes import DetectionSet, PostProcessConfig, RelationMap, extract_relations, subject_kinds
from .scene import InstanceRef, StructuredScene

BLANK = None  # matching target for an undetected prompt instance

# A matching assigns each prompt instance (by index) a detected-instance index
# or BLANK; non-blank targets are unique and category-matched.
MatchingTargets = Tuple[Optional[int], ...]


class MatchingError(ValueError):
    pass


@dataclass(frozen=True)
class ColorVerdict:
    instance: InstanceRef
    required: str
    detected: Optional[str]  # None when matched to a blank
    ok: bool


@dataclass(frozen=True)
class RelationVerdict:
    subject: InstanceRef
    object: InstanceRef
    kind: str
    detected: Optional[Tuple[str, ...]]  # None when either endpoint is blank
    ok: bool


@dataclass(frozen=True)
class ScoreReport:
    bias: int
    acc: float
    align_score: float
    normalizer: int
    matching: MatchingTargets
    color_verdicts: Tuple[ColorVerdict, ...]
    relation_verdicts: Tuple[RelationVerdict, ...]
    counts: Dict[str, Tuple[int, int]]  # category -> (required n_k, detected m_k)


def align_score(acc: float, bias: float) -> float:
    """Combined metric: (acc + 1/(bias+1)) / 2."""
    return 0.5 * (acc + 1.0 / (bias + 1.0))


def compute_bias(scene: StructuredScene, dets: DetectionSet) -> int:
    detected = dets.category_counts
    return sum(abs(n_k - detected.get(cat, 0)) for cat, n_k in scene.category_counts.items())


def normalizer(scene: StructuredScene) -> int:
    """|Z| = number of specified colors + number of specified relation pairs."""
    return scene.specified_color_count() + len(scene.relations)


def _validate_matching(scene: StructuredScene, dets: DetectionSet, f: MatchingTargets) -> None:
    if len(f) != scene.total:
        raise MatchingError(f"matching covers {len(f)} of {scene.total} prompt instances")
    taken = [t for t in f if t is not BLANK]
    if len(taken) != len(set(taken)):
        raise MatchingError("matching is not injective on detected instances")
    for inst, target in zip(scene.instances, f):
        if target is BLANK:
            continue
        if not 0 <= target < dets.total:
            raise MatchingError(f"target index {target} out of range")
        if dets.instances[target].category != inst.category:
            raise MatchingError(
                f"category mismatch: {inst.ref} mapped to {dets.instances[target].category!r}"
            )


def score_matching(
    scene: StructuredScene,
    dets: DetectionSet,
    relations: RelationMap,
    f: MatchingTargets,
) -> Tuple[float, Tuple[ColorVerdict, ...], Tuple[RelationVerdict, ...]]:
    """Acc and per-item verdicts for one matching. Blank targets fail every check."""
    _validate_matching(scene, dets, f)
    colors: List[ColorVerdict] = []
    for inst, target in zip(scene.instances, f):
        if inst.color is None:
            continue
        detected = dets.instances[target].color if target is not BLANK else None
        colors.append(ColorVerdict(inst.ref, inst.color, detected, detected == inst.color))
    rels: List[RelationVerdict] = []
    for rel in scene.relations:
        si = f[scene.index_of(rel.subject)]
        oi = f[scene.index_of(rel.object)]
        if si is BLANK or oi is BLANK:
            rels.append(RelationVerdict(rel.subject, rel.object, rel.kind, None, False))
        else:
            kinds = subject_kinds(relations, si, oi)
            rels.append(
                RelationVerdict(
                    rel.subject, rel.object, rel.kind, tuple(sorted(kinds)), rel.kind in kinds
                )
            )
    z = normalizer(scene)
    true_count = sum(v.ok for v in colors) + sum(v.ok for v in rels)
    acc = true_count / z if z else 1.0
    return acc, tuple(colors), tuple(rels)


def _category_assignments(
    prompt_idx: Sequence[int], det_idx: Sequence[int]
) -> List[Tuple[Optional[int], ...]]:
    """All injective assignments of one category's prompt instances to its
    detections, padded with blanks when under-detected."""
    blanks_needed = max(0, len(prompt_idx) - len(det_idx))
    targets: List[Optional[int]] = list(det_idx) + [BLANK] * blanks_needed
    seen = set()
    out = []
    for perm in itertools.permutations(targets, len(prompt_idx)):
        if perm in seen:  # permutations of identical blanks are equivalent
            continue
        seen.add(perm)
        out.append(perm)
    return out


def best_matching(
    scene: StructuredScene,
    dets: DetectionSet,
    relations: Optional[RelationMap] = None,
    cfg: PostProcessConfig = PostProcessConfig(),
) -> Tuple[MatchingTargets, float]:
    """Search all category-respecting injections for the Acc maximum.

    Categories are combined jointly because relations couple them; a
    branch-and-bound upper bound (all undecided checks assumed true) prunes
    the product space. Ties resolve to the first maximum found.
    """
    if relations is None:
        relations = extract_relations(dets, cfg)
    z = normalizer(scene)
    if z == 0:
        return (BLANK,) * scene.total, 1.0

    cats = list(scene.categories)
    prompt_by_cat = {c: [i for i, inst in enumerate(scene.instances) if inst.category == c] for c in cats}
    det_by_cat = {c: [j for j, d in enumerate(dets.instances) if d.category == c] for c in cats}
    options = {c: _category_assignments(prompt_by_cat[c], det_by_cat[c]) for c in cats}

    rel_idx = [
        (scene.index_of(r.subject), scene.index_of(r.object), r.kind) for r in scene.relations
    ]
    colors = [inst.color for inst in scene.instances]
    det_colors = [d.color for d in dets.instances]

    assignment: List[Optional[int]] = [BLANK] * scene.total
    best = {"score": -1, "matching": tuple(assignment)}

    def color_trues(cat: str, choice) -> int:
        trues = 0
        for pi, target in zip(prompt_by_cat[cat], choice):
            if colors[pi] is not None and target is not BLANK and det_colors[target] == colors[pi]:
                trues += 1
        return trues

    def relation_trues(assigned_cats: set) -> int:
        trues = 0
        for si, oi, kind in rel_idx:
            cs, co = scene.instances[si].category, scene.instances[oi].category
            if cs in assigned_cats and co in assigned_cats:
                a, b = assignment[si], assignment[oi]
                if a is not BLANK and b is not BLANK and kind in subject_kinds(relations, a, b):
                    trues += 1
        return trues

    def undecided_relations(assigned_cats: set) -> int:
        return sum(
            1
            for si, oi, _ in rel_idx
            if scene.instances[si].category not in assigned_cats
            or scene.instances[oi].category not in assigned_cats
        )

    def remaining_colors(pos: int) -> int:
        return sum(
            1 for c in cats[pos:] for pi in prompt_by_cat[c] if colors[pi] is not None
        )

    def recurse(pos: int, assigned: set, true_so_far: int) -> None:
        if pos == len(cats):
            if true_so_far > best["score"]:
                best["score"] = true_so_far
                best["matching"] = tuple(assignment)
            return
        cat = cats[pos]
        for choice in options[cat]:
            for pi, target in zip(prompt_by_cat[cat], choice):
                assignment[pi] = target
            assigned.add(cat)
            trues = (
                relation_trues(assigned)
                + sum(color_trues(c, [assignment[pi] for pi in prompt_by_cat[c]]) for c in assigned)
            )
            bound = trues + remaining_colors(pos + 1) + undecided_relations(assigned)
            if bound > best["score"]:
                recurse(pos + 1, assigned, trues)
            assigned.discard(cat)
        for pi in prompt_by_cat[cat]:
            assignment[pi] = BLANK

    recurse(0, set(), 0)
    return best["matching"], best["score"] / z


def evaluate(
    scene: StructuredScene,
    dets: DetectionSet,
    cfg: PostProcessConfig = PostProcessConfig(),
) -> ScoreReport:
    """Full per-prompt scoring: bias, best matching, verdicts, combined score."""
    relations = extract_relations(dets, cfg)
    bias = compute_bias(scene, dets)
    matching, acc = best_matching(scene, dets, relations, cfg)
    acc_check, color_v, rel_v = score_matching(scene, dets, relations, matching)
    detected_counts = dets.category_counts
    counts = {
        cat: (n_k, detected_counts.get(cat, 0)) for cat, n_k in scene.category_counts.items()
    }
    return ScoreReport(
        bias=bias,
        acc=acc_check,
        align_score=align_score(acc_check, bias),
        normalizer=normalizer(scene),
        matching=matching,
        color_verdicts=color_v,
        relation_verdicts=rel_v,
        counts=counts,
    )
