import numpy as np
import pytest

from oracles import brute_force_best_acc, make_raw
from scenebench.boxes import DetectionSet, PostProcessConfig, extract_relations, post_process
from scenebench.generate import GeneratorConfig, build_entry
from scenebench.scene import InstanceSpec, RelationSpec, StructuredScene
from scenebench.scoring import (
    MatchingError,
    align_score,
    best_matching,
    compute_bias,
    evaluate,
    normalizer,
    score_matching,
)
from scenebench.vocab import PALETTE


def dets_from(specs):
    """specs: list of (category, color, cx, cy)."""
    return post_process([make_raw(*s) for s in specs])


class TestBias:
    def test_direct_eq1(self):
        scene = StructuredScene(
            [InstanceSpec("bench", i, "brown") for i in (1, 2, 3)]
            + [InstanceSpec("boat", 1, "green")]
        )
        dets = dets_from(
            [("bench", "brown", 10, 10), ("bench", "brown", 50, 10),
             ("boat", "green", 90, 10), ("dog", "black", 130, 10)]
        )
        assert compute_bias(scene, dets) == 1  # |3-2| + |1-1|; dog excluded

    def test_perfect_counts(self):
        scene = StructuredScene([InstanceSpec("dog", 1, "black")])
        assert compute_bias(scene, dets_from([("dog", "black", 10, 10)])) == 0

    def test_nothing_detected(self):
        scene = StructuredScene([InstanceSpec("clock", 1, "white"), InstanceSpec("clock", 2, "green")])
        assert compute_bias(scene, dets_from([])) == 2

    def test_bias_ignores_matching(self):
        # Bias is pure counting; permuting detections cannot change it.
        scene = StructuredScene([InstanceSpec("clock", i, "white") for i in (1, 2)])
        specs = [("clock", "green", 10, 10), ("clock", "white", 60, 10)]
        assert compute_bias(scene, dets_from(specs)) == compute_bias(
            scene, dets_from(list(reversed(specs)))
        )


def appendix_a1_setup():
    """Prompt: A is black, on the left of B, on the right of C.
    Image: white A placed correctly between C and B."""
    scene = StructuredScene(
        [InstanceSpec("dog", 1, "black"), InstanceSpec("cat", 1), InstanceSpec("bird", 1)],
        [
            RelationSpec(("dog", 1), ("cat", 1), "left"),
            RelationSpec(("dog", 1), ("bird", 1), "right"),
        ],
    )
    dets = dets_from(
        [("bird", "brown", 10, 50), ("dog", "white", 100, 50), ("cat", "black", 190, 50)]
    )
    return scene, dets


class TestScoreMatching:
    def test_appendix_a1_worked_case(self):
        scene, dets = appendix_a1_setup()
        assert normalizer(scene) == 3  # one specified color + two relation pairs
        relations = extract_relations(dets)
        f = (1, 2, 0)  # dog->detected dog, cat->cat, bird->bird
        acc, colors, rels = score_matching(scene, dets, relations, f)
        assert acc == pytest.approx(2 / 3)
        assert [v.ok for v in colors] == [False]
        assert [v.ok for v in rels] == [True, True]

    def test_all_blank_matching(self):
        scene, dets = appendix_a1_setup()
        acc, colors, rels = score_matching(scene, dets, {}, (None, None, None))
        assert acc == 0.0
        assert all(v.detected is None for v in colors)

    def test_two_clocks_correct(self):
        scene = StructuredScene(
            [InstanceSpec("clock", 1, "white"), InstanceSpec("clock", 2, "green")]
        )
        dets = dets_from([("clock", "white", 10, 10), ("clock", "green", 60, 10)])
        acc, _, _ = score_matching(scene, dets, extract_relations(dets), (0, 1))
        assert acc == 1.0

    def test_invalid_matchings_rejected(self):
        scene, dets = appendix_a1_setup()
        with pytest.raises(MatchingError, match="injective"):
            score_matching(scene, dets, {}, (1, 1, 0))
        with pytest.raises(MatchingError, match="category"):
            score_matching(scene, dets, {}, (0, 2, 1))
        with pytest.raises(MatchingError, match="covers"):
            score_matching(scene, dets, {}, (1, 2))


class TestBestMatching:
    def test_swapped_clocks_found(self):
        scene = StructuredScene(
            [InstanceSpec("clock", 1, "white"), InstanceSpec("clock", 2, "green")]
        )
        dets = dets_from([("clock", "green", 10, 10), ("clock", "white", 60, 10)])
        matching, acc = best_matching(scene, dets)
        assert acc == 1.0
        assert matching == (1, 0)

    def test_empty_detections_all_blank(self):
        scene = StructuredScene(
            [InstanceSpec("clock", 1, "white"), InstanceSpec("clock", 2, "green")]
        )
        matching, acc = best_matching(scene, dets_from([]))
        assert matching == (None, None)
        assert acc == 0.0

    def _random_case(self, rng):
        cats = ["dog", "cat", "clock"]
        n = int(rng.integers(1, 6))
        counts = {}
        insts = []
        for _ in range(n):
            cat = cats[int(rng.integers(0, len(cats)))]
            counts[cat] = counts.get(cat, 0) + 1
            color = PALETTE[int(rng.integers(0, 7))] if rng.random() < 0.9 else None
            insts.append(InstanceSpec(cat, counts[cat], color))
        insts.sort(key=lambda i: (i.category, i.ordinal))
        rels = []
        pairs = {frozenset((a.ref, b.ref)) for a in insts for b in insts if a.ref != b.ref}
        for pair in sorted(pairs, key=repr):
            if rng.random() < 0.3:
                a, b = sorted(pair)
                kind = ("left", "right", "above", "below")[int(rng.integers(0, 4))]
                rels.append(RelationSpec(a, b, kind))
        scene = StructuredScene(insts, rels[:6])
        m = int(rng.integers(0, 6))
        specs = [
            (
                cats[int(rng.integers(0, len(cats)))],
                PALETTE[int(rng.integers(0, 7))],
                float(rng.uniform(0, 300)),
                float(rng.uniform(0, 300)),
            )
            for _ in range(m)
        ]
        return scene, dets_from(specs)

    def test_oracle_equivalence_randomized(self):
        rng = np.random.default_rng(2024)
        for _ in range(300):
            scene, dets = self._random_case(rng)
            relations = extract_relations(dets)
            _, acc = best_matching(scene, dets, relations)
            assert acc == pytest.approx(brute_force_best_acc(scene, dets, relations))

    def test_monotonicity_filling_a_blank(self):
        # Adding a correctly colored, correctly placed detection for an
        # unmatched prompt instance never decreases acc.
        rng = np.random.default_rng(5)
        for _ in range(100):
            scene, dets = self._random_case(rng)
            _, acc_before = best_matching(scene, dets)
            matching, _ = best_matching(scene, dets)
            blanks = [i for i, t in enumerate(matching) if t is None]
            if not blanks:
                continue
            missing = scene.instances[blanks[0]]
            extra = make_raw(
                missing.category, missing.color or "green",
                float(rng.uniform(0, 300)), float(rng.uniform(0, 300)),
            )
            raws = [
                make_raw(d.category, d.color, d.box.cx, d.box.cy, d.box.w, d.box.h, d.confidence)
                for d in dets.instances
            ]
            bigger = post_process(raws + [extra])
            _, acc_after = best_matching(scene, bigger)
            assert acc_after >= acc_before - 1e-12

    def test_permutation_invariance(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            scene, dets = self._random_case(rng)
            _, acc = best_matching(scene, dets)
            order = rng.permutation(dets.total)
            shuffled = DetectionSet([dets.instances[i] for i in order])
            _, acc_shuffled = best_matching(scene, shuffled)
            assert acc == pytest.approx(acc_shuffled)
            assert compute_bias(scene, dets) == compute_bias(scene, shuffled)


class TestEvaluate:
    def test_table3_arithmetic(self):
        assert align_score(0.669, 1.52) == pytest.approx(0.533, abs=0.0015)
        assert align_score(0.282, 2.98) == pytest.approx(0.267, abs=0.0015)

    def test_perfect_generation(self):
        scene = StructuredScene([InstanceSpec("dog", 1, "black")])
        report = evaluate(scene, dets_from([("dog", "black", 10, 10)]))
        assert (report.acc, report.bias, report.align_score) == (1.0, 0, 1.0)

    def test_report_invariants_random(self):
        rng = np.random.default_rng(8)
        helper = TestBestMatching()
        for _ in range(200):
            scene, dets = helper._random_case(rng)
            report = evaluate(scene, dets)
            assert report.align_score == pytest.approx(
                0.5 * (report.acc + 1 / (report.bias + 1))
            )
            assert report.normalizer == scene.specified_color_count() + len(scene.relations)
            trues = sum(v.ok for v in report.color_verdicts) + sum(
                v.ok for v in report.relation_verdicts
            )
            if report.normalizer:
                assert report.acc * report.normalizer == pytest.approx(trues)
            assert 0.0 <= report.acc <= 1.0
            assert 0.0 < report.align_score <= 1.0
            if report.align_score == 1.0:
                assert report.acc == 1.0 and report.bias == 0

    def test_appendix_a1_through_evaluate(self):
        scene, dets = appendix_a1_setup()
        report = evaluate(scene, dets)
        assert report.acc == pytest.approx(2 / 3)
        assert round(report.acc, 2) == 0.67
