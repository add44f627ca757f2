import numpy as np
import pytest

from oracles import make_raw, one_hot_scores
from scenebench.boxes import (
    BoundingBox,
    DetectionError,
    DetectionSet,
    PostProcessConfig,
    RawDetection,
    classify_color,
    extract_relations,
    iou,
    post_process,
    subject_kinds,
)
from scenebench.vocab import PALETTE


class TestIoU:
    def test_identical_boxes(self):
        b = BoundingBox(10, 10, 4, 4)
        assert iou(b, b) == pytest.approx(1.0)

    def test_disjoint_boxes(self):
        assert iou(BoundingBox(0, 0, 2, 2), BoundingBox(100, 100, 2, 2)) == 0.0

    def test_unit_squares_half_overlap(self):
        # overlap 0.5, union 1.5 -> 1/3
        a = BoundingBox(0.5, 0.5, 1, 1)
        b = BoundingBox(1.0, 0.5, 1, 1)
        assert iou(a, b) == pytest.approx(1 / 3)

    def test_symmetry_random(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            a = BoundingBox(*rng.uniform(1, 100, 2), *rng.uniform(1, 50, 2))
            b = BoundingBox(*rng.uniform(1, 100, 2), *rng.uniform(1, 50, 2))
            assert iou(a, b) == pytest.approx(iou(b, a))
            assert 0.0 <= iou(a, b) <= 1.0

    def test_invalid_box(self):
        with pytest.raises(DetectionError):
            BoundingBox(0, 0, 0, 5)


class TestClassifyColor:
    def test_clear_argmax(self):
        scores = {c: 0.1 for c in PALETTE}
        scores["red"] = 0.9
        assert classify_color(scores) == "red"

    def test_all_equal_breaks_to_green(self):
        assert classify_color({c: 0.5 for c in PALETTE}) == "green"

    def test_partial_tie_uses_palette_order(self):
        scores = {c: 0.0 for c in PALETTE}
        scores["blue"] = scores["yellow"] = 0.8
        assert classify_color(scores) == "yellow"

    def test_missing_color_is_error(self):
        scores = {c: 0.5 for c in PALETTE if c != "brown"}
        with pytest.raises(DetectionError, match="missing"):
            classify_color(scores)


class TestPostProcess:
    def test_confidence_boundary(self):
        low = make_raw("dog", "black", 50, 50, confidence=0.2999)
        exact = make_raw("dog", "black", 50, 50, confidence=0.3)
        assert post_process([low]).total == 0
        assert post_process([exact]).total == 1

    def test_dedup_keeps_higher_confidence(self):
        a = make_raw("dog", "black", 50, 50, w=40, h=40, confidence=0.9)
        b = make_raw("dog", "white", 50.5, 50, w=40, h=40, confidence=0.8)  # IoU ~0.95
        kept = post_process([b, a])
        assert kept.total == 1
        assert kept.instances[0].confidence == 0.9

    def test_dedup_iou_boundary(self):
        # Construct IoU exactly 0.9: widths 40/40, shift so inter/union = 0.9.
        a = make_raw("dog", "black", 50, 50, confidence=0.9)
        shift = 40 * 0.1 / 1.9  # inter = (40-s)*40, union = (40+s)*40
        b = make_raw("dog", "white", 50 + shift, 50, confidence=0.8)
        assert iou(a.box, b.box) == pytest.approx(0.9)
        assert post_process([a, b]).total == 2  # strictly 'over 0.9' is removed

    def test_dedup_is_per_category(self):
        a = make_raw("dog", "black", 50, 50, confidence=0.9)
        b = make_raw("cat", "white", 50, 50, confidence=0.8)
        assert post_process([a, b]).total == 2

    def test_min_side_boundary(self):
        tiny = make_raw("dog", "black", 50, 50, w=4.999, h=40)
        exact = make_raw("dog", "black", 50, 50, w=5, h=40)
        assert post_process([tiny]).total == 0
        assert post_process([exact]).total == 1

    def test_survivor_color_is_argmax(self):
        out = post_process([make_raw("dog", "brown", 50, 50)])
        assert out.instances[0].color == "brown"

    def test_dedup_never_drops_top_confidence(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            raws = [
                make_raw("dog", "black", rng.uniform(40, 60), rng.uniform(40, 60),
                         confidence=float(c))
                for c in rng.uniform(0.3, 1.0, 6)
            ]
            top = max(raws, key=lambda r: r.confidence)
            kept = post_process(raws)
            assert any(inst.confidence == top.confidence for inst in kept.instances)

    def _random_raws(self, rng, n):
        cats = ["dog", "cat", "clock"]
        return [
            make_raw(
                cats[int(rng.integers(0, 3))],
                PALETTE[int(rng.integers(0, 7))],
                float(rng.uniform(0, 200)),
                float(rng.uniform(0, 200)),
                w=float(rng.uniform(1, 80)),
                h=float(rng.uniform(1, 80)),
                confidence=float(rng.uniform(0, 1)),
            )
            for _ in range(n)
        ]

    def test_idempotence_random(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            first = post_process(self._random_raws(rng, int(rng.integers(0, 9))))
            re_raw = [
                RawDetection(i.category, i.confidence, i.box, one_hot_scores(i.color))
                for i in first.instances
            ]
            assert post_process(re_raw) == first


class TestExtractRelations:
    def dets(self, boxes):
        return DetectionSet(
            post_process([make_raw("dog", "black", *b) for b in boxes]).instances
        )

    def test_clear_right(self):
        d = self.dets([(10, 10, 10, 10), (50, 10, 10, 10)])
        rel = extract_relations(d)
        assert rel[(0, 1)] == frozenset({"right"})
        assert rel[(1, 0)] == frozenset({"left"})

    def test_coincident_centers_empty(self):
        d = self.dets([(50, 50, 10, 10), (50, 50, 30, 30)])
        assert extract_relations(d) == {}

    def test_dual_relation(self):
        d = self.dets([(10, 10, 10, 10), (50, 50, 10, 10)])
        rel = extract_relations(d)
        assert rel[(0, 1)] == frozenset({"right", "below"})
        assert rel[(1, 0)] == frozenset({"left", "above"})

    def test_boundary_offset_excluded(self):
        # dx exactly equals c*(w1+w2): no relation (strict inequality).
        d = self.dets([(10, 10, 10, 10), (12, 10, 10, 10)])
        assert extract_relations(d) == {}

    def test_antisymmetry_random(self):
        rng = np.random.default_rng(3)
        inverse = {"left": "right", "right": "left", "above": "below", "below": "above"}
        for _ in range(300):
            d = self.dets(rng.uniform(5, 200, size=(2, 4)).tolist())
            if d.total < 2:
                continue
            rel = extract_relations(d)
            fwd = rel.get((0, 1), frozenset())
            rev = rel.get((1, 0), frozenset())
            assert fwd == frozenset(inverse[k] for k in rev)

    def test_scale_invariance(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            boxes = rng.uniform(5, 200, size=(3, 4))
            d1 = self.dets(boxes.tolist())
            d2 = self.dets((boxes * 3.5).tolist())
            if d1.total == 3 and d2.total == 3:
                assert extract_relations(d1) == extract_relations(d2)

    def test_subject_kinds_view(self):
        d = self.dets([(10, 10, 10, 10), (50, 10, 10, 10)])
        rel = extract_relations(d)
        # instance 0 is left of instance 1
        assert "left" in subject_kinds(rel, 0, 1)
        assert "right" in subject_kinds(rel, 1, 0)
