import numpy as np
import pytest

from scenebench.guidance import (
    GuidanceError,
    GuidanceSpec,
    ToyDenoiser,
    cfg_combine,
    negative_combine,
    positive_combine,
    rte_combine,
    toy_denoise_loop,
)


def vec(*xs):
    return np.array(xs, dtype=np.float64)


class TestCombines:
    def test_cfg_weight_identities(self):
        u, c = vec(1.0, -2.0), vec(3.0, 5.0)
        assert np.array_equal(cfg_combine(u, c, 1.0), c)
        assert np.array_equal(cfg_combine(u, c, 0.0), u)
        assert np.array_equal(cfg_combine(vec(0, 0), vec(1, 2), 7.0), vec(7, 14))

    def test_rte_reductions_exact(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            u, c0, c1, c2 = (rng.normal(size=4) for _ in range(4))
            w = float(rng.normal())
            assert np.array_equal(rte_combine(u, c0, c1, c2, w, 0.0), cfg_combine(u, c0, w))
            assert np.array_equal(rte_combine(u, c0, c1, c1, w, 2.5), cfg_combine(u, c0, w))

    def test_negative_reduction_and_arithmetic(self):
        u, c = vec(1.0), vec(3.0)
        assert np.array_equal(negative_combine(u, c, u, 4.0), cfg_combine(u, c, 4.0))
        assert np.array_equal(negative_combine(vec(0.0), vec(3.0), vec(1.0), 2.0), vec(4.0))
        assert np.array_equal(negative_combine(u, c, vec(2.0), 0.0), u)

    def test_positive_reduction_and_arithmetic(self):
        u, c, c1 = vec(0.0), vec(1.0), vec(2.0)
        assert np.array_equal(positive_combine(u, c, c1, 1.0, 0.0), cfg_combine(u, c, 1.0))
        assert np.array_equal(positive_combine(u, c, u, 1.0, 3.0), cfg_combine(u, c, 1.0))
        assert np.array_equal(positive_combine(u, c, c1, 1.0, 1.0), vec(3.0))

    def test_dimension_mismatch(self):
        with pytest.raises(GuidanceError):
            cfg_combine(vec(1.0), vec(1.0, 2.0), 1.0)
        with pytest.raises(GuidanceError):
            rte_combine(vec(1.0), vec(1.0), vec(1.0), vec(1.0, 2.0), 1.0, 1.0)

    def test_linearity_superposition(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            a, b = rng.normal(size=(2, 5))
            alpha, beta, w = rng.normal(size=3)
            u = rng.normal(size=5)
            lhs = cfg_combine(u * 0, alpha * a + beta * b, w)
            rhs = alpha * cfg_combine(u * 0, a, w) + beta * cfg_combine(u * 0, b, w)
            assert np.allclose(lhs, rhs, atol=1e-12)


def queen_toy(dim=4, seed=42):
    rng = np.random.default_rng(seed)
    matrix = rng.normal(scale=0.05, size=(dim, dim))
    e_king, e_woman, e_man = rng.normal(size=(3, dim))
    embeddings = {
        "king": e_king,
        "woman": e_woman,
        "man": e_man,
        "queen": e_king + e_woman - e_man,  # exact identity by construction
    }
    return ToyDenoiser(matrix, embeddings), rng.normal(size=dim)


class TestToyLoop:
    def test_single_step_closed_form(self):
        toy, x0 = queen_toy()
        spec = GuidanceSpec(mode="cfg", w=1.0, c0="king")
        eta = 0.1
        out = toy_denoise_loop(toy, spec, x0, steps=1, eta=eta)
        expected = x0 - eta * (toy.matrix @ x0 + toy.embeddings["king"])
        assert np.allclose(out, expected, atol=1e-15)

    def test_rte_with_equal_pair_tracks_cfg(self):
        toy, x0 = queen_toy()
        cfg = GuidanceSpec(mode="cfg", w=3.0, c0="king")
        rte = GuidanceSpec(mode="rte", w=3.0, w_prime=5.0, c0="king", c1="man", c2="man")
        a = toy_denoise_loop(toy, cfg, x0, steps=8, record=True)
        b = toy_denoise_loop(toy, rte, x0, steps=8, record=True)
        assert np.array_equal(a, b)

    def test_queen_identity_trajectory(self):
        toy, x0 = queen_toy()
        rte = GuidanceSpec(mode="rte", w=1.0, w_prime=1.0, c0="king", c1="woman", c2="man")
        cfg = GuidanceSpec(mode="cfg", w=1.0, c0="queen")
        a = toy_denoise_loop(toy, rte, x0, steps=10)
        b = toy_denoise_loop(toy, cfg, x0, steps=10)
        assert np.allclose(a, b, atol=1e-9)

    def test_scaled_semantic_identity(self):
        # E(c0) + (w'/w)(E(c1) - E(c2)) = E(target) implies trajectory equality.
        toy, x0 = queen_toy()
        w, w_prime = 2.0, 1.0
        target = toy.embeddings["king"] + (w_prime / w) * (
            toy.embeddings["woman"] - toy.embeddings["man"]
        )
        toy.embeddings["target"] = target
        rte = GuidanceSpec(mode="rte", w=w, w_prime=w_prime, c0="king", c1="woman", c2="man")
        cfg = GuidanceSpec(mode="cfg", w=w, c0="target")
        a = toy_denoise_loop(toy, rte, x0, steps=10)
        b = toy_denoise_loop(toy, cfg, x0, steps=10)
        assert np.allclose(a, b, atol=1e-9)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_divergence_raises(self):
        toy = ToyDenoiser(np.eye(1) * -1e6, {"c": np.array([0.0])})
        spec = GuidanceSpec(mode="cfg", w=1.0, c0="c")
        with pytest.raises(GuidanceError, match="non-finite"):
            toy_denoise_loop(toy, spec, np.array([1.0]), steps=500, eta=10.0)

    def test_spec_validation(self):
        with pytest.raises(GuidanceError):
            GuidanceSpec(mode="rte", w=1.0, c0="a", c1="b")  # missing c2
        with pytest.raises(GuidanceError):
            GuidanceSpec(mode="negative", w=1.0, c0="a")
        with pytest.raises(GuidanceError):
            GuidanceSpec(mode="warp", w=1.0)
        toy, x0 = queen_toy()
        with pytest.raises(GuidanceError, match="steps"):
            toy_denoise_loop(toy, GuidanceSpec(mode="cfg", w=1.0, c0="king"), x0, steps=0)

    def test_unknown_embedding(self):
        toy, x0 = queen_toy()
        spec = GuidanceSpec(mode="cfg", w=1.0, c0="emperor")
        with pytest.raises(GuidanceError, match="embedding"):
            toy_denoise_loop(toy, spec, x0, steps=1)
