import numpy as np
import pytest

from inrdiff.inr import (
    MlpParams,
    PeConfig,
    TENSOR_NAMES,
    bce_grad,
    bce_loss,
    init_params,
    mlp_forward,
    mlp_gradients,
    positional_encode,
)
from inrdiff.inr.mlp import TENSOR_SHAPES, backward_from_cache, forward_cached


def zero_params(dtype=np.float32):
    return MlpParams(*(np.zeros(TENSOR_SHAPES[n], dtype=dtype) for n in TENSOR_NAMES))


class TestPositionalEncode:
    def test_dimension_is_27(self, rng):
        pts = rng.normal(size=(10, 3))
        assert positional_encode(pts).shape == (10, 27)
        assert PeConfig().encoded_dim == 27

    def test_origin(self):
        e = positional_encode([[0.0, 0.0, 0.0]]).ravel()
        np.testing.assert_allclose(e[:3], 0.0)
        for k in range(4):
            sin_block = e[3 + 6 * k : 6 + 6 * k]
            cos_block = e[6 + 6 * k : 9 + 6 * k]
            np.testing.assert_allclose(sin_block, 0.0, atol=1e-7)
            np.testing.assert_allclose(cos_block, 1.0, atol=1e-7)

    def test_half_on_x_axis(self):
        # x = 0.5: sin/cos(2^k pi/2) for k = 0..3
        e = positional_encode([[0.5, 0.0, 0.0]], dtype=np.float64).ravel()
        first_coord = [e[3 + 6 * k] for k in range(4)], [e[6 + 6 * k] for k in range(4)]
        sins, coss = first_coord
        np.testing.assert_allclose(sins, [1.0, 0.0, 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(coss, [0.0, -1.0, 1.0, 1.0], atol=1e-12)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError, match="non-finite"):
            positional_encode([[np.nan, 0, 0]])


class TestForward:
    def test_zero_params_give_half_probability(self, rng):
        z = mlp_forward(zero_params(), rng.uniform(-0.5, 0.5, (20, 3)))
        np.testing.assert_allclose(z, 0.0)

    def test_bias_only_closed_form(self, rng):
        p = zero_params()
        p.b4[:] = 10.0
        z = mlp_forward(p, rng.uniform(-0.5, 0.5, (5, 3)))
        np.testing.assert_allclose(1 / (1 + np.exp(-z)), 1 / (1 + np.exp(-10.0)), rtol=1e-6)

    def test_permutation_equivariance(self, rng):
        p = init_params(3)
        pts = rng.uniform(-0.5, 0.5, (64, 3))
        z = mlp_forward(p, pts)
        perm = rng.permutation(64)
        np.testing.assert_array_equal(mlp_forward(p, pts[perm]), z[perm])

    def test_nonfinite_params_rejected(self, rng):
        p = init_params(0)
        p.w2[0, 0] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            mlp_forward(p, rng.uniform(-0.5, 0.5, (4, 3)))

    def test_parameter_count(self):
        assert init_params(0).n_elements == 36737


class TestBce:
    def test_ln2_at_zero_logit(self):
        assert bce_loss(np.array([0.0]), np.array([1.0])) == pytest.approx(np.log(2))

    def test_large_logit_stable(self):
        assert bce_loss(np.array([100.0]), np.array([1.0])) == pytest.approx(0.0, abs=1e-8)
        assert np.isfinite(bce_loss(np.array([-100.0]), np.array([1.0])))

    def test_mean_of_two(self):
        assert bce_loss(np.array([0.0, 0.0]), np.array([1.0, 0.0])) == pytest.approx(np.log(2))

    def test_empty_batch_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            bce_loss(np.array([]), np.array([]))

    def test_nonnegative(self, rng):
        z = rng.normal(size=100)
        o = (rng.random(100) > 0.5).astype(float)
        assert bce_loss(z, o) >= 0


def central_difference(params, encoded, labels, name, flat_idx, step=1e-3):
    """Central FD of the BCE loss in float64, flagging ReLU-kink crossings.

    When the FD interval crosses an activation boundary the quotient
    approximates a mix of one-sided slopes, not the gradient, so such
    draws are invalid oracle evaluations and the caller redraws them.
    """

    def loss_and_masks(p):
        z, cache = forward_cached(p, encoded)
        _, h1, _, h2, _, h3, _ = cache
        return bce_loss(z, labels), (h1 > 0, h2 > 0, h3 > 0)

    p = params.astype(np.float64)
    t = getattr(p, name)
    t.flat[flat_idx] += step
    up, masks_up = loss_and_masks(p)
    t.flat[flat_idx] -= 2 * step
    down, masks_down = loss_and_masks(p)
    valid = all((a == b).all() for a, b in zip(masks_up, masks_down))
    return (up - down) / (2 * step), valid


class TestGradients:
    @pytest.mark.parametrize("seed", [2024, 7])
    def test_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        params = init_params(7, dtype=np.float64)
        pts = rng.uniform(-0.5, 0.5, (64, 3))
        labels = (rng.random(64) > 0.5).astype(np.float64)
        encoded = positional_encode(pts, dtype=np.float64)
        grads = mlp_gradients(params, pts, labels)
        rels = []
        while len(rels) < 100:
            name = TENSOR_NAMES[rng.integers(0, len(TENSOR_NAMES))]
            idx = int(rng.integers(0, np.prod(TENSOR_SHAPES[name])))
            fd, valid = central_difference(params, encoded, labels, name, idx)
            if not valid:
                continue
            analytic = getattr(grads, name).flat[idx]
            rels.append(abs(analytic - fd) / max(abs(fd), 1e-8))
        assert max(rels) < 1e-3

    def test_stationary_point_b4(self, rng):
        # labels equal to predicted probabilities -> grad b4 is zero
        params = init_params(5)
        pts = rng.uniform(-0.5, 0.5, (128, 3))
        z = mlp_forward(params, pts)
        labels = 1 / (1 + np.exp(-z.astype(np.float64)))
        grads = mlp_gradients(params, pts, labels)
        assert abs(grads.b4[0]) < 1e-6

    def test_gradient_shapes(self, rng):
        params = init_params(1)
        grads = mlp_gradients(params, rng.uniform(-0.5, 0.5, (16, 3)), np.ones(16))
        for n in TENSOR_NAMES:
            assert getattr(grads, n).shape == TENSOR_SHAPES[n]

    def test_loss_decreases_under_gd(self, rng):
        # exact gradient descent on a fixed 64-point batch, small step
        params = init_params(11, dtype=np.float64)
        pts = rng.uniform(-0.5, 0.5, (64, 3))
        labels = (np.linalg.norm(pts, axis=1) < 0.3).astype(np.float64)
        prev = bce_loss(mlp_forward(params, pts), labels)
        for _ in range(100):
            g = mlp_gradients(params, pts, labels)
            for n in TENSOR_NAMES:
                getattr(params, n)[...] -= 1e-3 * getattr(g, n)
            cur = bce_loss(mlp_forward(params, pts), labels)
            assert cur <= prev + 1e-12
            prev = cur


class TestMlpParams:
    def test_shape_validation(self):
        bad = {n: np.zeros(TENSOR_SHAPES[n]) for n in TENSOR_NAMES}
        bad["w2"] = np.zeros((64, 128))
        with pytest.raises(ValueError, match="w2"):
            MlpParams(**bad)
