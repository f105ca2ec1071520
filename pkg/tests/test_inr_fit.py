import numpy as np
import pytest

from inrdiff.geometry import icosphere, qa_report
from inrdiff.inr import (
    FitConfig,
    MlpParams,
    evaluate_grid,
    fit_mlp,
    load_mlp,
    reconstruct,
    save_mlp,
    init_params,
)
from inrdiff.inr.mlp import TENSOR_NAMES, TENSOR_SHAPES


def small_cfg(**kw):
    base = dict(epochs=5, volume_points=1500, surface_points=1500, minibatch=512, seed=42)
    base.update(kw)
    return FitConfig(**base)


class TestFitMlp:
    def test_epochs_zero_rejected(self, small_sphere):
        with pytest.raises(ValueError, match="epochs"):
            fit_mlp(small_sphere, small_cfg(epochs=0))

    def test_minibatch_cap(self, small_sphere):
        with pytest.raises(ValueError, match="minibatch"):
            fit_mlp(small_sphere, small_cfg(minibatch=100000))

    def test_deterministic_bitwise(self, small_sphere):
        a = fit_mlp(small_sphere, small_cfg())
        b = fit_mlp(small_sphere, small_cfg())
        for n in TENSOR_NAMES:
            np.testing.assert_array_equal(getattr(a.params, n), getattr(b.params, n))
        assert a.epoch_losses == b.epoch_losses

    def test_loss_trends_down(self, small_sphere):
        res = fit_mlp(small_sphere, small_cfg(epochs=30))
        assert res.epoch_losses[-1] < res.epoch_losses[0]
        assert res.watertight_input

    def test_non_watertight_warns_but_fits(self, holed_sphere):
        with pytest.warns(RuntimeWarning):
            res = fit_mlp(holed_sphere, small_cfg())
        assert not res.watertight_input
        assert np.isfinite(res.epoch_losses[-1])


class TestEvaluateGrid:
    def test_zero_params_uniform_half(self):
        p = MlpParams(*(np.zeros(TENSOR_SHAPES[n], dtype=np.float32) for n in TENSOR_NAMES))
        g = evaluate_grid(p, resolution=4)
        np.testing.assert_allclose(g.values, 0.5)

    def test_resolution_two_corners(self):
        p = init_params(0)
        g = evaluate_grid(p, resolution=2)
        assert g.values.shape == (2, 2, 2)

    def test_min_resolution(self):
        with pytest.raises(ValueError):
            evaluate_grid(init_params(0), resolution=1)

    def test_deterministic(self):
        p = init_params(3)
        a = evaluate_grid(p, resolution=8)
        b = evaluate_grid(p, resolution=8)
        np.testing.assert_array_equal(a.values, b.values)


class TestReconstruct:
    def test_zero_params_empty_mesh(self):
        p = MlpParams(*(np.zeros(TENSOR_SHAPES[n], dtype=np.float32) for n in TENSOR_NAMES))
        mesh = reconstruct(p, resolution=16)
        assert mesh.is_empty

    def test_fitted_sphere_reconstructs(self, small_sphere):
        # quick sanity: a short fit already carves out roughly the right
        # solid (watertightness and tight thresholds live in the
        # acceptance suite, which runs the full config)
        res = fit_mlp(small_sphere, small_cfg(epochs=150, volume_points=4000, surface_points=4000))
        mesh = reconstruct(res.params, resolution=64)
        assert not mesh.is_empty
        assert mesh.volume() == pytest.approx(4 / 3 * np.pi * 0.4**3, rel=0.10)


class TestCheckpoint:
    def test_roundtrip_bitwise(self, tmp_path):
        p = init_params(9)
        path = tmp_path / "m.inrmlp"
        save_mlp(path, p, seed=9, extras={"shape_id": "sphere"})
        back, header = load_mlp(path)
        for n in TENSOR_NAMES:
            np.testing.assert_array_equal(getattr(back, n), getattr(p, n))
        assert header["seed"] == 9
        assert header["signature"] == [3456, 128, 16384, 128, 16384, 128, 128, 1]
        assert header["extras"]["shape_id"] == "sphere"

    def test_bad_magic(self, tmp_path):
        from inrdiff.errors import DataError

        path = tmp_path / "bad.inrmlp"
        path.write_bytes(b"NOTMAGIC" + b"\0" * 100)
        with pytest.raises(DataError, match="magic"):
            load_mlp(path)

    def test_truncated_payload(self, tmp_path):
        from inrdiff.errors import DataError

        path = tmp_path / "t.inrmlp"
        save_mlp(path, init_params(0))
        blob = path.read_bytes()
        path.write_bytes(blob[:-40])
        with pytest.raises(DataError, match="payload"):
            load_mlp(path)

    def test_identical_saves_are_bitwise_identical(self, tmp_path):
        p = init_params(4)
        a, b = tmp_path / "a", tmp_path / "b"
        save_mlp(a, p, seed=4)
        save_mlp(b, p, seed=4)
        assert a.read_bytes() == b.read_bytes()
