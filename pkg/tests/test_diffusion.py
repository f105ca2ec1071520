import numpy as np
import pytest

from inrdiff.diffusion import (
    SampleConfig,
    TrainConfig,
    ddim_sample,
    ddim_timesteps,
    generate,
    make_schedule,
    q_sample,
    train,
    training_loss,
)
from inrdiff.weightspace import THETA_DIM, ThetaStats


class ConstantModel:
    """Fake denoiser that always predicts a fixed clean vector."""

    def __init__(self, theta_star):
        self.theta_star = np.asarray(theta_star, dtype=np.float64)
        self.theta_dim = self.theta_star.size
        self.params = {"pos_emb": np.zeros(1, dtype=np.float32)}

    def denoise(self, theta_t, t):
        if np.asarray(theta_t).ndim == 1:
            return self.theta_star.copy()
        return np.tile(self.theta_star, (np.asarray(theta_t).shape[0], 1))

    def forward(self, theta_t, t):
        theta_t = np.atleast_2d(theta_t)
        return np.tile(self.theta_star, (theta_t.shape[0], 1)), None


class EchoModel(ConstantModel):
    """Fake denoiser that predicts exactly its input (for loss oracles)."""

    def __init__(self, dim):
        super().__init__(np.zeros(dim))

    def forward(self, theta_t, t):
        return np.atleast_2d(theta_t).astype(np.float64), None


class TestSchedule:
    def test_reference_schedule_invariants(self):
        s = make_schedule(1000, 1e-4, 0.02)
        assert s.alpha_bars[0] == pytest.approx(0.9999)
        assert np.all(np.diff(s.alpha_bars) < 0)
        assert s.alpha_bars[-1] < 0.01
        # independent recomputation in log space
        log_ab = np.cumsum(np.log1p(-s.betas))
        np.testing.assert_allclose(s.alpha_bars, np.exp(log_ab), rtol=1e-12)

    def test_single_step(self):
        s = make_schedule(1, 1e-4, 0.02)
        assert s.T == 1
        assert s.alpha_bars[0] == pytest.approx(1 - 1e-4)

    def test_invalid_range(self):
        with pytest.raises(ValueError):
            make_schedule(10, 0.02, 1e-4)
        with pytest.raises(ValueError):
            make_schedule(10, 0.0, 0.5)

    def test_alpha_bar_of_zero_is_one(self):
        s = make_schedule(10, 1e-4, 0.02)
        assert s.alpha_bar(0) == 1.0


class TestQSample:
    def test_zero_noise_closed_form(self, rng):
        s = make_schedule(100, 1e-4, 0.02)
        theta = rng.normal(size=50)
        for t in (1, 50, 100):
            got = q_sample(theta, t, np.zeros(50), s)
            np.testing.assert_allclose(got, np.sqrt(s.alpha_bar(t)) * theta, rtol=1e-12)

    def test_terminal_variance_near_unit(self):
        s = make_schedule(1000, 1e-4, 0.02)
        rng = np.random.default_rng(8)
        theta = rng.standard_normal(THETA_DIM)  # standardized
        eps = rng.standard_normal(THETA_DIM)
        theta_T = q_sample(theta, 1000, eps, s)
        assert 0.95 <= theta_T.var() <= 1.05

    def test_near_identity_at_t1(self, rng):
        s = make_schedule(1000, 1e-4, 0.02)
        theta = rng.normal(size=200)
        eps = rng.normal(size=200)
        got = q_sample(theta, 1, eps, s)
        bound = np.sqrt(1 - 0.9999) * np.abs(eps).max() + (1 - np.sqrt(0.9999)) * np.abs(theta).max()
        assert np.abs(got - theta).max() <= bound + 1e-12

    def test_epsilon_reconstruction_identity(self, rng):
        # invert q_sample for eps and recover it exactly
        s = make_schedule(1000, 1e-4, 0.02)
        theta = rng.normal(size=300)
        eps = rng.normal(size=300)
        for t in (1, 137, 1000):
            theta_t = q_sample(theta, t, eps, s)
            ab = s.alpha_bar(t)
            eps_hat = (theta_t - np.sqrt(ab) * theta) / np.sqrt(1 - ab)
            np.testing.assert_allclose(eps_hat, eps, atol=1e-5)

    def test_shape_mismatch(self, rng):
        s = make_schedule(10, 1e-4, 0.02)
        with pytest.raises(ValueError, match="shape"):
            q_sample(np.zeros(5), 1, np.zeros(6), s)


class TestTrainingLoss:
    def test_oracle_model_zero_loss(self, rng):
        s = make_schedule(100, 1e-4, 0.02)
        theta = rng.normal(size=(4, 64))

        class Oracle(ConstantModel):
            def forward(self, theta_t, t):
                return theta, None

        loss = training_loss(Oracle(np.zeros(64)), theta, np.array([5, 20, 60, 99]),
                             rng.normal(size=theta.shape), s)
        assert loss == 0.0

    def test_zero_model_unit_loss_on_standardized(self):
        s = make_schedule(100, 1e-4, 0.02)
        rng = np.random.default_rng(0)
        theta = rng.standard_normal((2, THETA_DIM))
        theta = (theta - theta.mean()) / theta.std()
        model = ConstantModel(np.zeros(THETA_DIM))
        loss = training_loss(model, theta, np.array([3, 97]), rng.standard_normal(theta.shape), s)
        assert loss == pytest.approx(1.0, abs=0.05)

    def test_nonnegative(self, rng):
        s = make_schedule(50, 1e-4, 0.02)
        model = ConstantModel(rng.normal(size=32))
        theta = rng.normal(size=(3, 32))
        loss = training_loss(model, theta, np.array([1, 25, 50]), rng.normal(size=theta.shape), s)
        assert loss >= 0


class TestDdim:
    def test_timestep_subsequence(self):
        ts = ddim_timesteps(1000, 100)
        assert ts[0] == 1000 and ts[-1] == 1
        assert np.all(np.diff(ts) < 0)
        assert len(ts) == 100

    @pytest.mark.parametrize("steps", [1, 10, 100])
    def test_constant_oracle_telescopes(self, steps, rng):
        # algebraic telescoping: constant x0 prediction makes the output
        # equal that constant independent of step count (eta = 0)
        s = make_schedule(1000, 1e-4, 0.02)
        theta_star = rng.normal(size=128)
        model = ConstantModel(theta_star)
        out = ddim_sample(model, s, SampleConfig(ddim_steps=steps, eta=0.0), rng)
        np.testing.assert_allclose(out, theta_star, atol=1e-5)

    def test_eta0_bitwise_deterministic(self, rng):
        s = make_schedule(100, 1e-4, 0.02)
        model = ConstantModel(rng.normal(size=64))
        a = ddim_sample(model, s, SampleConfig(ddim_steps=10), np.random.default_rng(5))
        b = ddim_sample(model, s, SampleConfig(ddim_steps=10), np.random.default_rng(5))
        np.testing.assert_array_equal(a, b)

    def test_eta1_matches_ddpm_posterior_std(self):
        # known identity: at eta=1 with consecutive steps the DDIM sigma
        # equals the DDPM ancestral posterior std sqrt(beta_tilde)
        s = make_schedule(1000, 1e-4, 0.02)
        t = np.arange(2, 1001)
        ab_t = s.alpha_bars[t - 1]
        ab_prev = s.alpha_bars[t - 2]
        sigma_ddim = np.sqrt((1 - ab_prev) / (1 - ab_t)) * np.sqrt(1 - ab_t / ab_prev)
        beta_tilde = (1 - ab_prev) / (1 - ab_t) * s.betas[t - 1]
        np.testing.assert_allclose(sigma_ddim, np.sqrt(beta_tilde), rtol=1e-10)

    def test_destandardization_applied(self, rng):
        s = make_schedule(100, 1e-4, 0.02)
        theta_star = rng.normal(size=32)
        model = ConstantModel(theta_star)
        stats = ThetaStats(mean=2.0, std=3.0)
        out = ddim_sample(model, s, SampleConfig(ddim_steps=5), rng, stats=stats)
        np.testing.assert_allclose(out, theta_star * 3.0 + 2.0, atol=1e-4)

    def test_bad_config(self):
        with pytest.raises(ValueError):
            SampleConfig(ddim_steps=0)
        with pytest.raises(ValueError):
            SampleConfig(eta=1.5)


class TestTrain:
    def test_rejects_single_theta(self, rng):
        with pytest.raises(ValueError, match="at least 2"):
            train(rng.normal(size=(1, THETA_DIM)))

    def test_tiny_memorization_loss_decreases(self, rng):
        from inrdiff.weightspace import DenoiserConfig

        thetas = rng.normal(size=(2, THETA_DIM)) * 0.1
        cfg = TrainConfig(epochs=30, batch=2, lr=1e-3, seed=1)
        dcfg = DenoiserConfig(n_emb=16, layers=1, heads=2, seed=1)
        res = train(thetas, cfg, dcfg, sched=make_schedule(100, 1e-4, 0.02))
        assert res.train_losses[-1] < res.train_losses[0]

    def test_fixed_seed_reproducible(self, rng):
        from inrdiff.weightspace import DenoiserConfig

        thetas = rng.normal(size=(3, THETA_DIM)) * 0.1
        cfg = TrainConfig(epochs=5, batch=3, seed=9)
        dcfg = DenoiserConfig(n_emb=16, layers=1, heads=2, seed=9)
        s = make_schedule(50, 1e-4, 0.02)
        a = train(thetas, cfg, dcfg, sched=s)
        b = train(thetas, cfg, dcfg, sched=s)
        assert a.train_losses == b.train_losses

    def test_split_ratios_validated(self):
        with pytest.raises(ValueError, match="sum to 1"):
            TrainConfig(split=(0.5, 0.2, 0.2))


class TestGenerate:
    def test_constant_model_generates_spheres(self, sphere_theta):
        s = make_schedule(100, 1e-4, 0.02)
        model = ConstantModel(sphere_theta)
        stats = ThetaStats(mean=0.0, std=1.0)
        meshes, thetas, manifest = generate(
            model, s, stats, 2, SampleConfig(ddim_steps=5, seed=3), resolution=32
        )
        assert len(meshes) == len(thetas) == len(manifest) == 2
        assert not meshes[0].is_empty
        assert manifest[0]["empty_surface"] is False
        assert manifest[0]["id"] == "sample_0000"
        assert manifest[1]["seed"] == 4

    def test_zero_count_valid(self, sphere_theta):
        s = make_schedule(10, 1e-4, 0.02)
        meshes, thetas, manifest = generate(
            ConstantModel(sphere_theta), s, ThetaStats(0.0, 1.0), 0
        )
        assert meshes == [] and manifest == []

    def test_empty_surface_flagged(self):
        s = make_schedule(10, 1e-4, 0.02)
        model = ConstantModel(np.zeros(THETA_DIM))
        meshes, _, manifest = generate(model, s, ThetaStats(0.0, 1.0), 1,
                                       SampleConfig(ddim_steps=2), resolution=16)
        assert meshes[0].is_empty
        assert manifest[0]["empty_surface"] is True
