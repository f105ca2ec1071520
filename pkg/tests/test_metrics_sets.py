import numpy as np
import pytest

from inrdiff.metrics import chamfer_l1, coverage, mmd, one_nna, pairwise_chamfer


def make_clouds(rng, n_clouds, n_points=64, center=(0, 0, 0), scale=1.0):
    return [
        rng.normal(size=(n_points, 3)) * scale + np.asarray(center, dtype=float)
        for _ in range(n_clouds)
    ]


class TestMmd:
    def test_identical_sets_zero(self, rng):
        s = make_clouds(rng, 5)
        assert mmd(s, s) == 0.0

    def test_two_element_closed_form(self, rng):
        x = rng.normal(size=(30, 3))
        y = rng.normal(size=(30, 3)) + 5
        # Sg={X}, Sr={X, Y}: min over g is chamfer(X, r), mean = chamfer(X,Y)/2
        assert mmd([x], [x, y]) == pytest.approx(chamfer_l1(x, y) / 2)

    def test_equals_bruteforce_double_loop(self, rng):
        sg = make_clouds(rng, 4, 20)
        sr = make_clouds(rng, 6, 20)
        d = np.array([[chamfer_l1(g, r) for r in sr] for g in sg])
        assert mmd(sg, sr) == pytest.approx(d.min(axis=0).mean(), abs=1e-15)

    def test_not_symmetric(self, rng):
        # constructed asymmetric fixture: Sg clustered, Sr spread
        sg = make_clouds(rng, 2, 20, center=(0, 0, 0), scale=0.01)
        sr = [
            make_clouds(rng, 1, 20, center=(0, 0, 0), scale=0.01)[0],
            make_clouds(rng, 1, 20, center=(9, 0, 0), scale=0.01)[0],
        ]
        assert mmd(sg, sr) != pytest.approx(mmd(sr, sg), abs=1e-6)


class TestCoverage:
    def test_identical_distinct_sets(self, rng):
        s = [c + i for i, c in enumerate(make_clouds(rng, 5, 20, scale=0.01))]
        assert coverage(s, s) == 100.0

    def test_all_nearest_to_one(self, rng):
        target = rng.normal(size=(20, 3)) * 0.01
        far = rng.normal(size=(20, 3)) * 0.01 + 50
        sg = [target + rng.normal(scale=1e-4, size=(20, 3)) for _ in range(4)]
        sr = [target, far]
        assert coverage(sg, sr) == pytest.approx(100.0 / len(sr))

    def test_pigeonhole_bound(self, rng):
        sg = make_clouds(rng, 3, 20)
        sr = make_clouds(rng, 7, 20)
        assert coverage(sg, sr) <= 3 / 7 * 100 + 1e-9


class TestOneNna:
    def test_separated_clusters_100(self, rng):
        sg = make_clouds(rng, 6, 30, center=(0, 0, 0), scale=0.05)
        sr = make_clouds(rng, 6, 30, center=(10, 0, 0), scale=0.05)
        assert one_nna(sg, sr) == 100.0

    def test_identical_generator_near_50(self):
        # 20+20 clouds from the same generator, 3 seeds: distributionally
        # indistinguishable, accuracy must hover near chance
        for seed in (0, 1, 2):
            rng = np.random.default_rng(seed)
            sg = make_clouds(rng, 20, 48)
            sr = make_clouds(rng, 20, 48)
            assert 25.0 <= one_nna(sg, sr) <= 75.0

    def test_symmetric_in_arguments(self, rng):
        sg = make_clouds(rng, 5, 24)
        sr = make_clouds(rng, 7, 24)
        assert one_nna(sg, sr) == one_nna(sr, sg)

    def test_interleaved_adversarial_zero(self):
        # each sample's nearest neighbor sits in the other class
        a0 = np.zeros((4, 3))
        eps = np.array([[1e-6, 0, 0]] * 4)
        sg = [a0, a0 + 1.0]
        sr = [a0 + eps, a0 + 1.0 + eps]
        assert one_nna(sg, sr) == 0.0

    def test_minimum_sizes(self, rng):
        with pytest.raises(ValueError, match="at least 2"):
            one_nna([rng.normal(size=(5, 3))], make_clouds(rng, 3, 5))


def test_pairwise_matrix_shape(rng):
    sg = make_clouds(rng, 3, 10)
    sr = make_clouds(rng, 4, 10)
    assert pairwise_chamfer(sg, sr).shape == (3, 4)
