"""Mixture models: LBG initialization, EM training, log-density evaluation."""

import numpy as np
import pytest

from sidkit.errors import InsufficientData
from sidkit.gmm import (
    GmmModel,
    TrainingConfig,
    component_log_density,
    em_train,
    gmm_log_likelihood,
    gmm_log_likelihoods,
    lbg_init,
    variance_floor,
)


def two_clouds(rng, n_per=500, dim=3, separation=10.0, std=1.0):
    """Two labeled Gaussian clouds a fixed number of stds apart."""
    a = rng.standard_normal((n_per, dim)) * std
    b = rng.standard_normal((n_per, dim)) * std + separation * std
    return np.vstack([a, b]), a.mean(axis=0), b.mean(axis=0)


class TestGmmModel:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            GmmModel(weights=np.array([0.5, 0.4]), means=np.zeros((2, 1)),
                     variances=np.ones((2, 1)))

    def test_variances_must_be_positive(self):
        with pytest.raises(ValueError):
            GmmModel(weights=np.array([1.0]), means=np.zeros((1, 2)),
                     variances=np.array([[1.0, 0.0]]))

    def test_parameters_read_only(self):
        model = GmmModel(weights=np.array([1.0]), means=np.zeros((1, 2)),
                         variances=np.ones((1, 2)))
        with pytest.raises(ValueError):
            model.means[0, 0] = 5.0


class TestLbgInit:
    def test_single_component_is_global_stats(self):
        rng = np.random.default_rng(40)
        x = rng.standard_normal((400, 5)) * 2.0 + 1.0
        model = lbg_init(x, 1, TrainingConfig(num_components=1))
        np.testing.assert_allclose(model.means[0], x.mean(axis=0), atol=1e-12)
        np.testing.assert_allclose(model.variances[0], x.var(axis=0), atol=1e-12)
        assert model.weights[0] == 1.0

    def test_two_separated_clouds_found(self):
        """Split + refine lands centroids on the true cloud means.

        Truth comes from the generator labels, not from the quantizer.
        """
        rng = np.random.default_rng(41)
        x, mean_a, mean_b = two_clouds(rng)
        model = lbg_init(x, 2, TrainingConfig(num_components=2))
        got = sorted(model.means.tolist())
        want = sorted([mean_a.tolist(), mean_b.tolist()])
        for g, w in zip(got, want):
            assert np.linalg.norm(np.array(g) - np.array(w)) < 0.1

    def test_weights_balanced_on_balanced_data(self):
        rng = np.random.default_rng(42)
        x, _, _ = two_clouds(rng)
        for m in (2, 4, 8):
            model = lbg_init(x, m, TrainingConfig(num_components=m))
            assert model.weights.sum() == pytest.approx(1.0, abs=1e-9)
            assert np.all(model.weights >= 1.0 / (4 * m))

    def test_power_of_two_required(self):
        rng = np.random.default_rng(43)
        with pytest.raises(ValueError):
            lbg_init(rng.standard_normal((100, 2)), 3, TrainingConfig(num_components=3))

    def test_insufficient_data(self):
        rng = np.random.default_rng(44)
        with pytest.raises(InsufficientData):
            lbg_init(rng.standard_normal((3, 2)), 4, TrainingConfig(num_components=4))

    def test_deterministic(self):
        rng = np.random.default_rng(45)
        x = rng.standard_normal((300, 4))
        cfg = TrainingConfig(num_components=4)
        a = lbg_init(x, 4, cfg)
        b = lbg_init(x, 4, cfg)
        np.testing.assert_array_equal(a.means, b.means)
        np.testing.assert_array_equal(a.variances, b.variances)
        np.testing.assert_array_equal(a.weights, b.weights)

    def test_variances_floored(self):
        rng = np.random.default_rng(46)
        x = rng.standard_normal((200, 3))
        cfg = TrainingConfig(num_components=4)
        model = lbg_init(x, 4, cfg)
        floor = variance_floor(x, cfg.variance_floor_factor)
        assert np.all(model.variances >= floor)


class TestComponentLogDensity:
    @staticmethod
    def _model(mean, var):
        mean = np.atleast_2d(np.asarray(mean, dtype=float))
        var = np.atleast_2d(np.asarray(var, dtype=float))
        return GmmModel(weights=np.array([1.0]), means=mean, variances=var)

    def test_standard_normal_peak_1d(self):
        model = self._model([0.0], [1.0])
        value = component_log_density(np.array([0.0]), 0, model)
        assert value == pytest.approx(-0.918939, abs=1e-6)

    def test_standard_normal_peak_2d(self):
        model = self._model([0.0, 0.0], [1.0, 1.0])
        value = component_log_density(np.array([0.0, 0.0]), 0, model)
        assert value == pytest.approx(-1.837877, abs=1e-6)

    def test_matches_direct_formula(self):
        """Log-domain evaluation equals log of the explicit product of
        one-dimensional normal densities."""
        rng = np.random.default_rng(47)
        for _ in range(100):
            d = int(rng.integers(1, 6))
            mean = rng.uniform(-2, 2, d)
            var = rng.uniform(0.5, 3.0, d)
            x = rng.uniform(-4, 4, d)
            model = self._model(mean, var)
            direct = np.prod(
                np.exp(-0.5 * (x - mean) ** 2 / var) / np.sqrt(2 * np.pi * var)
            )
            got = component_log_density(x, 0, model)
            assert got == pytest.approx(np.log(direct), abs=1e-10)


class TestGmmLogLikelihood:
    def test_single_component_equals_density(self):
        rng = np.random.default_rng(48)
        model = GmmModel(weights=np.array([1.0]), means=rng.uniform(-1, 1, (1, 4)),
                         variances=rng.uniform(0.5, 2.0, (1, 4)))
        x = rng.uniform(-2, 2, 4)
        assert gmm_log_likelihood(x, model) == pytest.approx(
            component_log_density(x, 0, model), abs=1e-12
        )

    def test_identical_components_collapse(self):
        """Two copies of the same Gaussian at weights 0.5/0.5 score like one."""
        mean = np.array([[0.3, -0.7]])
        var = np.array([[1.2, 0.8]])
        single = GmmModel(weights=np.array([1.0]), means=mean, variances=var)
        double = GmmModel(weights=np.array([0.5, 0.5]),
                          means=np.vstack([mean, mean]),
                          variances=np.vstack([var, var]))
        x = np.array([1.0, 1.0])
        assert gmm_log_likelihood(x, double) == pytest.approx(
            gmm_log_likelihood(x, single), abs=1e-12
        )

    def test_matches_linear_domain(self):
        """Stable evaluation equals naive linear-domain sums when those
        do not underflow."""
        rng = np.random.default_rng(49)
        checked = 0
        for _ in range(100):
            m, d = 8, 3
            means = rng.uniform(-3, 3, (m, d))
            variances = rng.uniform(0.5, 2.0, (m, d))
            weights = rng.uniform(0.5, 1.5, m)
            weights /= weights.sum()
            model = GmmModel(weights=weights, means=means, variances=variances)
            for x in rng.uniform(-4, 4, (100, d)):
                linear = 0.0
                for i in range(m):
                    dens = np.prod(
                        np.exp(-0.5 * (x - means[i]) ** 2 / variances[i])
                        / np.sqrt(2 * np.pi * variances[i])
                    )
                    linear += weights[i] * dens
                if linear > 1e-290:
                    assert gmm_log_likelihood(x, model) == pytest.approx(
                        np.log(linear), abs=1e-9
                    )
                    checked += 1
        assert checked > 1000

    def test_batch_equals_per_vector(self):
        rng = np.random.default_rng(50)
        model = GmmModel(weights=np.array([0.4, 0.6]),
                         means=rng.uniform(-1, 1, (2, 5)),
                         variances=rng.uniform(0.5, 2.0, (2, 5)))
        xs = rng.uniform(-2, 2, (50, 5))
        batch = gmm_log_likelihoods(xs, model)
        singles = np.array([gmm_log_likelihood(x, model) for x in xs])
        np.testing.assert_array_equal(batch, singles)


class TestEmTrain:
    def test_single_component_one_pass_is_sample_stats(self):
        """One EM pass at M=1 lands on the sample mean and variance
        regardless of the starting point (closed-form maximum likelihood)."""
        rng = np.random.default_rng(51)
        x = rng.standard_normal((500, 3)) * 1.7 + 0.4
        bad_init = GmmModel(weights=np.array([1.0]),
                            means=np.full((1, 3), 9.0),
                            variances=np.full((1, 3), 4.0))
        cfg = TrainingConfig(num_components=1, em_iterations=1)
        model = em_train(x, bad_init, cfg)
        np.testing.assert_allclose(model.means[0], x.mean(axis=0), atol=1e-9)
        np.testing.assert_allclose(model.variances[0], x.var(axis=0), atol=1e-9)
        assert model.weights[0] == pytest.approx(1.0, abs=1e-12)

    def test_log_likelihood_trace_non_decreasing(self):
        rng = np.random.default_rng(52)
        x = rng.standard_normal((400, 4))
        cfg = TrainingConfig(num_components=4, em_iterations=10)
        model = em_train(x, lbg_init(x, 4, cfg), cfg)
        trace = np.asarray(model.em_log_likelihoods)
        assert trace.size == 11
        assert np.all(np.diff(trace) >= -1e-8)

    def test_known_two_component_mixture_recovered(self):
        """Means of a +/-3 two-component 1-D mixture recovered within 0.15."""
        rng = np.random.default_rng(53)
        n = 5000
        labels = rng.random(n) < 0.5
        x = np.where(labels, -3.0, 3.0) + rng.standard_normal(n)
        x = x[:, None]
        cfg = TrainingConfig(num_components=2, em_iterations=10)
        model = em_train(x, lbg_init(x, 2, cfg), cfg)
        got = sorted(model.means.ravel().tolist())
        assert got[0] == pytest.approx(-3.0, abs=0.15)
        assert got[1] == pytest.approx(3.0, abs=0.15)
        assert model.weights[0] == pytest.approx(0.5, abs=0.05)

    def test_constraints_after_training(self):
        """Weights sum to one and variances respect the floor for random
        datasets and all tested model orders."""
        rng = np.random.default_rng(54)
        for m in (2, 4, 8):
            x = rng.standard_normal((30 * m, 5))
            cfg = TrainingConfig(num_components=m, em_iterations=10)
            model = em_train(x, lbg_init(x, m, cfg), cfg)
            floor = variance_floor(x, cfg.variance_floor_factor)
            assert model.weights.sum() == pytest.approx(1.0, abs=1e-9)
            assert np.all(model.weights >= 0)
            assert np.all(model.variances >= floor * (1 - 1e-12))

    def test_permutation_invariance(self):
        """Shuffling the training vectors leaves the model bit-identical:
        accumulation happens in a canonical sorted order internally."""
        rng = np.random.default_rng(55)
        x = rng.standard_normal((300, 3))
        cfg = TrainingConfig(num_components=2, em_iterations=5)
        model_a = em_train(x, lbg_init(x, 2, cfg), cfg)
        perm = rng.permutation(len(x))
        y = x[perm]
        model_b = em_train(y, lbg_init(y, 2, cfg), cfg)
        np.testing.assert_array_equal(model_a.means, model_b.means)
        np.testing.assert_array_equal(model_a.variances, model_b.variances)
        np.testing.assert_array_equal(model_a.weights, model_b.weights)

    def test_warns_on_scarce_data(self):
        rng = np.random.default_rng(56)
        x = rng.standard_normal((20, 2))
        cfg = TrainingConfig(num_components=8, em_iterations=2)
        init = lbg_init(x, 8, cfg)
        with pytest.warns(UserWarning, match="unreliable"):
            em_train(x, init, cfg)

    def test_collapsed_component_recovers(self):
        """A component started far outside the data is re-seeded onto a
        data point instead of killing the run."""
        rng = np.random.default_rng(57)
        x = rng.standard_normal((200, 2))
        init = GmmModel(
            weights=np.array([0.5, 0.5]),
            means=np.array([[0.0, 0.0], [1e6, 1e6]]),
            variances=np.array([[1.0, 1.0], [1e-4, 1e-4]]),
        )
        cfg = TrainingConfig(num_components=2, em_iterations=10)
        model = em_train(x, init, cfg)
        assert np.all(np.abs(model.means) < 10.0)
        assert model.weights.sum() == pytest.approx(1.0, abs=1e-9)

    def test_monotone_across_datasets_and_orders(self):
        """Likelihood never decreases for many random datasets and orders."""
        rng = np.random.default_rng(58)
        for _ in range(10):
            for m in (2, 4):
                x = rng.standard_normal((25 * m, 3)) + rng.uniform(-2, 2, 3)
                cfg = TrainingConfig(num_components=m, em_iterations=10)
                model = em_train(x, lbg_init(x, m, cfg), cfg)
                trace = np.asarray(model.em_log_likelihoods)
                assert np.all(np.diff(trace) >= -1e-8)
