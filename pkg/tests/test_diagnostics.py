import numpy as np
import pytest

from truncdir import (
    ChainEnsemble,
    ChainTrace,
    MpsrfSingularError,
    ProjectionBasis,
    autocorrelation,
    burn_in_slice,
    mpsrf,
    projection_basis,
    statistic_convergence,
)


def make_trace(samples):
    samples = np.asarray(samples, dtype=float)
    return ChainTrace(samples, np.arange(1.0, samples.shape[0] + 1.0))


def random_simplex_chain(rng, length, n=3, alpha=2.0):
    return make_trace(rng.dirichlet(np.full(n, alpha), size=length))


class TestBurnIn:
    def test_keeps_second_half(self):
        tr = make_trace(np.tile(np.eye(1, 4, 0), (10, 1)) * 0 + 0.25)
        kept = burn_in_slice(tr, 10)
        assert kept.shape[0] == 5
        kept = burn_in_slice(tr, 5)
        assert kept.shape[0] == 3  # indices 2,3,4

    def test_bounds_checked(self):
        tr = random_simplex_chain(np.random.default_rng(0), 10)
        with pytest.raises(ValueError):
            burn_in_slice(tr, 0)
        with pytest.raises(ValueError):
            burn_in_slice(tr, 11)


class TestAutocorrelation:
    def test_lag_zero_is_exactly_one(self):
        tr = random_simplex_chain(np.random.default_rng(1), 500)
        rho = autocorrelation(tr, 0, [0, 1, 2])
        assert rho[0] == 1.0

    def test_white_noise_stays_small(self):
        tr = random_simplex_chain(np.random.default_rng(2), 4000)
        rho = autocorrelation(tr, 1, range(1, 20))
        # retained length 2000: iid null fluctuation is ~1/sqrt(N)
        assert np.all(np.abs(rho) < 4 / np.sqrt(2000))

    def test_alternating_series_closed_form(self):
        # x_t = c + (-1)^t d has biased-estimator rho(1) = -(N-1)/N exactly
        length = 400
        x = 0.25 + 0.1 * (-1.0) ** np.arange(length)
        samples = np.column_stack([x, 0.5 - x / 2, 0.5 - x / 2])
        tr = make_trace(samples / samples.sum(axis=1, keepdims=True))
        rho = autocorrelation(tr, 0, [1], t=length)
        n_ret = length - length // 2
        assert rho[0] == pytest.approx(-(n_ret - 1) / n_ret, abs=1e-12)

    def test_constant_series_is_nan(self):
        samples = np.tile([0.2, 0.3, 0.5], (100, 1))
        rho = autocorrelation(make_trace(samples), 0, [0, 1])
        assert np.all(np.isnan(rho))

    def test_lag_must_fit_retained_window(self):
        tr = random_simplex_chain(np.random.default_rng(3), 100)
        with pytest.raises(ValueError):
            autocorrelation(tr, 0, [50])  # retained window is 50 long


class TestProjectionBasis:
    def test_orthonormal_and_sum_free(self):
        for n in (2, 3, 7, 12):
            q = projection_basis(n).q
            assert q.shape == (n, n - 1)
            np.testing.assert_allclose(q.T @ q, np.eye(n - 1), atol=1e-13)
            np.testing.assert_allclose(q.T @ np.ones(n), 0.0, atol=1e-13)

    def test_two_dimensional_case(self):
        q = projection_basis(2).q
        np.testing.assert_allclose(np.abs(q[:, 0]), 1 / np.sqrt(2), atol=1e-14)
        assert q[0, 0] * q[1, 0] < 0

    def test_deterministic(self):
        assert np.array_equal(projection_basis(6).q, projection_basis(6).q)

    def test_validation(self):
        with pytest.raises(ValueError):
            ProjectionBasis(np.eye(3))
        with pytest.raises(ValueError):
            ProjectionBasis(np.eye(3)[:, :2])  # columns not sum-free


class TestMpsrf:
    def test_identical_chains_hit_closed_form(self):
        tr = random_simplex_chain(np.random.default_rng(4), 1000)
        ens = ChainEnsemble([tr, make_trace(tr.samples.copy()), make_trace(tr.samples.copy())])
        for t in (10, 100, 1000):
            res = mpsrf(ens, t)
            t_ret = t - t // 2
            assert res.r_hat == pytest.approx((t_ret - 1) / t_ret, abs=1e-10)
            assert res.retained == t_ret

    def test_iid_chains_near_one(self):
        rng = np.random.default_rng(5)
        ens = ChainEnsemble([random_simplex_chain(rng, 2000, n=10) for _ in range(10)])
        res = mpsrf(ens, 2000)
        assert 0.999 <= res.r_hat <= 1.05

    def test_coordinate_psrf_bounded_by_r_hat(self):
        rng = np.random.default_rng(15)
        ens = ChainEnsemble([random_simplex_chain(rng, 500, n=5) for _ in range(6)])
        res = mpsrf(ens, 500)
        coord = res.coordinate_psrf()
        assert coord.shape == (4,)
        # r_hat maximizes the V-hat/W ratio over all directions
        assert np.all(coord <= res.r_hat + 1e-12)

    def test_coordinate_psrf_identical_chains_closed_form(self):
        tr = random_simplex_chain(np.random.default_rng(16), 200)
        ens = ChainEnsemble([tr, make_trace(tr.samples.copy())])
        res = mpsrf(ens, 200)
        t_ret = res.retained
        np.testing.assert_allclose(
            res.coordinate_psrf(), (t_ret - 1) / t_ret, atol=1e-10
        )

    def test_chain_permutation_invariant(self):
        rng = np.random.default_rng(6)
        chains = [random_simplex_chain(rng, 400) for _ in range(5)]
        a = mpsrf(ChainEnsemble(chains), 400).r_hat
        b = mpsrf(ChainEnsemble(chains[::-1]), 400).r_hat
        assert a == b

    def test_basis_choice_does_not_matter(self):
        # generalized eigenvalues are invariant under any change of basis of
        # the projected space
        rng = np.random.default_rng(7)
        ens = ChainEnsemble([random_simplex_chain(rng, 600, n=4) for _ in range(4)])
        q = projection_basis(4).q
        rot, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        alt = ProjectionBasis(q @ rot)
        a = mpsrf(ens, 600).r_hat
        b = mpsrf(ens, 600, basis=alt).r_hat
        assert a == pytest.approx(b, abs=1e-10)

    def test_matches_scalar_psrf_in_two_dimensions(self):
        # n=2 projects to one dimension; compare against a direct scalar
        # implementation of the same estimator
        rng = np.random.default_rng(8)
        chains = [random_simplex_chain(rng, 800, n=2) for _ in range(4)]
        res = mpsrf(ChainEnsemble(chains), 800)

        q = projection_basis(2).q[:, 0]
        proj = np.array([burn_in_slice(c, 800) @ q for c in chains])
        t_ret = proj.shape[1]
        w = proj.var(axis=1, ddof=1).mean()
        b_over_t = proj.mean(axis=1).var(ddof=1)
        v_hat = (t_ret - 1) / t_ret * w + (1 + 1 / len(chains)) * b_over_t
        assert res.r_hat == pytest.approx(v_hat / w, abs=1e-10)

    def test_needs_multiple_chains(self):
        tr = random_simplex_chain(np.random.default_rng(9), 100)
        with pytest.raises(ValueError):
            mpsrf(ChainEnsemble([tr]), 100)

    def test_degenerate_chains_raise_singular(self):
        samples = np.tile([0.2, 0.3, 0.5], (50, 1))
        ens = ChainEnsemble([make_trace(samples), make_trace(samples.copy())])
        with pytest.raises(MpsrfSingularError):
            mpsrf(ens, 50)


class TestStatisticConvergence:
    def test_single_chain_self_reference_final_error_zero(self):
        tr = random_simplex_chain(np.random.default_rng(10), 1000)
        kept = burn_in_slice(tr, 1000)
        conv = statistic_convergence(
            ChainEnsemble([tr]), kept.mean(axis=0), kept.var(axis=0, ddof=1), [250, 500, 1000]
        )
        assert conv.mean_errors[-1, 0] == pytest.approx(0.0, abs=1e-14)
        assert conv.var_errors[-1, 0] == pytest.approx(0.0, abs=1e-14)

    def test_iid_error_decays_at_clt_rate(self):
        rng = np.random.default_rng(11)
        n_chains, length = 20, 4096
        ens = ChainEnsemble([random_simplex_chain(rng, length) for _ in range(n_chains)])
        checkpoints = [64, 128, 256, 512, 1024, 2048, 4096]
        true_mean = np.full(3, 1 / 3)
        true_var = np.full(3, (1 / 3) * (2 / 3) / 7.0)
        conv = statistic_convergence(ens, true_mean, true_var, checkpoints)
        avg = conv.mean_errors.mean(axis=1)
        slope = np.polyfit(np.log(checkpoints), np.log(avg), 1)[0]
        assert -0.7 < slope < -0.3

    def test_summary_shapes(self):
        rng = np.random.default_rng(12)
        ens = ChainEnsemble([random_simplex_chain(rng, 100) for _ in range(3)])
        conv = statistic_convergence(ens, np.full(3, 1 / 3), np.full(3, 0.03), [50, 100])
        assert conv.mean_errors.shape == (2, 3)
        summary = conv.mean_error_summary
        assert set(summary) == {"mean", "p10", "p90"}
        assert len(summary["mean"]) == 2

    def test_checkpoint_bounds(self):
        ens = ChainEnsemble([random_simplex_chain(np.random.default_rng(13), 50)])
        with pytest.raises(ValueError):
            statistic_convergence(ens, np.full(3, 1 / 3), np.full(3, 0.03), [1])
        with pytest.raises(ValueError):
            statistic_convergence(ens, np.full(3, 1 / 3), np.full(3, 0.03), [60])
