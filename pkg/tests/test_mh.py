import numpy as np
import pytest

from truncdir import (
    MhConfig,
    MhStats,
    SimplexPoint,
    log_acceptance_ratio,
    mh_step,
    propose,
    run_mh_chain,
    tune_beta,
)
from helpers import flat_alpha, term, two_term_model
from truncdir import ObservationModel


class TestPropose:
    def test_mean_is_current_point(self):
        pi = SimplexPoint([0.2, 0.3, 0.5])
        rng = np.random.default_rng(0)
        draws = np.array([propose(pi, 160.0, rng).coords for _ in range(50000)])
        # Dir(beta*pi) has mean pi and var pi(1-pi)/(beta+1)
        se = np.sqrt(pi.coords * (1 - pi.coords) / 161.0 / draws.shape[0])
        assert np.all(np.abs(draws.mean(axis=0) - pi.coords) < 4 * se)

    def test_large_beta_is_local(self):
        pi = SimplexPoint([0.2, 0.3, 0.5])
        rng = np.random.default_rng(1)
        for _ in range(10):
            prop = propose(pi, 1e8, rng)
            assert np.max(np.abs(prop.coords - pi.coords)) < 1e-3

    def test_requires_positive_beta(self):
        with pytest.raises(ValueError):
            propose(SimplexPoint([0.5, 0.5]), 0.0, np.random.default_rng(0))


class TestAcceptanceRatio:
    def test_identical_points_give_exactly_zero(self):
        alpha = flat_alpha(3)
        model = two_term_model(3)
        pi = SimplexPoint([0.25, 0.35, 0.4])
        assert log_acceptance_ratio(pi, pi, alpha, model, 50.0) == 0.0

    def test_antisymmetric_in_swap(self):
        # r(a->b) * r(b->a) = 1, so the log ratios must cancel
        alpha = flat_alpha(4)
        model = ObservationModel([term([0], [0, 2, 1, 0]), term([1, 3], [1, 0, 2, 0])])
        rng = np.random.default_rng(2)
        for _ in range(50):
            a = SimplexPoint(rng.dirichlet(np.full(4, 2.0)))
            b = SimplexPoint(rng.dirichlet(np.full(4, 2.0)))
            fwd = log_acceptance_ratio(a, b, alpha, model, 80.0)
            back = log_acceptance_ratio(b, a, alpha, model, 80.0)
            assert fwd == pytest.approx(-back, abs=1e-9)


class TestMhStep:
    def test_boundary_current_auto_rejects(self):
        alpha = flat_alpha(3)
        model = two_term_model(3)
        pi = SimplexPoint([0.0, 0.5, 0.5])
        stats = MhStats()
        out, accepted = mh_step(pi, alpha, model, MhConfig(50.0, 0.24, 0), np.random.default_rng(3), stats)
        assert not accepted
        assert out is pi
        assert stats.proposals == 1 and stats.accepts == 0

    def test_counts_proposals_and_accepts(self):
        alpha = flat_alpha(3)
        model = two_term_model(3)
        rng = np.random.default_rng(4)
        stats = MhStats()
        pi = SimplexPoint(rng.dirichlet(alpha.alpha))
        for _ in range(500):
            pi, _ = mh_step(pi, alpha, model, MhConfig(10.0, 0.24, 0), rng, stats)
        assert stats.proposals == 500
        assert 0 < stats.accepts < 500


class TestTuneBeta:
    def test_settles_near_target(self):
        alpha = flat_alpha(3)
        model = two_term_model(3)
        beta, stats = tune_beta(alpha, model, MhConfig(10.0, 0.24, 5000), np.random.default_rng(5))
        trace = run_mh_chain(alpha, model, None, 5000, MhConfig(beta, 0.24, 0), np.random.default_rng(6))
        rate = trace.metadata["stats"]["acceptance_rate"]
        assert 0.14 < rate < 0.34
        assert stats.current_beta == beta

    def test_fixed_point_is_stable(self):
        # starting at the tuned value, a second schedule should not wander far
        alpha = flat_alpha(3)
        model = two_term_model(3)
        beta1, _ = tune_beta(alpha, model, MhConfig(10.0, 0.24, 5000), np.random.default_rng(7))
        beta2, _ = tune_beta(alpha, model, MhConfig(beta1, 0.24, 5000), np.random.default_rng(8))
        assert 0.5 < beta2 / beta1 < 2.0


class TestRunMhChain:
    def test_zero_count_model_samples_prior(self):
        alpha = flat_alpha(3)
        model = ObservationModel([term([0], [0, 0, 0])])
        trace = run_mh_chain(alpha, model, None, 30000, MhConfig(5.0, 0.24, 0), np.random.default_rng(9))
        kept = trace.samples[15000:]
        mean = alpha.alpha / alpha.total
        var = mean * (1 - mean) / (alpha.total + 1)
        # correlated draws: batch-mean spread instead of iid standard error
        batches = kept.reshape(30, -1, 3).mean(axis=1)
        se = batches.std(axis=0, ddof=1) / np.sqrt(batches.shape[0])
        assert np.all(np.abs(kept.mean(axis=0) - mean) < 4 * np.maximum(se, 1e-4))
        assert np.all(np.abs(kept.var(axis=0) - var) < 0.1 * var)

    def test_reproducible_under_seed(self):
        alpha = flat_alpha(3)
        model = two_term_model(3)
        cfg = MhConfig(30.0, 0.24, 0)
        a = run_mh_chain(alpha, model, None, 100, cfg, np.random.default_rng(10))
        b = run_mh_chain(alpha, model, None, 100, cfg, np.random.default_rng(10))
        assert np.array_equal(a.samples, b.samples)

    def test_inline_tuning_records_and_freezes(self):
        alpha = flat_alpha(3)
        model = two_term_model(3)
        trace = run_mh_chain(alpha, model, None, 500, MhConfig(10.0, 0.24, 1000), np.random.default_rng(11))
        md = trace.metadata
        assert md["adapt_steps"] == 1000
        assert "tuning" in md
        assert md["beta"] != 10.0
        assert md["stats"]["proposals"] == 500  # tuning steps not counted in the frozen stats

    def test_rejected_steps_repeat_the_state(self):
        alpha = flat_alpha(3)
        model = two_term_model(3)
        # very diffuse proposal rejects often; consecutive equal rows must appear
        trace = run_mh_chain(alpha, model, None, 400, MhConfig(0.5, 0.24, 0), np.random.default_rng(12))
        repeats = np.all(trace.samples[1:] == trace.samples[:-1], axis=1)
        assert repeats.any()
