import numpy as np
import pytest

from truncdir import (
    CountVector,
    DirichletParams,
    ObservationModel,
    SimplexPoint,
    TruncatedCounts,
    TruncationSet,
    conjugate_posterior,
    dirichlet_log_density,
    multinomial_log_likelihood,
    posterior_log_density_unnormalized,
    sample_dirichlet,
    sample_single_truncation_posterior,
    truncated_log_likelihood,
    truncated_mass,
)


def term(indices, counts):
    return TruncatedCounts(TruncationSet(indices), np.asarray(counts))


class TestConstruction:
    def test_counts_must_vanish_on_truncated_indices(self):
        with pytest.raises(ValueError):
            term([0], [1, 2, 0])

    def test_truncation_must_be_proper_subset(self):
        with pytest.raises(ValueError):
            term([0, 1, 2], [0, 0, 0])

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            term([5], [1, 2, 0])

    def test_empty_truncation_ok(self):
        t = term([], [1, 2, 3])
        assert t.total == 6

    def test_model_needs_consistent_dims(self):
        with pytest.raises(ValueError):
            ObservationModel([term([0], [0, 1]), term([0], [0, 1, 1])])

    def test_model_needs_terms(self):
        with pytest.raises(ValueError):
            ObservationModel([])


class TestTruncatedMass:
    def test_sums_selected_coordinates(self):
        p = SimplexPoint([0.1, 0.2, 0.3, 0.4])
        assert truncated_mass(term([0, 2], [0, 5, 0, 1]), p) == pytest.approx(0.4, abs=1e-15)

    def test_empty_set_is_zero(self):
        assert truncated_mass(term([], [1, 1, 1]), SimplexPoint([0.2, 0.3, 0.5])) == 0.0


class TestTruncatedLogLikelihood:
    def test_empty_truncation_reduces_to_multinomial(self):
        t = term([], [2, 1, 0])
        p = SimplexPoint([0.3, 0.3, 0.4])
        assert truncated_log_likelihood(t, p) == multinomial_log_likelihood(t.counts, p)

    def test_manual_formula(self):
        t = term([0], [0, 2, 1])
        p = SimplexPoint([0.5, 0.3, 0.2])
        expect = 2 * np.log(0.3) + np.log(0.2) - 3 * np.log(0.5)
        assert truncated_log_likelihood(t, p) == pytest.approx(expect, rel=1e-13)

    def test_depends_only_on_renormalized_complement(self):
        # same off-I shape at different truncated masses gives the same value
        t = term([0], [0, 3, 1])
        shape = np.array([0.7, 0.3])
        vals = []
        for s in (0.1, 0.5, 0.9):
            p = SimplexPoint(np.concatenate([[s], (1 - s) * shape]))
            vals.append(truncated_log_likelihood(t, p))
        assert vals[0] == pytest.approx(vals[1], rel=1e-12)
        assert vals[0] == pytest.approx(vals[2], rel=1e-12)

    def test_unit_truncated_mass_raises(self):
        t = term([0], [0, 1, 1])
        with pytest.raises(ValueError):
            truncated_log_likelihood(t, SimplexPoint([1.0, 0.0, 0.0]))

    def test_counted_zero_coordinate(self):
        t = term([0], [0, 1, 0])
        assert truncated_log_likelihood(t, SimplexPoint([0.5, 0.0, 0.5])) == float("-inf")


class TestPosteriorLogDensity:
    def test_is_prior_core_plus_terms(self):
        alpha = DirichletParams([2.0, 1.5, 3.0])
        model = ObservationModel([term([0], [0, 2, 0]), term([1], [1, 0, 1])])
        p = SimplexPoint([0.25, 0.35, 0.4])
        core = float(np.sum((alpha.alpha - 1) * np.log(p.coords)))
        expect = core + sum(truncated_log_likelihood(t, p) for t in model.terms)
        got = posterior_log_density_unnormalized(p, alpha, model)
        assert got == pytest.approx(expect, rel=1e-12)

    def test_term_order_invariant_to_the_last_bit(self):
        alpha = DirichletParams([2.0, 2.0, 2.0, 2.0])
        terms = [term([0], [0, 2, 1, 0]), term([1], [1, 0, 0, 3]), term([2, 3], [4, 1, 0, 0])]
        p = SimplexPoint([0.1, 0.2, 0.3, 0.4])
        a = posterior_log_density_unnormalized(p, alpha, ObservationModel(terms))
        b = posterior_log_density_unnormalized(p, alpha, ObservationModel(terms[::-1]))
        assert a == b

    def test_boundary_policy(self):
        alpha = DirichletParams([2.0, 2.0, 2.0])
        model = ObservationModel([term([], [0, 1, 1])])
        assert posterior_log_density_unnormalized(
            SimplexPoint([0.0, 0.5, 0.5]), alpha, model
        ) == float("-inf")


class TestSingleTruncationSampler:
    def test_empty_truncation_equals_conjugate_draw(self):
        alpha = DirichletParams([2.0, 3.0, 1.0])
        t = term([], [1, 0, 4])
        got = sample_single_truncation_posterior(alpha, t, np.random.default_rng(21)).coords
        want = sample_dirichlet(
            conjugate_posterior(alpha, CountVector([1, 0, 4])), np.random.default_rng(21)
        ).coords
        assert np.array_equal(got, want)

    def test_truncated_block_mass_keeps_prior_beta_law(self):
        # the likelihood sees only the renormalized complement, so the mass on
        # I stays Beta(sum alpha_I, sum alpha_rest) whatever the counts are
        alpha = DirichletParams([2.0, 1.0, 3.0, 2.0])
        t = term([0, 2], [0, 7, 0, 3])
        rng = np.random.default_rng(8)
        mass = np.array(
            [
                sample_single_truncation_posterior(alpha, t, rng).coords[[0, 2]].sum()
                for _ in range(40000)
            ]
        )
        a, b = 5.0, 3.0
        mean = a / (a + b)
        var = a * b / ((a + b) ** 2 * (a + b + 1))
        assert abs(mass.mean() - mean) < 4 * np.sqrt(var / mass.size)
        assert abs(mass.var() - var) < 0.02 * var

    def test_complement_block_gets_count_update(self):
        alpha = DirichletParams([2.0, 2.0, 2.0])
        t = term([0], [0, 6, 2])
        rng = np.random.default_rng(13)
        draws = np.array(
            [sample_single_truncation_posterior(alpha, t, rng).coords for _ in range(40000)]
        )
        shape = draws[:, 1:] / draws[:, 1:].sum(axis=1, keepdims=True)
        post = np.array([8.0, 4.0])
        mean = post / post.sum()
        var = mean * (1 - mean) / (post.sum() + 1)
        assert np.all(np.abs(shape.mean(axis=0) - mean) < 4 * np.sqrt(var / draws.shape[0]))

    def test_accepts_single_term_model_only(self):
        alpha = DirichletParams([2.0, 2.0, 2.0])
        single = ObservationModel([term([0], [0, 2, 0])])
        p = sample_single_truncation_posterior(alpha, single, np.random.default_rng(0))
        assert p.dim == 3
        double = ObservationModel([term([0], [0, 2, 0]), term([1], [1, 0, 1])])
        with pytest.raises(ValueError):
            sample_single_truncation_posterior(alpha, double, np.random.default_rng(0))
