"""Truncated multinomial likelihood terms and the unnormalized target posterior.

A truncated term conditions a multinomial on zero counts over an index set I,
which rescales the off-I probabilities by 1/(1 - sum_{i in I} pi_i). With a
single term the posterior splits conjugately (block mass keeps its prior Beta
law, the off-I block gets the usual count update); with two or more terms of
different truncation patterns no conjugacy holds and sampling requires MCMC.
"""

from __future__ import annotations

from math import fsum, log1p

import numpy as np
from numpy.random import Generator

from .simplex import (
    MAX_COUNT_TOTAL,
    CountVector,
    DirichletParams,
    SimplexPoint,
    multinomial_log_likelihood,
    sample_dirichlet,
    conjugate_posterior,
    _check_same_dim,
)

__all__ = [
    "TruncationSet",
    "TruncatedCounts",
    "ObservationModel",
    "truncated_log_likelihood",
    "posterior_log_density_unnormalized",
    "sample_single_truncation_posterior",
]


class TruncationSet:
    """Set of coordinate indices whose counts are conditioned to zero.

    May be empty (plain multinomial term). Must remain a proper subset of
    the coordinates; that is checked where the dimension is known.
    """

    __slots__ = ("indices", "sorted_indices")

    def __init__(self, indices):
        idx = frozenset(int(i) for i in indices)
        if any(i < 0 for i in idx):
            raise ValueError(f"truncation indices must be nonnegative, got {sorted(idx)}")
        self.indices = idx
        self.sorted_indices = np.array(sorted(idx), dtype=np.intp)

    def __len__(self):
        return len(self.indices)

    def __contains__(self, i):
        return i in self.indices

    def __repr__(self):
        return f"TruncationSet({sorted(self.indices)})"


class TruncatedCounts:
    """One likelihood term: a truncation set plus counts supported off it."""

    __slots__ = ("trunc", "counts", "total")

    def __init__(self, trunc: TruncationSet, counts):
        if not isinstance(counts, CountVector):
            counts = CountVector(counts)
        n = counts.dim
        if len(trunc) >= n:
            raise ValueError(f"truncation set of size {len(trunc)} is not a proper subset of {n} indices")
        if len(trunc) and trunc.sorted_indices[-1] >= n:
            raise ValueError(f"truncation index {trunc.sorted_indices[-1]} out of range for dimension {n}")
        if len(trunc) and np.any(counts.counts[trunc.sorted_indices] != 0):
            raise ValueError("counts must be zero on truncated indices")
        total = counts.total
        if total > MAX_COUNT_TOTAL:
            raise ValueError(f"count total {total} exceeds cap {MAX_COUNT_TOTAL}")
        self.trunc = trunc
        self.counts = counts
        self.total = total

    @property
    def dim(self) -> int:
        return self.counts.dim

    def __repr__(self):
        return f"TruncatedCounts(trunc={sorted(self.trunc.indices)}, counts={list(self.counts.counts)})"


class ObservationModel:
    """Ordered list of truncated count terms of common dimension."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        terms = tuple(terms)
        if not terms:
            raise ValueError("observation model needs at least one term")
        n = terms[0].dim
        for t in terms:
            _check_same_dim(t.dim, n, "term dimensions")
        self.terms = terms

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def __repr__(self):
        return f"ObservationModel({list(self.terms)})"


def truncated_mass(term: TruncatedCounts, pi: SimplexPoint) -> float:
    """sum of pi over the term's truncated indices (exact-rounded sum)."""
    if len(term.trunc) == 0:
        return 0.0
    return fsum(pi.coords[term.trunc.sorted_indices])


def truncated_log_likelihood(term: TruncatedCounts, pi: SimplexPoint) -> float:
    """Log of TruncMult_I(m | pi) = -m_tot*log(1 - s) + sum_{i not in I} m_i log pi_i
    with s the truncated mass. Counted zero coordinates give -inf; s = 1 is a
    precondition violation and raises."""
    _check_same_dim(term.dim, pi.dim, "term vs point")
    s = truncated_mass(term, pi)
    if s >= 1.0:
        raise ValueError(f"truncated mass {s!r} >= 1; likelihood undefined")
    base = multinomial_log_likelihood(term.counts, pi)
    if base == float("-inf"):
        return base
    return base - term.total * log1p(-s)


def posterior_log_density_unnormalized(
    pi: SimplexPoint, alpha: DirichletParams, model: ObservationModel
) -> float:
    """Unnormalized log posterior: Dirichlet prior core (no normalizer) plus
    every truncated term. Boundary policy: zero coordinates follow
    ``dirichlet_log_density`` (-inf unless the exponent vanishes), and a point
    whose truncated mass rounds to 1 for some term is numerically on the
    degenerate face and also maps to -inf, so samplers reject it rather than
    crash."""
    _check_same_dim(pi.dim, alpha.dim, "point vs concentration")
    _check_same_dim(pi.dim, model.dim, "point vs model")
    p = pi.coords
    a = alpha.alpha
    zero = p == 0.0
    if zero.any() and np.any(a[zero] != 1.0):
        return float("-inf")
    live = ~zero
    parts = [fsum((a[live] - 1.0) * np.log(p[live]))]
    for term in model.terms:
        if truncated_mass(term, pi) >= 1.0:
            return float("-inf")
        v = truncated_log_likelihood(term, pi)
        if v == float("-inf"):
            return v
        parts.append(v)
    return fsum(parts)


def sample_single_truncation_posterior(
    alpha: DirichletParams, term, rng: Generator
) -> SimplexPoint:
    """Exact draw from Dir(alpha) * TruncMult_I(m | .) for a single term.

    The likelihood depends on pi only through the renormalized off-I block,
    so the posterior factorizes over (block mass, I-block shape, off-I shape):
    the truncated-block mass keeps its prior Beta(sum alpha_I, sum alpha_notI)
    law, the I-block shape keeps its prior Dir(alpha_I), and the off-I shape
    takes the conjugate update Dir(alpha_notI + m_notI).
    """
    if isinstance(term, ObservationModel):
        if len(term.terms) != 1:
            raise ValueError(f"exact sampler requires exactly one term, model has {len(term.terms)}")
        term = term.terms[0]
    _check_same_dim(alpha.dim, term.dim, "concentration vs term")

    n = alpha.dim
    if len(term.trunc) == 0:
        return sample_dirichlet(conjugate_posterior(alpha, term.counts), rng)

    idx = term.trunc.sorted_indices
    comp = np.setdiff1d(np.arange(n), idx, assume_unique=True)
    a_in = alpha.alpha[idx]
    a_out = alpha.alpha[comp]
    m_out = term.counts.counts[comp]

    s = rng.beta(a_in.sum(), a_out.sum())
    x_in = rng.dirichlet(a_in) if idx.size > 1 else np.ones(1)
    x_out = rng.dirichlet(a_out + m_out) if comp.size > 1 else np.ones(1)

    pi = np.empty(n)
    pi[idx] = s * x_in
    pi[comp] = (1.0 - s) * x_out
    return SimplexPoint(pi)
