"""Shared test utilities: model builders and a two-sample chi-square check."""

import numpy as np
import scipy.stats

from truncdir import DirichletParams, ObservationModel, TruncatedCounts, TruncationSet


def term(indices, counts):
    return TruncatedCounts(TruncationSet(indices), np.asarray(counts))


def two_term_model(n: int) -> ObservationModel:
    """I={0} with two counts on component 1, I={1} with counts on 0 and 2,
    zero-padded to dimension n."""
    m1 = np.zeros(n, dtype=np.int64)
    m1[1] = 2
    m2 = np.zeros(n, dtype=np.int64)
    m2[0] = 1
    m2[2] = 1
    return ObservationModel([term([0], m1), term([1], m2)])


def flat_alpha(n: int, value: float = 2.0) -> DirichletParams:
    return DirichletParams(np.full(n, value))


def merge_sparse_bins(c1: np.ndarray, c2: np.ndarray, min_expected: float = 5.0):
    """Merge adjacent bins until both samples expect at least ``min_expected``
    per bin under the pooled rate. Returns the merged count arrays."""
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    n1, n2 = c1.sum(), c2.sum()
    pooled = c1 + c2
    out1, out2 = [], []
    acc1 = acc2 = accp = 0.0
    for a, b, p in zip(c1, c2, pooled):
        acc1 += a
        acc2 += b
        accp += p
        if accp * n1 / (n1 + n2) >= min_expected and accp * n2 / (n1 + n2) >= min_expected:
            out1.append(acc1)
            out2.append(acc2)
            acc1 = acc2 = accp = 0.0
    if accp > 0:
        if out1:
            out1[-1] += acc1
            out2[-1] += acc2
        else:
            out1.append(acc1)
            out2.append(acc2)
    return np.asarray(out1), np.asarray(out2)


def two_sample_chi2_pvalue(sample1, sample2) -> float:
    """Homogeneity chi-square for two integer-valued samples.

    Bins are the observed support; sparse bins are merged so every bin
    expects >= 5 in both samples.
    """
    lo = int(min(sample1.min(), sample2.min()))
    hi = int(max(sample1.max(), sample2.max()))
    edges = np.arange(lo, hi + 2)
    c1, _ = np.histogram(sample1, bins=edges)
    c2, _ = np.histogram(sample2, bins=edges)
    c1, c2 = merge_sparse_bins(c1, c2)
    if len(c1) < 2:
        return 1.0
    n1, n2 = c1.sum(), c2.sum()
    k1, k2 = np.sqrt(n2 / n1), np.sqrt(n1 / n2)
    with np.errstate(invalid="ignore", divide="ignore"):
        contrib = (k1 * c1 - k2 * c2) ** 2 / (c1 + c2)
    stat = float(np.nansum(contrib))
    return float(scipy.stats.chi2.sf(stat, len(c1) - 1))
