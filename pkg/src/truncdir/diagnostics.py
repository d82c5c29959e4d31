"""Chain-quality metrics: burn-in slicing, autocorrelation, projected
multivariate PSRF (R-hat), and statistic-convergence error curves.

Simplex samples live on an (n-1)-dimensional affine subspace, so the raw
n x n within-chain covariance is singular and R-hat is incalculable. All
second-moment work therefore happens after projecting through an orthonormal
basis of the subspace orthogonal to the all-ones direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .trace import ChainEnsemble, ChainTrace

__all__ = [
    "ProjectionBasis",
    "MpsrfResult",
    "MpsrfSingularError",
    "StatisticConvergence",
    "burn_in_slice",
    "autocorrelation",
    "projection_basis",
    "mpsrf",
    "statistic_convergence",
]


class MpsrfSingularError(RuntimeError):
    """Within-chain covariance is singular even after projection."""


@dataclass
class ProjectionBasis:
    """Orthonormal n x (n-1) basis of the zero-sum subspace."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        n, m = q.shape
        if m != n - 1:
            raise ValueError(f"basis must be n x (n-1), got {q.shape}")
        if np.max(np.abs(q.T @ q - np.eye(m))) > 1e-12:
            raise ValueError("basis columns are not orthonormal")
        if np.max(np.abs(q.T @ np.ones(n))) > 1e-12:
            raise ValueError("basis columns are not orthogonal to the all-ones vector")
        self.q = q


@dataclass
class MpsrfResult:
    """Projected covariance pieces and the scalar R-hat.

    ``retained`` is the number of samples per chain that entered the
    statistic (the kept half up to the evaluation index); the T in the
    pooled-covariance formula refers to this count.
    """

    w: np.ndarray
    b_over_t: np.ndarray
    v_hat: np.ndarray
    r_hat: float
    retained: int
    n_chains: int
    jittered: bool = False

    def coordinate_psrf(self) -> np.ndarray:
        """Univariate V-hat/W ratios along each projected coordinate.

        Same convention as ``r_hat`` (no square root); ``r_hat`` bounds the
        ratio over every projection direction, so these sit at or below it.
        """
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.diag(self.v_hat) / np.diag(self.w)


def burn_in_slice(trace_or_samples, t: int) -> np.ndarray:
    """Samples with indices in [floor(t/2), t): the retained half up to t."""
    samples = trace_or_samples.samples if isinstance(trace_or_samples, ChainTrace) else np.asarray(trace_or_samples)
    if not 1 <= t <= samples.shape[0]:
        raise ValueError(f"t must be in [1, {samples.shape[0]}], got {t}")
    return samples[t // 2 : t]


def autocorrelation(trace: ChainTrace, component: int, lags, t: int | None = None) -> np.ndarray:
    """Biased sample autocorrelation of one component over the retained slice.

    rho(L) = sum_s (x_s - xbar)(x_{s+L} - xbar) / sum_s (x_s - xbar)^2.
    A constant series has no defined autocorrelation and yields NaN per lag.
    """
    t = trace.length if t is None else t
    x = burn_in_slice(trace, t)[:, component]
    lags = np.asarray(lags, dtype=int)
    if np.any(lags < 0):
        raise ValueError("lags must be nonnegative")
    n = x.size
    if np.any(lags >= n):
        raise ValueError(f"max lag {lags.max()} must be below retained length {n}")
    if np.all(x == x[0]):
        # constant series: centering leaves only rounding residue, which
        # would masquerade as structure
        return np.full(lags.shape, np.nan)
    xc = x - x.mean()
    denom = float(np.dot(xc, xc))
    if denom == 0.0:
        return np.full(lags.shape, np.nan)
    out = np.empty(lags.shape)
    for i, lag in enumerate(lags):
        out[i] = np.dot(xc[: n - lag], xc[lag:]) / denom
    return out


def projection_basis(n: int) -> ProjectionBasis:
    """Orthonormal basis from the QR factorization of the n x (n-1) matrix
    with -(n-1) on the diagonal and ones elsewhere; signs fixed by a positive
    R diagonal so the basis is unique."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    f = np.ones((n, n - 1))
    f[np.diag_indices(n - 1)] = -(n - 1)
    q, r = np.linalg.qr(f, mode="reduced")
    flip = np.sign(np.diag(r))
    flip[flip == 0] = 1.0
    return ProjectionBasis(q * flip)


def _symmetrize(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2.0


def mpsrf(ensemble: ChainEnsemble, t: int, basis: ProjectionBasis | None = None) -> MpsrfResult:
    """Multivariate potential scale reduction factor at sample index t.

    Retained slices are projected through the zero-sum basis; W is the mean
    within-chain sample covariance (divisor T-1 per chain), B/T the sample
    covariance of chain means about the grand mean (divisor M-1), and

        V = (T-1)/T * W + (1 + 1/M) * B/T,

    with R-hat the largest generalized eigenvalue of (V, W). A singular W is
    retried once with a 1e-12-scale diagonal jitter (flagged in the result)
    and raises if still unusable.
    """
    m = ensemble.n_chains
    if m < 2:
        raise ValueError(f"MPSRF needs at least 2 chains, got {m}")
    q = (basis or projection_basis(ensemble.dim)).q
    projected = [burn_in_slice(c, t) @ q for c in ensemble.chains]
    t_ret = projected[0].shape[0]
    if t_ret < 2:
        raise ValueError(f"retained length must be >= 2, got {t_ret}")

    d = q.shape[1]
    w = np.zeros((d, d))
    means = np.empty((m, d))
    for j, y in enumerate(projected):
        w += np.cov(y, rowvar=False, ddof=1)
        means[j] = y.mean(axis=0)
    w = _symmetrize(w / m)
    b_over_t = _symmetrize(np.atleast_2d(np.cov(means, rowvar=False, ddof=1)))
    v_hat = _symmetrize((t_ret - 1) / t_ret * w + (1.0 + 1.0 / m) * b_over_t)

    # eigh's Cholesky does not reliably reject a W made of rounding noise
    # (constant chains give ~1e-33 entries), so test conditioning explicitly;
    # projected samples are bounded by 1, making the absolute floor safe
    def _usable(mat: np.ndarray) -> bool:
        ev = np.linalg.eigvalsh(mat)
        return bool(ev[0] > 0 and ev[-1] > 1e-28 and ev[0] > 1e-13 * ev[-1])

    jittered = False
    w_use = w
    if not _usable(w_use):
        jittered = True
        w_use = w + (1e-12 * np.trace(w) / d) * np.eye(d)
        if not _usable(w_use):
            raise MpsrfSingularError(
                f"within-chain covariance singular after projection "
                f"(retained={t_ret}, chains={m}, trace(W)={np.trace(w):.3e})"
            )
    try:
        eigvals = scipy.linalg.eigh(v_hat, w_use, eigvals_only=True)
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as err:
        raise MpsrfSingularError(
            f"generalized eigenproblem failed (retained={t_ret}, chains={m})"
        ) from err
    return MpsrfResult(
        w=w,
        b_over_t=b_over_t,
        v_hat=v_hat,
        r_hat=float(eigvals[-1]),
        retained=t_ret,
        n_chains=m,
        jittered=jittered,
    )


@dataclass
class StatisticConvergence:
    """Per-checkpoint l2 errors of componentwise mean/variance estimates.

    ``mean_errors`` and ``var_errors`` are (checkpoints x chains) matrices;
    the summary properties collapse the chain axis the way the figures do
    (solid mean line, dashed 10th/90th percentile lines).
    """

    checkpoints: np.ndarray
    mean_errors: np.ndarray
    var_errors: np.ndarray
    reference_mean: np.ndarray
    reference_var: np.ndarray

    @staticmethod
    def _summary(errors: np.ndarray) -> dict:
        return {
            "mean": errors.mean(axis=1),
            "p10": np.percentile(errors, 10, axis=1),
            "p90": np.percentile(errors, 90, axis=1),
        }

    @property
    def mean_error_summary(self) -> dict:
        return self._summary(self.mean_errors)

    @property
    def var_error_summary(self) -> dict:
        return self._summary(self.var_errors)


def statistic_convergence(
    ensemble: ChainEnsemble,
    reference_mean,
    reference_var,
    checkpoints,
) -> StatisticConvergence:
    """l2 distance of each chain's retained-slice mean/variance estimates
    from reference vectors, evaluated at each checkpoint index."""
    ref_mean = np.asarray(reference_mean, dtype=float)
    ref_var = np.asarray(reference_var, dtype=float)
    cps = np.asarray(checkpoints, dtype=int)
    if np.any(cps < 2) or np.any(cps > ensemble.length):
        raise ValueError(f"checkpoints must be in [2, {ensemble.length}], got {cps}")
    if ref_mean.shape != (ensemble.dim,) or ref_var.shape != (ensemble.dim,):
        raise ValueError("reference vectors must match the chain dimension")

    mean_err = np.empty((cps.size, ensemble.n_chains))
    var_err = np.empty((cps.size, ensemble.n_chains))
    for ci, t in enumerate(cps):
        for j, chain in enumerate(ensemble.chains):
            kept = burn_in_slice(chain, int(t))
            mean_err[ci, j] = np.linalg.norm(kept.mean(axis=0) - ref_mean)
            var_err[ci, j] = np.linalg.norm(kept.var(axis=0, ddof=1) - ref_var)
    return StatisticConvergence(cps, mean_err, var_err, ref_mean, ref_var)
