"""Brute-force posterior ground truth on a low-dimensional simplex mesh.

The simplex is cut into resolution**(n-1) equal-volume cells (the standard
simplicial subdivision, enumerated through the sorted-coordinates image of
the unit cube) and the unnormalized posterior is evaluated at every cell
centroid. Midpoint-style nodes keep every evaluation strictly interior, so
concentrations below 1 never touch the boundary divergence. Normalization,
means, and variances follow by log-sum-exp over the grid.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.special import logsumexp

from .model import ObservationModel
from .simplex import DirichletParams
from .trace import ChainEnsemble, ChainTrace
from .diagnostics import burn_in_slice

__all__ = [
    "SimplexGrid",
    "GridPosterior",
    "MomentComparison",
    "build_grid",
    "grid_posterior",
    "compare_moments",
]

MAX_GRID_DIM = 4


@dataclass
class SimplexGrid:
    """Centroid nodes of an equal-volume simplicial subdivision.

    ``points`` is (N, n) with N = resolution**(n-1); ``weight`` is the cell
    volume in the projected (first n-1 coordinates) Lebesgue measure, the
    measure the Dirichlet normalizer is written in.
    """

    n: int
    resolution: int
    points: np.ndarray
    weight: float


@dataclass
class GridPosterior:
    """Unnormalized log-density per node plus grid-integrated summaries."""

    grid: SimplexGrid
    log_density: np.ndarray
    log_normalizer: float
    mean: np.ndarray
    variance: np.ndarray

    def node_probabilities(self) -> np.ndarray:
        """Normalized node masses; sums to 1 by construction."""
        p = np.exp(self.log_density - logsumexp(self.log_density))
        return p / p.sum()


def build_grid(n: int, resolution: int) -> SimplexGrid:
    """Enumerate the centroids of the simplicial subdivision of the simplex.

    Cells are images of Kuhn simplices of the cube grid on the sorted-
    coordinate representation t_1 <= ... <= t_{n-1}; a cell belongs to the
    grid exactly when its centroid satisfies the ordering. Points come out
    in a fixed lexicographic order, so reductions over them are
    deterministic.
    """
    if not 2 <= n <= MAX_GRID_DIM:
        raise ValueError(f"grid supports 2 <= n <= {MAX_GRID_DIM}, got {n}")
    if resolution < 1:
        raise ValueError(f"resolution must be >= 1, got {resolution}")
    d = n - 1
    h = resolution
    # Centroid offsets of the Kuhn simplex for each axis ordering: the axis
    # added first accumulates in d of the d+1 vertices, the next in d-1, ...
    perms = list(itertools.permutations(range(d)))
    offsets = np.empty((len(perms), d))
    for pi_i, perm in enumerate(perms):
        for j, axis in enumerate(perm):
            offsets[pi_i, axis] = (d - j) / (d + 1)

    corners = np.array(list(itertools.product(range(h), repeat=d)), dtype=float)
    # t-candidates: (cubes, perms, d) -> filter rows with sorted coordinates
    t = (corners[:, None, :] + offsets[None, :, :]) / h
    t = t.reshape(-1, d)
    if d > 1:
        t = t[np.all(np.diff(t, axis=1) > 0, axis=1)]
    # map sorted representation back to simplex coordinates by differencing
    pts = np.empty((t.shape[0], n))
    pts[:, 0] = t[:, 0]
    if d > 1:
        pts[:, 1:d] = np.diff(t, axis=1)
    pts[:, d] = 1.0 - t[:, -1]
    weight = 1.0 / (h**d * factorial(d))
    return SimplexGrid(n=n, resolution=h, points=pts, weight=weight)


def _log_density_on_grid(points: np.ndarray, alpha: DirichletParams, model: ObservationModel | None) -> np.ndarray:
    logp = np.log(points)
    out = logp @ (alpha.alpha - 1.0)
    if model is None:
        return out
    for term in model.terms:
        out += logp @ term.counts.counts
        idx = term.trunc.sorted_indices
        if idx.size and term.total:
            s = points[:, idx].sum(axis=1)
            if np.any(s >= 1.0):
                raise ValueError("grid node with truncated mass >= 1")
            out -= term.total * np.log1p(-s)
    return out


def grid_posterior(
    alpha: DirichletParams,
    model: ObservationModel | None,
    resolution: int,
) -> GridPosterior:
    """Evaluate the unnormalized posterior on the grid and integrate.

    ``model=None`` evaluates the prior alone. The log-normalizer estimates
    the integral of the unnormalized density in projected Lebesgue measure,
    so for a pure prior it approaches the log Dirichlet normalization
    constant.
    """
    grid = build_grid(alpha.dim, resolution)
    logd = _log_density_on_grid(grid.points, alpha, model)
    lse = float(logsumexp(logd))
    probs = np.exp(logd - lse)
    probs /= probs.sum()
    mean = probs @ grid.points
    second = probs @ grid.points**2
    return GridPosterior(
        grid=grid,
        log_density=logd,
        log_normalizer=lse + np.log(grid.weight),
        mean=mean,
        variance=second - mean**2,
    )


@dataclass
class MomentComparison:
    """Componentwise deviation of sampler moments from grid moments, with
    Monte Carlo standard errors for a pass/fail call at a given tolerance."""

    mean_deviation: np.ndarray
    var_deviation: np.ndarray
    mean_se: np.ndarray
    var_se: np.ndarray
    retained: int

    def within(self, mean_tol: float, var_tol: float | None = None, n_se: float = 3.0) -> bool:
        """True when every deviation is below max(tolerance, n_se * SE)."""
        ok_mean = np.all(self.mean_deviation <= np.maximum(mean_tol, n_se * self.mean_se))
        if var_tol is None:
            return bool(ok_mean)
        ok_var = np.all(self.var_deviation <= np.maximum(var_tol, n_se * self.var_se))
        return bool(ok_mean and ok_var)


def _chain_moments(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return samples.mean(axis=0), samples.var(axis=0, ddof=1)


def compare_moments(grid_result: GridPosterior, traces, t: int | None = None) -> MomentComparison:
    """Compare pooled retained-sample moments against grid moments.

    For an ensemble, standard errors come from the spread of per-chain
    estimates; for a single trace, from batch means over 20 batches.
    """
    if isinstance(traces, ChainTrace):
        traces = ChainEnsemble([traces])
    t = traces.length if t is None else t
    kept = [burn_in_slice(c, t) for c in traces.chains]
    if kept[0].shape[1] != grid_result.grid.n:
        raise ValueError("sample dimension does not match grid dimension")
    pooled = np.concatenate(kept, axis=0)
    pooled_mean, pooled_var = _chain_moments(pooled)

    m = len(kept)
    if m >= 2:
        per_mean = np.stack([k.mean(axis=0) for k in kept])
        per_var = np.stack([k.var(axis=0, ddof=1) for k in kept])
        mean_se = per_mean.std(axis=0, ddof=1) / np.sqrt(m)
        var_se = per_var.std(axis=0, ddof=1) / np.sqrt(m)
    else:
        batches = np.array_split(kept[0], 20, axis=0)
        per_mean = np.stack([b.mean(axis=0) for b in batches])
        per_var = np.stack([b.var(axis=0, ddof=1) for b in batches])
        mean_se = per_mean.std(axis=0, ddof=1) / np.sqrt(len(batches))
        var_se = per_var.std(axis=0, ddof=1) / np.sqrt(len(batches))

    return MomentComparison(
        mean_deviation=np.abs(pooled_mean - grid_result.mean),
        var_deviation=np.abs(pooled_var - grid_result.variance),
        mean_se=mean_se,
        var_se=var_se,
        retained=pooled.shape[0],
    )
