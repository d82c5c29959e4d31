"""Simplex and Dirichlet primitives: densities, sampling, conjugate updates.

All densities are computed and returned in log space. Sums that must be
invariant under coordinate permutations (log-density terms, concentration
totals) are accumulated with ``math.fsum``, which is exactly rounded and
therefore order-independent.
"""

from __future__ import annotations

from math import fsum

import numpy as np
from numpy.random import Generator
from scipy.special import gammaln

__all__ = [
    "SimplexPoint",
    "DirichletParams",
    "CountVector",
    "SUM_TOLERANCE",
    "dirichlet_log_density",
    "sample_dirichlet",
    "multinomial_log_likelihood",
    "conjugate_posterior",
]

# Maximum allowed |sum(coords) - 1| before a point is rejected instead of
# renormalized.
SUM_TOLERANCE = 1e-9

# Observed count totals are capped so that augmented-count sums stay exact
# in 64-bit integers.
MAX_COUNT_TOTAL = 2**32


class SimplexPoint:
    """A probability vector on the simplex.

    Coordinates must be nonnegative and sum to 1 within ``SUM_TOLERANCE``;
    construction renormalizes the small residual so downstream code can rely
    on an exact-to-rounding unit sum. Zero coordinates are allowed (boundary
    points); density code decides how to treat them.
    """

    __slots__ = ("coords",)

    def __init__(self, coords):
        c = np.asarray(coords, dtype=float)
        if c.ndim != 1 or c.size < 2:
            raise ValueError(f"simplex point must be a vector of length >= 2, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("simplex point has non-finite coordinates")
        if np.any(c < 0):
            raise ValueError(f"simplex point has negative coordinates: {c}")
        # fsum is exactly rounded, so the divisor (and hence every renormalized
        # coordinate) is identical under any permutation of the input
        s = fsum(c)
        if abs(s - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"coordinates sum to {s!r}, outside tolerance {SUM_TOLERANCE}")
        c = c / s
        c.flags.writeable = False
        self.coords = c

    @property
    def dim(self) -> int:
        return self.coords.size

    def __repr__(self):
        return f"SimplexPoint({np.array2string(self.coords, separator=', ')})"


class DirichletParams:
    """Concentration vector of a Dirichlet distribution; all components > 0."""

    __slots__ = ("alpha",)

    def __init__(self, alpha):
        a = np.asarray(alpha, dtype=float)
        if a.ndim != 1 or a.size < 2:
            raise ValueError(f"concentration must be a vector of length >= 2, got shape {a.shape}")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise ValueError(f"concentration components must be strictly positive, got {a}")
        a = a.copy()
        a.flags.writeable = False
        self.alpha = a

    @property
    def dim(self) -> int:
        return self.alpha.size

    @property
    def total(self) -> float:
        return fsum(self.alpha)

    def mean(self) -> np.ndarray:
        return self.alpha / self.total

    def __repr__(self):
        return f"DirichletParams({np.array2string(self.alpha, separator=', ')})"


class CountVector:
    """Nonnegative integer counts, one per simplex coordinate."""

    __slots__ = ("counts",)

    def __init__(self, counts):
        c = np.asarray(counts)
        if c.ndim != 1 or c.size < 2:
            raise ValueError(f"count vector must have length >= 2, got shape {c.shape}")
        if not np.issubdtype(c.dtype, np.integer):
            cf = np.asarray(counts, dtype=float)
            if np.any(cf != np.floor(cf)):
                raise ValueError(f"counts must be integers, got {counts}")
            c = cf.astype(np.int64)
        else:
            c = c.astype(np.int64)
        if np.any(c < 0):
            raise ValueError(f"counts must be nonnegative, got {c}")
        c.flags.writeable = False
        self.counts = c

    @property
    def dim(self) -> int:
        return self.counts.size

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __repr__(self):
        return f"CountVector({np.array2string(self.counts, separator=', ')})"


def _check_same_dim(a: int, b: int, what: str):
    if a != b:
        raise ValueError(f"dimension mismatch: {what} ({a} vs {b})")


def dirichlet_log_density(pi: SimplexPoint, alpha: DirichletParams) -> float:
    """Log of the Dirichlet density at ``pi``, including the normalizer.

    Boundary policy: any zero coordinate yields ``-inf`` (never an exception),
    so an MH kernel can treat boundary proposals as automatic rejections. The
    exception is an exactly-one concentration component, whose exponent is
    zero and contributes nothing.
    """
    _check_same_dim(pi.dim, alpha.dim, "point vs concentration")
    p = pi.coords
    a = alpha.alpha
    zero = p == 0.0
    if zero.any() and np.any(a[zero] != 1.0):
        return float("-inf")
    log_norm = float(gammaln(fsum(a))) - fsum(gammaln(a))
    live = ~zero
    core = fsum((a[live] - 1.0) * np.log(p[live]))
    return log_norm + core


def sample_dirichlet(alpha: DirichletParams, rng: Generator) -> SimplexPoint:
    """Draw one sample from Dir(alpha)."""
    return SimplexPoint(rng.dirichlet(alpha.alpha))


def multinomial_log_likelihood(m: CountVector, pi: SimplexPoint) -> float:
    """Multinomial log-likelihood sum(m_i * log pi_i), without the
    combinatorial constant (everything downstream works proportionally)."""
    _check_same_dim(m.dim, pi.dim, "counts vs point")
    c = m.counts
    p = pi.coords
    pos = c > 0
    if np.any(p[pos] == 0.0):
        return float("-inf")
    return fsum(c[pos] * np.log(p[pos]))


def conjugate_posterior(alpha: DirichletParams, m: CountVector) -> DirichletParams:
    """Posterior concentration for a full multinomial observation: alpha + m."""
    _check_same_dim(alpha.dim, m.dim, "concentration vs counts")
    return DirichletParams(alpha.alpha + m.counts)
