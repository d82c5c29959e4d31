"""Metropolis-Hastings baseline on the simplex with a Dir(beta * pi) proposal.

The proposal keeps mean and mode at the current point, larger beta means more
local moves, and samples stay inside the simplex by construction. beta is
adapted only during a burn-in phase (stochastic approximation toward a target
acceptance rate) and then frozen, so the sampling-phase kernel is a fixed,
valid MH kernel.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import exp, sqrt

import numpy as np
from numpy.random import Generator

from .model import ObservationModel, posterior_log_density_unnormalized
from .simplex import DirichletParams, SimplexPoint, dirichlet_log_density, sample_dirichlet
from .trace import ChainTrace

__all__ = [
    "MhConfig",
    "MhStats",
    "propose",
    "log_acceptance_ratio",
    "mh_step",
    "tune_beta",
    "run_mh_chain",
    "ADAPT_BATCH",
    "ADAPT_ETA0",
]

# Adaptation batch size and initial stochastic-approximation step size;
# fixed constants, recorded in trace metadata for reproducibility.
ADAPT_BATCH = 100
ADAPT_ETA0 = 2.0

# |batch acceptance - target| <= this counts as having reached the band.
ACCEPTANCE_BAND = 0.05


@dataclass
class MhConfig:
    """Proposal concentration and tuning policy for the MH kernel."""

    beta: float
    target_acceptance: float = 0.24
    adapt_steps: int = 0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if not 0.0 < self.target_acceptance < 1.0:
            raise ValueError(f"target acceptance must be in (0,1), got {self.target_acceptance}")
        if self.adapt_steps < 0:
            raise ValueError(f"adapt_steps must be >= 0, got {self.adapt_steps}")


@dataclass
class MhStats:
    """Proposal/acceptance counters for one kernel, plus the live beta."""

    proposals: int = 0
    accepts: int = 0
    current_beta: float = 0.0
    reached_band: bool | None = None

    @property
    def acceptance_rate(self) -> float:
        return self.accepts / self.proposals if self.proposals else float("nan")

    def as_dict(self) -> dict:
        return {
            "proposals": self.proposals,
            "accepts": self.accepts,
            "acceptance_rate": self.acceptance_rate,
            "current_beta": self.current_beta,
            "reached_band": self.reached_band,
        }


def propose(pi: SimplexPoint, beta: float, rng: Generator) -> SimplexPoint:
    """Draw a proposal from Dir(beta * pi). Requires strictly positive pi."""
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    return SimplexPoint(rng.dirichlet(beta * pi.coords))


def log_acceptance_ratio(
    current: SimplexPoint,
    proposal: SimplexPoint,
    alpha: DirichletParams,
    model: ObservationModel,
    beta: float,
) -> float:
    """log of [p(prop) q(cur | prop)] / [p(cur) q(prop | cur)] for the
    Dir(beta * .) proposal. Exactly 0 when both points are the same input."""
    log_p_prop = posterior_log_density_unnormalized(proposal, alpha, model)
    log_p_cur = posterior_log_density_unnormalized(current, alpha, model)
    log_q_back = dirichlet_log_density(current, DirichletParams(beta * proposal.coords))
    log_q_fwd = dirichlet_log_density(proposal, DirichletParams(beta * current.coords))
    return (log_p_prop - log_p_cur) + (log_q_back - log_q_fwd)


def mh_step(
    pi: SimplexPoint,
    alpha: DirichletParams,
    model: ObservationModel,
    cfg: MhConfig,
    rng: Generator,
    stats: MhStats | None = None,
) -> tuple[SimplexPoint, bool]:
    """One MH transition. Boundary points (any zero coordinate, on either the
    current state or the proposal) make the kernel undefined and are treated
    as automatic rejections rather than exceptions."""
    if stats is not None:
        stats.proposals += 1
    if np.any(pi.coords == 0.0):
        return pi, False
    prop = propose(pi, cfg.beta, rng)
    if np.any(prop.coords == 0.0):
        return pi, False
    log_r = log_acceptance_ratio(pi, prop, alpha, model, cfg.beta)
    if log_r != log_r:  # NaN guard: reject rather than propagate
        return pi, False
    if log_r >= 0.0 or rng.random() < exp(log_r):
        if stats is not None:
            stats.accepts += 1
        return prop, True
    return pi, False


def tune_beta(
    alpha: DirichletParams,
    model: ObservationModel,
    cfg: MhConfig,
    rng: Generator,
    init: SimplexPoint | None = None,
) -> tuple[float, MhStats]:
    """Adapt beta toward the target acceptance rate, then freeze it.

    After each batch of ADAPT_BATCH steps, beta is scaled by
    exp(eta_b * (target - batch rate)) with eta_b = ADAPT_ETA0 / sqrt(b).
    The full schedule always runs; whether the final batch landed within
    ACCEPTANCE_BAND of the target is reported in the stats, not fatal.
    """
    if cfg.adapt_steps <= 0:
        raise ValueError("tuning requires adapt_steps > 0")
    n_batches = max(1, cfg.adapt_steps // ADAPT_BATCH)
    pi = init if init is not None else sample_dirichlet(alpha, rng)
    beta = cfg.beta
    stats = MhStats(current_beta=beta)
    last_rate = float("nan")
    for b in range(1, n_batches + 1):
        batch_cfg = MhConfig(beta, cfg.target_acceptance, 0)
        accepted = 0
        for _ in range(ADAPT_BATCH):
            pi, ok = mh_step(pi, alpha, model, batch_cfg, rng)
            accepted += ok
        last_rate = accepted / ADAPT_BATCH
        stats.proposals += ADAPT_BATCH
        stats.accepts += accepted
        eta = ADAPT_ETA0 / sqrt(b)
        # acceptance is increasing in beta (more local proposal), so an
        # acceptance above target must shrink beta
        beta *= exp(eta * (cfg.target_acceptance - last_rate))
    stats.current_beta = beta
    stats.reached_band = abs(last_rate - cfg.target_acceptance) <= ACCEPTANCE_BAND
    return beta, stats


def run_mh_chain(
    alpha: DirichletParams,
    model: ObservationModel,
    init: SimplexPoint | None,
    steps: int,
    cfg: MhConfig,
    rng: Generator,
    metadata: dict | None = None,
) -> ChainTrace:
    """Run an MH chain, tuning first when cfg.adapt_steps > 0.

    Adaptation steps are burn-in: they are not recorded and the trace clock
    starts when recording starts. Post-freeze acceptance counters and the
    frozen beta land in the trace metadata.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    pi = init if init is not None else sample_dirichlet(alpha, rng)
    beta = cfg.beta
    tuning_record = None
    if cfg.adapt_steps > 0:
        t0 = time.perf_counter()
        beta, tune_stats = tune_beta(alpha, model, cfg, rng, init=pi)
        tuning_record = dict(tune_stats.as_dict(), seconds=time.perf_counter() - t0)

    frozen = MhConfig(beta, cfg.target_acceptance, 0)
    stats = MhStats(current_beta=beta)
    samples = np.empty((steps, alpha.dim))
    stamps = np.empty(steps)
    start = time.perf_counter()
    for t in range(steps):
        pi, _ = mh_step(pi, alpha, model, frozen, rng, stats=stats)
        samples[t] = pi.coords
        stamps[t] = time.perf_counter() - start
    meta = {
        "sampler": "mh",
        "steps": steps,
        "beta": beta,
        "target_acceptance": cfg.target_acceptance,
        "adapt_steps": cfg.adapt_steps,
        "adapt_batch": ADAPT_BATCH,
        "adapt_eta0": ADAPT_ETA0,
        "stats": stats.as_dict(),
    }
    if tuning_record is not None:
        meta["tuning"] = tuning_record
    meta.update(metadata or {})
    return ChainTrace(samples, stamps, meta)
