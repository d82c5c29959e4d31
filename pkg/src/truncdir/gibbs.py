"""Auxiliary-variable Gibbs sampler for truncated-multinomial posteriors.

Every observation of a term with truncated mass s contributes a geometric
auxiliary count (success 1 - s, support {0,1,...}) whose mass is spread over
the truncated indices in proportion to pi. Conditioned on those auxiliary
counts, the prior is conjugate again: pi | k, m ~ Dir(alpha + augmented
counts). Alternating the two conditionals and discarding k yields samples
from the original posterior.
"""

from __future__ import annotations

import enum
import time

import numpy as np
from numpy.random import Generator

from .model import ObservationModel, truncated_mass
from .simplex import CountVector, DirichletParams, SimplexPoint, conjugate_posterior, sample_dirichlet
from .trace import ChainTrace

__all__ = [
    "AuxMode",
    "AuxCounts",
    "GibbsState",
    "sample_aux",
    "augmented_counts",
    "gibbs_step",
    "run_aux_chain",
]


class AuxMode(enum.Enum):
    """How the per-term auxiliary total is drawn.

    AGGREGATED draws the total directly as a negative binomial and is
    constant-time in the observation count; PER_OBSERVATION draws one
    geometric per observation. Identical in distribution.
    """

    PER_OBSERVATION = "per_observation"
    AGGREGATED = "aggregated"


class AuxCounts:
    """Per-term totals of auxiliary mass allocated to each truncated index.

    ``per_term_alloc[l]`` is an int64 vector aligned with the sorted indices
    of term l's truncation set (length 0 for untruncated terms).
    """

    __slots__ = ("per_term_alloc",)

    def __init__(self, per_term_alloc):
        allocs = []
        for a in per_term_alloc:
            a = np.asarray(a, dtype=np.int64)
            if a.ndim != 1:
                raise ValueError("each allocation must be a vector")
            if np.any(a < 0):
                raise ValueError(f"auxiliary counts must be nonnegative, got {a}")
            a.flags.writeable = False
            allocs.append(a)
        self.per_term_alloc = tuple(allocs)

    @property
    def total(self) -> int:
        return int(sum(int(a.sum()) for a in self.per_term_alloc))

    def __repr__(self):
        return f"AuxCounts({[list(a) for a in self.per_term_alloc]})"


class GibbsState:
    """Current (pi, auxiliary counts) pair of the augmented chain."""

    __slots__ = ("pi", "aux")

    def __init__(self, pi: SimplexPoint, aux: AuxCounts):
        self.pi = pi
        self.aux = aux

    def __repr__(self):
        return f"GibbsState(pi={self.pi}, aux={self.aux})"


def _split_total(total: int, probs: np.ndarray, rng: Generator) -> np.ndarray:
    if total == 0:
        return np.zeros(probs.size, dtype=np.int64)
    if probs.size == 1:
        return np.array([total], dtype=np.int64)
    return rng.multinomial(total, probs).astype(np.int64)


def sample_aux(
    model: ObservationModel,
    pi: SimplexPoint,
    rng: Generator,
    mode: AuxMode = AuxMode.AGGREGATED,
) -> AuxCounts:
    """Draw the auxiliary counts k | pi, m for every term.

    Requires each term's truncated mass s < 1. s = 0 (or an empty truncation
    set, or zero observations) forces a zero allocation without consuming
    randomness for that term.
    """
    if pi.dim != model.dim:
        raise ValueError(f"dimension mismatch: point {pi.dim} vs model {model.dim}")
    allocs = []
    for term in model.terms:
        idx = term.trunc.sorted_indices
        if idx.size == 0:
            allocs.append(np.zeros(0, dtype=np.int64))
            continue
        s = truncated_mass(term, pi)
        if s >= 1.0:
            raise ValueError(f"truncated mass {s!r} >= 1 for term {term}")
        if s == 0.0 or term.total == 0:
            allocs.append(np.zeros(idx.size, dtype=np.int64))
            continue
        probs = pi.coords[idx] / s
        probs = probs / probs.sum()
        if mode is AuxMode.AGGREGATED:
            total = int(rng.negative_binomial(term.total, 1.0 - s))
            allocs.append(_split_total(total, probs, rng))
        elif mode is AuxMode.PER_OBSERVATION:
            # failures-before-first-success convention: support {0,1,...}
            ks = rng.geometric(1.0 - s, size=term.total) - 1
            if idx.size == 1:
                allocs.append(np.array([ks.sum()], dtype=np.int64))
            else:
                allocs.append(rng.multinomial(ks, probs).sum(axis=0).astype(np.int64))
        else:
            raise ValueError(f"unknown auxiliary mode {mode!r}")
    return AuxCounts(allocs)


def augmented_counts(model: ObservationModel, aux: AuxCounts) -> CountVector:
    """Observed counts plus auxiliary mass scattered onto truncated indices."""
    if len(aux.per_term_alloc) != len(model.terms):
        raise ValueError(
            f"auxiliary terms ({len(aux.per_term_alloc)}) do not match model terms ({len(model.terms)})"
        )
    total = np.zeros(model.dim, dtype=np.int64)
    for term, alloc in zip(model.terms, aux.per_term_alloc):
        idx = term.trunc.sorted_indices
        if alloc.size != idx.size:
            raise ValueError(f"allocation size {alloc.size} does not match truncation size {idx.size}")
        total += term.counts.counts
        if idx.size:
            np.add.at(total, idx, alloc)
    return CountVector(total)


def gibbs_step(
    state: GibbsState,
    alpha: DirichletParams,
    model: ObservationModel,
    rng: Generator,
    mode: AuxMode = AuxMode.AGGREGATED,
) -> GibbsState:
    """One full sweep: k | pi, m then pi | k, m ~ Dir(alpha + augmented)."""
    aux = sample_aux(model, state.pi, rng, mode=mode)
    m_aug = augmented_counts(model, aux)
    pi = sample_dirichlet(conjugate_posterior(alpha, m_aug), rng)
    return GibbsState(pi, aux)


def initial_state(
    alpha: DirichletParams,
    model: ObservationModel,
    rng: Generator,
    init: SimplexPoint | None = None,
) -> GibbsState:
    """Start from an explicit point or a fresh prior draw, with empty aux."""
    pi = init if init is not None else sample_dirichlet(alpha, rng)
    empty = AuxCounts([np.zeros(len(t.trunc), dtype=np.int64) for t in model.terms])
    return GibbsState(pi, empty)


def run_aux_chain(
    alpha: DirichletParams,
    model: ObservationModel,
    init: SimplexPoint | None,
    steps: int,
    rng: Generator,
    mode: AuxMode = AuxMode.AGGREGATED,
    metadata: dict | None = None,
) -> ChainTrace:
    """Run the augmented Gibbs chain and keep only the pi marginal.

    The trace holds the state after each of ``steps`` full sweeps, with
    wall-clock seconds from chain start per sample.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    state = initial_state(alpha, model, rng, init)
    samples = np.empty((steps, alpha.dim))
    stamps = np.empty(steps)
    start = time.perf_counter()
    for t in range(steps):
        state = gibbs_step(state, alpha, model, rng, mode=mode)
        samples[t] = state.pi.coords
        stamps[t] = time.perf_counter() - start
    meta = {"sampler": "aux", "mode": mode.value, "steps": steps}
    meta.update(metadata or {})
    return ChainTrace(samples, stamps, meta)
