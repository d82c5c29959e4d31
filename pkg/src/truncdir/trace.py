"""Chain traces: sample matrices with per-sample wall-clock timestamps."""

from __future__ import annotations

import numpy as np

from .simplex import SUM_TOLERANCE

__all__ = ["ChainTrace", "ChainEnsemble"]


class ChainTrace:
    """T x n matrix of simplex samples, with seconds-from-chain-start per row.

    ``metadata`` carries seed material, the sampler id, and any tuning record;
    it is free-form but must be JSON-serializable for the harness.
    """

    __slots__ = ("samples", "timestamps", "metadata")

    def __init__(self, samples, timestamps, metadata=None):
        s = np.asarray(samples, dtype=float)
        ts = np.asarray(timestamps, dtype=float)
        if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] < 2:
            raise ValueError(f"samples must be a T x n matrix, got shape {s.shape}")
        if ts.shape != (s.shape[0],):
            raise ValueError(f"timestamps shape {ts.shape} does not match T={s.shape[0]}")
        if np.any(s < 0) or np.any(np.abs(s.sum(axis=1) - 1.0) > SUM_TOLERANCE):
            raise ValueError("trace rows must be simplex points")
        if np.any(np.diff(ts) < 0):
            raise ValueError("timestamps must be nondecreasing")
        self.samples = s
        self.timestamps = ts
        self.metadata = dict(metadata or {})

    @property
    def length(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def __repr__(self):
        return f"ChainTrace(T={self.length}, n={self.dim}, metadata={self.metadata})"


class ChainEnsemble:
    """M independent chains of equal length and dimension."""

    __slots__ = ("chains",)

    def __init__(self, chains):
        chains = tuple(chains)
        if not chains:
            raise ValueError("ensemble needs at least one chain")
        t, n = chains[0].length, chains[0].dim
        for c in chains:
            if c.length != t or c.dim != n:
                raise ValueError(
                    f"all chains must share shape; got ({c.length},{c.dim}) vs ({t},{n})"
                )
        self.chains = chains

    @property
    def n_chains(self) -> int:
        return len(self.chains)

    @property
    def length(self) -> int:
        return self.chains[0].length

    @property
    def dim(self) -> int:
        return self.chains[0].dim

    def __repr__(self):
        return f"ChainEnsemble(M={self.n_chains}, T={self.length}, n={self.dim})"
