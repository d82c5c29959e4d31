"""Experiment configuration: YAML schema, validation, and round-tripping.

Configs are strict: unknown keys are errors, reported with the file name and
line number of the offending key so a typo in a long experiment file is
findable. The parsed config echoes into the run manifest and reconstructs
bit-identically from that echo.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from .model import CountVector, ObservationModel, TruncatedCounts, TruncationSet
from .simplex import DirichletParams

__all__ = ["ConfigError", "MhTuningBlock", "OracleBlock", "ExperimentConfig", "load_config"]

DEFAULT_LAGS = tuple(range(0, 51))
DEFAULT_COMPONENTS = (0, 1)


class ConfigError(ValueError):
    """Invalid experiment configuration; message carries file:line context."""


@dataclass
class MhTuningBlock:
    target_acceptance: float = 0.24
    adapt_steps: int = 5000
    initial_beta: float = 10.0
    fixed_beta: float | None = None

    def validate(self):
        if not 0 < self.target_acceptance < 1:
            raise ConfigError(f"mh.target_acceptance must be in (0,1), got {self.target_acceptance}")
        if self.adapt_steps < 0:
            raise ConfigError(f"mh.adapt_steps must be >= 0, got {self.adapt_steps}")
        if self.fixed_beta is not None and self.fixed_beta <= 0:
            raise ConfigError(f"mh.fixed_beta must be > 0, got {self.fixed_beta}")
        if self.initial_beta <= 0:
            raise ConfigError(f"mh.initial_beta must be > 0, got {self.initial_beta}")


@dataclass
class OracleBlock:
    enabled: bool = False
    resolution: int = 128

    def validate(self):
        if self.resolution < 1:
            raise ConfigError(f"oracle.resolution must be >= 1, got {self.resolution}")


@dataclass
class ExperimentConfig:
    n: int
    alpha: tuple
    terms: tuple  # of (indices tuple, counts tuple)
    sampler: str = "both"
    chains: int = 2
    steps: int = 1000
    seed: int = 0
    workers: int = 0
    checkpoints: int = 25
    lags: tuple = DEFAULT_LAGS
    components: tuple = DEFAULT_COMPONENTS
    mh: MhTuningBlock = field(default_factory=MhTuningBlock)
    oracle: OracleBlock = field(default_factory=OracleBlock)
    name: str = ""

    def validate(self):
        if self.n < 2:
            raise ConfigError(f"n must be >= 2, got {self.n}")
        if len(self.alpha) != self.n:
            raise ConfigError(f"alpha has length {len(self.alpha)}, expected n={self.n}")
        if any(a <= 0 for a in self.alpha):
            raise ConfigError(f"alpha components must be > 0, got {self.alpha}")
        for i, (indices, counts) in enumerate(self.terms):
            if len(counts) != self.n:
                raise ConfigError(f"terms[{i}].counts has length {len(counts)}, expected n={self.n}")
            bad = [j for j in indices if not 0 <= j < self.n]
            if bad:
                raise ConfigError(f"terms[{i}].indices out of range [0,{self.n}): {bad}")
        if self.sampler not in ("aux", "mh", "both"):
            raise ConfigError(f"sampler must be aux|mh|both, got {self.sampler!r}")
        if self.chains < 1:
            raise ConfigError(f"chains must be >= 1, got {self.chains}")
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a u64, got {self.seed}")
        if self.workers < 0:
            raise ConfigError(f"workers must be >= 0 (0 = auto), got {self.workers}")
        if self.checkpoints < 1:
            raise ConfigError(f"checkpoints must be >= 1, got {self.checkpoints}")
        if any(l < 0 for l in self.lags):
            raise ConfigError(f"lags must be nonnegative, got {self.lags}")
        if any(not 0 <= c < self.n for c in self.components):
            raise ConfigError(f"components out of range [0,{self.n}): {self.components}")
        self.mh.validate()
        self.oracle.validate()

    # --- domain object construction -------------------------------------

    def dirichlet_params(self) -> DirichletParams:
        return DirichletParams(np.asarray(self.alpha, dtype=float))

    def observation_model(self) -> ObservationModel:
        if not self.terms:
            # prior-only runs are modeled as one empty, zero-count term
            return ObservationModel(
                [TruncatedCounts(TruncationSet([]), CountVector(np.zeros(self.n, dtype=np.int64)))]
            )
        return ObservationModel(
            [
                TruncatedCounts(TruncationSet(indices), CountVector(np.asarray(counts, dtype=np.int64)))
                for indices, counts in self.terms
            ]
        )

    # --- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "alpha": list(self.alpha),
            "terms": [{"indices": list(i), "counts": list(c)} for i, c in self.terms],
            "sampler": self.sampler,
            "chains": self.chains,
            "steps": self.steps,
            "seed": self.seed,
            "workers": self.workers,
            "checkpoints": self.checkpoints,
            "lags": list(self.lags),
            "components": list(self.components),
            "mh": {
                "target_acceptance": self.mh.target_acceptance,
                "adapt_steps": self.mh.adapt_steps,
                "initial_beta": self.mh.initial_beta,
                "fixed_beta": self.mh.fixed_beta,
            },
            "oracle": {"enabled": self.oracle.enabled, "resolution": self.oracle.resolution},
        }

    @classmethod
    def from_dict(cls, data: dict, source: str = "<dict>") -> "ExperimentConfig":
        return _build_config(data, source)


# --- YAML loading with line-precise key errors ---------------------------

_SCHEMA = {
    "name": None,
    "n": None,
    "alpha": None,
    "terms": {"indices": None, "counts": None},
    "sampler": None,
    "chains": None,
    "steps": None,
    "seed": None,
    "workers": None,
    "checkpoints": None,
    "lags": None,
    "components": None,
    "mh": {"target_acceptance": None, "adapt_steps": None, "initial_beta": None, "fixed_beta": None},
    "oracle": {"enabled": None, "resolution": None},
}


def _check_node_keys(node, schema: dict, source: str, path: str):
    if isinstance(node, yaml.SequenceNode):
        for item in node.value:
            _check_node_keys(item, schema, source, path)
        return
    if not isinstance(node, yaml.MappingNode):
        return
    for key_node, value_node in node.value:
        key = key_node.value
        if key not in schema:
            line = key_node.start_mark.line + 1
            raise ConfigError(f"{source}:{line}: unknown key {path}{key!r}")
        sub = schema[key]
        if sub is not None:
            _check_node_keys(value_node, sub, source, f"{path}{key}.")


def _expect(cond, msg):
    if not cond:
        raise ConfigError(msg)
    return True


def _as_int(v, what):
    _expect(isinstance(v, int) and not isinstance(v, bool), f"{what} must be an integer, got {v!r}")
    return int(v)


def _as_number(v, what):
    _expect(isinstance(v, (int, float)) and not isinstance(v, bool), f"{what} must be a number, got {v!r}")
    return float(v)


def _build_config(data: dict, source: str) -> ExperimentConfig:
    _expect(isinstance(data, dict), f"{source}: config root must be a mapping")
    _expect("n" in data, f"{source}: missing required key 'n'")
    _expect("alpha" in data, f"{source}: missing required key 'alpha'")
    _expect("seed" in data, f"{source}: missing required key 'seed' (runs must be reproducible)")
    n = _as_int(data["n"], "n")

    alpha_raw = data["alpha"]
    if isinstance(alpha_raw, (int, float)) and not isinstance(alpha_raw, bool):
        alpha = tuple(float(alpha_raw) for _ in range(n))
    else:
        _expect(isinstance(alpha_raw, list), f"alpha must be a number or a list, got {alpha_raw!r}")
        alpha = tuple(_as_number(a, "alpha component") for a in alpha_raw)

    terms = []
    for i, t in enumerate(data.get("terms", []) or []):
        _expect(isinstance(t, dict), f"terms[{i}] must be a mapping with indices/counts")
        _expect("counts" in t, f"terms[{i}]: missing 'counts'")
        indices = tuple(_as_int(j, f"terms[{i}].indices entry") for j in (t.get("indices") or []))
        counts = tuple(_as_int(c, f"terms[{i}].counts entry") for c in t["counts"])
        terms.append((indices, counts))

    mh_raw = data.get("mh", {}) or {}
    mh = MhTuningBlock(
        target_acceptance=_as_number(mh_raw.get("target_acceptance", 0.24), "mh.target_acceptance"),
        adapt_steps=_as_int(mh_raw.get("adapt_steps", 5000), "mh.adapt_steps"),
        initial_beta=_as_number(mh_raw.get("initial_beta", 10.0), "mh.initial_beta"),
        fixed_beta=(
            None
            if mh_raw.get("fixed_beta") is None
            else _as_number(mh_raw["fixed_beta"], "mh.fixed_beta")
        ),
    )
    oracle_raw = data.get("oracle", {}) or {}
    _expect(isinstance(oracle_raw.get("enabled", False), bool), "oracle.enabled must be a boolean")
    oracle = OracleBlock(
        enabled=oracle_raw.get("enabled", False),
        resolution=_as_int(oracle_raw.get("resolution", 128), "oracle.resolution"),
    )

    cfg = ExperimentConfig(
        n=n,
        alpha=alpha,
        terms=tuple(terms),
        sampler=str(data.get("sampler", "both")),
        chains=_as_int(data.get("chains", 2), "chains"),
        steps=_as_int(data.get("steps", 1000), "steps"),
        seed=_as_int(data["seed"], "seed"),
        workers=_as_int(data.get("workers", 0), "workers"),
        checkpoints=_as_int(data.get("checkpoints", 25), "checkpoints"),
        lags=tuple(_as_int(l, "lags entry") for l in (data.get("lags") or DEFAULT_LAGS)),
        components=tuple(_as_int(c, "components entry") for c in (data.get("components") or DEFAULT_COMPONENTS)),
        mh=mh,
        oracle=oracle,
        name=str(data.get("name", "")),
    )
    cfg.validate()
    return cfg


def load_config(path) -> ExperimentConfig:
    """Parse and validate a YAML experiment config file."""
    path = str(path)
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ConfigError(f"{path}: not valid YAML: {err}") from err
    if root is None:
        raise ConfigError(f"{path}: empty config")
    _check_node_keys(root, _SCHEMA, path, "")
    return _build_config(data, path)
