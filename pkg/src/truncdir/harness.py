"""Experiment driver and persistence.

Runs multi-chain experiments for both samplers, writes one CSV per chain
plus a JSON manifest, computes diagnostics into one JSON file per metric,
and dumps oracle grid moments for low-dimensional configs.

Reproducibility contract: the master seed feeds a SeedSequence; child
sequences are spawned in a fixed order (MH tuning first, then one per chain
per sampler), so every chain is reproducible in isolation from the manifest.
Trace CSVs embed wall-clock timestamps, which are the one permitted source
of nondeterminism; determinism checks therefore hash trace content with the
timestamp column stripped.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .diagnostics import autocorrelation, mpsrf, statistic_convergence, burn_in_slice
from .gibbs import run_aux_chain
from .mh import MhConfig, run_mh_chain, tune_beta
from .oracle import grid_posterior
from .trace import ChainEnsemble, ChainTrace

__all__ = [
    "RunManifest",
    "cmd_sample",
    "cmd_diagnose",
    "cmd_oracle",
    "cmd_experiment",
    "compute_checkpoints",
    "trace_content_hash",
    "load_trace_csv",
    "load_manifest",
    "load_ensemble",
]

SCHEMA_VERSION = 1
MANIFEST_NAME = "manifest.json"
DIAGNOSE_METRICS = ("autocorr", "mpsrf", "convergence")


# --- small IO helpers -----------------------------------------------------


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _jsonable(obj):
    """numpy -> plain python, non-finite floats -> None (strict JSON)."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _write_json(path: Path, payload: dict):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_trace_csv(path: Path, trace: ChainTrace):
    cols = ",".join(f"pi_{i}" for i in range(trace.dim))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"step,seconds_elapsed,{cols}\n")
        for t in range(trace.length):
            row = ",".join(repr(float(v)) for v in trace.samples[t])
            fh.write(f"{t + 1},{trace.timestamps[t]:.6f},{row}\n")


def load_trace_csv(path, metadata: dict | None = None) -> ChainTrace:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return ChainTrace(data[:, 2:], data[:, 1], metadata)


def trace_content_hash(path) -> str:
    """SHA-256 of the trace CSV with the seconds_elapsed column removed.

    Timestamps are wall-clock and legitimately differ between reruns; all
    other bytes must be identical for the same config and seed.
    """
    digest = hashlib.sha256()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            cells = line.rstrip("\n").split(",")
            del cells[1]
            digest.update((",".join(cells) + "\n").encode())
    return digest.hexdigest()


def compute_checkpoints(steps: int, count: int) -> list[int]:
    """``count`` equally spaced sample indices ending at ``steps``.

    Indices below 2 cannot support a retained slice of length >= 2 and are
    dropped (tiny-run safety); duplicates from rounding collapse.
    """
    raw = [(i * steps) // count for i in range(1, count + 1)]
    out = []
    for c in raw:
        if c >= 2 and (not out or c > out[-1]):
            out.append(c)
    if not out or out[-1] != steps:
        out.append(steps)
    return out


# --- chain execution ------------------------------------------------------


def _seed_tree(cfg: ExperimentConfig):
    """Fixed spawn order: [tuning, aux chains 0..M-1, mh chains 0..M-1]."""
    root = np.random.SeedSequence(cfg.seed)
    children = root.spawn(1 + 2 * cfg.chains)
    return children[0], children[1 : 1 + cfg.chains], children[1 + cfg.chains :]


def _run_chain_job(kind: str, cfg_dict: dict, chain_index: int, entropy, spawn_key, beta: float | None):
    cfg = ExperimentConfig.from_dict(cfg_dict)
    alpha = cfg.dirichlet_params()
    model = cfg.observation_model()
    rng = np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=spawn_key))
    meta = {"chain_index": chain_index, "spawn_key": list(spawn_key), "entropy": entropy}
    if kind == "aux":
        trace = run_aux_chain(alpha, model, None, cfg.steps, rng, metadata=meta)
    elif kind == "mh":
        mh_cfg = MhConfig(beta, cfg.mh.target_acceptance, 0)
        trace = run_mh_chain(alpha, model, None, cfg.steps, mh_cfg, rng, metadata=meta)
    else:
        raise ValueError(f"unknown sampler kind {kind!r}")
    return trace.samples, trace.timestamps, trace.metadata


def _run_chains(kind: str, cfg: ExperimentConfig, seeds, beta: float | None) -> list[ChainTrace]:
    jobs = [
        (kind, cfg.to_dict(), i, s.entropy, tuple(s.spawn_key), beta)
        for i, s in enumerate(seeds)
    ]
    workers = cfg.workers or min(len(jobs), os.cpu_count() or 1)
    if workers <= 1 or len(jobs) == 1:
        results = [_run_chain_job(*j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chain_job, *zip(*jobs)))
    return [ChainTrace(s, ts, md) for s, ts, md in results]


@dataclass
class RunManifest:
    """Echo of the config plus per-chain outputs; written after the files."""

    path: Path
    data: dict

    def chain_paths(self, sampler: str) -> list[Path]:
        base = self.path.parent
        return [base / c["path"] for c in self.data["samplers"][sampler]["chains"]]


def load_manifest(out_dir) -> RunManifest:
    path = Path(out_dir) / MANIFEST_NAME
    with open(path, "r", encoding="utf-8") as fh:
        return RunManifest(path, json.load(fh))


def load_ensemble(manifest: RunManifest, sampler: str) -> ChainEnsemble:
    entries = manifest.data["samplers"][sampler]["chains"]
    base = manifest.path.parent
    return ChainEnsemble(
        [load_trace_csv(base / c["path"], {"sampler": sampler, **c}) for c in entries]
    )


def cmd_sample(cfg: ExperimentConfig, out_dir) -> RunManifest:
    """Run the configured samplers and write one CSV per chain plus manifest."""
    cfg.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = _utc_now()
    t0 = time.perf_counter()

    tune_seed, aux_seeds, mh_seeds = _seed_tree(cfg)
    samplers: dict[str, dict] = {}

    if cfg.sampler in ("aux", "both"):
        traces = _run_chains("aux", cfg, aux_seeds, None)
        entries = []
        for i, tr in enumerate(traces):
            name = f"aux_chain_{i:03d}.csv"
            write_trace_csv(out / name, tr)
            entries.append(
                {
                    "index": i,
                    "path": name,
                    "entropy": tr.metadata["entropy"],
                    "spawn_key": tr.metadata["spawn_key"],
                    "content_sha256": trace_content_hash(out / name),
                }
            )
        samplers["aux"] = {"chains": entries}

    if cfg.sampler in ("mh", "both"):
        alpha = cfg.dirichlet_params()
        model = cfg.observation_model()
        if cfg.mh.fixed_beta is not None:
            beta, tuning = cfg.mh.fixed_beta, None
        else:
            rng = np.random.default_rng(tune_seed)
            t_tune = time.perf_counter()
            beta, stats = tune_beta(
                alpha,
                model,
                MhConfig(cfg.mh.initial_beta, cfg.mh.target_acceptance, cfg.mh.adapt_steps),
                rng,
            )
            tuning = dict(stats.as_dict(), seconds=time.perf_counter() - t_tune)
        traces = _run_chains("mh", cfg, mh_seeds, beta)
        entries = []
        for i, tr in enumerate(traces):
            name = f"mh_chain_{i:03d}.csv"
            write_trace_csv(out / name, tr)
            entries.append(
                {
                    "index": i,
                    "path": name,
                    "entropy": tr.metadata["entropy"],
                    "spawn_key": tr.metadata["spawn_key"],
                    "acceptance_rate": tr.metadata["stats"]["acceptance_rate"],
                    "content_sha256": trace_content_hash(out / name),
                }
            )
        samplers["mh"] = {"chains": entries, "beta": beta, "tuning": tuning}

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "config": cfg.to_dict(),
        "started_utc": started,
        "finished_utc": _utc_now(),
        "wall_seconds": time.perf_counter() - t0,
        "samplers": samplers,
    }
    _write_json(out / MANIFEST_NAME, manifest)
    return RunManifest(out / MANIFEST_NAME, manifest)


# --- diagnostics ----------------------------------------------------------


def _percentile_block(per_chain: np.ndarray) -> dict:
    # per_chain: (points, chains)
    return {
        "per_chain": per_chain.T,
        "mean": per_chain.mean(axis=1),
        "p10": np.percentile(per_chain, 10, axis=1),
        "p90": np.percentile(per_chain, 90, axis=1),
    }


def _diagnose_autocorr(ensemble: ChainEnsemble, cfg: ExperimentConfig, sampler: str) -> dict:
    t = ensemble.length
    retained = t - t // 2
    lags = [lag for lag in cfg.lags if lag < retained]
    blocks = []
    for comp in cfg.components:
        rho = np.stack(
            [autocorrelation(c, comp, lags, t) for c in ensemble.chains], axis=1
        )  # (lags, chains)
        blocks.append({"component": comp, **_percentile_block(rho)})
    per_step = [c.timestamps[-1] / c.length for c in ensemble.chains]
    return {
        "schema_version": SCHEMA_VERSION,
        "metric": "autocorrelation",
        "sampler": sampler,
        "t": t,
        "lags": lags,
        "median_seconds_per_step": float(np.median(per_step)),
        "components": blocks,
    }


def _median_elapsed(ensemble: ChainEnsemble, checkpoints) -> list[float]:
    stamps = np.stack([c.timestamps for c in ensemble.chains])
    return [float(np.median(stamps[:, t - 1])) for t in checkpoints]


def _diagnose_mpsrf(ensemble: ChainEnsemble, cfg: ExperimentConfig, sampler: str) -> dict:
    if ensemble.n_chains < 2:
        raise ValueError("MPSRF needs at least 2 chains")
    checkpoints = compute_checkpoints(ensemble.length, cfg.checkpoints)
    checkpoints = [t for t in checkpoints if t - t // 2 >= 2]
    results = [mpsrf(ensemble, t) for t in checkpoints]
    coord = np.stack([r.coordinate_psrf() for r in results])  # (checkpoints, dim-1)
    return {
        "schema_version": SCHEMA_VERSION,
        "metric": "mpsrf",
        "sampler": sampler,
        "checkpoints": checkpoints,
        "r_hat": [r.r_hat for r in results],
        "scalar_psrf": {
            "per_coordinate": coord.T,
            "mean": coord.mean(axis=1),
            "p10": np.percentile(coord, 10, axis=1),
            "p90": np.percentile(coord, 90, axis=1),
        },
        "retained": [r.retained for r in results],
        "jittered": [r.jittered for r in results],
        "median_elapsed_seconds": _median_elapsed(ensemble, checkpoints),
    }


def pooled_reference(ensemble: ChainEnsemble, t: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise mean/variance of all chains' retained samples pooled."""
    t = ensemble.length if t is None else t
    pooled = np.concatenate([burn_in_slice(c, t) for c in ensemble.chains], axis=0)
    return pooled.mean(axis=0), pooled.var(axis=0, ddof=1)


def _diagnose_convergence(ensemble: ChainEnsemble, cfg: ExperimentConfig, sampler: str) -> dict:
    checkpoints = compute_checkpoints(ensemble.length, cfg.checkpoints)
    checkpoints = [t for t in checkpoints if t - t // 2 >= 2]
    ref_mean, ref_var = pooled_reference(ensemble)
    conv = statistic_convergence(ensemble, ref_mean, ref_var, checkpoints)
    return {
        "schema_version": SCHEMA_VERSION,
        "metric": "statistic_convergence",
        "sampler": sampler,
        "checkpoints": checkpoints,
        "reference": {"mean": ref_mean, "var": ref_var, "source": "pooled-final"},
        "mean_error": _percentile_block(conv.mean_errors),
        "var_error": _percentile_block(conv.var_errors),
        "median_elapsed_seconds": _median_elapsed(ensemble, checkpoints),
    }


def cmd_diagnose(trace_dir, which=DIAGNOSE_METRICS, out_dir=None, cfg: ExperimentConfig | None = None) -> list[Path]:
    """Compute the requested metrics for every sampler present in a run.

    ``cfg`` defaults to the config echoed in the run manifest; pass one to
    override lags/components/checkpoints.
    """
    manifest = load_manifest(trace_dir)
    cfg = cfg or ExperimentConfig.from_dict(manifest.data["config"])
    out = Path(out_dir) if out_dir else Path(trace_dir)
    out.mkdir(parents=True, exist_ok=True)
    if isinstance(which, str):
        which = (which,)
    unknown = set(which) - set(DIAGNOSE_METRICS)
    if unknown:
        raise ValueError(f"unknown diagnostics {sorted(unknown)}; expected subset of {DIAGNOSE_METRICS}")

    written = []
    for sampler in manifest.data["samplers"]:
        ensemble = load_ensemble(manifest, sampler)
        for metric in which:
            if metric == "autocorr":
                payload = _diagnose_autocorr(ensemble, cfg, sampler)
            elif metric == "mpsrf":
                payload = _diagnose_mpsrf(ensemble, cfg, sampler)
            else:
                payload = _diagnose_convergence(ensemble, cfg, sampler)
            path = out / f"{metric}_{sampler}.json"
            _write_json(path, payload)
            written.append(path)
    return written


# --- oracle ---------------------------------------------------------------


def cmd_oracle(cfg: ExperimentConfig, out_dir) -> Path:
    """Write grid-integrated moments (and the density dump) for n <= 4."""
    cfg.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    post = grid_posterior(cfg.dirichlet_params(), cfg.observation_model(), cfg.oracle.resolution)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "metric": "oracle_moments",
        "n": cfg.n,
        "resolution": cfg.oracle.resolution,
        "mean": post.mean,
        "variance": post.variance,
        "log_normalizer": post.log_normalizer,
    }
    path = out / "oracle.json"
    _write_json(path, payload)

    probs = post.node_probabilities()
    dump = out / "oracle_density.csv"
    with open(dump, "w", encoding="utf-8", newline="\n") as fh:
        cols = ",".join(f"pi_{i}" for i in range(cfg.n))
        fh.write(f"{cols},log_density,probability\n")
        for row, ld, pr in zip(post.grid.points, post.log_density, probs):
            cells = [repr(float(v)) for v in row] + [repr(float(ld)), repr(float(pr))]
            fh.write(",".join(cells) + "\n")
    return path


def cmd_experiment(cfg: ExperimentConfig, out_dir) -> RunManifest:
    """sample + diagnose + (optional) oracle, into one output directory."""
    manifest = cmd_sample(cfg, out_dir)
    cmd_diagnose(out_dir, DIAGNOSE_METRICS, out_dir, cfg)
    if cfg.oracle.enabled:
        cmd_oracle(cfg, out_dir)
    return manifest
