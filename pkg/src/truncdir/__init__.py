"""Samplers and diagnostics for Dirichlet posteriors under truncated
multinomial observations.

Two MCMC routes target the same posterior: an auxiliary-variable Gibbs
sampler that restores conjugacy through geometric augmentation, and a
Dirichlet-proposal Metropolis-Hastings baseline.  A deterministic grid
integrator provides reference moments in low dimension, and the diagnostics
module quantifies mixing (autocorrelation, multivariate PSRF, statistic
convergence).  The harness runs multi-chain experiments to CSV/JSON.
"""

__version__ = "0.1.0"

from .simplex import (
    CountVector,
    DirichletParams,
    SimplexPoint,
    conjugate_posterior,
    dirichlet_log_density,
    multinomial_log_likelihood,
    sample_dirichlet,
)
from .model import (
    ObservationModel,
    TruncatedCounts,
    TruncationSet,
    posterior_log_density_unnormalized,
    sample_single_truncation_posterior,
    truncated_log_likelihood,
    truncated_mass,
)
from .trace import ChainEnsemble, ChainTrace
from .gibbs import (
    AuxCounts,
    AuxMode,
    GibbsState,
    augmented_counts,
    gibbs_step,
    initial_state,
    run_aux_chain,
    sample_aux,
)
from .mh import MhConfig, MhStats, log_acceptance_ratio, mh_step, propose, run_mh_chain, tune_beta
from .diagnostics import (
    MpsrfResult,
    MpsrfSingularError,
    ProjectionBasis,
    StatisticConvergence,
    autocorrelation,
    burn_in_slice,
    mpsrf,
    projection_basis,
    statistic_convergence,
)
from .oracle import (
    GridPosterior,
    MomentComparison,
    SimplexGrid,
    build_grid,
    compare_moments,
    grid_posterior,
)
from .config import ConfigError, ExperimentConfig, load_config
from .harness import (
    RunManifest,
    cmd_diagnose,
    cmd_experiment,
    cmd_oracle,
    cmd_sample,
    compute_checkpoints,
    load_ensemble,
    load_manifest,
    load_trace_csv,
    trace_content_hash,
)

__all__ = [
    "__version__",
    "SimplexPoint",
    "DirichletParams",
    "CountVector",
    "dirichlet_log_density",
    "sample_dirichlet",
    "multinomial_log_likelihood",
    "conjugate_posterior",
    "TruncationSet",
    "TruncatedCounts",
    "ObservationModel",
    "truncated_mass",
    "truncated_log_likelihood",
    "posterior_log_density_unnormalized",
    "sample_single_truncation_posterior",
    "ChainTrace",
    "ChainEnsemble",
    "AuxMode",
    "AuxCounts",
    "GibbsState",
    "sample_aux",
    "augmented_counts",
    "gibbs_step",
    "initial_state",
    "run_aux_chain",
    "MhConfig",
    "MhStats",
    "propose",
    "log_acceptance_ratio",
    "mh_step",
    "tune_beta",
    "run_mh_chain",
    "MpsrfSingularError",
    "ProjectionBasis",
    "MpsrfResult",
    "StatisticConvergence",
    "burn_in_slice",
    "autocorrelation",
    "projection_basis",
    "mpsrf",
    "statistic_convergence",
    "SimplexGrid",
    "GridPosterior",
    "MomentComparison",
    "build_grid",
    "grid_posterior",
    "compare_moments",
    "ConfigError",
    "ExperimentConfig",
    "load_config",
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
