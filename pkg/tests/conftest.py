"""Shared fixtures for the expensive multi-chain runs plus a terminal
summary that prints one pass/fail line per acceptance criterion."""

import time
from dataclasses import dataclass

import numpy as np
import pytest

from truncdir import (
    ChainEnsemble,
    MhConfig,
    grid_posterior,
    run_aux_chain,
    run_mh_chain,
    tune_beta,
)
from helpers import flat_alpha, two_term_model

ACCEPTANCE_FILE = "test_acceptance.py"
_acceptance_reports = {}


def pytest_runtest_logreport(report):
    if ACCEPTANCE_FILE not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _acceptance_reports[report.nodeid] = report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_reports:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_acceptance_reports):
        report = _acceptance_reports[nodeid]
        if report.passed:
            outcome = "PASS"
        elif report.skipped:
            outcome = "SKIP"
        else:
            outcome = "FAIL"
        terminalreporter.write_line(f"{outcome}  {nodeid.split('::')[-1]}")


def spawn_rngs(seed, count):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


@dataclass
class SamplerRun:
    ensemble: ChainEnsemble
    seconds: float
    beta: float | None = None


@pytest.fixture(scope="session")
def grid3():
    """Reference grid moments for the 3-component two-term posterior."""
    start = time.perf_counter()
    post = grid_posterior(flat_alpha(3), two_term_model(3), 128)
    return post, time.perf_counter() - start


@pytest.fixture(scope="session")
def run3_aux():
    """10 auxiliary-Gibbs chains x 20000 steps on the 3-component model."""
    alpha, model = flat_alpha(3), two_term_model(3)
    start = time.perf_counter()
    chains = [
        run_aux_chain(alpha, model, None, 20000, rng) for rng in spawn_rngs(2001, 10)
    ]
    return SamplerRun(ChainEnsemble(chains), time.perf_counter() - start)


@pytest.fixture(scope="session")
def run3_mh():
    """Tuned MH, 10 chains x 20000 steps on the 3-component model."""
    alpha, model = flat_alpha(3), two_term_model(3)
    start = time.perf_counter()
    rngs = spawn_rngs(2002, 11)
    beta, _ = tune_beta(alpha, model, MhConfig(10.0, 0.24, 5000), rngs[0])
    frozen = MhConfig(beta, 0.24, 0)
    chains = [run_mh_chain(alpha, model, None, 20000, frozen, rng) for rng in rngs[1:]]
    return SamplerRun(ChainEnsemble(chains), time.perf_counter() - start, beta)


@pytest.fixture(scope="session")
def fig10():
    """Both samplers on the 10-component model: 10 chains x 5000 each,
    MH frozen at its tuned proposal concentration."""
    alpha, model = flat_alpha(10), two_term_model(10)
    start = time.perf_counter()
    rngs = spawn_rngs(2003, 21)
    beta, _ = tune_beta(alpha, model, MhConfig(10.0, 0.24, 5000), rngs[0])
    frozen = MhConfig(beta, 0.24, 0)
    aux = ChainEnsemble(
        [run_aux_chain(alpha, model, None, 5000, rng) for rng in rngs[1:11]]
    )
    mh = ChainEnsemble(
        [run_mh_chain(alpha, model, None, 5000, frozen, rng) for rng in rngs[11:]]
    )
    seconds = time.perf_counter() - start
    return {"aux": SamplerRun(aux, seconds), "mh": SamplerRun(mh, seconds, beta)}
