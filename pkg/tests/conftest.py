import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from entpower.ensembles import EnsembleTag
from entpower.montecarlo import ExperimentConfig, ExperimentKind, StateMode, run_experiment

settings.register_profile(
    "desk",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("desk")

# one pass/fail line per acceptance criterion, echoed after the pytest
# summary so they are visible without -s
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def _run(kind, ensemble, state, n_max, seed, samples=100_000):
    cfg = ExperimentConfig(
        kind=kind,
        ensemble=ensemble,
        state_mode=state,
        d_a=4,
        d_b=5,
        n_max=n_max,
        samples=samples,
        master_seed=seed,
    )
    return run_experiment(cfg)


# Session fixtures for the desk-scale (1e5 sample) reference runs; each
# is computed once and shared by every criterion that reads it.

@pytest.fixture(scope="session")
def cue_ep_run():
    return _run(ExperimentKind.EP_CURVE, EnsembleTag.CUE, StateMode.FIXED_PRODUCT, 40, 101)


@pytest.fixture(scope="session")
def coe_ep_run():
    return _run(ExperimentKind.EP_CURVE, EnsembleTag.COE, StateMode.FIXED_PRODUCT, 40, 102)


@pytest.fixture(scope="session")
def cue_opent_run():
    return _run(ExperimentKind.OPENT_CURVE, EnsembleTag.CUE, StateMode.NONE, 40, 103)


@pytest.fixture(scope="session")
def coe_opent_run():
    return _run(ExperimentKind.OPENT_CURVE, EnsembleTag.COE, StateMode.NONE, 40, 104)


@pytest.fixture(scope="session")
def form_factor_run():
    return _run(ExperimentKind.FORM_FACTOR, EnsembleTag.CUE, StateMode.NONE, 40, 105)


@pytest.fixture(scope="session")
def fourth_moment_run():
    return _run(ExperimentKind.FOURTH_MOMENT, EnsembleTag.CUE, StateMode.NONE, 20, 106)


@pytest.fixture(scope="session")
def asymptotic_real_run():
    return _run(ExperimentKind.ASYMPTOTIC, EnsembleTag.COE, StateMode.FIXED_PRODUCT, 1, 107)


@pytest.fixture(scope="session")
def asymptotic_complex_run():
    return _run(ExperimentKind.ASYMPTOTIC, EnsembleTag.COE, StateMode.RANDOM_COMPLEX_PRODUCT, 1, 108)


def curve_stats(table):
    means = np.array([r.mean for r in table.rows])
    stderrs = np.array([r.stderr for r in table.rows])
    return means, stderrs
