import json

import numpy as np
import pytest

from entpower import montecarlo
from entpower.ensembles import EnsembleTag, FieldTag, RandomStream
from entpower.montecarlo import (
    ConfigError,
    ExperimentConfig,
    ExperimentKind,
    RunningStats,
    StateMode,
    run_experiment,
    stats_merge,
    stats_update,
    z_score,
)


def small_config(**overrides):
    base = dict(
        kind=ExperimentKind.EP_CURVE,
        ensemble=EnsembleTag.CUE,
        state_mode=StateMode.FIXED_PRODUCT,
        d_a=2,
        d_b=3,
        n_max=6,
        samples=600,
        master_seed=11,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_stats_update_basics():
    s = stats_update(RunningStats(), 5.0)
    assert (s.count, s.mean, s.m2) == (1, 5.0, 0.0)
    t = RunningStats()
    for x in (1.0, 2.0, 3.0):
        t = stats_update(t, x)
    assert t.count == 3
    assert abs(t.mean - 2.0) < 1e-15
    assert abs(t.variance() - 1.0) < 1e-15


def test_stats_update_constant_stream():
    s = RunningStats()
    for _ in range(1_000_000):
        s = stats_update(s, 0.25)
    assert s.mean == 0.25
    assert s.m2 < 1e-18


def test_stats_merge_identity_and_small_case():
    s = stats_update(stats_update(RunningStats(), 1.0), 2.0)
    assert stats_merge(RunningStats(), s) == s
    assert stats_merge(s, RunningStats()) == s
    merged = stats_merge(s, stats_update(RunningStats(), 3.0))
    assert merged.count == 3
    assert abs(merged.mean - 2.0) < 1e-12
    assert abs(merged.variance() - 1.0) < 1e-12


def test_stats_merge_partition_invariance():
    rng = RandomStream(77, 0).generator()
    data = rng.standard_normal(80_000)
    shards = []
    for part in np.split(data, 8):
        s = RunningStats()
        for x in part:
            s = stats_update(s, float(x))
        shards.append(s)
    forward = shards[0]
    for s in shards[1:]:
        forward = stats_merge(forward, s)
    perm = [shards[i] for i in (5, 2, 7, 0, 3, 6, 1, 4)]
    backward = perm[0]
    for s in perm[1:]:
        backward = stats_merge(backward, s)
    assert forward.count == backward.count == 80_000
    assert abs(forward.mean - backward.mean) < 1e-10
    assert abs(forward.variance() - backward.variance()) < 1e-10


def test_config_validation():
    with pytest.raises(ConfigError):
        small_config(state_mode=StateMode.NONE)  # ep curve needs a state
    with pytest.raises(ConfigError):
        small_config(kind=ExperimentKind.OPENT_CURVE)  # operator kind with a state
    with pytest.raises(ConfigError):
        small_config(samples=1)
    with pytest.raises(ConfigError):
        small_config(ensemble=EnsembleTag.FIXED)
    with pytest.raises(ConfigError):
        small_config(master_seed=-4)
    with pytest.raises(ConfigError):
        run_experiment(small_config(), parallelism=0)


def test_config_echo_is_json_safe():
    echo = small_config().to_dict()
    assert json.dumps(echo)
    assert echo["kind"] == "ep_curve"
    assert echo["ensemble"] == "cue"


def test_minimum_viable_run():
    table = run_experiment(small_config(samples=2, n_max=3))
    assert [r.n for r in table.rows] == [1, 2, 3]
    for row in table.rows:
        assert row.count == 2
        assert np.isfinite(row.stderr)


def test_rows_independent_of_parallelism():
    cfg = small_config()  # 600 samples = 2 chunks
    serial = run_experiment(cfg, parallelism=1)
    parallel = run_experiment(cfg, parallelism=4)
    assert serial.rows == parallel.rows


def test_asymptotic_sentinel_row():
    cfg = small_config(kind=ExperimentKind.ASYMPTOTIC, n_max=1, samples=50)
    table = run_experiment(cfg)
    assert len(table.rows) == 1
    assert table.rows[0].n == -1
    assert 0.0 < table.rows[0].mean < 1.0
    assert table.metadata["fallback_count"] == 0


def test_asymptotic_fallback_warning(monkeypatch):
    from entpower.dynamics import DegenerateSpectrumError, time_average_entropy

    def always_degenerate(u, psi):
        raise DegenerateSpectrumError("forced for the fallback path")

    monkeypatch.setattr(montecarlo, "asymptotic_entropy_spectral", always_degenerate)
    cfg = small_config(kind=ExperimentKind.ASYMPTOTIC, n_max=1, samples=20,
                       time_average_n=2_000)
    table = run_experiment(cfg)
    assert table.metadata["fallback_count"] == 20
    assert table.metadata["warnings"]
    # fallback estimates are still the physical time average
    assert 0.0 < table.rows[0].mean < 1.0


def test_fixed_state_choice_is_statistically_redundant():
    # CUE: any fixed product state gives the same curve in distribution
    base = small_config(samples=4_000, n_max=6)
    other = small_config(samples=4_000, n_max=6, fixed_state_seed=123,
                         fixed_state_field=FieldTag.COMPLEX)
    ta, tb = run_experiment(base), run_experiment(other)
    for ra, rb in zip(ta.rows, tb.rows):
        pooled = np.hypot(ra.stderr, rb.stderr)
        assert abs(ra.mean - rb.mean) < 5 * pooled


def test_fixed_real_state_redundant_under_coe():
    base = small_config(ensemble=EnsembleTag.COE, samples=4_000, n_max=6)
    other = small_config(ensemble=EnsembleTag.COE, samples=4_000, n_max=6,
                         fixed_state_seed=321, fixed_state_field=FieldTag.REAL)
    ta, tb = run_experiment(base), run_experiment(other)
    for ra, rb in zip(ta.rows, tb.rows):
        pooled = np.hypot(ra.stderr, rb.stderr)
        assert abs(ra.mean - rb.mean) < 5 * pooled


def test_case_tag_resolution():
    assert small_config().case_tag().value == "a"
    coe = small_config(ensemble=EnsembleTag.COE)
    assert coe.case_tag().value == "c"  # default fixed state is real
    assert small_config(ensemble=EnsembleTag.COE,
                        state_mode=StateMode.RANDOM_COMPLEX_PRODUCT).case_tag().value == "b"
    assert small_config(ensemble=EnsembleTag.COE,
                        state_mode=StateMode.RANDOM_REAL_PRODUCT).case_tag().value == "c"
    assert small_config(ensemble=EnsembleTag.COE, fixed_state_seed=5,
                        fixed_state_field=FieldTag.COMPLEX).case_tag() is None


def test_z_score():
    assert z_score(1.0, 0.5, 1.0) == 0.0
    assert z_score(2.0, 0.5, 1.0) == 2.0
    with pytest.raises(ValueError):
        z_score(1.0, 0.0, 1.0)
