"""Seed-deterministic Monte Carlo driver for the five experiment kinds.

Samples are indexed 0..samples-1 and each index owns a Philox stream
keyed by (master_seed, index), so the value contributed by sample i is
a pure function of the config.  Accumulation is fixed too: samples are
folded into per-n Welford accumulators in index order within chunks of
CHUNK_SIZE, and chunk accumulators are merged in ascending chunk order.
Workers only change who computes a chunk, never the arithmetic, which
makes the result rows bit-identical for any parallelism.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from enum import Enum
from multiprocessing import get_context

import numpy as np

from .closedform import CaseTag
from .dynamics import (
    DegenerateSpectrumError,
    asymptotic_entropy_spectral,
    entropy_series,
    form_factor_series,
    operator_entanglement_series,
    time_average_entropy,
)
from .ensembles import (
    BipartiteDims,
    EnsembleTag,
    FieldTag,
    PureState,
    RandomStream,
    basis_product_state,
    product_state,
    random_state,
    sample_coe,
    sample_cue,
)

__all__ = [
    "ConfigError",
    "ExperimentKind",
    "StateMode",
    "ExperimentConfig",
    "RunningStats",
    "stats_update",
    "stats_merge",
    "ResultRow",
    "ResultTable",
    "run_experiment",
    "z_score",
    "CHUNK_SIZE",
]

CHUNK_SIZE = 512
# fixed initial states draw from a stream index no sample index reaches
_FIXED_STATE_STREAM = 2**63
_ASYMPTOTIC_N = -1


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class ExperimentKind(Enum):
    EP_CURVE = "ep_curve"
    OPENT_CURVE = "opent_curve"
    FORM_FACTOR = "form_factor"
    FOURTH_MOMENT = "fourth_moment"
    ASYMPTOTIC = "asymptotic"


class StateMode(Enum):
    FIXED_PRODUCT = "fixed"
    RANDOM_COMPLEX_PRODUCT = "random_complex"
    RANDOM_REAL_PRODUCT = "random_real"
    NONE = "none"


_STATE_KINDS = (ExperimentKind.EP_CURVE, ExperimentKind.ASYMPTOTIC)


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one Monte Carlo run.

    state_mode applies to EP_CURVE and ASYMPTOTIC only; the operator
    kinds take NONE.  With FIXED_PRODUCT the default initial state is
    |0>_A (x) |0>_B; setting fixed_state_seed draws one random product
    state (components per fixed_state_field) once and reuses it for
    every sample, which is how "the average over states is redundant"
    claims get exercised.
    """

    kind: ExperimentKind
    ensemble: EnsembleTag
    state_mode: StateMode
    d_a: int
    d_b: int
    n_max: int
    samples: int
    master_seed: int
    time_average_n: int = 100_000
    fixed_state_seed: int | None = None
    fixed_state_field: FieldTag = FieldTag.REAL

    def __post_init__(self):
        if self.d_a < 1 or self.d_b < 1:
            raise ConfigError(f"subsystem dimensions must be >= 1, got ({self.d_a}, {self.d_b})")
        if self.ensemble not in (EnsembleTag.CUE, EnsembleTag.COE):
            raise ConfigError(f"ensemble must be CUE or COE, got {self.ensemble}")
        if self.samples < 2:
            raise ConfigError(f"samples must be >= 2, got {self.samples}")
        if self.n_max < 1:
            raise ConfigError(f"n_max must be >= 1, got {self.n_max}")
        if self.master_seed < 0:
            raise ConfigError(f"master_seed must be >= 0, got {self.master_seed}")
        if self.time_average_n < 1:
            raise ConfigError(f"time_average_n must be >= 1, got {self.time_average_n}")
        if self.kind in _STATE_KINDS:
            if self.state_mode is StateMode.NONE:
                raise ConfigError(f"{self.kind.value} needs an initial-state mode")
        elif self.state_mode is not StateMode.NONE:
            raise ConfigError(f"{self.kind.value} acts on operators; state_mode must be NONE")

    @property
    def dims(self) -> BipartiteDims:
        return BipartiteDims(self.d_a, self.d_b)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = v.value if isinstance(v, Enum) else v
        return out

    def case_tag(self) -> CaseTag | None:
        """Which closed-form case this run realizes, if any.

        CUE is case A for every initial-state mode (the Haar average
        makes the fixed/random distinction irrelevant).  COE splits on
        the state field: real fixed or real random states are case C,
        random complex states case B; a fixed complex state has no
        invariance argument and therefore no tag.
        """
        if self.ensemble is EnsembleTag.CUE:
            return CaseTag.A_CUE_COMPLEX
        if self.state_mode is StateMode.RANDOM_COMPLEX_PRODUCT:
            return CaseTag.B_COE_COMPLEX
        if self.state_mode is StateMode.RANDOM_REAL_PRODUCT:
            return CaseTag.C_COE_REAL
        if self.state_mode is StateMode.FIXED_PRODUCT:
            if self.fixed_state_seed is None or self.fixed_state_field is FieldTag.REAL:
                return CaseTag.C_COE_REAL
        return None


@dataclass(frozen=True)
class RunningStats:
    """Streaming count / mean / sum of squared deviations."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def variance(self) -> float:
        if self.count < 2:
            return float("nan")
        return self.m2 / (self.count - 1)

    def stderr(self) -> float:
        if self.count < 2:
            return float("nan")
        return float(np.sqrt(self.variance() / self.count))


def stats_update(s: RunningStats, x: float) -> RunningStats:
    """Welford single-pass update."""
    count = s.count + 1
    delta = x - s.mean
    mean = s.mean + delta / count
    return RunningStats(count, mean, s.m2 + delta * (x - mean))


def stats_merge(a: RunningStats, b: RunningStats) -> RunningStats:
    """Chan-style combination of two disjoint accumulators."""
    if a.count == 0:
        return b
    if b.count == 0:
        return a
    count = a.count + b.count
    delta = b.mean - a.mean
    mean = a.mean + delta * (b.count / count)
    m2 = a.m2 + b.m2 + delta * delta * (a.count * b.count / count)
    return RunningStats(count, mean, m2)


@dataclass(frozen=True)
class ResultRow:
    n: int
    mean: float
    stderr: float
    count: int


@dataclass
class ResultTable:
    """Per-n statistics rows plus run metadata.

    The rows are part of the deterministic contract; metadata echoes
    the config and records wall time, which is not.
    """

    rows: list[ResultRow]
    metadata: dict

    def row_for(self, n: int) -> ResultRow:
        for row in self.rows:
            if row.n == n:
                return row
        raise KeyError(f"no row for n = {n}")


def _fixed_state(cfg: ExperimentConfig) -> PureState:
    if cfg.fixed_state_seed is None:
        return basis_product_state(cfg.dims)
    stream = RandomStream(cfg.fixed_state_seed, _FIXED_STATE_STREAM)
    psi_a = random_state(cfg.d_a, cfg.fixed_state_field, stream)
    psi_b = random_state(cfg.d_b, cfg.fixed_state_field, stream)
    return product_state(psi_a, psi_b)


def _sample_state(cfg: ExperimentConfig, fixed: PureState | None, stream: RandomStream) -> PureState:
    if cfg.state_mode is StateMode.FIXED_PRODUCT:
        return fixed
    f = FieldTag.COMPLEX if cfg.state_mode is StateMode.RANDOM_COMPLEX_PRODUCT else FieldTag.REAL
    psi_a = random_state(cfg.d_a, f, stream)
    psi_b = random_state(cfg.d_b, f, stream)
    return product_state(psi_a, psi_b)


def _chunk_stats(cfg: ExperimentConfig, start: int, count: int):
    """Accumulate samples [start, start+count) in index order.

    Returns (count, means, m2s, fallbacks) with one entry per result
    row.  Draw order within a sample's stream is fixed: the unitary
    first, then (for random state modes) the A and B factors.
    """
    dims = cfg.dims
    d = dims.d
    n_rows = 1 if cfg.kind is ExperimentKind.ASYMPTOTIC else cfg.n_max
    mean = np.zeros(n_rows)
    m2 = np.zeros(n_rows)
    fixed = _fixed_state(cfg) if cfg.state_mode is StateMode.FIXED_PRODUCT else None
    sampler = sample_cue if cfg.ensemble is EnsembleTag.CUE else sample_coe
    fallbacks = 0
    for k in range(count):
        stream = RandomStream(cfg.master_seed, start + k)
        u = sampler(d, stream, dims)
        if cfg.kind is ExperimentKind.EP_CURVE:
            x = entropy_series(u, _sample_state(cfg, fixed, stream), cfg.n_max).values
        elif cfg.kind is ExperimentKind.OPENT_CURVE:
            x = operator_entanglement_series(u, cfg.n_max).values
        elif cfg.kind is ExperimentKind.FORM_FACTOR:
            x = form_factor_series(u, cfg.n_max)
        elif cfg.kind is ExperimentKind.FOURTH_MOMENT:
            x = form_factor_series(u, cfg.n_max) ** 2
        else:
            psi = _sample_state(cfg, fixed, stream)
            try:
                x = np.array([asymptotic_entropy_spectral(u, psi)])
            except DegenerateSpectrumError:
                fallbacks += 1
                x = np.array([time_average_entropy(u, psi, cfg.time_average_n)])
        delta = x - mean
        mean += delta / (k + 1)
        m2 += delta * (x - mean)
    return count, mean, m2, fallbacks


def _merge_chunks(parts):
    count, mean, m2, fallbacks = 0, None, None, 0
    for c_count, c_mean, c_m2, c_fb in parts:
        fallbacks += c_fb
        if mean is None:
            count, mean, m2 = c_count, c_mean, c_m2
            continue
        total = count + c_count
        delta = c_mean - mean
        mean = mean + delta * (c_count / total)
        m2 = m2 + c_m2 + delta * delta * (count * c_count / total)
        count = total
    return count, mean, m2, fallbacks


def run_experiment(cfg: ExperimentConfig, parallelism: int = 1) -> ResultTable:
    """Run one experiment; rows are identical for any parallelism.

    EP_CURVE / OPENT_CURVE produce one row per n = 1..n_max;
    FORM_FACTOR / FOURTH_MOMENT likewise for |t_n|^2 / |t_n|^4;
    ASYMPTOTIC produces a single row with the n = -1 sentinel, falling
    back from the spectral formula to the direct time average when a
    sample's spectrum is flagged degenerate.  More than 1% fallbacks
    adds a warning to the metadata.
    """
    if parallelism < 1:
        raise ConfigError(f"parallelism must be >= 1, got {parallelism}")
    t0 = time.perf_counter()
    spans = [(s, min(CHUNK_SIZE, cfg.samples - s)) for s in range(0, cfg.samples, CHUNK_SIZE)]
    if parallelism == 1 or len(spans) == 1:
        parts = [_chunk_stats(cfg, s, c) for s, c in spans]
    else:
        with ProcessPoolExecutor(max_workers=parallelism, mp_context=get_context("spawn")) as pool:
            parts = list(pool.map(_chunk_stats, *zip(*((cfg, s, c) for s, c in spans))))
    count, mean, m2, fallbacks = _merge_chunks(parts)
    variance = m2 / (count - 1)
    stderr = np.sqrt(variance / count)
    if cfg.kind is ExperimentKind.ASYMPTOTIC:
        ns = [_ASYMPTOTIC_N]
    else:
        ns = list(range(1, cfg.n_max + 1))
    rows = [ResultRow(n, float(mean[i]), float(stderr[i]), count) for i, n in enumerate(ns)]
    warnings = []
    if fallbacks > 0.01 * cfg.samples:
        warnings.append(
            f"degeneracy fallback used for {fallbacks}/{cfg.samples} samples; "
            "asymptotic estimate mixes spectral and direct averages")
    metadata = {
        "config": cfg.to_dict(),
        "version": _pkg_version(),
        "wall_seconds": time.perf_counter() - t0,
        "fallback_count": fallbacks,
        "warnings": warnings,
    }
    return ResultTable(rows, metadata)


def _pkg_version() -> str:
    from importlib.metadata import PackageNotFoundError, version

    try:
        return version("entpower")
    except PackageNotFoundError:
        return "unknown"


def z_score(observed_mean: float, observed_stderr: float, target) -> float:
    """Gate statistic (mean - target) / stderr; target may be exact."""
    if not observed_stderr > 0:
        raise ValueError(f"stderr must be positive, got {observed_stderr}")
    return (observed_mean - float(target)) / observed_stderr
