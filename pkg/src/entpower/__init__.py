"""Entangling power and operator entanglement of iterated random unitaries.

Monte Carlo estimation over the circular ensembles (CUE/COE) with
closed-form cross-checks: how fast the mean linear entropy generated
by U^n decays with n, where it saturates, and how both relate to the
spectral form factor.
"""

from .closedform import (
    CaseTag,
    FitResult,
    cue_form_factor,
    cue_fourth_moment,
    ep1,
    ep_inf,
    fit_form_factor_model,
    gap_leading,
    model_prediction,
    op_ent_cue,
)
from .dynamics import (
    DegenerateSpectrumError,
    EntropySeries,
    SpectralDecomposition,
    asymptotic_entropy_spectral,
    entropy_series,
    form_factor,
    form_factor_series,
    matrix_power,
    operator_entanglement_series,
    spectral_decompose,
    time_average_entropy,
)
from .ensembles import (
    BipartiteDims,
    EnsembleTag,
    FieldTag,
    PureState,
    RandomStream,
    UnitaryMatrix,
    basis_product_state,
    product_state,
    random_state,
    sample_coe,
    sample_cue,
)
from .entanglement import (
    ReducedDensityMatrix,
    linear_entropy,
    operator_entanglement,
    operator_entanglement_naive,
    reduced_density_a,
    reduced_density_b,
)
from .montecarlo import (
    ConfigError,
    ExperimentConfig,
    ExperimentKind,
    ResultRow,
    ResultTable,
    RunningStats,
    StateMode,
    run_experiment,
    stats_merge,
    stats_update,
    z_score,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteDims",
    "UnitaryMatrix",
    "PureState",
    "RandomStream",
    "EnsembleTag",
    "FieldTag",
    "sample_cue",
    "sample_coe",
    "random_state",
    "product_state",
    "basis_product_state",
    "ReducedDensityMatrix",
    "reduced_density_a",
    "reduced_density_b",
    "linear_entropy",
    "operator_entanglement",
    "operator_entanglement_naive",
    "DegenerateSpectrumError",
    "SpectralDecomposition",
    "EntropySeries",
    "spectral_decompose",
    "matrix_power",
    "entropy_series",
    "operator_entanglement_series",
    "time_average_entropy",
    "asymptotic_entropy_spectral",
    "form_factor",
    "form_factor_series",
    "CaseTag",
    "FitResult",
    "ep1",
    "op_ent_cue",
    "ep_inf",
    "cue_form_factor",
    "cue_fourth_moment",
    "gap_leading",
    "fit_form_factor_model",
    "model_prediction",
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
    "__version__",
]
