import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entpower.dynamics import (
    DegenerateSpectrumError,
    asymptotic_entropy_spectral,
    entropy_series,
    form_factor,
    form_factor_series,
    matrix_power,
    operator_entanglement_series,
    spectral_decompose,
    time_average_entropy,
)
from entpower.ensembles import (
    BipartiteDims,
    EnsembleTag,
    FieldTag,
    PureState,
    RandomStream,
    UnitaryMatrix,
    basis_product_state,
    sample_cue,
)
from entpower.entanglement import linear_entropy, operator_entanglement

DIMS45 = BipartiteDims(4, 5)


def diag_unitary(phases, dims):
    return UnitaryMatrix(dims, np.diag(np.exp(1j * np.asarray(phases))), EnsembleTag.FIXED)


def cue(seed, idx=0, dims=DIMS45):
    return sample_cue(dims.d, RandomStream(seed, idx), dims)


def evolved_state(u, psi, n):
    amps = np.linalg.matrix_power(u.entries, n) @ psi.amplitudes
    return PureState(u.dims, amps / np.linalg.norm(amps), FieldTag.COMPLEX)


def test_spectral_decompose_diagonal_case():
    u = diag_unitary([0.0, np.pi / 2], BipartiteDims(2, 1))
    spec = spectral_decompose(u)
    assert np.allclose(np.sort(spec.phases), [0.0, np.pi / 2], atol=1e-12)
    # eigenvectors of a diagonal matrix: standard basis up to order/phase
    assert np.allclose(np.sort(np.abs(spec.vectors).ravel()), [0, 0, 1, 1], atol=1e-12)


def test_spectral_reconstruction_contract():
    for idx in range(5):
        u = cue(41, idx)
        spec = spectral_decompose(u)
        assert np.max(np.abs(spec.reconstruct() - u.entries)) < 1e-10
        g = spec.vectors @ spec.vectors.conj().T
        assert np.max(np.abs(g - np.eye(u.dims.d))) < 1e-10
        assert np.all(spec.phases >= 0.0) and np.all(spec.phases < 2 * np.pi)


def test_eigenphase_level_repulsion():
    # CUE spacings repel: far fewer tiny gaps than a Poisson spectrum
    d, samples = 8, 10_000
    cutoff = 0.1 * (2 * np.pi / d)
    small = 0
    for idx in range(samples):
        spec = spectral_decompose(sample_cue(d, RandomStream(59, idx)))
        s = np.sort(spec.phases)
        gaps = np.append(np.diff(s), s[0] + 2 * np.pi - s[-1])
        small += int(np.sum(gaps < cutoff))
    frac = small / (samples * d)
    se = np.sqrt(frac * (1 - frac) / (samples * d))
    assert frac + 5 * se < 0.095


def test_matrix_power_trivial_cases():
    u = cue(7)
    spec = spectral_decompose(u)
    assert np.max(np.abs(matrix_power(spec, 0).entries - np.eye(20))) < 1e-10
    assert np.max(np.abs(matrix_power(spec, 1).entries - u.entries)) < 1e-10
    with pytest.raises(ValueError):
        matrix_power(spec, -1)


def test_matrix_power_matches_direct_multiplication():
    u = cue(11)
    spec = spectral_decompose(u)
    direct = np.linalg.matrix_power(u.entries, 7)
    assert np.max(np.abs(matrix_power(spec, 7).entries - direct)) < 1e-8


@given(st.integers(0, 2**32), st.integers(0, 20), st.integers(0, 20))
def test_matrix_power_additivity(seed, m, n):
    u = sample_cue(6, RandomStream(seed, 0), BipartiteDims(2, 3))
    spec = spectral_decompose(u)
    lhs = matrix_power(spec, m + n).entries
    rhs = matrix_power(spec, m).entries @ matrix_power(spec, n).entries
    assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_matrix_power_unitary_at_long_times():
    spec = spectral_decompose(cue(13))
    u200 = matrix_power(spec, 200)
    assert u200.unitarity_defect() < 1e-9


def test_entropy_series_swap_keeps_product_states():
    dims = BipartiteDims(2, 2)
    m = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            m[b * 2 + a, a * 2 + b] = 1.0
    swap = UnitaryMatrix(dims, m, EnsembleTag.FIXED)
    psi = PureState(dims, np.array([0.0, 1.0, 0.0, 0.0]), FieldTag.REAL)  # |0>_A |1>_B
    series = entropy_series(swap, psi, 6)
    assert np.max(np.abs(series.values)) < 1e-12


def test_entropy_series_diagonal_map_never_entangles():
    phases = RandomStream(3, 0).generator().uniform(0, 2 * np.pi, 20)
    u = diag_unitary(phases, DIMS45)
    series = entropy_series(u, basis_product_state(DIMS45), 10)
    assert np.max(np.abs(series.values)) < 1e-12


def test_entropy_series_matches_direct_powers():
    u = cue(17)
    psi = basis_product_state(DIMS45)
    series = entropy_series(u, psi, 10)
    for n in (1, 2, 5, 10):
        direct = linear_entropy(evolved_state(u, psi, n))
        assert abs(series.values[n - 1] - direct) < 1e-10


@given(st.integers(0, 2**32))
def test_entropy_series_bounded(seed):
    u = sample_cue(6, RandomStream(seed, 0), BipartiteDims(2, 3))
    psi = basis_product_state(BipartiteDims(2, 3))
    series = entropy_series(u, psi, 12)
    assert np.all(series.values > -1e-12)
    assert np.all(series.values < 1.0 - 1.0 / 2 + 1e-12)


def test_operator_entanglement_series_matches_direct_powers():
    u = cue(19)
    series = operator_entanglement_series(u, 8)
    for n in (1, 2, 5, 8):
        un = UnitaryMatrix(DIMS45, np.linalg.matrix_power(u.entries, n), EnsembleTag.FIXED)
        assert abs(series.values[n - 1] - operator_entanglement(un)) < 1e-10


def test_time_average_of_diagonal_map_is_zero():
    phases = RandomStream(5, 0).generator().uniform(0, 2 * np.pi, 20)
    u = diag_unitary(phases, DIMS45)
    assert time_average_entropy(u, basis_product_state(DIMS45), 1000) < 1e-12


def test_time_average_cauchy_convergence():
    u = cue(23)
    psi = basis_product_state(DIMS45)
    a = time_average_entropy(u, psi, 100_000)
    b = time_average_entropy(u, psi, 200_000)
    assert abs(a - b) < 1e-3


def test_asymptotic_matches_time_average_oracle():
    u = cue(29)
    psi = basis_product_state(DIMS45)
    spectral = asymptotic_entropy_spectral(u, psi)
    direct = time_average_entropy(u, psi, 100_000)
    assert abs(spectral - direct) < 2e-3


def test_asymptotic_of_diagonal_map_is_zero():
    phases = RandomStream(7, 0).generator().uniform(0, 2 * np.pi, 20)
    u = diag_unitary(phases, DIMS45)
    assert abs(asymptotic_entropy_spectral(u, basis_product_state(DIMS45))) < 1e-12


def test_asymptotic_rejects_degenerate_phases():
    u = diag_unitary([0.3, 0.3, 1.0, 2.0], BipartiteDims(2, 2))
    psi = basis_product_state(BipartiteDims(2, 2))
    with pytest.raises(DegenerateSpectrumError):
        asymptotic_entropy_spectral(u, psi)


def test_asymptotic_rejects_fourth_order_resonance():
    # 0.1 + 0.5 = 0.2 + 0.4: distinct phases, resonant pair sums
    u = diag_unitary([0.1, 0.5, 0.2, 0.4], BipartiteDims(2, 2))
    psi = basis_product_state(BipartiteDims(2, 2))
    with pytest.raises(DegenerateSpectrumError):
        asymptotic_entropy_spectral(u, psi)


def test_degenerate_error_is_value_error():
    assert issubclass(DegenerateSpectrumError, ValueError)


def test_form_factor_identity():
    u = UnitaryMatrix(DIMS45, np.eye(20), EnsembleTag.FIXED)
    assert abs(form_factor(u, 3) - 400.0) < 1e-9


def test_form_factor_matches_trace_of_powers():
    u = cue(37)
    spec = spectral_decompose(u)
    series = form_factor_series(u, 10)
    for n in (1, 2, 7, 10):
        t = np.trace(matrix_power(spec, n).entries)
        assert abs(form_factor(u, n) - abs(t) ** 2) < 1e-8
        assert abs(series[n - 1] - form_factor(u, n)) < 1e-10
