"""Linear entropy of states and operator entanglement of unitaries.

Everything here reduces to squared Frobenius norms.  For a state with
amplitude matrix M (shape (d_a, d_b), A-major flattening) the reduced
density matrix is rho_A = M M^dag and

    S_L = 1 - tr rho_A^2 = 1 - ||M M^dag||_F^2.

For a unitary, tr_2[(U (x) U^*)-type contractions] collapse to the same
structure after the reshuffle R(U), see :func:`operator_entanglement`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensembles import PureState, UnitaryMatrix

__all__ = [
    "ReducedDensityMatrix",
    "reduced_density_a",
    "reduced_density_b",
    "linear_entropy",
    "operator_entanglement",
    "operator_entanglement_naive",
]

# the naive reference implementation loops over d^4 index tuples
_NAIVE_DIM_LIMIT = 12


@dataclass(eq=False)
class ReducedDensityMatrix:
    """Hermitian, unit-trace density matrix on one factor."""

    dim: int
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.complex128)
        if self.entries.shape != (self.dim, self.dim):
            raise ValueError(f"expected shape ({self.dim}, {self.dim}), got {self.entries.shape}")

    def purity(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))


def _amplitude_matrix(psi: PureState) -> np.ndarray:
    return psi.amplitudes.reshape(psi.dims.d_a, psi.dims.d_b)


def reduced_density_a(psi: PureState) -> ReducedDensityMatrix:
    """rho_A = tr_B |psi><psi| = M M^dag."""
    m = _amplitude_matrix(psi)
    return ReducedDensityMatrix(psi.dims.d_a, m @ m.conj().T)


def reduced_density_b(psi: PureState) -> ReducedDensityMatrix:
    """rho_B = tr_A |psi><psi| = M^T M^*."""
    m = _amplitude_matrix(psi)
    return ReducedDensityMatrix(psi.dims.d_b, m.T @ m.conj())


def purity_from_amplitudes(amplitudes: np.ndarray, d_a: int, d_b: int) -> float:
    """tr rho_A^2 for a flat amplitude vector, without building rho_A.

    ||M M^dag||_F^2 costs O(d_a^2 d_b); cheaper than squaring rho_A when
    d_b is the large factor.
    """
    m = amplitudes.reshape(d_a, d_b)
    g = m @ m.conj().T
    return float(np.sum(np.abs(g) ** 2))


def purity_batch(states: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    """tr rho_A^2 for a batch of column states, shape (d, n) -> (n,)."""
    m = states.reshape(d_a, d_b, -1)
    g = np.einsum("abn,cbn->acn", m, m.conj())
    return np.sum(np.abs(g) ** 2, axis=(0, 1)).real


def linear_entropy(psi: PureState) -> float:
    """Linear entropy S_L(psi) = 1 - tr rho_A^2, in [0, 1 - 1/min(d_a, d_b)]."""
    return 1.0 - purity_from_amplitudes(psi.amplitudes, psi.dims.d_a, psi.dims.d_b)


def _reshuffled(entries: np.ndarray, d_a: int, d_b: int) -> np.ndarray:
    # U[(a1 b1), (a2 b2)] -> R[(a1 a2), (b1 b2)]
    u4 = entries.reshape(d_a, d_b, d_a, d_b)
    return u4.transpose(0, 2, 1, 3).reshape(d_a * d_a, d_b * d_b)


def operator_purity(entries: np.ndarray, d_a: int, d_b: int) -> float:
    """||R R^dag||_F^2 / d^2 with R the reshuffle of U."""
    r = _reshuffled(entries, d_a, d_b)
    g = r @ r.conj().T
    d = d_a * d_b
    return float(np.sum(np.abs(g) ** 2)) / (d * d)


def operator_entanglement(u: UnitaryMatrix) -> float:
    """Linear operator entanglement of U across the (A, B) split.

    U / sqrt(d) is a unit vector in operator space; its Schmidt
    coefficients across the split are the singular values of the
    reshuffled matrix R(U) / sqrt(d), so

        S_L(U) = 1 - ||R R^dag||_F^2 / d^2.

    Zero iff U is a product U_A (x) U_B.
    """
    dims = u.dims
    return 1.0 - operator_purity(u.entries, dims.d_a, dims.d_b)


def operator_entanglement_naive(u: UnitaryMatrix) -> float:
    """Reference implementation, literal eightfold index sum.

    Computes 1 - (1/d^2) sum U[a1b1,a2b2] U*[a1b1',a2b2'] U*[a1'b1,a2'b2]
    U[a1'b1',a2'b2'] over all primed/unprimed index tuples, O(d^4) work
    with no factorization.  Only for cross-checking the reshuffle route;
    refuses d > 12.
    """
    dims = u.dims
    d_a, d_b, d = dims.d_a, dims.d_b, dims.d
    if d > _NAIVE_DIM_LIMIT:
        raise ValueError(f"naive operator entanglement is limited to d <= {_NAIVE_DIM_LIMIT}, got {d}")
    u4 = u.entries.reshape(d_a, d_b, d_a, d_b)
    s = np.einsum(
        "aBcD,abcd,eBgD,ebgd->",
        u4, u4.conj(), u4.conj(), u4,
    )
    return float(1.0 - s.real / (d * d))
