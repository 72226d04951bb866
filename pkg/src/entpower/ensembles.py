"""Circular-ensemble sampling and bipartite state construction.

Unitaries are drawn from the circular unitary ensemble (CUE, i.e. Haar
measure on U(d)) or the circular orthogonal ensemble (COE, symmetric
unitaries U = W W^T with W Haar).  States live on a fixed bipartition
H_A (x) H_B with the composite index ordered A-major, matching the
convention of ``numpy.kron``: component (a, b) sits at a * d_b + b.

Randomness is counter based.  Every Monte Carlo sample owns a
:class:`RandomStream` keyed by (master_seed, stream_index), so results
do not depend on how samples are distributed over processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "EnsembleTag",
    "FieldTag",
    "BipartiteDims",
    "UnitaryMatrix",
    "PureState",
    "RandomStream",
    "sample_cue",
    "sample_coe",
    "random_state",
    "product_state",
    "basis_product_state",
]

_NORM_TOL = 1e-12


class EnsembleTag(Enum):
    """Provenance of a unitary: which measure it was drawn from."""

    CUE = "cue"
    COE = "coe"
    FIXED = "fixed"


class FieldTag(Enum):
    """Number field the amplitudes of a state are drawn from."""

    REAL = "real"
    COMPLEX = "complex"


@dataclass(frozen=True)
class BipartiteDims:
    """Dimensions (d_a, d_b) of the two factors of H_A (x) H_B."""

    d_a: int
    d_b: int

    def __post_init__(self):
        if self.d_a < 1 or self.d_b < 1:
            raise ValueError(f"subsystem dimensions must be >= 1, got ({self.d_a}, {self.d_b})")

    @property
    def d(self) -> int:
        """Total dimension d_a * d_b."""
        return self.d_a * self.d_b


@dataclass(eq=False)
class UnitaryMatrix:
    """A d x d unitary with its bipartition and ensemble provenance.

    Parameters
    ----------
    dims :
        Bipartition of the space the matrix acts on.
    entries :
        Complex (d, d) array.  Coerced to complex128; unitarity is the
        caller's responsibility (samplers guarantee it to ~1e-14, see
        :meth:`unitarity_defect`).
    ensemble_tag :
        Where the matrix came from.  Derived matrices (powers,
        reconstructions) carry ``EnsembleTag.FIXED``.
    """

    dims: BipartiteDims
    entries: np.ndarray
    ensemble_tag: EnsembleTag

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.complex128)
        d = self.dims.d
        if self.entries.shape != (d, d):
            raise ValueError(f"expected shape ({d}, {d}), got {self.entries.shape}")

    def unitarity_defect(self) -> float:
        """max |U U^dag - 1|, entrywise."""
        d = self.dims.d
        g = self.entries @ self.entries.conj().T
        return float(np.max(np.abs(g - np.eye(d))))


@dataclass(eq=False)
class PureState:
    """Normalized pure state on H_A (x) H_B, stored as a flat vector.

    The constructor enforces unit norm to 1e-12 and, for
    ``FieldTag.REAL``, that the imaginary part is exactly zero.
    """

    dims: BipartiteDims
    amplitudes: np.ndarray
    field_tag: FieldTag

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.dims.d,):
            raise ValueError(f"expected shape ({self.dims.d},), got {self.amplitudes.shape}")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state not normalized: |psi| = {norm!r}")
        if self.field_tag is FieldTag.REAL and np.any(self.amplitudes.imag != 0.0):
            raise ValueError("field_tag REAL requires exactly real amplitudes")


@dataclass
class RandomStream:
    """One independent Philox stream, keyed by (master_seed, stream_index).

    The key is the Philox counter key, not a seed sequence: streams for
    different indices under the same master seed never collide, and the
    sample drawn from stream i is independent of whether streams j != i
    were ever instantiated.  Draws within one stream are sequential, so
    e.g. a unitary followed by a state consume disjoint counter ranges.
    """

    master_seed: int
    stream_index: int
    _generator: np.random.Generator | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.master_seed < 0 or self.stream_index < 0:
            raise ValueError("master_seed and stream_index must be non-negative")

    def generator(self) -> np.random.Generator:
        if self._generator is None:
            key = np.array([self.master_seed, self.stream_index], dtype=np.uint64)
            self._generator = np.random.Generator(np.random.Philox(key=key))
        return self._generator


def _ginibre(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return z / np.sqrt(2.0)


def sample_cue(d: int, stream: RandomStream, dims: BipartiteDims | None = None) -> UnitaryMatrix:
    """Draw one Haar-distributed unitary from U(d).

    QR of a complex Ginibre matrix, with the phases of the R diagonal
    pushed into Q.  Without that rescaling the distribution of Q is not
    Haar (it depends on the sign/phase convention of the QR routine).
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if dims is None:
        dims = BipartiteDims(d, 1)
    elif dims.d != d:
        raise ValueError(f"dims product {dims.d} does not match d = {d}")
    q, r = np.linalg.qr(_ginibre(d, stream.generator()))
    diag = np.diagonal(r)
    q = q * (diag / np.abs(diag))
    return UnitaryMatrix(dims, q, EnsembleTag.CUE)


def sample_coe(d: int, stream: RandomStream, dims: BipartiteDims | None = None) -> UnitaryMatrix:
    """Draw one COE matrix, U = W W^T with W Haar.

    The product is symmetrized as (P + P^T) / 2 so the stored entries
    are bitwise symmetric; floating point matrix multiply does not
    guarantee that on its own.
    """
    w = sample_cue(d, stream, dims)
    p = w.entries @ w.entries.T
    return UnitaryMatrix(w.dims, (p + p.T) / 2.0, EnsembleTag.COE)


def random_state(d: int, field_tag: FieldTag, stream: RandomStream,
                 dims: BipartiteDims | None = None) -> PureState:
    """Draw a uniformly random pure state (normalized Gaussian vector).

    COMPLEX gives the unitarily invariant (Fubini-Study) measure, REAL
    the orthogonally invariant measure on the real sphere.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if dims is None:
        dims = BipartiteDims(d, 1)
    elif dims.d != d:
        raise ValueError(f"dims product {dims.d} does not match d = {d}")
    rng = stream.generator()
    if field_tag is FieldTag.COMPLEX:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    else:
        v = rng.standard_normal(d).astype(np.complex128)
    return PureState(dims, v / np.linalg.norm(v), field_tag)


def product_state(psi_a: PureState, psi_b: PureState) -> PureState:
    """Tensor product psi_a (x) psi_b on dims (d_a, d_b).

    Both factors must be unipartite (their dims must have d_b = 1 resp.
    be interpretable as a single factor); the result is real only if
    both factors are.
    """
    if psi_a.dims.d_b != 1 or psi_b.dims.d_b != 1:
        raise ValueError("product_state expects unipartite factors (dims (d, 1))")
    dims = BipartiteDims(psi_a.dims.d, psi_b.dims.d)
    amps = np.kron(psi_a.amplitudes, psi_b.amplitudes)
    both_real = psi_a.field_tag is FieldTag.REAL and psi_b.field_tag is FieldTag.REAL
    return PureState(dims, amps, FieldTag.REAL if both_real else FieldTag.COMPLEX)


def basis_product_state(dims: BipartiteDims) -> PureState:
    """The fixed product state |0>_A (x) |0>_B (first basis vector)."""
    amps = np.zeros(dims.d, dtype=np.complex128)
    amps[0] = 1.0
    return PureState(dims, amps, FieldTag.REAL)
