"""Dense complex-matrix primitives: eigendecomposition, propagators, Kronecker products, partial trace.

Tensor ordering is system ⊗ environment everywhere: the system factor is the
left Kronecker factor and `partial_trace_env` traces out the right one.
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

import config as cfg
import logger_setup as logger_module
from errors import ConvergenceFailure, DimensionMismatch, NotHermitian

logger = logger_module.logger


def as_matrix(A) -> np.ndarray:
    """
    Coerce input to a square, finite complex128 matrix.

    Args:
        A: Array-like square matrix

    Returns:
        Complex128 array of shape (dim, dim)

    Raises:
        DimensionMismatch: If A is not square
        ValueError: If A has NaN/Inf entries
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DimensionMismatch(f"Expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("Matrix has non-finite entries")
    return A


def hermiticity_residual(A: np.ndarray) -> float:
    """Max-abs entry of A - A^H."""
    A = np.asarray(A)
    return float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0


def frobenius(A: np.ndarray) -> float:
    return float(np.linalg.norm(A, 'fro'))


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def pauli_matrices() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (σ_x, σ_y, σ_z)."""
    sx = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    sy = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    sz = np.array([[1, 0], [0, -1]], dtype=np.complex128)
    return sx, sy, sz


def hermitian_eigendecompose(A, tol_herm: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a Hermitian matrix.

    Args:
        A: Hermitian matrix
        tol_herm: Hermiticity tolerance (defaults to config)

    Returns:
        Tuple of (eigenvalues ascending, eigenvectors as orthonormal columns)

    Raises:
        NotHermitian: If max |A - A^H| exceeds tol_herm
        ConvergenceFailure: If LAPACK does not converge
    """
    A = as_matrix(A)
    tol = cfg.config.tol_herm if tol_herm is None else tol_herm
    residual = hermiticity_residual(A)
    if residual > tol:
        logger.error(f"Hermiticity residual {residual:.3e} exceeds {tol:.1e}")
        raise NotHermitian(f"Matrix is not Hermitian (residual {residual:.3e} > {tol:.1e})", residual)

    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(0.5 * (A + A.conj().T))
    except np.linalg.LinAlgError as e:
        logger.error(f"eigh failed: {str(e)}")
        raise ConvergenceFailure(f"Hermitian eigensolver did not converge: {str(e)}")

    return eigenvalues, eigenvectors


def min_eigenvalue(A) -> float:
    """Smallest eigenvalue of the Hermitian part of A."""
    A = as_matrix(A)
    return float(scipy.linalg.eigvalsh(0.5 * (A + A.conj().T))[0])


@dataclass(frozen=True, eq=False)
class UnitaryPropagator:
    """e^{-iHt} for a Hermitian generator H (ħ = 1)."""
    matrix: np.ndarray
    generator_dim: int
    time: float

    @property
    def unitarity_residual(self) -> float:
        return frobenius(self.matrix @ self.matrix.conj().T - identity(self.generator_dim))

    def inverse(self) -> 'UnitaryPropagator':
        return UnitaryPropagator(self.matrix.conj().T, self.generator_dim, -self.time)


def propagator(H, t: float) -> UnitaryPropagator:
    """
    Unitary propagator V·diag(e^{-iλt})·V† from the eigendecomposition of H.

    Args:
        H: Hermitian generator
        t: Time

    Returns:
        UnitaryPropagator for time t
    """
    eigenvalues, V = hermitian_eigendecompose(H)
    phases = np.exp(-1j * eigenvalues * float(t))
    U = (V * phases) @ V.conj().T
    return UnitaryPropagator(U, V.shape[0], float(t))


def kron(A, B) -> np.ndarray:
    """Kronecker product with A as the system (left) factor."""
    return np.kron(np.asarray(A, dtype=np.complex128), np.asarray(B, dtype=np.complex128))


def partial_trace_env(X, N: int, M: int) -> np.ndarray:
    """
    Trace out the environment (right) factor of an (N·M)×(N·M) matrix.

    Args:
        X: Joint matrix ordered system ⊗ environment
        N: System dimension
        M: Environment dimension

    Returns:
        N×N matrix Y with Y[i][j] = Σ_k X[iM+k][jM+k]

    Raises:
        DimensionMismatch: If dim(X) != N·M
    """
    X = np.asarray(X, dtype=np.complex128)
    if X.shape != (N * M, N * M):
        raise DimensionMismatch(f"Joint matrix has shape {X.shape}, expected ({N * M}, {N * M})")
    return np.einsum('ikjk->ij', X.reshape(N, M, N, M))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix."""
    matrix: np.ndarray

    def __post_init__(self):
        A = as_matrix(np.array(self.matrix, dtype=np.complex128))
        A.setflags(write=False)
        object.__setattr__(self, 'matrix', A)

        residual = hermiticity_residual(A)
        if residual > cfg.config.tol_herm:
            raise NotHermitian(f"Density matrix is not Hermitian (residual {residual:.3e})", residual)
        trace = np.trace(A)
        if abs(trace - 1.0) > cfg.config.tol_eq:
            raise ValueError(f"Density matrix trace is {trace:.6g}, expected 1")
        lowest = min_eigenvalue(A)
        if lowest < -cfg.config.tol_psd:
            raise ValueError(f"Density matrix has negative eigenvalue {lowest:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_matrix(cls, A) -> 'DensityMatrix':
        return cls(np.array(A, dtype=np.complex128))

    @classmethod
    def maximally_mixed(cls, dim: int) -> 'DensityMatrix':
        return cls(identity(dim) / dim)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian matrix (G + G^H)/2 with complex Gaussian G."""
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (G + G.conj().T)


def sample_density_matrix(dim: int, seed: int) -> DensityMatrix:
    """
    Ginibre-ensemble density matrix G·G†/Tr[G·G†].

    Args:
        dim: Matrix dimension (>= 1)
        seed: PRNG seed; identical (dim, seed) gives identical output

    Returns:
        Full-rank DensityMatrix (with probability 1)
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = G @ G.conj().T
    rho = rho / np.trace(rho).real
    # G·G† is Hermitian up to rounding; make it exact
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho)


def sample_density_matrices(dim: int, count: int, seed: int) -> List[DensityMatrix]:
    """Draw `count` Ginibre states with seeds derived from `seed`."""
    seeds = np.random.SeedSequence(seed).generate_state(count)
    return [sample_density_matrix(dim, int(s)) for s in seeds]


def matrix_to_pairs(A) -> list:
    """Row-major nested list of [re, im] pairs."""
    A = np.asarray(A, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def matrix_from_pairs(data) -> np.ndarray:
    """
    Inverse of `matrix_to_pairs`.

    Raises:
        ValueError: If the nesting is not rows of [re, im] pairs
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError(f"Expected rows of [re, im] pairs, got array of shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]
