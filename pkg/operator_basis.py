"""Hermitian operator basis with Tr[F_μ F_ν] = N δ_μν and coefficient expansions.

Element order for dimension N:
    F_0 = identity,
    symmetric   E_jk + E_kj        for j < k (lexicographic),
    antisymmetric -i E_jk + i E_kj for j < k (lexicographic),
    diagonal ladders diag(1, …, 1, -l, 0, …) for l = 1 … N-1,
each rescaled so that Tr[F_μ²] = N. At N = 2 this is (1, σ_x, σ_y, σ_z).
The order is part of the file formats and must not change.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

import config as cfg
import logger_setup as logger_module
from errors import DimensionMismatch
from matrix_core import as_matrix, identity, matrix_to_pairs

logger = logger_module.logger


@dataclass(frozen=True, eq=False)
class HermitianBasis:
    """Ordered basis F_0 … F_{N²-1}, stacked as an (N², N, N) read-only array."""
    dim: int
    elements: np.ndarray

    @property
    def size(self) -> int:
        return self.dim * self.dim

    def __len__(self) -> int:
        return self.size

    def __getitem__(self, index: int) -> np.ndarray:
        return self.elements[index]


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Coefficients c_μ = Tr[F_μ Q]/N split into c_0 and (c_1 … c_{N²-1})."""
    trace_part: complex
    traceless_part: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.concatenate(([self.trace_part], self.traceless_part)).astype(np.complex128)

    @classmethod
    def from_array(cls, c) -> 'CoefficientVector':
        c = np.asarray(c, dtype=np.complex128)
        return cls(complex(c[0]), c[1:].copy())

    def __len__(self) -> int:
        return 1 + len(self.traceless_part)


def _gell_mann_elements(N: int) -> list:
    """Unnormalized generalized Gell-Mann matrices (Tr[F²] = 2): symmetric, antisymmetric, then diagonal."""
    pairs = list(combinations(range(N), 2))
    elements = []

    for j, k in pairs:
        F = np.zeros((N, N), dtype=np.complex128)
        F[j, k] = 1
        F[k, j] = 1
        elements.append(F)

    for j, k in pairs:
        F = np.zeros((N, N), dtype=np.complex128)
        F[j, k] = -1j
        F[k, j] = 1j
        elements.append(F)

    for l in range(1, N):
        diagonal = np.zeros(N)
        diagonal[:l] = 1
        diagonal[l] = -l
        elements.append(np.sqrt(2 / (l * (l + 1))) * np.diag(diagonal).astype(np.complex128))

    return elements


@lru_cache(maxsize=None)
def build_hermitian_basis(N: int) -> HermitianBasis:
    """
    Build the Hermitian basis for N×N matrices.

    Args:
        N: Dimension (>= 1)

    Returns:
        HermitianBasis with F_0 = identity and Tr[F_μ F_ν] = N δ_μν
    """
    if N < 1:
        raise ValueError(f"Basis dimension must be >= 1, got {N}")

    scale = np.sqrt(N / 2)
    elements = [identity(N)] + [scale * F for F in _gell_mann_elements(N)]
    stacked = np.array(elements, dtype=np.complex128)
    stacked.setflags(write=False)

    logger.debug(f"Built Hermitian basis for N={N} ({len(elements)} elements)")
    return HermitianBasis(N, stacked)


def gram_matrix(basis: HermitianBasis) -> np.ndarray:
    """G[μ][ν] = Tr[F_μ F_ν]."""
    return np.einsum('mij,nji->mn', basis.elements, basis.elements)


def gram_residual(basis: HermitianBasis) -> float:
    """max_μν |Tr[F_μ F_ν] - N δ_μν|."""
    G = gram_matrix(basis)
    return float(np.max(np.abs(G - basis.dim * np.eye(basis.size))))


def _check_dim(Q: np.ndarray, basis: HermitianBasis):
    if Q.shape[0] != basis.dim:
        raise DimensionMismatch(f"Matrix dimension {Q.shape[0]} does not match basis dimension {basis.dim}")


def expand(Q, basis: HermitianBasis) -> CoefficientVector:
    """
    Expand Q in the basis: c_μ = Tr[F_μ Q]/N, so that Q = Σ_μ c_μ F_μ.

    Q may be non-Hermitian, in which case coefficients are complex.
    """
    Q = as_matrix(Q)
    _check_dim(Q, basis)
    c = np.einsum('mij,ji->m', basis.elements, Q) / basis.dim
    return CoefficientVector.from_array(c)


def reconstruct(c: CoefficientVector, basis: HermitianBasis) -> np.ndarray:
    """Q = Σ_μ c_μ F_μ."""
    coefficients = c.as_array() if isinstance(c, CoefficientVector) else np.asarray(c, dtype=np.complex128)
    if len(coefficients) != basis.size:
        raise DimensionMismatch(f"Got {len(coefficients)} coefficients for a basis of size {basis.size}")
    return np.einsum('m,mij->ij', coefficients, basis.elements)


def bloch_vector(rho, basis: HermitianBasis) -> np.ndarray:
    """
    Expectation values ⟨F_α⟩ = Tr[F_α ρ] for α >= 1.

    Args:
        rho: Hermitian matrix (usually a density matrix)
        basis: Basis of matching dimension

    Returns:
        Real vector of length N²-1
    """
    rho = as_matrix(rho)
    _check_dim(rho, basis)
    values = np.einsum('aij,ji->a', basis.elements[1:], rho)
    if np.max(np.abs(values.imag), initial=0.0) > cfg.config.tol_herm:
        logger.warning("Bloch vector of a non-Hermitian matrix; dropping imaginary parts")
    return values.real


def state_from_bloch(vector, basis: HermitianBasis) -> np.ndarray:
    """ρ = (1/N)(1 + Σ_α v_α F_α)."""
    vector = np.asarray(vector, dtype=np.float64)
    if len(vector) != basis.size - 1:
        raise DimensionMismatch(f"Bloch vector has length {len(vector)}, expected {basis.size - 1}")
    return (identity(basis.dim) + np.einsum('a,aij->ij', vector, basis.elements[1:])) / basis.dim


def basis_to_dict(basis: HermitianBasis) -> dict:
    """JSON-ready export: dim, ordered matrices and the Gram residual."""
    return {
        'dim': basis.dim,
        'elements': [matrix_to_pairs(F) for F in basis.elements],
        'gram_residual': gram_residual(basis),
    }
