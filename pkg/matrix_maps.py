"""Linear and affine maps of N×N matrices and the conversions between them.

A linear map is stored as the images of the basis elements: images[0] is the
image of the identity (1′) and images[α] the image of F_α (F′_α). An affine map
is a pair (L, K) acting as M(Q) = L(Q) + K. On unit-trace inputs the two
descriptions are interchangeable:

    1′ = L(1) + N·K,   F′_α = L(F_α).

Maps are not checked for physicality here; see `analysis`.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

import config as cfg
import logger_setup as logger_module
from errors import DimensionMismatch, NotHermitian
from matrix_core import as_matrix, hermiticity_residual, identity, matrix_from_pairs, matrix_to_pairs, random_hermitian
from operator_basis import HermitianBasis, build_hermitian_basis, expand

logger = logger_module.logger


@dataclass(frozen=True, eq=False)
class LinearMatrixMap:
    """Linear map T on N×N matrices given by T(F_μ) for every basis element."""
    basis: HermitianBasis
    images: np.ndarray

    def __post_init__(self):
        images = np.array(self.images, dtype=np.complex128)
        N = self.basis.dim
        if images.shape != (N * N, N, N):
            raise DimensionMismatch(f"Expected {N * N} images of shape ({N}, {N}), got array of shape {images.shape}")
        images.setflags(write=False)
        object.__setattr__(self, 'images', images)

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def image_of_identity(self) -> np.ndarray:
        return self.images[0]

    @property
    def traceless_images(self) -> np.ndarray:
        return self.images[1:]

    def __call__(self, Q) -> np.ndarray:
        return apply_linear(self, Q)

    def __add__(self, other: 'LinearMatrixMap') -> 'LinearMatrixMap':
        _check_same_dim(self.dim, other.dim)
        return LinearMatrixMap(self.basis, self.images + other.images)

    def __sub__(self, other: 'LinearMatrixMap') -> 'LinearMatrixMap':
        _check_same_dim(self.dim, other.dim)
        return LinearMatrixMap(self.basis, self.images - other.images)

    def __mul__(self, scalar: complex) -> 'LinearMatrixMap':
        return LinearMatrixMap(self.basis, scalar * self.images)

    __rmul__ = __mul__

    def is_unital(self, tol: Optional[float] = None) -> bool:
        tol = cfg.config.tol_eq if tol is None else tol
        return float(np.linalg.norm(self.image_of_identity - identity(self.dim))) <= tol

    def max_image_deviation(self, other: 'LinearMatrixMap') -> float:
        """max_μ ‖images[μ] - other.images[μ]‖_F."""
        _check_same_dim(self.dim, other.dim)
        return float(np.max(np.linalg.norm(self.images - other.images, axis=(1, 2))))

    @classmethod
    def identity(cls, basis: HermitianBasis) -> 'LinearMatrixMap':
        return cls(basis, basis.elements)

    @classmethod
    def zero(cls, basis: HermitianBasis) -> 'LinearMatrixMap':
        return cls(basis, np.zeros_like(basis.elements))

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], basis: HermitianBasis) -> 'LinearMatrixMap':
        """Tabulate a linear function by evaluating it on every basis element."""
        return cls(basis, np.array([func(F) for F in basis.elements]))


@dataclass(frozen=True, eq=False)
class AffineMatrixMap:
    """M(Q) = L(Q) + K with Hermitian offset K."""
    linear_part: LinearMatrixMap
    offset: np.ndarray

    def __post_init__(self):
        K = as_matrix(np.array(self.offset, dtype=np.complex128))
        _check_same_dim(K.shape[0], self.linear_part.dim)
        residual = hermiticity_residual(K)
        if residual > cfg.config.tol_herm:
            logger.error(f"Affine offset is not Hermitian (residual {residual:.3e})")
            raise NotHermitian(f"Affine offset is not Hermitian (residual {residual:.3e})", residual)
        K.setflags(write=False)
        object.__setattr__(self, 'offset', K)

    @property
    def dim(self) -> int:
        return self.linear_part.dim

    @property
    def basis(self) -> HermitianBasis:
        return self.linear_part.basis

    def __call__(self, Q) -> np.ndarray:
        return apply_affine(self, Q)

    @classmethod
    def identity(cls, basis: HermitianBasis) -> 'AffineMatrixMap':
        return cls(LinearMatrixMap.identity(basis), np.zeros((basis.dim, basis.dim), dtype=np.complex128))


def _check_same_dim(a: int, b: int):
    if a != b:
        raise DimensionMismatch(f"Dimension mismatch: {a} != {b}")


def apply_linear(T: LinearMatrixMap, Q) -> np.ndarray:
    """
    Apply a linear map: Q = Σ c_μ F_μ  ⇒  T(Q) = Σ c_μ T(F_μ).

    Args:
        T: Linear map
        Q: N×N matrix

    Returns:
        N×N image matrix
    """
    c = expand(Q, T.basis).as_array()
    return np.einsum('m,mij->ij', c, T.images)


def apply_affine(M: AffineMatrixMap, Q) -> np.ndarray:
    """M(Q) = L(Q) + K."""
    return apply_linear(M.linear_part, Q) + M.offset


def affine_to_linear(M: AffineMatrixMap) -> LinearMatrixMap:
    """
    Linear map agreeing with M on every unit-trace matrix.

    The identity image becomes L(1) + N·K; traceless images are L(F_α).
    """
    images = np.array(M.linear_part.images)
    images[0] = images[0] + M.dim * M.offset
    return LinearMatrixMap(M.basis, images)


def linear_to_affine(T: LinearMatrixMap, identity_image=None) -> AffineMatrixMap:
    """
    Affine map agreeing with T on every unit-trace matrix.

    The split of 1′ into L(1) + N·K is not unique. By default L(1) = 1, which
    makes L unital; pass `identity_image` to choose a different L(1).

    Args:
        T: Linear map
        identity_image: Optional Hermitian choice for L(1)

    Returns:
        AffineMatrixMap (L, K) with K = (1′ - L(1))/N

    Raises:
        NotHermitian: If the resulting offset is not Hermitian
    """
    N = T.dim
    chosen = identity(N) if identity_image is None else as_matrix(identity_image)
    _check_same_dim(chosen.shape[0], N)

    images = np.array(T.images)
    images[0] = chosen
    offset = (T.image_of_identity - chosen) / N
    return AffineMatrixMap(LinearMatrixMap(T.basis, images), offset)


def compose_linear(T2: LinearMatrixMap, T1: LinearMatrixMap) -> LinearMatrixMap:
    """T2∘T1: push every image of T1 through T2."""
    _check_same_dim(T2.dim, T1.dim)
    return LinearMatrixMap(T1.basis, np.array([apply_linear(T2, image) for image in T1.images]))


def compose_affine(M2: AffineMatrixMap, M1: AffineMatrixMap) -> AffineMatrixMap:
    """
    Composition M2∘M1 with linear part L2∘L1 and offset L2(K1) + K2.

    Args:
        M2: Map applied second
        M1: Map applied first

    Returns:
        AffineMatrixMap with (M2∘M1)(Q) = M2(M1(Q))
    """
    _check_same_dim(M2.dim, M1.dim)
    linear_part = compose_linear(M2.linear_part, M1.linear_part)
    offset = apply_linear(M2.linear_part, M1.offset) + M2.offset
    return AffineMatrixMap(linear_part, offset)


def transpose_map(basis: HermitianBasis) -> LinearMatrixMap:
    return LinearMatrixMap.from_function(np.transpose, basis)


def unitary_conjugation_map(V, basis: HermitianBasis) -> LinearMatrixMap:
    """Q ↦ V Q V†."""
    V = as_matrix(V)
    return LinearMatrixMap.from_function(lambda Q: V @ Q @ V.conj().T, basis)


def replacement_map(rho0, basis: HermitianBasis) -> LinearMatrixMap:
    """Q ↦ Tr[Q]·ρ_0."""
    rho0 = as_matrix(rho0)
    return LinearMatrixMap.from_function(lambda Q: np.trace(Q) * rho0, basis)


def random_linear_map(basis: HermitianBasis, rng: np.random.Generator) -> LinearMatrixMap:
    """Hermiticity-preserving map with independent random Hermitian images."""
    return LinearMatrixMap(basis, np.array([random_hermitian(basis.dim, rng) for _ in range(basis.size)]))


def random_affine_map(basis: HermitianBasis, rng: np.random.Generator) -> AffineMatrixMap:
    return AffineMatrixMap(random_linear_map(basis, rng), random_hermitian(basis.dim, rng))


def map_to_dict(T) -> dict:
    """Serialize a LinearMatrixMap or AffineMatrixMap."""
    if isinstance(T, AffineMatrixMap):
        return {
            'dim': T.dim,
            'kind': 'affine',
            'images': [matrix_to_pairs(image) for image in T.linear_part.images],
            'offset': matrix_to_pairs(T.offset),
        }
    return {
        'dim': T.dim,
        'kind': 'linear',
        'images': [matrix_to_pairs(image) for image in T.images],
    }


def map_from_dict(data: dict):
    """
    Inverse of `map_to_dict`.

    Raises:
        ValueError: On an unknown kind or malformed matrices
    """
    basis = build_hermitian_basis(int(data['dim']))
    images = np.array([matrix_from_pairs(image) for image in data['images']])
    linear = LinearMatrixMap(basis, images)

    kind = data.get('kind', 'linear')
    if kind == 'linear':
        return linear
    if kind == 'affine':
        return AffineMatrixMap(linear, matrix_from_pairs(data['offset']))
    raise ValueError(f"Unknown map kind '{kind}'")
