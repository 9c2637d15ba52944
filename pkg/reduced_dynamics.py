"""Subsystem dynamics induced by unitary evolution of a system ⊗ environment pair.

For a scenario (N, M, H) and time t with U = e^{-iHt}:

    cp part      L(Q) = (1/M) Tr_R[U (Q ⊗ 1_M) U†]
    full map     T(Q) = Tr_R[U A(Q) U†]

where A is a linear initial-state assignment. A attaches environment means b
and correlations c to the trace component of Q only, so T and L agree on every
traceless basis element and differ only on the identity image:

    T(1) = L(1) + N·K.
"""
from dataclasses import dataclass

import numpy as np

import config as cfg
import logger_setup as logger_module
from errors import DimensionMismatch, NotHermitian
from matrix_core import (DensityMatrix, as_matrix, hermiticity_residual, identity, kron, min_eigenvalue,
                         partial_trace_env, propagator, random_hermitian)
from matrix_maps import AffineMatrixMap, LinearMatrixMap
from operator_basis import build_hermitian_basis

logger = logger_module.logger


@dataclass(frozen=True, eq=False)
class JointScenario:
    """System of dimension N coupled to an environment of dimension M by a joint Hamiltonian."""
    system_dim: int
    env_dim: int
    hamiltonian: np.ndarray
    label: str = ''

    def __post_init__(self):
        if self.system_dim < 1 or self.env_dim < 1:
            raise DimensionMismatch(f"Dimensions must be positive, got N={self.system_dim}, M={self.env_dim}")
        H = as_matrix(np.array(self.hamiltonian, dtype=np.complex128))
        joint = self.system_dim * self.env_dim
        if H.shape[0] != joint:
            raise DimensionMismatch(f"Hamiltonian has dimension {H.shape[0]}, expected N·M = {joint}")
        residual = hermiticity_residual(H)
        if residual > cfg.config.tol_herm:
            logger.error(f"Hamiltonian of scenario '{self.label}' is not Hermitian (residual {residual:.3e})")
            raise NotHermitian(f"Hamiltonian is not Hermitian (residual {residual:.3e})", residual)
        H.setflags(write=False)
        object.__setattr__(self, 'hamiltonian', H)

    @property
    def joint_dim(self) -> int:
        return self.system_dim * self.env_dim

    @property
    def system_basis(self):
        return build_hermitian_basis(self.system_dim)

    @property
    def env_basis(self):
        return build_hermitian_basis(self.env_dim)


@dataclass(frozen=True, eq=False)
class InitialAssignment:
    """
    Environment means b_β (length M²-1) and correlations c_αβ ((N²-1)×(M²-1)).

    b = 0 and c = 0 is the product assignment ρ ⊗ 1_M/M.
    """
    env_means: np.ndarray
    correlations: np.ndarray

    def __post_init__(self):
        b = np.array(self.env_means, dtype=np.float64).reshape(-1)
        c = np.array(self.correlations, dtype=np.float64)
        if c.ndim != 2:
            raise DimensionMismatch(f"Correlations must be a 2-D array, got shape {c.shape}")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("Assignment parameters must be finite")
        b.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, 'env_means', b)
        object.__setattr__(self, 'correlations', c)

    @classmethod
    def product(cls, system_dim: int, env_dim: int) -> 'InitialAssignment':
        return cls(np.zeros(env_dim ** 2 - 1), np.zeros((system_dim ** 2 - 1, env_dim ** 2 - 1)))

    @property
    def is_product(self) -> bool:
        return not (np.any(self.env_means) or np.any(self.correlations))

    def validate_for(self, scn: JointScenario):
        """
        Check parameter shapes against a scenario.

        Raises:
            DimensionMismatch: If b or c has the wrong shape
        """
        N2, M2 = scn.system_dim ** 2 - 1, scn.env_dim ** 2 - 1
        if self.env_means.shape != (M2,):
            raise DimensionMismatch(f"env_means has length {self.env_means.shape[0]}, expected {M2}")
        if self.correlations.shape != (N2, M2):
            raise DimensionMismatch(f"correlations has shape {self.correlations.shape}, expected ({N2}, {M2})")


@dataclass(frozen=True, eq=False)
class AffineDecomposition:
    """Full linear map T and its affine split (L, K) with L(1) = 1."""
    cp_part: LinearMatrixMap
    offset: np.ndarray
    full_linear: LinearMatrixMap

    def as_affine(self) -> AffineMatrixMap:
        return AffineMatrixMap(self.cp_part, self.offset)


def _correlation_operator(a: InitialAssignment, scn: JointScenario) -> np.ndarray:
    """Σ_β b_β (1_N ⊗ G_β) + Σ_αβ c_αβ (F_α ⊗ G_β)."""
    F = scn.system_basis.elements[1:]
    G = scn.env_basis.elements[1:]
    C = np.zeros((scn.joint_dim, scn.joint_dim), dtype=np.complex128)
    one = identity(scn.system_dim)
    for beta, b in enumerate(a.env_means):
        if b:
            C += b * kron(one, G[beta])
    for (alpha, beta), c in np.ndenumerate(a.correlations):
        if c:
            C += c * kron(F[alpha], G[beta])
    return C


def assignment_extend(a: InitialAssignment, scn: JointScenario, Q) -> np.ndarray:
    """
    Extend a system matrix to a joint matrix whose environment partial trace is Q.

    A(Q) = (1/M)[Q ⊗ 1_M + (Tr Q / N)(Σ_β b_β 1 ⊗ G_β + Σ_αβ c_αβ F_α ⊗ G_β)]

    Args:
        a: Initial assignment parameters
        scn: Scenario fixing N and M
        Q: N×N matrix

    Returns:
        (N·M)×(N·M) joint matrix
    """
    a.validate_for(scn)
    Q = as_matrix(Q)
    if Q.shape[0] != scn.system_dim:
        raise DimensionMismatch(f"Matrix dimension {Q.shape[0]} does not match system dimension {scn.system_dim}")

    joint = kron(Q, identity(scn.env_dim))
    weight = np.trace(Q) / scn.system_dim
    if weight != 0 and not a.is_product:
        joint = joint + weight * _correlation_operator(a, scn)
    return joint / scn.env_dim


def assignment_is_physical(a: InitialAssignment, scn: JointScenario, rho: DensityMatrix):
    """
    Check that A(ρ) is a genuine joint state.

    Returns:
        Tuple of (verdict, min eigenvalue of A(ρ))
    """
    matrix = rho.matrix if isinstance(rho, DensityMatrix) else rho
    lowest = min_eigenvalue(assignment_extend(a, scn, matrix))
    verdict = lowest >= -cfg.config.tol_psd
    if not verdict:
        logger.warning(f"Assignment for '{scn.label}' gives a non-positive joint state (min eigenvalue {lowest:.3e})")
    return verdict, lowest


def _evolve_and_reduce(scn: JointScenario, joint_images, t: float) -> np.ndarray:
    U = propagator(scn.hamiltonian, t).matrix
    U_dag = U.conj().T
    return np.array([partial_trace_env(U @ X @ U_dag, scn.system_dim, scn.env_dim) for X in joint_images])


def cp_linear_part(scn: JointScenario, t: float) -> LinearMatrixMap:
    """
    L(Q) = (1/M) Tr_R[e^{-iHt} (Q ⊗ 1_M) e^{iHt}]: unital and completely positive.

    Args:
        scn: Scenario
        t: Time

    Returns:
        LinearMatrixMap on the system basis
    """
    basis = scn.system_basis
    one_env = identity(scn.env_dim)
    joint = [kron(F, one_env) / scn.env_dim for F in basis.elements]
    return LinearMatrixMap(basis, _evolve_and_reduce(scn, joint, t))


def full_linear_map(scn: JointScenario, a: InitialAssignment, t: float) -> LinearMatrixMap:
    """T(F_μ) = Tr_R[U A(F_μ) U†]; generally not completely positive when b, c ≠ 0."""
    basis = scn.system_basis
    joint = [assignment_extend(a, scn, F) for F in basis.elements]
    return LinearMatrixMap(basis, _evolve_and_reduce(scn, joint, t))


def affine_decomposition(scn: JointScenario, a: InitialAssignment, t: float) -> AffineDecomposition:
    """
    Split the full linear map into a CP linear part with L(1) = 1 and an offset.

    K = (T(1) - 1)/N, taken from the full map's identity image.
    """
    cp_part = cp_linear_part(scn, t)
    full = full_linear_map(scn, a, t)
    offset = (full.image_of_identity - identity(scn.system_dim)) / scn.system_dim
    # exact Hermitian part; the deviation is rounding only
    offset = 0.5 * (offset + offset.conj().T)
    logger.debug(f"Affine decomposition of '{scn.label}' at t={t:.6g}: ‖K‖_F={np.linalg.norm(offset):.3e}")
    return AffineDecomposition(cp_part, offset, full)


def offset_from_correlations(scn: JointScenario, a: InitialAssignment, t: float) -> np.ndarray:
    """K computed by evolving the b, c term alone: (1/(N·M)) Tr_R[U C U†]."""
    C = _correlation_operator(a, scn) / (scn.system_dim * scn.env_dim)
    return _evolve_and_reduce(scn, [C], t)[0]


def d_parameters(dec: AffineDecomposition) -> np.ndarray:
    """d_α = Tr[F_α K] for α >= 1."""
    F = dec.cp_part.basis.elements[1:]
    return np.einsum('aij,ji->a', F, dec.offset).real


def random_scenario(system_dim: int, env_dim: int, rng: np.random.Generator, label: str = '') -> JointScenario:
    """Scenario with a random Hermitian joint Hamiltonian."""
    H = random_hermitian(system_dim * env_dim, rng)
    return JointScenario(system_dim, env_dim, H, label or f"random-{system_dim}x{env_dim}")


def random_assignment(scn: JointScenario, rng: np.random.Generator, scale: float = 0.3) -> InitialAssignment:
    """Correlated assignment with uniform entries in [-scale, scale]."""
    N2, M2 = scn.system_dim ** 2 - 1, scn.env_dim ** 2 - 1
    return InitialAssignment(rng.uniform(-scale, scale, M2), rng.uniform(-scale, scale, (N2, M2)))
