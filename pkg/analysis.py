"""Diagnostics for matrix maps: Choi matrix, complete positivity, trace and Hermiticity checks, time sweeps."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

import config as cfg
import logger_setup as logger_module
from errors import DimensionMismatch, NonHermitianChoi
from matrix_core import (DensityMatrix, frobenius, hermiticity_residual, min_eigenvalue,
                         sample_density_matrices)
from matrix_maps import AffineMatrixMap, LinearMatrixMap, apply_affine, apply_linear
from reduced_dynamics import InitialAssignment, JointScenario, affine_decomposition, d_parameters

logger = logger_module.logger


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """J = Σ_ij E_ij ⊗ T(E_ij), unnormalized (Tr J = N for trace-preserving T)."""
    matrix: np.ndarray
    source_dim: int

    @property
    def eigenvalues(self) -> np.ndarray:
        return scipy.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))


@dataclass
class MapAnalysisReport:
    """Diagnostics of one affine decomposition at one time."""
    label: str
    time: float
    min_choi_eigenvalue: float
    is_cp: bool
    min_choi_cp_part: float
    is_cp_cp_part: bool
    trace_residual: float
    hermiticity_residual: float
    min_output_eigenvalue_over_samples: float
    equivalence_residual: float
    offset_norm: float
    d_parameters: List[float] = field(default_factory=list)
    affine_trace_residual: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_row(self) -> dict:
        """CSV row: t, min_choi_full, is_cp_full, min_choi_cp_part, trace_residual, equivalence_residual, d_1…"""
        row = {
            't': self.time,
            'min_choi_full': self.min_choi_eigenvalue,
            'is_cp_full': self.is_cp,
            'min_choi_cp_part': self.min_choi_cp_part,
            'trace_residual': self.trace_residual,
            'equivalence_residual': self.equivalence_residual,
        }
        for index, value in enumerate(self.d_parameters, start=1):
            row[f'd_{index}'] = value
        return row


def default_samples(dim: int, seed: Optional[int] = None, count: Optional[int] = None) -> List[DensityMatrix]:
    """Seeded Ginibre samples used by the state-based checks."""
    seed = cfg.config.sampling['seed'] if seed is None else seed
    count = cfg.config.sampling['count'] if count is None else count
    return sample_density_matrices(dim, count, seed)


def _matrices(samples: Sequence) -> List[np.ndarray]:
    return [s.matrix if isinstance(s, DensityMatrix) else np.asarray(s) for s in samples]


def choi_matrix(T: LinearMatrixMap) -> ChoiMatrix:
    """
    Build the Choi matrix by applying T to every matrix unit E_ij.

    Args:
        T: Linear map

    Returns:
        ChoiMatrix of dimension N²
    """
    N = T.dim
    J = np.zeros((N * N, N * N), dtype=np.complex128)
    for i in range(N):
        for j in range(N):
            E = np.zeros((N, N), dtype=np.complex128)
            E[i, j] = 1
            J[i * N:(i + 1) * N, j * N:(j + 1) * N] = apply_linear(T, E)
    return ChoiMatrix(J, N)


def is_completely_positive(T: LinearMatrixMap, tol: Optional[float] = None) -> Tuple[bool, float]:
    """
    CP verdict from the smallest Choi eigenvalue.

    Args:
        T: Hermiticity-preserving linear map
        tol: Eigenvalue floor (defaults to tol_psd)

    Returns:
        Tuple of (verdict, min eigenvalue)

    Raises:
        NonHermitianChoi: If the Choi matrix is not Hermitian within tol_herm
    """
    tol = cfg.config.tol_psd if tol is None else tol
    choi = choi_matrix(T)
    residual = hermiticity_residual(choi.matrix)
    if residual > cfg.config.tol_herm:
        logger.error(f"Choi matrix is not Hermitian (residual {residual:.3e})")
        raise NonHermitianChoi(f"Choi matrix is not Hermitian (residual {residual:.3e}); "
                               "the map does not preserve Hermiticity", residual)
    lowest = float(choi.eigenvalues[0])
    return lowest >= -tol, lowest


def check_trace_preserving(T: LinearMatrixMap) -> float:
    """max_μ |Tr[T(F_μ)] - Tr[F_μ]|."""
    image_traces = np.trace(T.images, axis1=1, axis2=2)
    basis_traces = np.trace(T.basis.elements, axis1=1, axis2=2)
    return float(np.max(np.abs(image_traces - basis_traces)))


def check_hermiticity_preserving(T: LinearMatrixMap) -> float:
    """Max Hermiticity residual over the images of the (Hermitian) basis."""
    return max(hermiticity_residual(image) for image in T.images)


def check_affine_physicality(M: AffineMatrixMap, samples: Sequence) -> Tuple[float, float]:
    """
    Trace and positivity of M on sampled states.

    Returns:
        Tuple of (max |Tr M(ρ) - 1|, min eigenvalue of M(ρ) over samples)
    """
    trace_residual = 0.0
    lowest = np.inf
    for rho in _matrices(samples):
        out = apply_affine(M, rho)
        trace_residual = max(trace_residual, abs(np.trace(out) - 1.0))
        lowest = min(lowest, min_eigenvalue(out))
    return float(trace_residual), float(lowest)


def equivalence_residual(M: AffineMatrixMap, T: LinearMatrixMap, samples: Sequence) -> float:
    """max over samples of ‖M(ρ) - T(ρ)‖_F."""
    if M.dim != T.dim:
        raise DimensionMismatch(f"Affine map dimension {M.dim} != linear map dimension {T.dim}")
    return max((frobenius(apply_affine(M, rho) - apply_linear(T, rho)) for rho in _matrices(samples)),
               default=0.0)


def analyze_decomposition(scn: JointScenario, a: InitialAssignment, t: float,
                          samples: Optional[Sequence] = None) -> MapAnalysisReport:
    """
    Build the affine decomposition at time t and collect its diagnostics.

    Args:
        scn: Scenario
        a: Initial assignment
        t: Time
        samples: States for the state-based checks (defaults to `default_samples`)

    Returns:
        MapAnalysisReport for time t
    """
    samples = default_samples(scn.system_dim) if samples is None else samples
    dec = affine_decomposition(scn, a, t)
    affine = dec.as_affine()

    is_cp_full, min_full = is_completely_positive(dec.full_linear)
    is_cp_part, min_part = is_completely_positive(dec.cp_part)
    affine_trace, min_output = check_affine_physicality(affine, samples)

    report = MapAnalysisReport(
        label=scn.label,
        time=float(t),
        min_choi_eigenvalue=min_full,
        is_cp=is_cp_full,
        min_choi_cp_part=min_part,
        is_cp_cp_part=is_cp_part,
        trace_residual=check_trace_preserving(dec.full_linear),
        hermiticity_residual=check_hermiticity_preserving(dec.full_linear),
        min_output_eigenvalue_over_samples=min_output,
        equivalence_residual=equivalence_residual(affine, dec.full_linear, samples),
        offset_norm=frobenius(dec.offset),
        d_parameters=[float(d) for d in d_parameters(dec)],
        affine_trace_residual=affine_trace,
    )
    if not is_cp_part:
        logger.error(f"CP part of '{scn.label}' failed the CP check at t={t:.6g} (min eigenvalue {min_part:.3e})")
    logger.debug(f"t={t:.6g}: min_choi_full={min_full:.3e}, min_choi_cp_part={min_part:.3e}")
    return report


def time_sweep(scn: JointScenario, a: InitialAssignment, times: Sequence[float],
               samples: Optional[Sequence] = None, workers: Optional[int] = None) -> List[MapAnalysisReport]:
    """
    Analyze the decomposition at each time.

    Args:
        scn: Scenario
        a: Initial assignment
        times: Finite times
        samples: States for the state-based checks
        workers: Thread count (defaults to config sweep.workers)

    Returns:
        Reports ordered by t
    """
    times = sorted(float(t) for t in times)
    if not all(np.isfinite(times)):
        raise ValueError("Sweep times must be finite")
    samples = default_samples(scn.system_dim) if samples is None else samples
    workers = cfg.config.sweep['workers'] if workers is None else workers

    logger.info(f"Sweeping '{scn.label}' over {len(times)} time points (workers={workers})")
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda t: analyze_decomposition(scn, a, t, samples), times))
    else:
        reports = [analyze_decomposition(scn, a, t, samples) for t in times]
    return reports


def summarize_sweep(reports: Sequence[MapAnalysisReport]) -> dict:
    """
    Summary of a sweep.

    Returns:
        Dict with the witness time (most negative full-map Choi eigenvalue,
        None if the full map is CP everywhere), that eigenvalue, the CP-part
        deficit and the largest equivalence residual and |d|
    """
    if not reports:
        return {'points': 0}
    worst = min(reports, key=lambda r: r.min_choi_eigenvalue)
    return {
        'label': worst.label,
        'points': len(reports),
        'witness_time': None if worst.is_cp else worst.time,
        'min_choi_full': worst.min_choi_eigenvalue,
        'non_cp_points': sum(1 for r in reports if not r.is_cp),
        'all_cp_part': all(r.is_cp_cp_part for r in reports),
        'max_cp_part_deficit': max(max(0.0, -r.min_choi_cp_part) for r in reports),
        'max_equivalence_residual': max(r.equivalence_residual for r in reports),
        'max_abs_d': max((max(map(abs, r.d_parameters), default=0.0) for r in reports), default=0.0),
    }
