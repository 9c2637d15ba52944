"""Acceptance suite run by `main.py selftest`.

Every threshold is a multiple of tol_eq, so tightening tol_eq tightens the
whole suite.
"""
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

import config as cfg
import logger_setup as logger_module
from analysis import choi_matrix, is_completely_positive, time_sweep
from errors import DynamapError
from matrix_core import frobenius, identity, sample_density_matrices
from matrix_maps import (LinearMatrixMap, affine_to_linear, apply_affine, apply_linear, linear_to_affine,
                         random_affine_map, random_linear_map, transpose_map)
from operator_basis import build_hermitian_basis, expand, gram_residual, reconstruct
from reduced_dynamics import (InitialAssignment, affine_decomposition, cp_linear_part, random_assignment,
                              random_scenario)
from scenario_io import demo_scenario

logger = logger_module.logger

SCENARIO_DIMS = [(2, 2), (2, 3), (3, 2)]


@dataclass
class CriterionResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ''

    def line(self) -> str:
        status = 'PASS' if self.passed else 'FAIL'
        text = f"[{status}] {self.name}: measured {self.measured:.3e} (threshold {self.threshold:.1e})"
        return f"{text} {self.detail}".rstrip()


def _threshold(factor: float) -> float:
    return factor * cfg.config.tol_eq


def basis_gram(rng: np.random.Generator) -> CriterionResult:
    threshold = _threshold(1.0)
    worst = max(gram_residual(build_hermitian_basis(N)) for N in (2, 3, 4, 5))
    return CriterionResult("basis Gram condition, N = 2..5", worst <= threshold, worst, threshold)


def expansion_round_trip(rng: np.random.Generator) -> CriterionResult:
    threshold = _threshold(1e-2)
    worst = 0.0
    for N in (2, 3):
        basis = build_hermitian_basis(N)
        for _ in range(100):
            Q = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
            worst = max(worst, frobenius(reconstruct(expand(Q, basis), basis) - Q))
    return CriterionResult("expansion round trip", worst <= threshold, worst, threshold)


def mixture_law(rng: np.random.Generator) -> CriterionResult:
    threshold = _threshold(1e-2)
    worst = 0.0
    for trial in range(100):
        N = 2 + trial % 2
        M = random_affine_map(build_hermitian_basis(N), rng)
        rho, sigma = sample_density_matrices(N, 2, int(rng.integers(2 ** 31)))
        q = float(rng.uniform(0.01, 0.99))
        tau = q * rho.matrix + (1 - q) * sigma.matrix
        residual = apply_affine(M, tau) - q * apply_affine(M, rho.matrix) - (1 - q) * apply_affine(M, sigma.matrix)
        worst = max(worst, frobenius(residual))
    return CriterionResult("affine mixture law", worst <= threshold, worst, threshold)


def affine_linear_equivalence(rng: np.random.Generator) -> CriterionResult:
    threshold = _threshold(10.0)
    round_trip_threshold = _threshold(1e-2)
    worst = 0.0
    worst_round_trip = 0.0
    for trial in range(200):
        N = 2 + trial % 2
        basis = build_hermitian_basis(N)
        samples = [s.matrix for s in sample_density_matrices(N, 50, int(rng.integers(2 ** 31)))]

        M = random_affine_map(basis, rng)
        T = affine_to_linear(M)
        worst = max(worst, max(frobenius(apply_linear(T, rho) - apply_affine(M, rho)) for rho in samples))

        T = random_linear_map(basis, rng)
        M = linear_to_affine(T)
        worst = max(worst, max(frobenius(apply_affine(M, rho) - apply_linear(T, rho)) for rho in samples))
        worst_round_trip = max(worst_round_trip, affine_to_linear(M).max_image_deviation(T))

    passed = worst <= threshold and worst_round_trip <= round_trip_threshold
    return CriterionResult("affine <-> linear equivalence", passed, worst, threshold,
                           f"(round trip {worst_round_trip:.3e} <= {round_trip_threshold:.1e})")


def cp_part_positivity(rng: np.random.Generator) -> CriterionResult:
    threshold = _threshold(10.0)
    unital_threshold = _threshold(1.0)
    worst = 0.0
    worst_unital = 0.0
    for trial in range(100):
        N, M = SCENARIO_DIMS[trial % len(SCENARIO_DIMS)]
        L = cp_linear_part(random_scenario(N, M, rng), float(rng.uniform(0, 5)))
        _, lowest = is_completely_positive(L, tol=threshold)
        worst = max(worst, -lowest)
        worst_unital = max(worst_unital, frobenius(L.image_of_identity - identity(N)))
    passed = worst <= threshold and worst_unital <= unital_threshold
    return CriterionResult("CP part: complete positivity and unitality", passed, worst, threshold,
                           f"(unitality {worst_unital:.3e} <= {unital_threshold:.1e})")


def traceless_agreement(rng: np.random.Generator) -> CriterionResult:
    threshold = _threshold(10.0)
    worst = 0.0
    for trial in range(50):
        N, M = SCENARIO_DIMS[trial % len(SCENARIO_DIMS)]
        scn = random_scenario(N, M, rng)
        dec = affine_decomposition(scn, random_assignment(scn, rng), float(rng.uniform(0, 5)))
        deviation = np.linalg.norm(dec.full_linear.traceless_images - dec.cp_part.traceless_images, axis=(1, 2))
        worst = max(worst, float(np.max(deviation)))
    return CriterionResult("traceless-sector agreement", worst <= threshold, worst, threshold)


def zero_parameter_case(rng: np.random.Generator) -> CriterionResult:
    threshold = _threshold(1.0)
    times = np.linspace(0, 5, 51)
    worst = 0.0
    all_cp = True
    for doc_scn in (demo_scenario(zero_correlations=True).scenario, random_scenario(2, 3, rng)):
        a = InitialAssignment.product(doc_scn.system_dim, doc_scn.env_dim)
        for report in time_sweep(doc_scn, a, times):
            worst = max(worst, report.offset_norm, max(map(abs, report.d_parameters), default=0.0))
            all_cp = all_cp and report.is_cp
    return CriterionResult("zero-parameter case: K = 0, d = 0, full map CP", worst <= threshold and all_cp,
                           worst, threshold, '' if all_cp else '(full map not CP somewhere)')


def non_cp_witness(rng: np.random.Generator) -> CriterionResult:
    threshold = -1e-3
    cp_threshold = _threshold(10.0)
    doc = demo_scenario()
    reports = time_sweep(doc.scenario, doc.assignment, doc.times.times())
    worst = min(r.min_choi_eigenvalue for r in reports)
    worst_part = min(r.min_choi_cp_part for r in reports)
    witness = min(reports, key=lambda r: r.min_choi_eigenvalue).time
    passed = worst <= threshold and worst_part >= -cp_threshold
    return CriterionResult("demo non-CP witness", passed, worst, threshold,
                           f"(at t = {witness:.3f}; CP part min {worst_part:.3e} >= {-cp_threshold:.1e})")


def canonical_detectors(rng: np.random.Generator) -> CriterionResult:
    threshold = _threshold(1.0)
    worst = 0.0
    for N in (2, 3):
        basis = build_hermitian_basis(N)
        _, lowest = is_completely_positive(transpose_map(basis))
        worst = max(worst, abs(lowest + 1.0))
        eigenvalues = choi_matrix(LinearMatrixMap.identity(basis)).eigenvalues
        expected = np.zeros(N * N)
        expected[-1] = N
        worst = max(worst, float(np.max(np.abs(eigenvalues - expected))))
    return CriterionResult("transpose and identity Choi spectra", worst <= threshold, worst, threshold)


def identity_at_zero(rng: np.random.Generator) -> CriterionResult:
    threshold = _threshold(1.0)
    offset_threshold = _threshold(1e-2)
    worst = 0.0
    worst_offset = 0.0
    for trial in range(20):
        N, M = SCENARIO_DIMS[trial % len(SCENARIO_DIMS)]
        scn = random_scenario(N, M, rng)
        dec = affine_decomposition(scn, random_assignment(scn, rng), 0.0)
        worst = max(worst, dec.full_linear.max_image_deviation(LinearMatrixMap.identity(scn.system_basis)))
        worst_offset = max(worst_offset, frobenius(dec.offset))
    passed = worst <= threshold and worst_offset <= offset_threshold
    return CriterionResult("t = 0 gives the identity map", passed, worst, threshold,
                           f"(‖K‖ {worst_offset:.3e} <= {offset_threshold:.1e})")


CRITERIA: List[Callable[[np.random.Generator], CriterionResult]] = [
    basis_gram,
    expansion_round_trip,
    mixture_law,
    affine_linear_equivalence,
    cp_part_positivity,
    traceless_agreement,
    zero_parameter_case,
    non_cp_witness,
    canonical_detectors,
    identity_at_zero,
]


def run_acceptance(seed: int = None) -> List[CriterionResult]:
    """
    Run every criterion with its own generator derived from `seed`.

    Args:
        seed: Base seed (defaults to config sampling.seed)

    Returns:
        One CriterionResult per criterion; failures and errors are reported, not raised
    """
    seed = cfg.config.sampling['seed'] if seed is None else seed
    results = []
    for index, (criterion, child) in enumerate(zip(CRITERIA, np.random.SeedSequence(seed).spawn(len(CRITERIA))), 1):
        name = criterion.__name__.replace('_', ' ')
        try:
            result = criterion(np.random.default_rng(child))
        except (DynamapError, ValueError, np.linalg.LinAlgError) as e:
            logger.error(f"Criterion {index} ({name}) raised: {str(e)}")
            result = CriterionResult(name, False, float('nan'), float('nan'), f"(error: {str(e)})")
        result.name = f"{index:2d}. {result.name}"
        logger.info(result.line())
        results.append(result)
    return results
