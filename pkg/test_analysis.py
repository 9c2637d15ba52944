"""Tests for analysis."""
import numpy as np
import pytest

from analysis import (MapAnalysisReport, analyze_decomposition, check_affine_physicality,
                      check_hermiticity_preserving, check_trace_preserving, choi_matrix, default_samples,
                      equivalence_residual, is_completely_positive, summarize_sweep, time_sweep)
from errors import DimensionMismatch, NonHermitianChoi
from matrix_core import identity, pauli_matrices, propagator, random_hermitian
from matrix_maps import (AffineMatrixMap, LinearMatrixMap, random_linear_map, replacement_map, transpose_map,
                         unitary_conjugation_map)
from reduced_dynamics import InitialAssignment, affine_decomposition, random_scenario


@pytest.fixture
def samples2():
    return default_samples(2, seed=3, count=10)


def test_identity_choi_spectrum(basis2, basis3):
    np.testing.assert_allclose(choi_matrix(LinearMatrixMap.identity(basis2)).eigenvalues, [0, 0, 0, 2], atol=1e-12)
    eigenvalues = choi_matrix(LinearMatrixMap.identity(basis3)).eigenvalues
    np.testing.assert_allclose(eigenvalues, [0] * 8 + [3], atol=1e-12)


def test_choi_blocks_are_images_of_matrix_units(rng, basis2):
    T = random_linear_map(basis2, rng)
    J = choi_matrix(T).matrix
    E01 = np.array([[0, 1], [0, 0]])
    np.testing.assert_allclose(J[0:2, 2:4], T(E01), atol=1e-12)


def test_transpose_is_not_completely_positive(basis2):
    J = choi_matrix(transpose_map(basis2)).matrix
    swap = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_allclose(J, swap, atol=1e-12)
    verdict, lowest = is_completely_positive(transpose_map(basis2))
    assert not verdict
    assert lowest == pytest.approx(-1.0, abs=1e-12)


def test_unitary_conjugation_is_rank_one_cp(rng, basis3):
    V = propagator(random_hermitian(3, rng), 0.9).matrix
    T = unitary_conjugation_map(V, basis3)
    eigenvalues = choi_matrix(T).eigenvalues
    np.testing.assert_allclose(eigenvalues[:-1], 0, atol=1e-10)
    assert eigenvalues[-1] == pytest.approx(3.0, abs=1e-10)
    assert is_completely_positive(T)[0]


def test_choi_is_linear_in_the_map(rng, basis2):
    T1, T2 = random_linear_map(basis2, rng), random_linear_map(basis2, rng)
    combined = choi_matrix(T1 + 0.3 * T2).matrix
    assert np.max(np.abs(combined - choi_matrix(T1).matrix - 0.3 * choi_matrix(T2).matrix)) <= 1e-12


def test_non_hermiticity_preserving_map_is_rejected(basis2):
    T = LinearMatrixMap(basis2, 1j * basis2.elements)
    assert check_hermiticity_preserving(T) > 1
    with pytest.raises(NonHermitianChoi):
        is_completely_positive(T)


def test_trace_preservation(basis2):
    assert check_trace_preserving(LinearMatrixMap.identity(basis2)) <= 1e-15
    assert check_trace_preserving(replacement_map(identity(2) / 2, basis2)) <= 1e-15
    images = np.array(basis2.elements)
    images[0] = 2 * identity(2)
    assert check_trace_preserving(LinearMatrixMap(basis2, images)) == pytest.approx(2.0)


def test_affine_physicality(basis2, samples2):
    trace_residual, lowest = check_affine_physicality(AffineMatrixMap.identity(basis2), samples2)
    assert trace_residual <= 1e-12
    assert lowest > 0

    shifted = AffineMatrixMap(LinearMatrixMap.identity(basis2), identity(2) / 2)
    trace_residual, lowest = check_affine_physicality(shifted, samples2)
    assert trace_residual == pytest.approx(1.0, abs=1e-12)
    assert lowest > 0.5


def test_demo_decomposition_is_trace_preserving_on_states(demo_doc, samples2):
    for t in (0.15, 1.4):
        affine = affine_decomposition(demo_doc.scenario, demo_doc.assignment, t).as_affine()
        trace_residual, _ = check_affine_physicality(affine, samples2)
        assert trace_residual <= 1e-10


def test_equivalence_residual(basis2, basis3, samples2):
    _, _, sz = pauli_matrices()
    M = AffineMatrixMap(LinearMatrixMap.identity(basis2), 0.1 * sz)
    T = LinearMatrixMap.identity(basis2)
    assert equivalence_residual(M, T, samples2) == pytest.approx(0.1 * np.sqrt(2), abs=1e-12)
    with pytest.raises(DimensionMismatch):
        equivalence_residual(M, LinearMatrixMap.identity(basis3), samples2)


def test_analysis_at_time_zero(demo_doc, samples2):
    report = analyze_decomposition(demo_doc.scenario, demo_doc.assignment, 0.0, samples2)
    assert report.is_cp
    assert report.is_cp_cp_part
    assert report.min_choi_eigenvalue == pytest.approx(0.0, abs=1e-9)
    assert report.trace_residual <= 1e-10
    assert report.offset_norm <= 1e-10
    assert report.equivalence_residual <= 1e-10


def test_demo_full_map_fails_cp_near_witness(demo_doc, samples2):
    report = analyze_decomposition(demo_doc.scenario, demo_doc.assignment, 0.15, samples2)
    assert not report.is_cp
    assert report.min_choi_eigenvalue < -1e-3
    assert report.is_cp_cp_part
    assert report.trace_residual <= 1e-10
    assert report.hermiticity_residual <= 1e-10
    assert report.equivalence_residual <= 1e-9
    assert max(map(abs, report.d_parameters)) > 1e-3
    assert report.affine_trace_residual <= 1e-10


def test_product_sweep_is_cp_with_zero_d(product_doc, samples2):
    reports = time_sweep(product_doc.scenario, product_doc.assignment, np.linspace(0, 5, 11), samples2)
    assert all(r.is_cp and r.is_cp_cp_part for r in reports)
    summary = summarize_sweep(reports)
    assert summary['witness_time'] is None
    assert summary['non_cp_points'] == 0
    assert summary['max_abs_d'] <= 1e-10


def test_demo_sweep_finds_witness(demo_doc, samples2):
    reports = time_sweep(demo_doc.scenario, demo_doc.assignment, np.linspace(0, 0.5, 11), samples2)
    summary = summarize_sweep(reports)
    assert summary['all_cp_part']
    assert summary['witness_time'] is not None
    assert summary['min_choi_full'] < -1e-3
    assert summary['non_cp_points'] >= 1
    assert summary['max_equivalence_residual'] <= 1e-9


def test_sweep_orders_times_and_threads_agree(demo_doc, samples2):
    times = [0.4, 0.0, 0.2]
    serial = time_sweep(demo_doc.scenario, demo_doc.assignment, times, samples2, workers=1)
    threaded = time_sweep(demo_doc.scenario, demo_doc.assignment, times, samples2, workers=2)
    assert [r.time for r in serial] == [0.0, 0.2, 0.4]
    for a, b in zip(serial, threaded):
        assert a.time == b.time
        assert a.min_choi_eigenvalue == pytest.approx(b.min_choi_eigenvalue, abs=1e-12)


def test_sweep_rejects_non_finite_times(demo_doc, samples2):
    with pytest.raises(ValueError):
        time_sweep(demo_doc.scenario, demo_doc.assignment, [0.0, float('nan')], samples2)


def test_summary_of_empty_sweep():
    assert summarize_sweep([]) == {'points': 0}


def test_report_row_columns():
    report = MapAnalysisReport('x', 0.5, -0.1, False, 0.0, True, 0.0, 0.0, 0.2, 0.0, 0.1, [0.1, 0.0, -0.2])
    assert list(report.to_row()) == ['t', 'min_choi_full', 'is_cp_full', 'min_choi_cp_part', 'trace_residual',
                                     'equivalence_residual', 'd_1', 'd_2', 'd_3']
    assert report.to_dict()['d_parameters'] == [0.1, 0.0, -0.2]
    assert report.to_dict()['affine_trace_residual'] == 0.0


def test_product_assignment_on_random_scenario_is_cp(rng):
    scn = random_scenario(2, 3, rng)
    report = analyze_decomposition(scn, InitialAssignment.product(2, 3), 1.0, default_samples(2, count=5))
    assert report.is_cp
    assert report.offset_norm <= 1e-12
