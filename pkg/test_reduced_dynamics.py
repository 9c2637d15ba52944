"""Tests for reduced_dynamics."""
import numpy as np
import pytest

from analysis import is_completely_positive
from errors import DimensionMismatch, NotHermitian
from matrix_core import (DensityMatrix, identity, kron, partial_trace_env, pauli_matrices, propagator,
                         random_hermitian, sample_density_matrices)
from matrix_maps import LinearMatrixMap
from reduced_dynamics import (AffineDecomposition, InitialAssignment, JointScenario, affine_decomposition,
                              assignment_extend, assignment_is_physical, cp_linear_part, d_parameters,
                              full_linear_map, offset_from_correlations, random_assignment, random_scenario)


@pytest.fixture
def scenario23(rng):
    return random_scenario(2, 3, rng)


def test_scenario_validation(rng):
    with pytest.raises(NotHermitian):
        JointScenario(2, 2, np.triu(np.ones((4, 4))))
    with pytest.raises(DimensionMismatch):
        JointScenario(2, 3, random_hermitian(4, rng))


def test_assignment_reduces_to_input(rng, scenario23):
    a = random_assignment(scenario23, rng)
    Q = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    joint = assignment_extend(a, scenario23, Q)
    assert joint.shape == (6, 6)
    np.testing.assert_allclose(partial_trace_env(joint, 2, 3), Q, atol=1e-12)
    assert abs(np.trace(joint) - np.trace(Q)) <= 1e-12


def test_assignment_of_traceless_basis_elements_ignores_correlations(rng, scenario23):
    a = random_assignment(scenario23, rng)
    assert not a.is_product
    for F in scenario23.system_basis.elements[1:]:
        np.testing.assert_allclose(assignment_extend(a, scenario23, F), kron(F, identity(3)) / 3, atol=1e-15)


def test_assignment_is_linear(rng, scenario23):
    a = random_assignment(scenario23, rng)
    P, Q = random_hermitian(2, rng), random_hermitian(2, rng)
    combined = assignment_extend(a, scenario23, P + (0.5 - 2j) * Q)
    separate = assignment_extend(a, scenario23, P) + (0.5 - 2j) * assignment_extend(a, scenario23, Q)
    assert np.max(np.abs(combined - separate)) <= 1e-12


def test_product_assignment(scenario23):
    a = InitialAssignment.product(2, 3)
    assert a.is_product
    rho = DensityMatrix.maximally_mixed(2).matrix
    np.testing.assert_allclose(assignment_extend(a, scenario23, rho), kron(rho, identity(3)) / 3, atol=1e-15)


def test_assignment_shape_is_checked(scenario23):
    with pytest.raises(DimensionMismatch):
        assignment_extend(InitialAssignment.product(2, 2), scenario23, identity(2))
    with pytest.raises(DimensionMismatch):
        assignment_extend(InitialAssignment.product(2, 3), scenario23, identity(3))


def test_assignment_physicality(rng, demo_doc):
    rho = DensityMatrix.maximally_mixed(2)
    physical, lowest = assignment_is_physical(demo_doc.assignment, demo_doc.scenario, rho)
    assert physical
    assert lowest == pytest.approx(0.1 / 4, abs=1e-12)

    c = np.zeros((3, 3))
    c[0, 0] = 10.0
    strong = InitialAssignment(np.zeros(3), c)
    physical, lowest = assignment_is_physical(strong, random_scenario(2, 2, rng), rho)
    assert not physical
    assert lowest < 0


def test_identity_at_time_zero(rng):
    for N, M in [(2, 2), (2, 3), (3, 2)]:
        scn = random_scenario(N, M, rng)
        dec = affine_decomposition(scn, random_assignment(scn, rng), 0.0)
        assert dec.full_linear.max_image_deviation(LinearMatrixMap.identity(scn.system_basis)) <= 1e-10
        assert np.linalg.norm(dec.offset) <= 1e-12


def test_cp_part_at_time_zero_is_identity(rng):
    for N, M in [(2, 2), (2, 3), (3, 2)]:
        scn = random_scenario(N, M, rng)
        L = cp_linear_part(scn, 0.0)
        assert L.max_image_deviation(LinearMatrixMap.identity(scn.system_basis)) <= 1e-10


def test_cp_part_is_unital_and_completely_positive(rng):
    for N, M in [(2, 2), (2, 3), (3, 2)]:
        L = cp_linear_part(random_scenario(N, M, rng), float(rng.uniform(0, 5)))
        assert L.is_unital(tol=1e-10)
        verdict, lowest = is_completely_positive(L)
        assert verdict
        assert lowest >= -1e-9


def test_non_interacting_dynamics_is_local_unitary(rng):
    H_S, H_R = random_hermitian(2, rng), random_hermitian(3, rng)
    scn = JointScenario(2, 3, kron(H_S, identity(3)) + kron(identity(2), H_R), 'local')
    a = random_assignment(scn, rng)
    t = 1.3
    u = propagator(H_S, t).matrix
    dec = affine_decomposition(scn, a, t)

    for rho in sample_density_matrices(2, 5, 4):
        expected = u @ rho.matrix @ u.conj().T
        np.testing.assert_allclose(dec.cp_part(rho.matrix), expected, atol=1e-10)
        np.testing.assert_allclose(dec.full_linear(rho.matrix), expected, atol=1e-10)
    assert np.linalg.norm(dec.offset) <= 1e-10


def test_full_and_cp_part_differ_only_on_identity(rng):
    scn = random_scenario(3, 2, rng)
    dec = affine_decomposition(scn, random_assignment(scn, rng), 2.0)
    deviation = np.linalg.norm(dec.full_linear.traceless_images - dec.cp_part.traceless_images, axis=(1, 2))
    assert np.max(deviation) <= 1e-10
    np.testing.assert_allclose(dec.full_linear.image_of_identity,
                               dec.cp_part.image_of_identity + 3 * dec.offset, atol=1e-10)


def test_decomposition_agrees_with_full_map_on_states(rng, scenario23):
    a = random_assignment(scenario23, rng)
    dec = affine_decomposition(scenario23, a, 0.8)
    full = full_linear_map(scenario23, a, 0.8)
    affine = dec.as_affine()
    for rho in sample_density_matrices(2, 10, 2):
        np.testing.assert_allclose(affine(rho.matrix), full(rho.matrix), atol=1e-10)


def test_offset_from_correlations_matches_decomposition(rng):
    scn = random_scenario(2, 2, rng)
    a = random_assignment(scn, rng)
    for t in (0.3, 1.7, 4.0):
        np.testing.assert_allclose(offset_from_correlations(scn, a, t), affine_decomposition(scn, a, t).offset,
                                   atol=1e-10)


def test_offset_is_traceless_and_hermitian(rng, scenario23):
    dec = affine_decomposition(scenario23, random_assignment(scenario23, rng), 1.1)
    assert abs(np.trace(dec.offset)) <= 1e-12
    np.testing.assert_array_equal(dec.offset, dec.offset.conj().T)


def test_product_assignment_has_zero_offset(rng, scenario23):
    dec = affine_decomposition(scenario23, InitialAssignment.product(2, 3), 2.5)
    assert np.linalg.norm(dec.offset) <= 1e-12
    assert dec.full_linear.max_image_deviation(dec.cp_part) <= 1e-12
    np.testing.assert_allclose(d_parameters(dec), np.zeros(3), atol=1e-12)


def test_d_parameters(basis2):
    _, _, sz = pauli_matrices()
    L = LinearMatrixMap.identity(basis2)
    dec = AffineDecomposition(L, sz / 4, L)
    np.testing.assert_allclose(d_parameters(dec), [0.0, 0.0, 0.5], atol=1e-15)
