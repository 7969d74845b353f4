import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import conjugated_n4, cotangent_samples, gamma112, lambda_structure
from cotanlift.cotangent import (
    LIFT_KINDS,
    TwoFormField,
    complete_lift_raw,
    d_theta_j,
    gamma,
    generalized_lift,
    generalized_lift_tensorial,
    horizontal_basis,
    horizontal_lift,
    horizontal_lift_closed_form,
    lift,
    liouville,
    omega_st,
    omega_st_matrix,
    sato_lift,
    sato_lift_closed_form,
    theta_of_tensor,
    vertical_projection,
)
from cotanlift.errors import ParameterError, ShapeError, StructureError
from cotanlift.fields import Box, CotangentPoint
from cotanlift.structure import Connection, minimal_complex_connection, s_tensor, standard_structure

J_ST = np.array([[0.0, -1.0], [1.0, 0.0]])
XI0 = CotangentPoint([0.0, 0.0], [1.0, 0.0])


def test_liouville_form():
    np.testing.assert_array_equal(liouville(CotangentPoint([0, 0], [3, 5])), [3, 5, 0, 0])


def test_omega_st_values():
    w = omega_st(2)
    e = np.eye(4)
    xi = CotangentPoint([0, 0], [0, 0])
    assert w.pair(xi, e[0], e[2]) == -1.0
    assert w.pair(xi, e[0], e[1]) == 0.0
    assert w.pair(xi, e[2], e[0]) == 1.0


def test_two_form_rejects_asymmetric_input():
    bad = TwoFormField(2, lambda xi: np.eye(4))
    with pytest.raises(StructureError):
        bad(XI0)
    with pytest.raises(ShapeError):
        TwoFormField(2, lambda xi: np.zeros((3, 3)))(XI0)


def test_gamma_worked_example():
    R = np.zeros((2, 2, 2))
    R[0, 0, 1] = 1.0
    xi = CotangentPoint([0, 0], [3, 0])
    G = gamma(R, xi)
    expected = np.zeros((4, 4))
    expected[3, 0] = 3.0  # a^2_1 at row 2, col 1 of the lower-left block
    np.testing.assert_array_equal(G, expected)
    assert not gamma(np.zeros((2, 2, 2)), xi).any()
    e = np.eye(4)
    assert theta_of_tensor(R, xi, e[0], e[1]) == 3.0
    assert theta_of_tensor(R, xi, e[2], e[1]) == 0.0  # vertical argument
    W = omega_st_matrix(2)
    for X, Y in [(e[1], e[0]), (np.ones(4), np.arange(4.0))]:
        assert theta_of_tensor(R, xi, Y, X) == pytest.approx(-(X @ W @ (G @ Y)))


def test_theta_needs_covariant_slot():
    with pytest.raises(ParameterError):
        theta_of_tensor(np.zeros(2), XI0)
    with pytest.raises(ParameterError):
        theta_of_tensor(np.zeros((2, 2, 2)), XI0, np.zeros(4))


def test_constant_structure_lifts_are_block_diagonal():
    J = standard_structure(2)
    xi = CotangentPoint([0.3, 0.2], [0.5, -1.0])
    D = np.zeros((4, 4))
    D[:2, :2], D[2:, 2:] = J_ST, J_ST.T
    flat = Connection.flat(2)
    for M in (complete_lift_raw(J, xi), sato_lift(J, xi), horizontal_lift(flat, J, xi), generalized_lift(flat, J, xi)):
        np.testing.assert_array_equal(M, D)


def test_complete_lift_lambda_structure():
    J = lambda_structure()
    M = complete_lift_raw(J, XI0)
    np.testing.assert_allclose(M[2:, :2], [[0.0, 1.0], [-1.0, 0.0]])
    np.testing.assert_allclose(M @ M, -np.eye(4), atol=1e-14)
    np.testing.assert_allclose(sato_lift(J, XI0), M, atol=1e-15)


def test_complete_lift_fails_off_integrability(rng):
    J = conjugated_n4()
    worst = max(
        np.abs(complete_lift_raw(J, xi) @ complete_lift_raw(J, xi) + np.eye(8)).max()
        for xi in cotangent_samples(rng, Box.cube(4), 30)
    )
    assert worst > 1e-6


def test_complete_lift_from_d_theta_j(rng):
    J = conjugated_n4()
    W = omega_st_matrix(4)
    for xi in cotangent_samples(rng, Box.cube(4), 10):
        np.testing.assert_allclose(complete_lift_raw(J, xi).T @ W, d_theta_j(J, xi), atol=1e-13)


def test_sato_lift_two_routes_and_square(rng):
    J = conjugated_n4()
    for xi in cotangent_samples(rng, Box.cube(4), 20):
        M = sato_lift(J, xi)
        np.testing.assert_allclose(M, sato_lift_closed_form(J, xi), atol=1e-13)
        np.testing.assert_allclose(M @ M, -np.eye(8), atol=1e-10)


def test_horizontal_lift_worked_example():
    M = horizontal_lift(gamma112(), standard_structure(2), XI0)
    assert not M[2:, :2].any()
    np.testing.assert_array_equal(M, horizontal_lift(gamma112().symmetrized(), standard_structure(2), XI0))
    np.testing.assert_allclose(M, horizontal_lift_closed_form(gamma112(), standard_structure(2), XI0))


def test_generalized_lift_worked_example():
    J, G = standard_structure(2), gamma112()
    M = generalized_lift(G, J, XI0)
    np.testing.assert_array_equal(M[2:, :2], -np.eye(2))
    np.testing.assert_allclose(M, generalized_lift_tensorial(G, J, XI0))
    np.testing.assert_allclose(M[2:, :2], gamma(s_tensor(G, J, XI0.x), XI0)[2:, :2])


def test_minimal_connection_three_way_agreement(rng):
    J = conjugated_n4()
    M = minimal_complex_connection(J)
    for xi in cotangent_samples(rng, Box.cube(4), 20):
        G = generalized_lift(M, J, xi)
        np.testing.assert_allclose(G, sato_lift(J, xi), atol=1e-9)
        np.testing.assert_allclose(G, horizontal_lift(M, J, xi), atol=1e-9)


def test_horizontal_basis_and_vertical_projection():
    G = gamma112()
    Hb = horizontal_basis(G, XI0)
    np.testing.assert_array_equal(Hb.T, [[1, 0, 0, 1], [0, 1, 0, 0]])
    np.testing.assert_array_equal(horizontal_basis(Connection.flat(2), XI0), np.vstack([np.eye(2), np.zeros((2, 2))]))
    np.testing.assert_array_equal(vertical_projection(G, XI0, [1, 0, 5, 5]), [5, 4])
    for h in Hb.T:
        assert not vertical_projection(G, XI0, h).any()
    np.testing.assert_array_equal(vertical_projection(G, XI0, [0, 0, 2, 3]), [2, 3])
    P = np.hstack([Hb, np.vstack([np.zeros((2, 2)), np.eye(2)])])
    assert np.linalg.det(P) == pytest.approx(1.0)
    with pytest.raises(ShapeError):
        vertical_projection(G, XI0, [1, 0, 5])


def test_generalized_lift_acts_on_horizontal_vectors(rng):
    J = conjugated_n4()
    G = Connection.constant(rng.normal(size=(4, 4, 4)))
    for xi in cotangent_samples(rng, Box.cube(4), 10):
        Hb = horizontal_basis(G, xi)
        np.testing.assert_allclose(generalized_lift(G, J, xi) @ Hb, Hb @ J(xi.x), atol=1e-12)


def test_lift_objects():
    J = standard_structure(2)
    assert set(LIFT_KINDS) == {"complete_raw", "sato", "horizontal", "generalized"}
    L = lift("generalized", J, gamma112())
    assert L.block_residual(XI0) == 0.0
    assert L.square_residual(XI0) == 0.0
    with pytest.raises(ParameterError):
        lift("horizontal", J)
    with pytest.raises(ParameterError):
        lift("vertical", J)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_lifts_square_to_minus_identity_for_random_connections(seed):
    r = np.random.default_rng(seed)
    J = conjugated_n4(scale=r.uniform(-1, 1))
    G = Connection.constant(r.normal(size=(4, 4, 4)))
    xi = cotangent_samples(r, Box.cube(4), 1)[0]
    for M in (sato_lift(J, xi), horizontal_lift(G, J, xi), generalized_lift(G, J, xi)):
        np.testing.assert_allclose(M @ M, -np.eye(8), atol=1e-9)
    np.testing.assert_allclose(generalized_lift(G, J, xi), generalized_lift_tensorial(G, J, xi), atol=1e-11)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gamma_theta_duality_random(seed):
    r = np.random.default_rng(seed)
    R = r.normal(size=(2, 2, 2))
    xi = CotangentPoint(r.normal(size=2), r.normal(size=2))
    X, Y = r.normal(size=(2, 4))
    W = omega_st_matrix(2)
    assert theta_of_tensor(R, xi, Y, X) == pytest.approx(-(X @ W @ (gamma(R, xi) @ Y)), abs=1e-12)
