import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import conjugated_n4, gamma112, lambda_structure
from cotanlift.errors import ShapeError, StructureError
from cotanlift.fields import Box, Polynomial, TensorField, build_tensor_field, finite_difference_jacobian
from cotanlift.structure import (
    AlmostComplexStructure,
    Connection,
    apply_j_first,
    apply_j_second,
    bracket_nabla_j,
    bracket_nabla_j_expanded,
    conjugated_structure,
    derived_connections,
    j_nijenhuis,
    j_nijenhuis_closed_form,
    l_condition_residual,
    minimal_complex_connection,
    nabla_j,
    nijenhuis,
    s_prime,
    s_tensor,
    standard_structure,
    torsion,
)

J_ST = np.array([[0.0, -1.0], [1.0, 0.0]])


def bracket_oracle(X, Y, x):
    """Lie bracket of vector fields by finite differences: DY X - DX Y."""
    return finite_difference_jacobian(Y, x, 1e-6) @ X(x) - finite_difference_jacobian(X, x, 1e-6) @ Y(x)


def nijenhuis_oracle(J, x):
    n = J.n
    e = np.eye(n)
    out = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            Ei = lambda y, i=i: e[i]  # noqa: E731
            Ej = lambda y, j=j: e[j]  # noqa: E731
            JEi = lambda y, i=i: J(y) @ e[i]  # noqa: E731
            JEj = lambda y, j=j: J(y) @ e[j]  # noqa: E731
            Jx = J(x)
            out[:, i, j] = (
                bracket_oracle(JEi, JEj, x)
                - Jx @ bracket_oracle(Ei, JEj, x)
                - Jx @ bracket_oracle(JEi, Ej, x)
            )
    return out


def test_standard_structure_matrix():
    J = standard_structure(2)
    np.testing.assert_array_equal(J([0.3, 0.1]), J_ST)
    J4 = standard_structure(4)([0, 0, 0, 0])
    assert J4[1, 0] == 1 and J4[0, 1] == -1 and J4[3, 2] == 1 and J4[2, 3] == -1


def test_odd_dimension_rejected():
    with pytest.raises(ShapeError):
        standard_structure(3)


def test_validate_names_worst_point():
    ident = AlmostComplexStructure.from_tensor_field(build_tensor_field(2, 2, {(0, 0): 1.0, (1, 1): 1.0}))
    with pytest.raises(StructureError, match="max residual 2.000e\\+00"):
        ident.validate(np.zeros((3, 2)))


def test_conjugated_structure_squares_to_minus_identity(rng):
    J = conjugated_n4()
    for x in Box.cube(4).sample(rng, 20):
        assert J.square_residual(x) < 1e-14


def test_conjugated_partials_match_finite_differences(rng):
    J = conjugated_n4()
    for x in Box.cube(4, -0.9, 0.9).sample(rng, 10):
        np.testing.assert_allclose(J.evaluate(x)[1], finite_difference_jacobian(J, x), atol=1e-8)


def test_nijenhuis_vanishes_for_constant_and_in_dimension_two(rng):
    assert not nijenhuis(standard_structure(4), np.zeros(4)).any()
    J = lambda_structure()
    for x in Box.cube(2, -0.4, 0.4).sample(rng, 10):
        assert np.abs(nijenhuis(J, x)).max() < 1e-14


def test_nijenhuis_matches_bracket_oracle(rng):
    J = conjugated_n4()
    N0 = nijenhuis(J, np.zeros(4))
    assert np.abs(N0).max() == pytest.approx(1.0)
    np.testing.assert_allclose(N0, nijenhuis_oracle(J, np.zeros(4)), atol=1e-7)
    for x in Box.cube(4, -0.8, 0.8).sample(rng, 3):
        np.testing.assert_allclose(nijenhuis(J, x), nijenhuis_oracle(J, x), atol=1e-7)


def test_j_nijenhuis_two_routes(rng):
    J = conjugated_n4()
    assert np.abs(j_nijenhuis(J, np.zeros(4))).max() > 0.5
    for x in Box.cube(4).sample(rng, 10):
        np.testing.assert_allclose(j_nijenhuis(J, x), j_nijenhuis_closed_form(J, x), atol=1e-13)


def test_torsion_and_derived_connections():
    G = gamma112()
    T = torsion(G, np.zeros(2))
    expected = np.zeros((2, 2, 2))
    expected[0, 0, 1], expected[0, 1, 0] = 1.0, -1.0
    np.testing.assert_array_equal(T, expected)
    bar, tilde = derived_connections(G)
    assert bar(np.zeros(2))[0, 1, 0] == 1.0 and bar(np.zeros(2))[0, 0, 1] == 0.0
    assert tilde(np.zeros(2))[0, 0, 1] == tilde(np.zeros(2))[0, 1, 0] == 0.5
    flat = Connection.flat(2)
    assert not torsion(flat, np.zeros(2)).any()
    np.testing.assert_array_equal(flat.symmetrized()(np.zeros(2)), flat(np.zeros(2)))


def test_nabla_j_worked_example():
    NJ = nabla_j(gamma112(), standard_structure(2), np.zeros(2))
    expected = np.zeros((2, 2, 2))
    expected[0, 0, 0] = 1.0  # (nabla J)^1_{1,1}
    expected[1, 0, 1] = -1.0  # (nabla J)^2_{1,2}
    np.testing.assert_array_equal(NJ, expected)
    assert not nabla_j(Connection.flat(2), standard_structure(2), np.zeros(2)).any()


def test_s_tensor_worked_example():
    S = s_tensor(gamma112(), standard_structure(2), np.zeros(2))
    expected = np.zeros((2, 2, 2))
    expected[0, 0, 0] = expected[0, 1, 1] = -1.0
    np.testing.assert_array_equal(S, expected)
    np.testing.assert_allclose(S_prime := s_prime(gamma112(), standard_structure(2), np.zeros(2)), S)
    assert S_prime.shape == (2, 2, 2)


def test_bracket_two_routes(rng):
    J = conjugated_n4()
    G = Connection.constant(rng.normal(size=(4, 4, 4)))
    for x in Box.cube(4).sample(rng, 5):
        np.testing.assert_allclose(bracket_nabla_j(G, J, x), bracket_nabla_j_expanded(G, J, x), atol=1e-12)
    Jst = standard_structure(2)
    np.testing.assert_allclose(
        bracket_nabla_j(gamma112(), Jst, np.zeros(2)), bracket_nabla_j_expanded(gamma112(), Jst, np.zeros(2))
    )


def test_minimal_connection_for_standard_is_flat():
    M = minimal_complex_connection(standard_structure(2))
    assert np.abs(M(np.array([0.2, 0.1]))).max() == 0.0


def test_minimal_connection_postconditions(rng):
    J = conjugated_n4()
    M = minimal_complex_connection(J)
    for x in Box.cube(4).sample(rng, 20):
        assert np.abs(nabla_j(M, J, x)).max() < 1e-10
        assert np.abs(torsion(M, x) - 0.25 * nijenhuis(J, x)).max() < 1e-10
        np.testing.assert_allclose(s_tensor(M, J, x), -0.5 * j_nijenhuis(J, x), atol=1e-10)


def test_minimal_connection_in_dimension_two_is_symmetric(rng):
    J = lambda_structure()
    M = minimal_complex_connection(J)
    for x in Box.cube(2, -0.4, 0.4).sample(rng, 10):
        assert np.abs(torsion(M, x)).max() < 1e-12


def test_minimal_connection_rejects_torsion():
    with pytest.raises(ShapeError):
        minimal_complex_connection(standard_structure(2), gamma112())


def test_l_condition_examples():
    L_mult = np.zeros((2, 2, 2))
    L_mult[0, 0, 0], L_mult[0, 1, 1], L_mult[1, 0, 1], L_mult[1, 1, 0] = 1, -1, 1, 1
    L_pair = np.zeros((2, 2, 2))
    L_pair[0] = np.eye(2)
    assert l_condition_residual(np.zeros((2, 2, 2)), J_ST) == 0.0
    assert l_condition_residual(L_mult, J_ST) == 0.0
    assert l_condition_residual(L_pair, J_ST) > 0.5
    with pytest.raises(ShapeError):
        l_condition_residual(np.zeros((2, 3, 2)), J_ST)


def test_apply_j_slots():
    R = np.arange(8.0).reshape(2, 2, 2)
    e = np.eye(2)
    # R(J d_i, d_j) computed by hand through the bilinear form
    for i in range(2):
        for j in range(2):
            Rij = lambda X, Y: np.einsum("kab,a,b->k", R, X, Y)  # noqa: E731
            np.testing.assert_allclose(apply_j_first(R, J_ST)[:, i, j], Rij(J_ST @ e[i], e[j]))
            np.testing.assert_allclose(apply_j_second(R, J_ST)[:, i, j], Rij(e[i], J_ST @ e[j]))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=4, max_size=4), st.floats(-0.9, 0.9))
def test_conjugated_structures_are_almost_complex(x, s):
    box = Box.cube(4)
    P = TensorField(4, 2, {(0, 1): s * Polynomial.variable(2, 4, box), (2, 3): s * Polynomial.variable(0, 4, box)}, box)
    J = conjugated_structure(P)
    assert J.square_residual(np.array(x)) < 1e-12
