"""Compare the four lifts of a non-integrable structure on R^4.

Run with ``python3 demos/lifts.py``.
"""

import numpy as np

from cotanlift import (
    Box,
    Connection,
    CotangentPoint,
    Polynomial,
    TensorField,
    complete_lift_raw,
    conjugated_structure,
    generalized_lift,
    horizontal_lift,
    minimal_complex_connection,
    nijenhuis,
    sato_lift,
)


def square_residual(M):
    return np.abs(M @ M + np.eye(len(M))).max()


def main():
    box = Box.cube(4)
    x3 = Polynomial.variable(2, 4, box)
    J = conjugated_structure(TensorField(4, 2, {(0, 1): x3}, box))
    xi = CotangentPoint([0.2, -0.1, 0.5, 0.3], [1.0, 0.5, -0.2, 0.4])
    print(f"max |N_J| at the base point: {np.abs(nijenhuis(J, xi.x)).max():.3f}")

    flat = Connection.flat(4)
    print("square + I residuals")
    print(f"  complete lift      {square_residual(complete_lift_raw(J, xi)):.3e}")
    print(f"  Sato lift          {square_residual(sato_lift(J, xi)):.3e}")
    print(f"  horizontal (flat)  {square_residual(horizontal_lift(flat, J, xi)):.3e}")
    print(f"  generalized (flat) {square_residual(generalized_lift(flat, J, xi)):.3e}")

    M = minimal_complex_connection(J)
    G = generalized_lift(M, J, xi)
    print("with the minimal complex connection")
    print(f"  |J^G - Sato| = {np.abs(G - sato_lift(J, xi)).max():.3e}")
    print(f"  |J^G - J^H|  = {np.abs(G - horizontal_lift(M, J, xi)).max():.3e}")


if __name__ == "__main__":
    main()
