"""Holomorphic maps, their cotangent lifts and fiber multiplication.

Run with ``python3 demos/maps.py``.
"""

import numpy as np

from cotanlift import Box, Connection, standard_structure
from cotanlift.fields import CotangentPoint
from cotanlift.maps import (
    SmoothMap,
    fiber_multiplication,
    holomorphy_residual,
    lift_holomorphy_audit,
    z_holomorphy_audit,
)


def main():
    J = standard_structure(2)
    flat = Connection.flat(2)
    rng = np.random.default_rng(7)
    box = Box.cube(2, 0.5, 1.5)
    xs = box.sample(rng, 50)
    samples = [CotangentPoint(x, rng.uniform(-1, 1, 2)) for x in xs]

    for f in (SmoothMap.translation([1.0, -0.5]), SmoothMap.square(), SmoothMap.conjugation()):
        base = max(holomorphy_residual(f, J, J, x) for x in xs)
        audit = lift_holomorphy_audit(f, J, flat, J, flat, samples)
        print(f"{f.name:12s} base {base:.2e}  lift {audit.lift_residual.max():.2e}  consistent {audit.consistent}")

    # fiber multiplication by a + bJ with a connection whose torsion breaks holomorphy
    G = np.zeros((2, 2, 2))
    G[0, 0, 1] = 1.0
    torsion = Connection.constant(G, "torsion")
    for name, nabla in (("flat", flat), ("torsion", torsion)):
        audit = z_holomorphy_audit(0.5, 2.0, J, nabla, samples)
        print(f"Z holomorphic for the {name} connection: {audit.holomorphic}")
    Z = fiber_multiplication(0.5, 2.0, J)
    print("Z(xi) =", Z(samples[0]))


if __name__ == "__main__":
    main()
