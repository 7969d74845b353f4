"""Levi form of the unit sphere and the conormal bundle above it.

Run with ``python3 demos/hypersurface.py``.
"""

import numpy as np

from cotanlift import Box, Connection, Polynomial, generalized_lift, omega_st, sato_lift, standard_structure
from cotanlift.hypersurface import (
    Hypersurface,
    conormal_frame,
    lagrangian_residual,
    levi_form,
    metric_compatible_form,
    proplag_audit,
    strict_pseudoconvexity_check,
    totally_real_residual,
)


def main():
    box = Box.cube(4, -1.5, 1.5)
    xs = Polynomial.variables(4, box)
    sphere = Hypersurface(sum(x**2 for x in xs) - 1.0, box)
    J = standard_structure(4)
    rng = np.random.default_rng(3)
    x = sphere.find_points(rng, 1)[0]
    X = sphere.tangent_basis(x) @ rng.normal(size=3)
    print(f"Levi form {levi_form(sphere, J, x, X):.6f}   4|X|^2 {4 * X @ X:.6f}")
    verdict = strict_pseudoconvexity_check(sphere, J, x)
    print(f"strictly pseudoconvex: {verdict.strict} (min {verdict.literal_min:.3f})")

    frame = conormal_frame(sphere, x, 0.8)
    print(f"omega_st on the conormal frame: {lagrangian_residual(omega_st(4), frame):.2e}")
    print(f"totally real margin for the Sato lift: {totally_real_residual(lambda xi: sato_lift(J, xi), frame):.3f}")

    flat = Connection.flat(4)
    compatible = metric_compatible_form(lambda xi: generalized_lift(flat, J, xi), 4)
    pts = sphere.find_points(rng, 10)
    for name, form in (("omega_st", omega_st(4)), ("compatible form", compatible)):
        cert = proplag_audit(form, sphere, J, flat, pts, rng)
        print(f"{name}: never Lagrangian and compatible at once: {cert.holds}")


if __name__ == "__main__":
    main()
