import numpy as np
import pytest

from cotanlift.fields import Box, Polynomial, TensorField, parse_scalar_field
from cotanlift.structure import AlmostComplexStructure, Connection, conjugated_structure


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def lambda_structure() -> AlmostComplexStructure:
    """n = 2, J^1_2 = -(1 + x1), J^2_1 = 1 / (1 + x1) on [-0.5, 0.5]^2."""
    box = Box.cube(2, -0.5, 0.5)
    comps = {
        (0, 1): parse_scalar_field([[-1.0, [0, 0]], [-1.0, [1, 0]]], 2, box),
        (1, 0): parse_scalar_field({"num": 1.0, "den": [[1.0, [0, 0]], [1.0, [1, 0]]]}, 2, box),
    }
    return AlmostComplexStructure.from_tensor_field(TensorField(2, 2, comps, box), "lambda")


def conjugated_n4(scale: float = 1.0) -> AlmostComplexStructure:
    """A J_st A^-1 with A = I + scale * x3 E12 on [-1, 1]^4."""
    box = Box.cube(4)
    x3 = scale * Polynomial.variable(2, 4, box)
    return conjugated_structure(TensorField(4, 2, {(0, 1): x3}, box))


def gamma112() -> Connection:
    G = np.zeros((2, 2, 2))
    G[0, 0, 1] = 1.0
    return Connection.constant(G, "gamma112")


def cotangent_samples(rng, box: Box, count: int):
    from cotanlift.fields import CotangentPoint

    xs = box.sample(rng, count)
    ps = rng.uniform(-1, 1, size=xs.shape)
    return [CotangentPoint(x, p) for x, p in zip(xs, ps)]


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
