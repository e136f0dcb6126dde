from fractions import Fraction

import pytest

from chainforge.complexes import WeightedComplex


def triangle_complex(area) -> WeightedComplex:
    """One triangle, unit edges, prescribed area weight."""
    return WeightedComplex.from_simplices(
        [(0, 1, 2)],
        weights={(0, 1, 2): Fraction(area), (0, 1): 1, (0, 2): 1, (1, 2): 1},
    )


def path_complex(n_edges: int, step=Fraction(1)) -> WeightedComplex:
    edges = [(i, i + 1) for i in range(n_edges)]
    return WeightedComplex.from_simplices(edges, weights={e: Fraction(step) for e in edges})


@pytest.fixture
def triangle():
    return triangle_complex(Fraction(3, 2))


@pytest.fixture
def unit_path():
    return path_complex(3)
