import numpy as np
import pytest

from pcosync.graph import Graph, RggSpec, complete_graph, generate_er, generate_rgg
from pcosync.prc import SfPrc
from pcosync.sim import ModelParams


@pytest.fixture
def k2():
    return complete_graph(2)


@pytest.fixture
def k5():
    return complete_graph(5)


@pytest.fixture
def ring4():
    # directed 4-cycle plus one chord to break periodicity
    return Graph(n=4, edges=((0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0),
                             (0, 2, 1.0)))


@pytest.fixture
def sf_params():
    return ModelParams(tau=0.05, prc=SfPrc(B=0.55))


@pytest.fixture
def er30():
    return generate_er(30, 0.3, 42)


@pytest.fixture
def rgg50():
    return generate_rgg(RggSpec(n=50, dim=2, radius=0.3), 7)


def random_phases(rng: np.random.Generator, n: int) -> tuple:
    return tuple(rng.random(n).tolist())
