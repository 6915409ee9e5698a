import numpy as np
import pytest

from parley import (IdmConfig, Point, TriangularDomain, UtilitySpec,
                    load_scenario, pareto_frontier)


@pytest.fixture(scope="session")
def paper():
    return load_scenario("paper-triangle")


@pytest.fixture(scope="session")
def u1(paper):
    return paper.true1


@pytest.fixture(scope="session")
def u2(paper):
    return paper.true2


@pytest.fixture(scope="session")
def domain(paper):
    return paper.domain


@pytest.fixture(scope="session")
def x0(paper):
    return paper.x0


@pytest.fixture(scope="session")
def frontier(u1, u2):
    return pareto_frontier(u1, u2)


@pytest.fixture(scope="session")
def cfg():
    return IdmConfig()


def random_interior(rng, k=10.0, slack=0.1):
    """A point with at least `slack` room on every constraint."""
    while True:
        p = rng.uniform(slack, k - slack, 2)
        if p.sum() <= k - slack:
            return Point(float(p[0]), float(p[1]))
