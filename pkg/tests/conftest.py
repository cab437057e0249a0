import numpy as np
import pytest

from stabscape import get_code


@pytest.fixture(scope="session")
def cubic4():
    return get_code("cubic1", 4)


@pytest.fixture(scope="session")
def cubic8():
    return get_code("cubic1", 8)


@pytest.fixture(scope="session")
def toric3():
    return get_code("toric2d", 3)


@pytest.fixture(scope="session")
def toric4():
    return get_code("toric2d", 4)


@pytest.fixture(scope="session")
def rep5():
    return get_code("rep1d", 5)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def random_operator(code, rng, max_terms=6):
    from stabscape.lattice import QubitIndex
    from stabscape.pauli import PauliOperator

    g = code.geometry
    terms = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        site = tuple(int(c) for c in rng.integers(0, g.L, size=g.D))
        terms.append((QubitIndex(site, int(rng.integers(0, g.q))), "XYZ"[int(rng.integers(0, 3))]))
    return PauliOperator.from_terms(g, terms)
