import random
from typing import List

import pytest

from modules.quiver import Quiver


def random_admissible_quiver(rng: random.Random, n: int, max_mult: int = 2, density: float = 0.5) -> Quiver:
    """Arrows only go from larger to smaller labels, so the result is acyclic and admissible."""
    arrows: List[List[int]] = []
    for i in range(2, n + 1):
        for j in range(1, i):
            if rng.random() < density:
                arrows.append([i, j, rng.randint(1, max_mult)])
    return Quiver.from_arrows(n, arrows)


@pytest.fixture
def rng():
    return random.Random(20240917)


@pytest.fixture
def a2():
    return Quiver.from_arrows(2, [[2, 1, 1]])


@pytest.fixture
def kronecker():
    return Quiver.from_arrows(2, [[2, 1, 2]])


@pytest.fixture
def kronecker3():
    return Quiver.from_arrows(2, [[2, 1, 3]])


@pytest.fixture
def a3double():
    return Quiver.from_arrows(3, [[2, 1, 2], [3, 2, 2]])


@pytest.fixture
def atilde2():
    return Quiver.from_arrows(3, [[2, 1, 1], [3, 1, 1], [3, 2, 1]])


@pytest.fixture
def qa5():
    return Quiver.from_arrows(5, [[2, 1, 1], [3, 2, 1], [5, 3, 1], [5, 4, 1], [4, 1, 1]])
