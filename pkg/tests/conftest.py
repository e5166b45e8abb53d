import random

import pytest

from arrlab.arrangements import Arrangement
from arrlab.exact import Subspace


def random_subspace(rng, m, codim):
    """Subspace of R^m of the given codimension with small integer forms."""
    while True:
        rows = [[rng.choice((-1, 0, 0, 1, 2)) for _ in range(m)] for _ in range(codim)]
        S = Subspace(rows, m)
        if S.codim == codim:
            return S


def random_arrangement(rng, m=None, members=None, codim=None):
    m = m or rng.randint(2, 5)
    count = members or rng.randint(1, 3)
    subs = []
    tries = 0
    while len(subs) < count and tries < 100:
        tries += 1
        c = codim or rng.randint(1, m)
        S = random_subspace(rng, m, c)
        if S not in subs:
            subs.append(S)
    return Arrangement(subs, m)


@pytest.fixture
def rng():
    return random.Random(1234)
