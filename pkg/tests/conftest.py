import random

import pytest

from patchdense import FinPoset, random_poset


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def sierpinski():
    return FinPoset.sierpinski()


@pytest.fixture
def chain2():
    return FinPoset.chain(["a", "b"])


def relation_of(X):
    return {(a, b) for a in X for b in X if X.leq(a, b)}


def random_posets(seed, count, max_size=8):
    rng = random.Random(seed)
    for _ in range(count):
        yield rng, random_poset(rng, rng.randint(1, max_size))
