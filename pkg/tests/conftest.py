import random

import pytest

from rollup_da.algebra import ToyBackend
from rollup_da.pairing import CurveBackend
from rollup_da.pod import HashSuite


class FixedRandom:
    """Deterministic stand-in that returns scripted values from randrange."""

    def __init__(self, values):
        self._values = list(values)
        self._fallback = random.Random(0)

    def randrange(self, *args):
        if self._values:
            return self._values.pop(0)
        return self._fallback.randrange(*args)

    def getrandbits(self, n):
        return self._fallback.getrandbits(n)


class MappedHashSuite(HashSuite):
    """Hash suite whose outputs can be pinned per input for hand examples."""

    def __init__(self, modulus, h1_map=None, h2_map=None):
        super().__init__(modulus)
        self.h1_map = h1_map or {}
        self.h2_map = h2_map or {}

    def h1(self, data):
        if data in self.h1_map:
            return self.h1_map[data]
        return super().h1(data)

    def h2(self, challenge, data):
        if (challenge, data) in self.h2_map:
            return self.h2_map[(challenge, data)]
        return super().h2(challenge, data)


@pytest.fixture(scope="session")
def toy101():
    return ToyBackend(101)


@pytest.fixture(scope="session")
def toy():
    return ToyBackend()


@pytest.fixture(scope="session")
def curve():
    return CurveBackend()
