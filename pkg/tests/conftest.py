import functools

import numpy as np
import pytest

from ddecm import analyze, scalar_demo, planar_demo
from ddecm.systems import random_hopf_system

RANDOM_DIMS = (1, 2, 3, 5)
SEEDS_PER_DIM = 6


@functools.lru_cache(maxsize=None)
def random_instance(n, seed):
    return random_hopf_system(1000 * n + seed, n)


@functools.lru_cache(maxsize=None)
def random_analysis(n, seed, oracle=False):
    inst = random_instance(n, seed)
    return analyze(inst.system, inst.omega, oracle=oracle)


def random_keys():
    return [(n, s) for n in RANDOM_DIMS for s in range(SEEDS_PER_DIM)]


@pytest.fixture(scope="session")
def scalar_analysis():
    return analyze(scalar_demo(cubic=0.7), 1.5, oracle=True)


@pytest.fixture(scope="session")
def planar_analysis():
    rng = np.random.default_rng(7)
    sys = planar_demo(D2=rng.normal(size=(2, 4, 4)), D3=rng.normal(size=(2, 4, 4, 4)))
    return analyze(sys, 0.8, oracle=True)
