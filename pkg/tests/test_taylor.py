import numpy as np
import pytest

from ddecm import scalar_demo
from ddecm.chareq import find_hopf
from ddecm.manifold import expand
from ddecm.spectral import build_spectral_data
from ddecm.taylor import f_second_order, f_third_order, head_pair

from conftest import random_instance
from oracles import taylor_by_expansion


def setup(sys, guess):
    d = build_spectral_data(sys, find_hopf(sys, guess))
    rc, _ = expand(sys, d)
    return d, rc


def test_scalar_demo_second_order():
    # fhat = y**2 with y = x(t - 1) and phi1(-1) = exp(-i pi/2) = -i
    d, rc = setup(scalar_demo(), 1.5)
    assert rc.f20[0] == pytest.approx(-2, abs=1e-12)
    assert rc.f11[0] == pytest.approx(2, abs=1e-12)
    assert rc.f02[0] == pytest.approx(-2, abs=1e-12)
    assert rc.g20 == pytest.approx(-2 / (1 + 0.5j * np.pi), abs=1e-12)


def test_nonlinearity_matches_formula():
    sys = scalar_demo(quadratic=1.0, cubic=0.7)
    x, y = 0.3, -1.1
    assert sys.nonlinearity(np.array([x, y]))[0] == pytest.approx(y ** 2 + 0.7 * y ** 3)


@pytest.mark.parametrize("key", [(1, 0), (2, 0), (2, 3), (3, 1), (3, 4)])
def test_coefficients_match_symbolic_expansion(key):
    inst = random_instance(*key)
    _, rc = setup(inst.system, inst.omega)
    ref = taylor_by_expansion(inst.system, rc.Q, rc.W20, rc.W11, rc.W02)
    for (j, k), name in (((2, 0), "f20"), ((1, 1), "f11"), ((0, 2), "f02"),
                         ((2, 1), "f21"), ((1, 2), "f12")):
        got = getattr(rc, name)
        assert np.max(np.abs(got - ref[(j, k)])) <= 1e-9 * max(1.0, np.max(np.abs(ref[(j, k)]))), name


@pytest.mark.parametrize("key", [(2, 1), (3, 2), (5, 0)])
def test_conjugation_structure(key):
    inst = random_instance(*key)
    d, rc = setup(inst.system, inst.omega)
    np.testing.assert_allclose(rc.f02, np.conj(rc.f20), atol=1e-13)
    np.testing.assert_allclose(rc.f11.imag, 0, atol=1e-13)
    np.testing.assert_allclose(rc.f12, np.conj(rc.f21), atol=1e-12)
    # g02 pairs Psi1 with conj(f20); it is not conj(g20) in general
    assert rc.g02 == pytest.approx(complex(d.Psi1_0 @ np.conj(rc.f20)), abs=1e-13)


def test_bilinearity():
    inst = random_instance(2, 2)
    sys = inst.system
    rng = np.random.default_rng(0)
    Q = rng.normal(size=4) + 1j * rng.normal(size=4)
    f20, f11, f02 = f_second_order(sys, Q)
    f20b, _, _ = f_second_order(sys, 2j * Q)
    np.testing.assert_allclose(f20b, -4 * f20, atol=1e-12)
    np.testing.assert_allclose(f11, sys.d2(Q, Q.conj()), atol=1e-14)
    W = [rng.normal(size=4) + 1j * rng.normal(size=4) for _ in range(3)]
    f21, f12 = f_third_order(sys, Q, *W)
    zero = np.zeros(4)
    f21_0, _ = f_third_order(sys, Q, zero, zero, zero)
    np.testing.assert_allclose(f21 - f21_0, 2 * sys.d2(Q, W[1]) + sys.d2(Q.conj(), W[0]), atol=1e-12)


def test_head_pair_layout():
    d, _ = setup(scalar_demo(), 1.5)
    np.testing.assert_allclose(head_pair(d), [1.0, -1j], atol=1e-15)
