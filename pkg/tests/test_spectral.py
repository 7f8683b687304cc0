import numpy as np
import pytest

from ddecm import DDESystem, scalar_demo
from ddecm.chareq import char_matrix, find_hopf
from ddecm.errors import DimensionMismatch, NormalizationDegenerate
from ddecm.expfun import ExpPolyFunction
from ddecm.spectral import build_spectral_data, project, spectral_data_at

from conftest import random_instance, random_keys


def data_for(sys, guess):
    return build_spectral_data(sys, find_hopf(sys, guess))


def test_scalar_demo_normalization():
    d = data_for(scalar_demo(), 1.5)
    assert d.phi1_0[0] == pytest.approx(1.0)
    assert d.psi1_0[0] == pytest.approx(1.0)
    # psi phi + r psi B phi exp(-i pi/2) = 1 + (pi/2) i
    assert d.e11 == pytest.approx(1 + 0.5j * np.pi, abs=1e-12)
    assert d.Psi1_0[0] == pytest.approx(1 / (1 + 0.5j * np.pi), abs=1e-12)


@pytest.mark.parametrize("key", random_keys())
def test_biorthogonality(key):
    inst = random_instance(*key)
    d = data_for(inst.system, inst.omega)
    E = d.gram()
    assert abs(E[0, 0] - d.e11) <= 1e-10 * abs(d.e11)
    assert abs(E[1, 1] - d.e22) <= 1e-10 * abs(d.e11)
    assert abs(E[0, 1]) <= 1e-10 and abs(E[1, 0]) <= 1e-10
    assert abs(d.pair(d.Psi1, d.phi1) - 1) <= 1e-10
    assert abs(d.pair(d.Psi1, d.phi2)) <= 1e-10
    assert abs(d.pair(d.Psi2, d.phi2) - 1) <= 1e-10


@pytest.mark.parametrize("key", random_keys()[::3])
def test_eigenvectors_solve_char_equation(key):
    inst = random_instance(*key)
    sys = inst.system
    d = data_for(sys, inst.omega)
    M = char_matrix(sys, d.lam)
    scale = np.linalg.norm(M, 2) + abs(d.lam) + np.linalg.norm(sys.A, 2)
    assert np.linalg.norm(M @ d.phi1_0) <= 1e-12 * scale
    assert np.linalg.norm(d.psi1_0 @ M) <= 1e-12 * scale
    # phi1 is an eigenfunction of the generator: phi' = lam phi, phi'(0) = A phi(0) + B phi(-r)
    dphi = d.phi1.derivative()
    np.testing.assert_allclose(dphi(0.0), sys.A @ d.phi1(0.0) + sys.B @ d.phi1(-sys.r), atol=1e-12)
    for t in np.linspace(-sys.r, 0, 5):
        np.testing.assert_allclose(dphi(t), d.lam * d.phi1(t), atol=1e-12)


def test_projection_of_eigenfunctions():
    inst = random_instance(3, 1)
    d = data_for(inst.system, inst.omega)
    a, b = project(d, d.phi1)
    assert a == pytest.approx(1, abs=1e-12) and abs(b) <= 1e-12
    a, b = project(d, 2 * d.phi1 - 3j * d.phi2)
    assert a == pytest.approx(2, abs=1e-12) and b == pytest.approx(-3j, abs=1e-12)


def test_projection_dimension_checked():
    d = data_for(scalar_demo(), 1.5)
    f = ExpPolyFunction.exponential(1.0, [1.0, 2.0], (-1.0, 0.0))
    with pytest.raises(DimensionMismatch):
        project(d, f)


def test_degenerate_normalization():
    # Jordan coupling makes psi1 orthogonal to phi1 under the bilinear form
    sys = DDESystem([[0.0, 1.0], [0.0, 0.0]], -np.pi / 2 * np.eye(2), 1.0)
    with pytest.raises(NormalizationDegenerate):
        spectral_data_at(sys, 0.5j * np.pi)
