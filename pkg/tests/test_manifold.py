import numpy as np
import pytest

from ddecm import DDESystem, planar_demo, scalar_demo
from ddecm.chareq import find_hopf
from ddecm.errors import RegularizedSystemSingular, ResonantSecondOrder
from ddecm.manifold import (assemble_R1, assemble_R2, expand, fredholm_relations,
                            solvability_defect, solve_w21, third_order_forcing)
from ddecm.numerics import orthonormal_complete
from ddecm.spectral import build_spectral_data

from conftest import random_instance
from oracles import collocation_boundary_solve, singular_boundary_solve

CASES = [("scalar", None), ("planar", None), ("random", (2, 4)), ("random", (3, 0)), ("random", (5, 2))]


def make_system(kind, key):
    if kind == "scalar":
        return scalar_demo(cubic=0.7), 1.5
    if kind == "planar":
        rng = np.random.default_rng(11)
        return planar_demo(D2=rng.normal(size=(2, 4, 4)), D3=rng.normal(size=(2, 4, 4, 4))), 0.8
    inst = random_instance(*key)
    return inst.system, inst.omega


def full_solve(sys, guess):
    d = build_spectral_data(sys, find_hopf(sys, guess))
    rc, w2 = expand(sys, d)
    R1 = assemble_R1(sys, d, rc, *w2)
    R2 = assemble_R2(sys, d, rc, *w2)
    return d, rc, w2, R1, R2


@pytest.fixture(scope="module", params=CASES, ids=lambda c: c[0] + ("" if c[1] is None else str(c[1])))
def solved(request):
    sys, guess = make_system(*request.param)
    d, rc, w2, R1, R2 = full_solve(sys, guess)
    third = solve_w21(sys, d, rc, *w2, R1, R2)
    return sys, d, rc, w2, R1, R2, third


def test_second_order_against_collocation(solved):
    sys, d, rc, (w20, w11, w02), *_ = solved
    lam = d.lam
    for w, rate, ga, gb, f in ((w20, 2 * lam, rc.g20, rc.g02, rc.f20),
                               (w11, 2 * lam.real, rc.g11, rc.g11, rc.f11),
                               (w02, 2 * np.conj(lam), rc.g02, rc.g20, rc.f02)):
        def forcing(t, ga=ga, gb=gb):
            return ga * d.phi1_0 * np.exp(lam * t) + np.conj(gb) * np.conj(d.phi1_0 * np.exp(lam * t))
        u, theta = collocation_boundary_solve(sys.A, sys.B, sys.r, rate, forcing, f)
        scale = max(1.0, np.max(np.abs(u)))
        assert np.max(np.abs(u[0] - w.at0)) <= 1e-10 * scale
        assert np.max(np.abs(u[-1] - w.at_minus_r)) <= 1e-10 * scale
        for k in (5, 17, 30):
            assert np.max(np.abs(u[k] - w(theta[k]))) <= 1e-10 * scale


def test_w21_satisfies_its_equations(solved):
    sys, d, rc, (w20, w11, w02), R1, R2, third = solved
    w = third.w21.w
    F = third_order_forcing(d, rc, w20, w11, w02)
    resid = w.derivative() - w * (1j * d.omega) - F
    scale = max(1.0, F.max_abs_coefficient())
    for t in np.linspace(-sys.r, 0, 11):
        assert np.linalg.norm(resid(t)) <= 1e-10 * scale
    # boundary relation at theta = 0
    lhs = w.derivative()(0.0)
    rhs = sys.A @ w(0.0) + sys.B @ w(-sys.r) + rc.f21
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * scale


def test_w21_against_constrained_collocation(solved):
    """The selected w21 is the solution with no component along phi1."""
    sys, d, rc, (w20, w11, w02), R1, R2, third = solved
    F = third_order_forcing(d, rc, w20, w11, w02)
    u, theta = singular_boundary_solve(sys.A, sys.B, sys.r, 1j * d.omega, F, rc.f21, d.Psi1_0)
    scale = max(1.0, np.max(np.abs(u)))
    assert np.max(np.abs(u[0] - third.w21.at0)) <= 1e-8 * scale
    assert np.max(np.abs(u[-1] - third.w21.at_minus_r)) <= 1e-8 * scale
    assert abs(d.pair(d.Psi1, third.w21.w)) <= 1e-10 * scale


def test_projections_vanish(solved):
    sys, d, rc, w2, *_ = solved
    for w in w2:
        a, b = d.pair(d.Psi1, w.w), d.pair(d.Psi2, w.w)
        assert abs(a) <= 1e-10 and abs(b) <= 1e-10


def test_conjugation_and_realness(solved):
    sys, d, rc, (w20, w11, w02), *_ = solved
    for t in np.linspace(-sys.r, 0, 10):
        np.testing.assert_allclose(w02(t), np.conj(w20(t)), atol=1e-10)
        np.testing.assert_allclose(w11(t).imag, 0, atol=1e-10)


def test_fredholm_relations(solved):
    sys, d, rc, w2, R1, R2, third = solved
    rel = fredholm_relations(sys, d, rc, *w2)
    assert set(rel) == {"R1a", "R1b", "R2", "R3", "R4"}
    for name, v in rel.items():
        assert abs(v) <= 1e-9, name
    assert abs(sum(rel.values()) - d.Psi1_0 @ (sys.B @ R1 - R2)) <= 1e-12
    assert third.relative_defect <= 1e-8


def test_regularized_solution_properties(solved):
    sys, d, rc, w2, R1, R2, third = solved
    M, U = third.M, third.basis
    b = sys.B @ R1 - R2
    assert np.linalg.norm(M @ third.w21.at0 - b) <= 1e-8 * max(third.scale, 1e-300)
    for j in range(sys.n):
        assert abs(d.Psi1_0 @ M @ U[:, j]) <= 1e-10
    np.testing.assert_allclose(U.conj().T @ U, np.eye(sys.n), atol=1e-13)
    em = np.exp(-1j * d.omega * sys.r)
    np.testing.assert_allclose(third.w21.at_minus_r, em * third.w21.at0 + R1, atol=1e-10)
    # the replacement row acts on phi1 exactly as 2 <Psi1, phi1> = 2
    assert d.Psi1_0 @ third.Mtilde @ d.phi1_0 == pytest.approx(2.0, abs=1e-12)


def test_result_independent_of_basis_completion(solved):
    sys, d, rc, w2, R1, R2, third = solved
    if sys.n == 1:
        return
    rng = np.random.default_rng(5)
    k = sys.n - 1
    V = np.linalg.qr(rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k)))[0]
    U = third.basis.copy()
    U[:, 1:] = U[:, 1:] @ V
    S = np.vstack([d.Psi1_0 @ third.Mtilde @ U, U[:, 1:].conj().T @ third.M @ U])
    rhs = np.concatenate([[third.Rtilde], U[:, 1:].conj().T @ (sys.B @ R1 - R2)])
    x = np.linalg.solve(S, rhs)
    np.testing.assert_allclose(U @ x, third.w21.at0, atol=1e-10)


def test_fault_injection_in_w11_breaks_relations():
    sys, guess = make_system("planar", None)
    d, rc, (w20, w11, w02), R1, R2 = full_solve(sys, guess)
    bad = type(w11)(w11.order, w11.w + 1e-3 * d.phi1, w11.at0 + 1e-3 * d.phi1_0,
                    w11.at_minus_r + 1e-3 * d.phi1(-sys.r))
    rel = fredholm_relations(sys, d, rc, w20, bad, w02)
    assert abs(rel["R3"]) > 1e-5
    assert abs(rel["R2"]) <= 1e-9 and abs(rel["R4"]) <= 1e-9
    R1b = assemble_R1(sys, d, rc, w20, bad, w02)
    R2b = assemble_R2(sys, d, rc, w20, bad, w02)
    assert solvability_defect(d, sys, R1b, R2b) > 1e-5


def test_second_order_resonance_detected():
    # scalar Hopf mode at pi/2 next to an oscillator with a root at i pi = 2 i (pi/2)
    om = np.pi
    A = np.zeros((3, 3))
    A[1, 2], A[2, 1] = 1.0, -1.0
    B = np.zeros((3, 3))
    B[0, 0] = -np.pi / 2
    B[2, 1] = (1 - om ** 2) * np.cos(om)
    D2 = np.zeros((3, 6, 6))
    D2[0, 3, 3] = 2.0
    sys = DDESystem(A, B, 1.0, D2)
    d = build_spectral_data(sys, find_hopf(sys, 1.5))
    with pytest.raises(ResonantSecondOrder):
        expand(sys, d)


def test_zero_nonlinearity_gives_zero_coefficients():
    sys = planar_demo(D2=np.zeros((2, 4, 4)))
    d, rc, w2, R1, R2 = full_solve(sys, 0.8)
    third = solve_w21(sys, d, rc, *w2, R1, R2)
    for w in (*w2, third.w21):
        assert np.max(np.abs(w.at0)) == 0.0
    assert rc.g21 == 0


def test_singular_regularized_system_reported():
    sys, guess = make_system("planar", None)
    d, rc, w2, R1, R2 = full_solve(sys, guess)
    with pytest.raises(RegularizedSystemSingular):
        solve_w21(sys, d, rc, *w2, R1, R2, tol_cond=1.0)
    third = solve_w21(sys, d, rc, *w2, R1, R2, tol_cond=1.0, allow_lstsq=True)
    assert third.used_lstsq
    ref = solve_w21(sys, d, rc, *w2, R1, R2)
    np.testing.assert_allclose(third.w21.at0, ref.w21.at0, atol=1e-12)
