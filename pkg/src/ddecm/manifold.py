"""Second- and third-order center-manifold coefficients.

Matching powers ``z**j conj(z)**k`` in the invariance equation gives, for each
coefficient ``w_jk`` on ``[-r, 0]``, a linear ODE

    w_jk' = (j lam + k conj(lam)) w_jk + F_jk(s)

together with the boundary condition obtained from the equation itself at
``s = 0``.  Integrating the ODE over ``[-r, 0]`` eliminates ``w_jk(-r)`` and
leaves an ``n x n`` system for ``w_jk(0)``.  At second order that system is
regular; for ``w21`` its matrix ``i omega I - A - B exp(-i omega r)`` is the
(singular) characteristic matrix and the solution is selected by replacing
the redundant row with the limit of the perturbed, nonsingular problem.
"""

from dataclasses import dataclass

import numpy as np

from . import numerics
from .chareq import term_scale
from .errors import RegularizedSystemSingular, ResonantSecondOrder, SingularMatrix
from .expfun import ExpPolyFunction, solve_linear_ode
from .taylor import (ReducedCoefficients, endpoint_pair, f_second_order,
                     f_third_order, g_from_f, head_pair)

__all__ = [
    "ManifoldCoefficient", "ThirdOrderSolution", "solve_boundary_problem",
    "solve_second_order", "expand", "third_order_forcing", "assemble_R1",
    "assemble_R2", "fredholm_relations", "solvability_defect", "solve_w21",
    "rho_function", "eta_function", "regularized_rhs",
]

TOL_RESONANT_ROOT = 1e-10


@dataclass(frozen=True, eq=False)
class ManifoldCoefficient:
    order: tuple
    w: ExpPolyFunction
    at0: np.ndarray
    at_minus_r: np.ndarray
    cond: float = float("nan")

    @classmethod
    def from_function(cls, order, w, cond=float("nan")):
        a = w.domain[0]
        return cls(order, w, w.evaluate(0.0), w.evaluate(a), cond)

    def __call__(self, s):
        return self.w.evaluate(s)


def solve_boundary_problem(sys, rate, forcing, f, order=None, tol=TOL_RESONANT_ROOT):
    """Solve ``w' = rate w + forcing`` with ``rate w(0) + forcing(0) = A w(0) + B w(-r) + f``.

    Integration gives ``w(-r) = exp(-rate r) (w(0) - J)`` with
    ``J = int_{-r}^0 exp(-rate t) forcing(t) dt``, hence

        (rate I - A - B exp(-rate r)) w(0) = f - forcing(0) - B exp(-rate r) J.

    Raises
    ------
    ResonantSecondOrder
        If ``rate`` is (numerically) a characteristic root.
    """
    rate = complex(rate)
    r = sys.r
    em = np.exp(-rate * r)
    J = forcing.times_exp(-rate).integral()
    rhs = f - forcing.evaluate(0.0) - em * (sys.B @ J)
    Mk = rate * np.eye(sys.n) - sys.A - em * sys.B
    smin = numerics.singular_values(Mk)[-1]
    if smin <= tol * term_scale(sys, rate):
        raise ResonantSecondOrder(
            f"{rate} is within tolerance of a characteristic root (sigma_min={smin:.3e})")
    try:
        w0, cond = numerics.solve(Mk, rhs)
    except SingularMatrix as exc:
        raise ResonantSecondOrder(str(exc)) from exc
    return ManifoldCoefficient.from_function(order, solve_linear_ode(rate, forcing, w0), cond)


def _second_order_forcing(data, g_jk, g_kj):
    return g_jk * data.phi1 + np.conj(g_kj) * data.phi2


def solve_second_order(sys, data, rc):
    """``w20``, ``w11`` and ``w02`` for the spectral data ``data``.

    The rates are ``2 lam``, ``lam + conj(lam)`` and ``2 conj(lam)``; the
    forcings ``g_jk phi1 + conj(g_kj) phi2``.  ``w02`` is solved on its own
    rather than copied from ``conj(w20)`` so the conjugation symmetry stays
    checkable.
    """
    lam = data.lam
    w20 = solve_boundary_problem(sys, 2 * lam, _second_order_forcing(data, rc.g20, rc.g02),
                                 rc.f20, (2, 0))
    w11 = solve_boundary_problem(sys, lam + np.conj(lam),
                                 _second_order_forcing(data, rc.g11, rc.g11), rc.f11, (1, 1))
    w02 = solve_boundary_problem(sys, 2 * np.conj(lam),
                                 _second_order_forcing(data, rc.g02, rc.g20), rc.f02, (0, 2))
    return w20, w11, w02


def expand(sys, data):
    """Run the Taylor bookkeeping up to third order.

    Returns the filled :class:`ReducedCoefficients` and ``(w20, w11, w02)``.
    Second-order manifold coefficients are needed before ``f21``/``f12``.
    """
    rc = ReducedCoefficients(Q=head_pair(data))
    rc.f20, rc.f11, rc.f02 = f_second_order(sys, rc.Q)
    rc.g20, rc.g11, rc.g02 = (g_from_f(data, f) for f in (rc.f20, rc.f11, rc.f02))
    w20, w11, w02 = solve_second_order(sys, data, rc)
    rc.W20, rc.W11, rc.W02 = (endpoint_pair(w.w, sys.r) for w in (w20, w11, w02))
    rc.f21, rc.f12 = f_third_order(sys, rc.Q, rc.W20, rc.W11, rc.W02)
    rc.g21 = g_from_f(data, rc.f21)
    rc.g12 = g_from_f(data, rc.f12)
    return rc, (w20, w11, w02)


def third_order_forcing(data, rc, w20, w11, w02):
    """Inhomogeneity of the ``w21`` equation."""
    return (rc.g21 * data.phi1 + np.conj(rc.g12) * data.phi2
            + 2 * rc.g11 * w20.w
            + (rc.g20 + 2 * np.conj(rc.g11)) * w11.w
            + np.conj(rc.g02) * w02.w)


def _weighted_integrals(data, *ws):
    return [w.w.times_exp(-1j * data.omega).integral() for w in ws]


def assemble_R1(sys, data, rc, w20, w11, w02):
    """Right-hand side of ``-exp(-i w r) w21(0) + w21(-r) = R1``."""
    om, r = data.omega, sys.r
    em, ep = np.exp(-1j * om * r), np.exp(1j * om * r)
    phi, phib = data.phi1_0, data.phi1_0.conj()
    I20, I11, I02 = _weighted_integrals(data, w20, w11, w02)
    return (-rc.g21 * r * em * phi
            + 1j / (2 * om) * np.conj(rc.g12) * (ep - em) * phib
            - 2 * rc.g11 * em * I20
            - (rc.g20 + 2 * np.conj(rc.g11)) * em * I11
            - np.conj(rc.g02) * em * I02)


def assemble_R2(sys, data, rc, w20, w11, w02):
    """Right-hand side of ``-(i w I - A) w21(0) + B w21(-r) = R2``."""
    return (rc.g21 * data.phi1_0 + np.conj(rc.g12) * data.phi1_0.conj() - rc.f21
            + 2 * rc.g11 * w20.at0
            + (rc.g20 + 2 * np.conj(rc.g11)) * w11.at0
            + np.conj(rc.g02) * w02.at0)


def fredholm_relations(sys, data, rc, w20, w11, w02):
    """The five pieces of ``Psi1(0) (B R1 - R2)``, each zero analytically.

    ``R1a``/``R1b`` reduce to ``<Psi1, phi1> = 1`` and ``<Psi1, phi2> = 0``;
    ``R2``-``R4`` to ``<Psi1, w_jk> = 0`` for the three second-order
    coefficients.  ``R4`` follows the same pattern as ``R2`` and ``R3``.
    """
    om, r, B = data.omega, sys.r, sys.B
    em, ep = np.exp(-1j * om * r), np.exp(1j * om * r)
    P = data.Psi1_0
    phi, phib = data.phi1_0, data.phi1_0.conj()
    g21, g12b = rc.g21, np.conj(rc.g12)
    I20, I11, I02 = _weighted_integrals(data, w20, w11, w02)
    c20, c11, c02 = 2 * rc.g11, rc.g20 + 2 * np.conj(rc.g11), np.conj(rc.g02)
    return {
        "R1a": complex(P @ (-g21 * r * em * (B @ phi) - g21 * phi + rc.f21)),
        "R1b": complex(P @ (1j / (2 * om) * g12b * (ep - em) * (B @ phib) - g12b * phib)),
        "R2": complex(P @ (-c20 * em * (B @ I20) - c20 * w20.at0)),
        "R3": complex(P @ (-c11 * em * (B @ I11) - c11 * w11.at0)),
        "R4": complex(P @ (-c02 * em * (B @ I02) - c02 * w02.at0)),
    }


def solvability_defect(data, sys, R1, R2):
    """``|Psi1(0) (B R1 - R2)|``; vanishes when the singular system is consistent."""
    return float(abs(data.Psi1_0 @ (sys.B @ R1 - R2)))


def rho_function(data):
    """``rho(s) = -2 s exp(i w s) phi1(0)`` on ``[-r, 0]``."""
    c = np.zeros((2, data.n), dtype=complex)
    c[1] = -2 * data.phi1_0
    return ExpPolyFunction(((1j * data.omega, c),), (-data.r, 0.0), data.n)


def eta_function(data):
    """``eta(z) = 2 z exp(-i w z) Psi1(0)`` on ``[0, r]`` (row)."""
    c = np.zeros((2, data.n), dtype=complex)
    c[1] = 2 * data.Psi1_0
    return ExpPolyFunction(((-1j * data.omega, c),), (0.0, data.r), data.n, "row")


def regularized_rhs(data, rc, w20, w11, w02):
    """Right-hand side of the replacement row; returns ``(Rtilde, rho, eta)``."""
    rho, eta = rho_function(data), eta_function(data)
    Rt = (rc.g21 * data.pair(data.Psi1, rho)
          + np.conj(rc.g12) * data.pair(eta, data.phi2)
          + 2 * rc.g11 * data.pair(eta, w20.w)
          + (rc.g20 + 2 * np.conj(rc.g11)) * data.pair(eta, w11.w)
          + np.conj(rc.g02) * data.pair(eta, w02.w))
    return complex(Rt), rho, eta


@dataclass(frozen=True, eq=False)
class ThirdOrderSolution:
    R1: np.ndarray
    R2: np.ndarray
    M: np.ndarray
    Mtilde: np.ndarray
    Rtilde: complex
    rho: ExpPolyFunction
    eta: ExpPolyFunction
    basis: np.ndarray
    coords: np.ndarray
    system_matrix: np.ndarray
    system_rhs: np.ndarray
    cond: float
    w21: ManifoldCoefficient
    scale: float
    psi_norm: float
    solvability_defect: float
    reduced_residual: float
    annihilation: float
    endpoint_mismatch: float
    used_lstsq: bool = False

    @property
    def relative_defect(self):
        # Psi1(0) enters the defect linearly; its norm joins the scale
        return _rel(self.solvability_defect, self.psi_norm * self.scale)

    @property
    def relative_residual(self):
        return _rel(self.reduced_residual, self.scale)


def _rel(value, scale):
    return value / scale if scale > 0 else value


def solve_w21(sys, data, rc, w20, w11, w02, R1, R2, tol_cond=1e-12, allow_lstsq=False):
    """Select ``w21`` among the solutions of ``M w21(0) = B R1 - R2``.

    In a unitary basis ``u_1, ..., u_n`` with ``u_1 = conj(Psi1(0)) / |Psi1(0)|``
    the first row of ``U^H M U`` vanishes identically.  It is replaced by

        Psi1(0) Mtilde U x = Rtilde,   Mtilde = 2 (r B exp(-i w r) + I),

    and ``w21(0) = U x``.  ``w21(-r)`` follows from the integrated ODE and the
    full function from the resonant linear solve at rate ``i w``.

    Raises
    ------
    RegularizedSystemSingular
        Unless ``allow_lstsq`` is set, in which case the minimum-norm
        least-squares solution is returned and flagged.
    """
    om, r, n = data.omega, sys.r, sys.n
    em = np.exp(-1j * om * r)
    M = 1j * om * np.eye(n) - sys.A - sys.B * em
    Mt = 2 * (sys.B * em * r + np.eye(n))
    b = sys.B @ R1 - R2
    Rt, rho, eta = regularized_rhs(data, rc, w20, w11, w02)

    P = data.Psi1_0
    U = numerics.orthonormal_complete(P.conj() / np.linalg.norm(P))
    S = np.empty((n, n), dtype=complex)
    rhs = np.empty(n, dtype=complex)
    S[0] = P @ Mt @ U
    rhs[0] = Rt
    S[1:] = U[:, 1:].conj().T @ M @ U
    rhs[1:] = U[:, 1:].conj().T @ b

    used_lstsq = False
    try:
        x, cond = numerics.solve(S, rhs, tol=tol_cond)
    except SingularMatrix as exc:
        if not allow_lstsq:
            raise RegularizedSystemSingular(
                f"regularized system is singular (cond={exc.cond:.3e})", exc.cond) from exc
        x = np.linalg.lstsq(S, rhs, rcond=None)[0]
        cond, used_lstsq = exc.cond, True
    w0 = U @ x
    wmr = em * w0 + R1
    w = solve_linear_ode(1j * om, third_order_forcing(data, rc, w20, w11, w02), w0)
    coeff = ManifoldCoefficient((2, 1), w, w0, wmr, cond)

    scale = float(np.linalg.norm(sys.B, 2) * np.linalg.norm(R1) + np.linalg.norm(R2))
    return ThirdOrderSolution(
        R1=R1, R2=R2, M=M, Mtilde=Mt, Rtilde=Rt, rho=rho, eta=eta, basis=U,
        coords=x, system_matrix=S, system_rhs=rhs, cond=float(cond), w21=coeff,
        scale=scale, psi_norm=float(np.linalg.norm(P)),
        solvability_defect=solvability_defect(data, sys, R1, R2),
        reduced_residual=float(np.linalg.norm(M @ w0 - b)),
        annihilation=float(np.max(np.abs(U[:, 0].conj() @ M @ U))),
        endpoint_mismatch=float(np.linalg.norm(w.evaluate(-r) - wmr)),
        used_lstsq=used_lstsq,
    )
