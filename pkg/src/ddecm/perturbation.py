"""Perturbation oracle for the singular third-order coefficient.

The family ``A_eps = A + eps I``, ``B_eps = exp(eps r) B`` moves every
characteristic root right by exactly ``eps``: the critical pair becomes
``lam_eps = eps +- i omega`` with real part ``mu_eps = eps > 0`` and the
third-order system for ``w_eps21(0)`` has the nonsingular matrix

    M_eps = (2 lam_eps + conj(lam_eps)) I - A_eps - B_eps exp(-(2 lam_eps + conj(lam_eps)) r).

Solving it for a decreasing schedule of ``eps`` and extrapolating to
``eps = 0`` gives an answer that shares no code with the regularized row
used by :func:`ddecm.manifold.solve_w21`.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .chareq import char_matrix, term_scale
from .errors import EpsTooLarge, OracleMismatch
from .manifold import expand
from .spectral import spectral_data_at

__all__ = [
    "DEFAULT_EPS", "EpsRecord", "PerturbationPath", "build_path",
    "solve_perturbed_w21", "h_limits", "ConvergenceStudy", "converge_study",
    "fit_rate", "richardson", "coefficient_drift",
]

DEFAULT_EPS = (1e-2, 5e-3, 2.5e-3, 1.25e-3)


@dataclass(frozen=True, eq=False)
class EpsRecord:
    eps: float
    lam: complex
    sys: object
    data: object
    rc: object
    w2: tuple
    kappa: complex
    M: np.ndarray
    R1: np.ndarray
    R2: np.ndarray
    w21_0: np.ndarray
    cond: float
    char_residual: float
    basis: np.ndarray
    E_terms: dict

    @property
    def Psi1_0(self):
        return self.data.Psi1_0

    @property
    def e11(self):
        return self.data.e11

    @property
    def gram(self):
        return self.data.gram()

    @property
    def h1(self):
        return self.Psi1_0 @ self.M / self.eps

    @property
    def h2(self):
        return complex(self.Psi1_0 @ (self.sys.B @ self.R1 - self.R2)) / self.eps


@dataclass
class PerturbationPath:
    base: object
    base_data: object
    eps_schedule: tuple
    records: list = field(default_factory=list)

    def record(self, eps):
        for rec in self.records:
            if rec.eps == eps:
                return rec
        raise KeyError(f"eps={eps} is not in the schedule")


def _perturbed_rhs(sys_e, data_e, rc, w20, w11, w02):
    """Right-hand sides of the perturbed boundary system."""
    lam, r = data_e.lam, sys_e.r
    lamb = np.conj(lam)
    kappa = 2 * lam + lamb
    ek = np.exp(-kappa * r)
    phi, phib = data_e.phi1_0, data_e.phi1_0.conj()
    I20, I11, I02 = (w.w.times_exp(-kappa).integral() for w in (w20, w11, w02))
    R1 = (-rc.g21 / (lam + lamb) * phi * (np.exp(-lam * r) - ek)
          - np.conj(rc.g12) / (2 * lam) * phib * (np.exp(-lamb * r) - ek)
          - 2 * rc.g11 * ek * I20
          - (rc.g20 + 2 * np.conj(rc.g11)) * ek * I11
          - np.conj(rc.g02) * ek * I02)
    R2 = (rc.g21 * phi + np.conj(rc.g12) * phib - rc.f21
          + 2 * rc.g11 * w20.at0
          + (rc.g20 + 2 * np.conj(rc.g11)) * w11.at0
          + np.conj(rc.g02) * w02.at0)
    return kappa, R1, R2, (I20, I11, I02)


def _decomposition(sys_e, data_e, rc, w2, kappa, integrals):
    # five pieces whose sum is Psi_eps1(0) (B_eps R_eps1 - R_eps2)
    lam, r, B = data_e.lam, sys_e.r, sys_e.B
    lamb = np.conj(lam)
    ek = np.exp(-kappa * r)
    P = data_e.Psi1_0
    phi, phib = data_e.phi1_0, data_e.phi1_0.conj()
    g21, g12b = rc.g21, np.conj(rc.g12)
    w20, w11, w02 = w2
    I20, I11, I02 = integrals
    alphas = (-2 * rc.g11, -(rc.g20 + 2 * np.conj(rc.g11)), -np.conj(rc.g02))
    E = {
        "E1a": (-g21 / (lam + lamb) * (P @ B @ phi) * (np.exp(-lam * r) - ek)
                - g21 * (P @ phi) + g21),
        "E1b": (-g12b / (2 * lam) * (P @ B @ phib) * (np.exp(-lamb * r) - ek)
                - g12b * (P @ phib)),
    }
    for name, a, w, I in zip(("E2", "E3", "E4"), alphas, (w20, w11, w02), (I20, I11, I02)):
        E[name] = a * ek * (P @ B @ I) + a * (P @ w.at0)
    return {k: complex(v) for k, v in E.items()}


def solve_perturbed_w21(path, eps):
    """``w_eps21(0)`` for one scheduled ``eps`` (computed by :func:`build_path`)."""
    return path.record(eps).w21_0


def _make_record(sys, omega, eps):
    sys_e = sys.shifted(eps)
    lam = eps + 1j * omega
    char_res = float(numerics.singular_values(char_matrix(sys_e, lam))[-1]
                     / term_scale(sys_e, lam))
    data_e = spectral_data_at(sys_e, lam)
    rc, w2 = expand(sys_e, data_e)
    kappa, R1, R2, integrals = _perturbed_rhs(sys_e, data_e, rc, *w2)
    n = sys.n
    M = -sys_e.B * np.exp(-kappa * sys_e.r) - sys_e.A + kappa * np.eye(n)
    w0, cond = numerics.solve(M, sys_e.B @ R1 - R2)
    P = data_e.Psi1_0
    basis = numerics.orthonormal_complete(P.conj() / np.linalg.norm(P))
    E = _decomposition(sys_e, data_e, rc, w2, kappa, integrals)
    return EpsRecord(eps=eps, lam=lam, sys=sys_e, data=data_e, rc=rc, w2=w2, kappa=kappa,
                     M=M, R1=R1, R2=R2, w21_0=w0, cond=cond, char_residual=char_res,
                     basis=basis, E_terms=E)


def build_path(sys, data, eps_schedule=DEFAULT_EPS, spectral_gap=None, executor=None):
    """Solve the perturbed problem for every ``eps`` in the schedule.

    Parameters
    ----------
    sys : DDESystem
        The unperturbed system at its Hopf point.
    data : SpectralData
        Unperturbed spectral data (only ``omega`` is taken from it; all
        perturbed quantities are rebuilt from scratch).
    eps_schedule : sequence of float
        Strictly positive values, sorted decreasing on output.
    spectral_gap : float, optional
        Distance of the rightmost non-critical root to the imaginary axis.
        Shifts of that size or more would move it across the axis.
    executor : concurrent.futures.Executor, optional
        Per-eps solves are independent and may be mapped concurrently.

    Raises
    ------
    EpsTooLarge
    """
    sched = tuple(sorted((float(e) for e in eps_schedule), reverse=True))
    if not sched or sched[-1] <= 0:
        raise ValueError("eps schedule must contain positive values")
    if spectral_gap is not None and sched[0] >= spectral_gap:
        raise EpsTooLarge(f"eps={sched[0]} would push a root of real part "
                          f"{-spectral_gap:.3e} into the right half-plane")
    omega = data.omega
    mapper = executor.map if executor is not None else map
    records = list(mapper(lambda e: _make_record(sys, omega, e), sched))
    return PerturbationPath(base=sys, base_data=data, eps_schedule=sched, records=records)


def h_limits(path, eps, third=None):
    """``(h1(eps), h2(eps))`` and, when ``third`` is given, their limits.

    ``h1 = Psi_eps1(0) M_eps / eps`` tends to ``Psi1(0) Mtilde`` and
    ``h2 = Psi_eps1(0) (B_eps R_eps1 - R_eps2) / eps`` to ``Rtilde``.
    """
    rec = path.record(eps)
    out = {"h1": rec.h1, "h2": rec.h2}
    if third is not None:
        out["h1_limit"] = path.base_data.Psi1_0 @ third.Mtilde
        out["h2_limit"] = third.Rtilde
    return out


def coefficient_drift(path, R1, R2):
    """Distance of each perturbed boundary-system coefficient from its limit.

    For every scheduled ``eps`` returns the moduli of
    ``R_eps1 - R1``, ``R_eps2 - R2``, ``exp(-kappa r) - exp(-i omega r)``,
    ``(A_eps - kappa I) - (A - i omega I)`` and ``B_eps - B``; all are
    ``O(eps)``.
    """
    sys, omega = path.base, path.base_data.omega
    n, r = sys.n, sys.r
    lam0 = 1j * omega
    out = []
    for rec in path.records:
        k = rec.kappa
        out.append({
            "eps": rec.eps,
            "R1": float(np.linalg.norm(rec.R1 - R1)),
            "R2": float(np.linalg.norm(rec.R2 - R2)),
            "delay_factor": float(abs(np.exp(-k * r) - np.exp(-lam0 * r))),
            "A": float(np.linalg.norm((rec.sys.A - k * np.eye(n)) - (sys.A - lam0 * np.eye(n)), 2)),
            "B": float(np.linalg.norm(rec.sys.B - sys.B, 2)),
        })
    return out


def fit_rate(eps, dist, floor=0.0):
    """Least-squares slope of ``log dist`` against ``log eps``.

    Returns ``nan`` when every distance is at or below ``floor``.
    """
    eps = np.asarray(eps, dtype=float)
    dist = np.asarray(dist, dtype=float)
    if np.all(dist <= floor):
        return float("nan")
    keep = dist > 0
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(eps[keep]), np.log(dist[keep]), 1)[0])


def richardson(eps, values):
    """Extrapolate ``values(eps)`` to ``eps = 0`` with Neville's tableau.

    Each column removes one more power of ``eps`` from the error, so with
    ``k`` samples of a smooth path the result is accurate to
    ``O(eps_1 ... eps_k)``.  ``values`` may hold scalars or equal-length arrays.
    """
    x = np.asarray(eps, dtype=float)
    T = [np.asarray(v, dtype=complex) for v in values]
    if len(T) != x.size or x.size == 0:
        raise ValueError("need one value per eps")
    for k in range(1, x.size):
        T = [(x[i] * T[i + 1] - x[i + k] * T[i]) / (x[i] - x[i + k])
             for i in range(x.size - k)]
    return T[0]


@dataclass
class ConvergenceStudy:
    eps: list
    distances: list
    rate: float
    extrapolated: np.ndarray
    extrapolated_distance: float
    two_point: np.ndarray
    two_point_distance: float
    reference_norm: float
    h1_distances: list
    h2_distances: list
    h1_rate: float
    h2_rate: float
    passed: bool
    exact: bool
    rate_band: tuple
    tol_oracle: float
    failures: list

    def table(self):
        return [{"eps": e, "distance": d, "h1_distance": a, "h2_distance": b}
                for e, d, a, b in zip(self.eps, self.distances, self.h1_distances,
                                      self.h2_distances)]


def _band_ok(rate, band, dists, floor):
    return bool(np.all(np.asarray(dists) <= floor)) or band[0] <= rate <= band[1]


def converge_study(path, reference, third=None, rate_band=(0.8, 1.5), tol_oracle=1e-6,
                   strict=False):
    """Compare ``w_eps21(0)`` with a reference value of ``w21(0)``.

    Fits ``|w_eps21(0) - reference| ~ C eps**p`` over the schedule and
    extrapolates to ``eps = 0`` with the full Richardson tableau (the plain
    two-point linear value from the two smallest ``eps`` is reported as
    ``two_point``).  Passes when ``p`` lies in ``rate_band`` and the
    extrapolated value is within ``tol_oracle`` (relative) of the reference.  When ``third`` is
    given, ``h1`` and ``h2`` are checked against their limits the same way.
    """
    ref = np.asarray(reference, dtype=complex)
    recs = sorted(path.records, key=lambda rec: -rec.eps)
    eps = [rec.eps for rec in recs]
    vals = [rec.w21_0 for rec in recs]
    ref_norm = float(np.linalg.norm(ref))
    size = max(ref_norm, max(float(np.linalg.norm(v)) for v in vals), 1e-300)
    floor = 1e-13 * max(size, 1.0)
    dist = [float(np.linalg.norm(v - ref)) for v in vals]
    rate = fit_rate(eps, dist, floor)

    denom = ref_norm if ref_norm > floor else 1.0
    two_point = richardson(eps[-2:], vals[-2:])
    two_dist = float(np.linalg.norm(two_point - ref)) / denom
    extrap = richardson(eps, vals)
    ext_dist = float(np.linalg.norm(extrap - ref)) / denom

    h1d, h2d = [], []
    if third is not None:
        for rec in recs:
            lim = h_limits(path, rec.eps, third)
            h1d.append(float(np.linalg.norm(lim["h1"] - lim["h1_limit"])))
            h2d.append(float(abs(lim["h2"] - lim["h2_limit"])))
    h_floor1 = 1e-12 * max(1.0, max(h1d, default=0.0))
    h_floor2 = 1e-12 * max(1.0, abs(third.Rtilde) if third is not None else 1.0)
    h1_rate = fit_rate(eps, h1d, h_floor1) if h1d else float("nan")
    h2_rate = fit_rate(eps, h2d, h_floor2) if h2d else float("nan")

    exact = bool(np.all(np.asarray(dist) <= floor))
    failures = []
    if not exact:
        if not rate_band[0] <= rate <= rate_band[1]:
            failures.append(f"w21 convergence rate {rate:.3f} outside {rate_band}")
        if not ext_dist <= tol_oracle:
            failures.append(f"extrapolated relative distance {ext_dist:.3e} > {tol_oracle:.1e}")
    if h1d and not _band_ok(h1_rate, rate_band, h1d, h_floor1):
        failures.append(f"h1 convergence rate {h1_rate:.3f} outside {rate_band}")
    if h2d and not _band_ok(h2_rate, rate_band, h2d, h_floor2):
        failures.append(f"h2 convergence rate {h2_rate:.3f} outside {rate_band}")
    study = ConvergenceStudy(
        eps=eps, distances=dist, rate=rate, extrapolated=extrap,
        extrapolated_distance=ext_dist, two_point=two_point,
        two_point_distance=two_dist, reference_norm=ref_norm,
        h1_distances=h1d, h2_distances=h2d, h1_rate=h1_rate, h2_rate=h2_rate,
        passed=not failures, exact=exact, rate_band=tuple(rate_band),
        tol_oracle=tol_oracle, failures=failures,
    )
    if strict and failures:
        raise OracleMismatch("; ".join(failures), study)
    return study
