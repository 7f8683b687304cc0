"""End-to-end computation: Hopf root, spectral data, manifold coefficients, oracle."""

from dataclasses import dataclass, fields, replace

from . import numerics
from .chareq import find_hopf, pseudospectral_roots, verify_hypothesis_H
from .errors import NotOnAxis, OracleMismatch, SolvabilityDefect
from .manifold import (assemble_R1, assemble_R2, expand, fredholm_relations,
                       solve_w21)
from .perturbation import (DEFAULT_EPS, build_path, coefficient_drift,
                           converge_study)
from .spectral import build_spectral_data

__all__ = ["Tolerances", "Analysis", "analyze", "guess_omega"]


@dataclass(frozen=True)
class Tolerances:
    tol_imaginary: float = 1e-8
    tol_root: float = 1e-10
    tol_rank: float = numerics.TOL_RANK
    tol_fredholm: float = 1e-8
    tol_cond: float = 1e-12
    tol_oracle: float = 1e-6
    rate_low: float = 0.8
    rate_high: float = 1.5
    scan_nodes: int = 64
    delta_spectrum: float = 1e-6

    @classmethod
    def from_mapping(cls, mapping):
        """Override defaults from a dict; unknown keys raise ``KeyError``."""
        names = {f.name: f.type for f in fields(cls)}
        out = {}
        for key, value in (mapping or {}).items():
            if key not in names:
                raise KeyError(f"unknown tolerance {key!r}")
            out[key] = int(value) if key == "scan_nodes" else float(value)
        return cls(**out)

    def updated(self, **changes):
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


@dataclass(eq=False)
class Analysis:
    sys: object
    tolerances: Tolerances
    omega_guess: float
    hopf: object
    hypothesis: object
    data: object
    rc: object
    w20: object
    w11: object
    w02: object
    third: object
    relations: dict
    path: object = None
    study: object = None
    drift: list = None

    @property
    def w21(self):
        return self.third.w21


def guess_omega(sys, scan_nodes=64):
    """Imaginary part of the scanned root with positive imaginary part closest to the axis."""
    roots = [z for z in pseudospectral_roots(sys, scan_nodes) if z.imag > 1e-8]
    if not roots:
        raise NotOnAxis("no complex characteristic root found by the spectrum scan", None)
    best = min(roots, key=lambda z: (abs(z.real), z.imag))
    return float(best.imag)


def analyze(sys, omega_guess=None, tolerances=None, oracle=False, eps=DEFAULT_EPS,
            executor=None):
    """Run the full computation on ``sys``.

    Raises the first failure encountered: Hopf location and spectrum errors,
    :class:`SolvabilityDefect` when the relative Fredholm defect exceeds
    ``tol_fredholm``, :class:`RegularizedSystemSingular`, and, with
    ``oracle``, :class:`OracleMismatch` (whose ``analysis`` attribute holds
    the completed computation).
    """
    tol = tolerances or Tolerances()
    if omega_guess is None:
        omega_guess = guess_omega(sys, tol.scan_nodes)
    hopf = find_hopf(sys, omega_guess, tol.tol_imaginary, tol.tol_root, tol.tol_rank)
    report = verify_hypothesis_H(sys, hopf, tol.scan_nodes, tol.delta_spectrum,
                                 tol_rank=tol.tol_rank)
    hopf = report.hopf
    data = build_spectral_data(sys, hopf, tol.tol_rank)
    rc, (w20, w11, w02) = expand(sys, data)
    R1 = assemble_R1(sys, data, rc, w20, w11, w02)
    R2 = assemble_R2(sys, data, rc, w20, w11, w02)
    relations = fredholm_relations(sys, data, rc, w20, w11, w02)
    third = solve_w21(sys, data, rc, w20, w11, w02, R1, R2, tol_cond=tol.tol_cond)
    if third.relative_defect > tol.tol_fredholm:
        raise SolvabilityDefect(
            f"relative solvability defect {third.relative_defect:.3e} exceeds "
            f"{tol.tol_fredholm:.1e}", third.solvability_defect)
    out = Analysis(sys=sys, tolerances=tol, omega_guess=float(omega_guess), hopf=hopf,
                   hypothesis=report, data=data, rc=rc, w20=w20, w11=w11, w02=w02,
                   third=third, relations=relations)
    if oracle:
        path = build_path(sys, data, eps, spectral_gap=report.spectral_gap, executor=executor)
        out.path = path
        out.drift = coefficient_drift(path, R1, R2)
        out.study = converge_study(path, third.w21.at0, third,
                                   rate_band=(tol.rate_low, tol.rate_high),
                                   tol_oracle=tol.tol_oracle)
        if not out.study.passed:
            exc = OracleMismatch("; ".join(out.study.failures), out.study)
            exc.analysis = out
            raise exc
    return out
