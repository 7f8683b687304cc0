"""Structured (JSON) and plain-text reports of an :class:`~ddecm.pipeline.Analysis`."""

import json
import math
from dataclasses import asdict

import numpy as np

from .expfun import ExpPolyFunction
from .problem import problem_to_dict

__all__ = ["encode", "decode_complex", "expoly_to_json", "expoly_from_json",
           "build_report", "error_report", "dumps", "text_summary"]


def encode(x):
    """Convert numbers, arrays and containers into JSON-ready values.

    Complex numbers become ``{"re": ..., "im": ...}``; non-finite floats
    become the strings ``"inf"``, ``"-inf"`` or ``"nan"``.
    """
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    if isinstance(x, np.ndarray):
        return encode(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": _float(x.real), "im": _float(x.imag)}
    if isinstance(x, (float, np.floating)):
        return _float(x)
    if x is None or isinstance(x, str):
        return x
    if isinstance(x, ExpPolyFunction):
        return expoly_to_json(x)
    raise TypeError(f"cannot encode {type(x).__name__}")


def _float(v):
    v = float(v)
    if math.isfinite(v):
        return v
    return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")


def decode_complex(obj):
    """Inverse of :func:`encode` for (nested lists of) complex numbers."""
    if isinstance(obj, dict):
        return complex(float(obj["re"]), float(obj["im"]))
    if isinstance(obj, list):
        return np.array([decode_complex(v) for v in obj])
    return obj


def expoly_to_json(f):
    return {
        "domain": list(f.domain),
        "orientation": f.orientation,
        "n": f.n,
        "terms": [{"exponent": encode(complex(mu)), "coefficients": encode(np.asarray(c))}
                  for mu, c in f.terms],
    }


def expoly_from_json(doc):
    terms = tuple((decode_complex(t["exponent"]), decode_complex(t["coefficients"]))
                  for t in doc["terms"])
    return ExpPolyFunction(terms, tuple(doc["domain"]), doc["n"], doc["orientation"])


def _coefficient(c):
    return {"at0": c.at0, "at_minus_r": c.at_minus_r, "function": c.w}


def _oracle_section(an):
    st, path = an.study, an.path
    rows = []
    for rec, d, row in zip(sorted(path.records, key=lambda x: -x.eps), st.distances, st.table()):
        E = rec.E_terms
        rows.append({
            "eps": rec.eps,
            "lambda": rec.lam,
            "Psi1_0": rec.Psi1_0,
            "e11": rec.e11,
            "e12": rec.gram[0, 1],
            "w20_0": rec.w2[0].at0,
            "w11_0": rec.w2[1].at0,
            "w02_0": rec.w2[2].at0,
            "M": rec.M,
            "R1": rec.R1,
            "R2": rec.R2,
            "w21_0": rec.w21_0,
            "distance": d,
            "h1": rec.h1,
            "h2": rec.h2,
            "h1_distance": row["h1_distance"],
            "h2_distance": row["h2_distance"],
            "E_terms": E,
            "decomposition_error": abs(sum(E.values()) - rec.h2 * rec.eps),
            "cond": rec.cond,
            "char_residual": rec.char_residual,
        })
    return {
        "eps": list(st.eps),
        "table": rows,
        "rate": st.rate,
        "h1_rate": st.h1_rate,
        "h2_rate": st.h2_rate,
        "extrapolated": st.extrapolated,
        "extrapolated_distance": st.extrapolated_distance,
        "two_point": st.two_point,
        "two_point_distance": st.two_point_distance,
        "rate_band": list(st.rate_band),
        "tol_oracle": st.tol_oracle,
        "coefficient_drift": an.drift,
        "verdict": "PASS" if st.passed else "FAIL",
        "failures": st.failures,
    }


def build_report(an, include_basis=False):
    """JSON-ready dictionary describing every stage of an analysis."""
    data, rc, third, hyp = an.data, an.rc, an.third, an.hypothesis
    hop = an.hopf
    gram = data.gram()
    w21 = third.w21
    report = {
        "status": "ok",
        "input": problem_to_dict(an.sys, an.omega_guess),
        "tolerances": asdict(an.tolerances),
        "hopf": {
            "omega": hop.omega,
            "omega_guess": an.omega_guess,
            "root_residual": hop.root_residual,
            "relative_residual": hop.relative_residual,
            "simplicity_margin": hop.simplicity_margin,
            "newton_iterations": hop.newton_iterations,
            "hypothesis_H": {
                "passed": hyp.passed,
                "rightmost_other_root": hyp.rightmost_other_root,
                "spectral_gap": hyp.spectral_gap,
                "rightmost_roots": hyp.rightmost_roots,
                "geometric_margin": hyp.geometric_margin,
                "algebraic_margin": hyp.algebraic_margin,
                "n_nodes": hyp.n_nodes,
                "delta_spectrum": hyp.delta_spectrum,
                "certificate": hyp.certificate,
            },
        },
        "spectral": {
            "lambda": data.lam,
            "phi1_0": data.phi1_0,
            "psi1_0": data.psi1_0,
            "e11": data.e11,
            "Psi1_0": data.Psi1_0,
            "gram": gram,
        },
        "coefficients": {k: v for k, v in rc.as_dict().items() if not k.startswith("W")},
        "manifold": {
            "w20": _coefficient(an.w20),
            "w11": _coefficient(an.w11),
            "w02": _coefficient(an.w02),
            "w21": _coefficient(w21),
        },
        "third_order": {
            "R1": third.R1,
            "R2": third.R2,
            "M": third.M,
            "Mtilde": third.Mtilde,
            "Rtilde": third.Rtilde,
            "coords": third.coords,
            "system_matrix": third.system_matrix,
            "system_rhs": third.system_rhs,
            "cond": third.cond,
        },
        "diagnostics": {
            "solvability_defect": third.solvability_defect,
            "relative_defect": third.relative_defect,
            "reduced_residual": third.reduced_residual,
            "relative_residual": third.relative_residual,
            "annihilation": third.annihilation,
            "endpoint_mismatch": third.endpoint_mismatch,
            "relations": an.relations,
            "normalization_error": abs(gram[0, 0] - 1),
            "cross_pairing": max(abs(gram[0, 1]), abs(gram[1, 0])),
            "w21_projection": data.pair(data.Psi1, w21.w),
            "used_lstsq": third.used_lstsq,
        },
        "oracle": _oracle_section(an) if an.study is not None else None,
    }
    if include_basis:
        report["third_order"]["basis"] = third.basis
    return encode(report)


def error_report(exit_code, exc):
    return {"status": "error", "exit_code": exit_code,
            "error": {"type": type(exc).__name__, "message": str(exc)}}


def dumps(report):
    """Deterministic JSON text (shortest round-trip float representation)."""
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def _c(z, digits=10):
    z = complex(z)
    return f"{z.real:.{digits}g}{z.imag:+.{digits}g}i"


def _v(v):
    return "[" + ", ".join(_c(z) for z in np.atleast_1d(v)) + "]"


def text_summary(an):
    """Human-readable summary of an analysis."""
    d, rc, t = an.data, an.rc, an.third
    lines = [
        f"Hopf point: omega = {an.hopf.omega:.15g} (relative residual "
        f"{an.hopf.relative_residual:.2e}, {an.hopf.newton_iterations} Newton steps)",
        f"rightmost other root: {_c(an.hypothesis.rightmost_other_root, 6)} "
        f"(gap {an.hypothesis.spectral_gap:.4g}, {an.hypothesis.n_nodes} scan nodes)",
        f"phi1(0) = {_v(d.phi1_0)}",
        f"Psi1(0) = {_v(d.Psi1_0)}   e11 = {_c(d.e11)}",
        f"g20 = {_c(rc.g20)}  g11 = {_c(rc.g11)}  g02 = {_c(rc.g02)}",
        f"g21 = {_c(rc.g21)}",
        f"w20(0) = {_v(an.w20.at0)}",
        f"w11(0) = {_v(an.w11.at0)}",
        f"w21(0) = {_v(t.w21.at0)}",
        f"w21(-r) = {_v(t.w21.at_minus_r)}",
        f"solvability defect {t.relative_defect:.2e} (relative), reduced residual "
        f"{t.relative_residual:.2e}, cond {t.cond:.3g}",
    ]
    if an.study is not None:
        st = an.study
        lines.append(f"oracle: rate {st.rate:.3f}, extrapolated distance "
                     f"{st.extrapolated_distance:.2e} -> {'PASS' if st.passed else 'FAIL'}")
        for e, dist in zip(st.eps, st.distances):
            lines.append(f"  eps = {e:<10.4g} |w_eps21(0) - w21(0)| = {dist:.4e}")
    return "\n".join(lines) + "\n"
