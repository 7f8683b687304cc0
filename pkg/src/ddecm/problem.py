"""Problem files: JSON description of a delay system at a Hopf point."""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .chareq import DDESystem, asymmetry
from .errors import DDECMError, ProblemFileError

__all__ = ["Problem", "load_problem", "parse_problem", "problem_to_dict", "SYMMETRY_TOL"]

SYMMETRY_TOL = 1e-12

_KNOWN_KEYS = {"n", "r", "A", "B", "D2", "D3", "omega_guess", "tolerances", "oracle"}


@dataclass
class Problem:
    system: DDESystem
    omega_guess: float = None
    tolerances: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)


def _array(doc, key, shape):
    try:
        X = np.asarray(doc[key], dtype=float)
    except KeyError:
        raise ProblemFileError(f"missing field {key!r}") from None
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"field {key!r} is not a numeric array: {exc}") from None
    if X.shape != shape:
        raise ProblemFileError(f"field {key!r} has shape {X.shape}, expected {shape}")
    if not np.all(np.isfinite(X)):
        raise ProblemFileError(f"field {key!r} has non-finite entries")
    return X


def parse_problem(doc):
    """Validate a decoded problem document and build the system.

    Tensors are symmetrized; any nonzero asymmetry is reported in
    ``Problem.warnings`` and flagged as significant above ``SYMMETRY_TOL``.
    """
    if not isinstance(doc, dict):
        raise ProblemFileError("problem document must be a JSON object")
    unknown = sorted(set(doc) - _KNOWN_KEYS)
    if unknown:
        raise ProblemFileError(f"unknown fields {unknown}")
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ProblemFileError(f"field 'n' must be a positive integer, got {n!r}")
    try:
        r = float(doc["r"])
    except KeyError:
        raise ProblemFileError("missing field 'r'") from None
    except (TypeError, ValueError):
        raise ProblemFileError(f"field 'r' is not a number: {doc['r']!r}") from None
    if not (np.isfinite(r) and r > 0):
        raise ProblemFileError(f"delay r must be positive and finite, got {r}")
    m = 2 * n
    A = _array(doc, "A", (n, n))
    B = _array(doc, "B", (n, n))
    D2 = _array(doc, "D2", (n, m, m))
    D3 = _array(doc, "D3", (n, m, m, m)) if doc.get("D3") is not None else np.zeros((n, m, m, m))

    warnings = []
    for name, T in (("D2", D2), ("D3", D3)):
        a = asymmetry(T)
        if a > 0:
            level = "exceeds" if a > SYMMETRY_TOL else "within"
            warnings.append(f"{name} asymmetry {a:.3e} {level} {SYMMETRY_TOL:.0e}; symmetrized")

    omega_guess = doc.get("omega_guess")
    if omega_guess is not None:
        try:
            omega_guess = float(omega_guess)
        except (TypeError, ValueError):
            raise ProblemFileError(f"omega_guess is not a number: {omega_guess!r}") from None
        if not omega_guess > 0:
            raise ProblemFileError("omega_guess must be positive")
    tolerances = doc.get("tolerances") or {}
    oracle = doc.get("oracle") or {}
    if not isinstance(tolerances, dict) or not isinstance(oracle, dict):
        raise ProblemFileError("'tolerances' and 'oracle' must be JSON objects")
    if "eps" in oracle:
        eps = oracle["eps"]
        if (not isinstance(eps, list) or not eps
                or not all(isinstance(e, (int, float)) and e > 0 for e in eps)):
            raise ProblemFileError("oracle.eps must be a non-empty list of positive numbers")
    try:
        system = DDESystem(A, B, r, D2, D3)
    except (DDECMError, ValueError) as exc:
        raise ProblemFileError(str(exc)) from None
    return Problem(system, omega_guess, dict(tolerances), dict(oracle), warnings)


def load_problem(path):
    """Read and validate a problem file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"invalid JSON in {path}: {exc}") from None
    return parse_problem(doc)


def problem_to_dict(sys, omega_guess=None):
    """Inverse of :func:`parse_problem` for a system (tolerances omitted)."""
    doc = {"n": sys.n, "r": sys.r, "A": sys.A.tolist(), "B": sys.B.tolist(),
           "D2": sys.D2.tolist(), "D3": sys.D3.tolist()}
    if omega_guess is not None:
        doc["omega_guess"] = float(omega_guess)
    return doc
