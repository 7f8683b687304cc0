"""Center-manifold coefficients for delay differential systems at a Hopf point.

Typical use::

    from ddecm import analyze, scalar_demo
    result = analyze(scalar_demo(cubic=0.7), omega_guess=1.5, oracle=True)
    result.w21.at0
"""

from .chareq import (DDESystem, HopfPair, HypothesisReport, char_matrix, find_hopf,
                     pseudospectral_roots, verify_hypothesis_H)
from .errors import *  # noqa: F401,F403
from .errors import __all__ as _error_names
from .expfun import ExpPolyFunction, monomial_exp_integral, solve_linear_ode
from .manifold import ThirdOrderSolution, expand, solve_w21
from .perturbation import build_path, converge_study
from .pipeline import Analysis, Tolerances, analyze
from .problem import load_problem, parse_problem
from .report import build_report, text_summary
from .spectral import SpectralData, build_spectral_data, project
from .systems import planar_demo, random_hopf_system, scalar_demo
from .taylor import ReducedCoefficients

__version__ = "0.1.0"

__all__ = [
    "DDESystem", "HopfPair", "HypothesisReport", "char_matrix", "find_hopf",
    "pseudospectral_roots", "verify_hypothesis_H", "ExpPolyFunction",
    "monomial_exp_integral", "solve_linear_ode", "ThirdOrderSolution", "expand",
    "solve_w21", "build_path", "converge_study", "Analysis", "Tolerances", "analyze",
    "load_problem", "parse_problem", "build_report", "text_summary", "SpectralData",
    "build_spectral_data", "project", "planar_demo", "random_hopf_system",
    "scalar_demo", "ReducedCoefficients", *_error_names,
]
