"""Taylor data of the nonlinearity along the center manifold.

With the manifold coordinate ``z`` the phase-space point is
``z phi1 + conj(z) phi2 + w(z, conj z)`` and the nonlinearity is evaluated at
the pair ``(x(t), x(t - r))``.  Writing ``Q = (phi1(0), phi1(-r))`` and
``W_jk = (w_jk(0), w_jk(-r))``, the expansion

    fhat = sum f_jk z**j conj(z)**k / (j! k!)

has, with ``fhat(X) = D2(X, X)/2 + D3(X, X, X)/6``,

    f20 = D2(Q, Q)        f11 = D2(Q, Qb)        f02 = D2(Qb, Qb)
    f21 = D3(Q, Q, Qb) + 2 D2(Q, W11) + D2(Qb, W20)
    f12 = D3(Q, Qb, Qb) + 2 D2(Qb, W11) + D2(Q, W02)

and the reduced flow ``z' = lam z + g`` has ``g_jk = Psi1(0) f_jk``.
"""

from dataclasses import dataclass, fields

import numpy as np

__all__ = [
    "ReducedCoefficients", "head_pair", "endpoint_pair", "f_second_order",
    "f_third_order", "g_from_f",
]


@dataclass
class ReducedCoefficients:
    Q: np.ndarray
    f20: np.ndarray = None
    f11: np.ndarray = None
    f02: np.ndarray = None
    f21: np.ndarray = None
    f12: np.ndarray = None
    g20: complex = None
    g11: complex = None
    g02: complex = None
    g21: complex = None
    g12: complex = None
    W20: np.ndarray = None
    W11: np.ndarray = None
    W02: np.ndarray = None

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def head_pair(data):
    """``(phi1(0), phi1(-r))`` stacked into one vector of length ``2n``."""
    return np.concatenate([data.phi1_0, data.phi1_0 * np.exp(-data.lam * data.r)])


def endpoint_pair(w, r):
    return np.concatenate([w.evaluate(0.0), w.evaluate(-r)])


def f_second_order(sys, Q):
    Qb = Q.conj()
    return sys.d2(Q, Q), sys.d2(Q, Qb), sys.d2(Qb, Qb)


def f_third_order(sys, Q, W20, W11, W02):
    Qb = Q.conj()
    f21 = sys.d3(Q, Q, Qb) + 2 * sys.d2(Q, W11) + sys.d2(Qb, W20)
    f12 = sys.d3(Q, Qb, Qb) + 2 * sys.d2(Qb, W11) + sys.d2(Q, W02)
    return f21, f12


def g_from_f(data, f):
    return complex(data.Psi1_0 @ f)
