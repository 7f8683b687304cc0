"""Eigenfunctions, adjoint eigenfunctions and the spectral projector.

For a simple root ``lam`` of the characteristic equation the eigenfunction
is ``phi1(s) = phi1(0) exp(lam s)`` on ``[-r, 0]`` and the adjoint
eigenfunction is ``psi1(z) = psi1(0) exp(-lam z)`` on ``[0, r]``.  The
normalized ``Psi1 = psi1 / e11`` satisfies ``<Psi_i, phi_j> = delta_ij``
under the delay bilinear form.
"""

from dataclasses import dataclass

import numpy as np

from . import numerics
from .chareq import char_matrix, term_scale
from .errors import DimensionMismatch, NormalizationDegenerate
from .expfun import ExpPolyFunction, bilinear_pair

__all__ = ["SpectralData", "build_spectral_data", "spectral_data_at", "project"]


@dataclass(frozen=True, eq=False)
class SpectralData:
    lam: complex
    A: np.ndarray
    B: np.ndarray
    r: float
    phi1_0: np.ndarray
    psi1_0: np.ndarray
    e11: complex
    Psi1_0: np.ndarray
    phi1: ExpPolyFunction
    phi2: ExpPolyFunction
    psi1: ExpPolyFunction
    psi2: ExpPolyFunction
    Psi1: ExpPolyFunction
    Psi2: ExpPolyFunction

    @property
    def omega(self):
        return self.lam.imag

    @property
    def n(self):
        return self.phi1_0.size

    @property
    def e22(self):
        return np.conj(self.e11)

    def pair(self, psi, phi):
        """Bilinear form with this data's ``B`` and ``r``."""
        return bilinear_pair(psi, phi, self.B, self.r)

    def gram(self):
        """Matrix ``e_ij = <psi_i, phi_j>`` through the generic integral path."""
        return np.array([[self.pair(p, f) for f in (self.phi1, self.phi2)]
                         for p in (self.psi1, self.psi2)])


def spectral_data_at(sys, lam, tol_rank=numerics.TOL_RANK, tol_norm=1e-12):
    """Spectral data attached to a simple root ``lam`` (not necessarily imaginary).

    ``e11`` is taken from its closed form
    ``psi1(0) phi1(0) + r exp(-lam r) psi1(0) B phi1(0)``.
    """
    lam = complex(lam)
    M = char_matrix(sys, lam)
    scale = term_scale(sys, lam)
    phi0 = numerics.right_null_vector(M, tol_rank, scale)
    psi0 = numerics.left_null_vector(M, tol_rank, scale)
    e11 = complex(psi0 @ phi0 + sys.r * np.exp(-lam * sys.r) * (psi0 @ sys.B @ phi0))
    if abs(e11) <= tol_norm:
        raise NormalizationDegenerate(f"|e11| = {abs(e11):.3e}: root is not algebraically simple")
    Psi0 = psi0 / e11
    r = sys.r
    phi1 = ExpPolyFunction.exponential(lam, phi0, (-r, 0.0))
    psi1 = ExpPolyFunction.exponential(-lam, psi0, (0.0, r), "row")
    Psi1 = ExpPolyFunction.exponential(-lam, Psi0, (0.0, r), "row")
    return SpectralData(
        lam=lam, A=sys.A, B=sys.B, r=r, phi1_0=phi0, psi1_0=psi0, e11=e11,
        Psi1_0=Psi0, phi1=phi1, phi2=phi1.conj(), psi1=psi1, psi2=psi1.conj(),
        Psi1=Psi1, Psi2=Psi1.conj(),
    )


def build_spectral_data(sys, hopf, tol_rank=numerics.TOL_RANK):
    """Spectral data at the Hopf pair ``+-i omega`` of ``sys``."""
    return spectral_data_at(sys, 1j * hopf.omega, tol_rank)


def project(data, phi):
    """Coordinates ``(<Psi1, phi>, <Psi2, phi>)`` of the spectral projection."""
    if phi.n != data.n:
        raise DimensionMismatch(f"function length {phi.n} != {data.n}")
    return data.pair(data.Psi1, phi), data.pair(data.Psi2, phi)
