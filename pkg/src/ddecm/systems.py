"""Ready-made systems at a Hopf point, including a seeded random generator."""

import numpy as np
from scipy import optimize

from .chareq import (DDESystem, char_matrix, find_hopf, pseudospectral_roots,
                     verify_hypothesis_H)
from .errors import DDECMError

__all__ = ["scalar_demo", "planar_demo", "random_hopf_system", "RandomHopfInstance"]


def scalar_demo(quadratic=1.0, cubic=0.0):
    """``x' = -(pi/2) x(t-1) + quadratic * y**2 + cubic * y**3`` with ``y = x(t-1)``.

    Hopf point at ``omega = pi/2``.
    """
    D2 = np.zeros((1, 2, 2))
    D2[0, 1, 1] = 2.0 * quadratic
    D3 = np.zeros((1, 2, 2, 2))
    D3[0, 1, 1, 1] = 6.0 * cubic
    return DDESystem([[0.0]], [[-np.pi / 2]], 1.0, D2, D3)


def planar_demo(omega=0.8, r=1.0, D2=None, D3=None):
    """Delayed-feedback oscillator ``x'' + x = b1 x(t-r) + b2 x'(t-r)``.

    ``b1, b2`` are chosen so that ``+-i omega`` is a characteristic root.
    """
    b1 = (1 - omega ** 2) * np.cos(omega * r)
    b2 = (1 - omega ** 2) * np.sin(omega * r) / omega
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    B = np.array([[0.0, 0.0], [b1, b2]])
    if D2 is None:
        D2 = np.zeros((2, 4, 4))
        D2[1, 0, 2] = D2[1, 2, 0] = 1.0
    return DDESystem(A, B, r, D2, D3)


class RandomHopfInstance:
    __slots__ = ("system", "omega", "gap", "attempts")

    def __init__(self, system, omega, gap, attempts):
        self.system, self.omega, self.gap, self.attempts = system, omega, gap, attempts

    def __repr__(self):
        return (f"RandomHopfInstance(n={self.system.n}, omega={self.omega:.6g}, "
                f"gap={self.gap:.3g}, attempts={self.attempts})")


def _rightmost(A, B, r, nodes):
    return pseudospectral_roots(DDESystem(A, B, r), nodes)[0]


def _crossing(A, B0, r, nodes, kmax=40.0, steps=80):
    """Smallest ``k`` at which ``A, k B0`` has a root on the imaginary axis."""
    lo, hi = 0.0, None
    for k in np.linspace(0.0, kmax, steps + 1)[1:]:
        if _rightmost(A, k * B0, r, nodes).real >= 0:
            hi = k
            break
        lo = k
    if hi is None:
        return None
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if _rightmost(A, mid * B0, r, nodes).real >= 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-10 * hi:
            break
    z = _rightmost(A, hi * B0, r, nodes)
    return 0.5 * (lo + hi), z


def _refine(A, B0, r, k, omega):
    """Solve ``det(i w I - A - k exp(-i w r) B0) = 0`` for real ``(w, k)``."""
    n = A.shape[0]

    def residual(x):
        w, kk = x
        M = 1j * w * np.eye(n) - A - kk * np.exp(-1j * w * r) * B0
        s = abs(w) + np.linalg.norm(A, 2) + abs(kk) * np.linalg.norm(B0, 2)
        d = np.linalg.det(M / s)
        return [d.real, d.imag]

    sol = optimize.root(residual, [omega, k], method="hybr", tol=1e-15)
    return float(sol.x[0]), float(sol.x[1])


def random_hopf_system(rng, n, nonlinear_scale=1.0, scan_nodes=40, min_omega=0.2,
                       max_attempts=50):
    """Draw a random ``n``-dimensional system with a simple Hopf pair.

    A stable random ``A`` is paired with a random ``B0``; the gain ``k`` of
    ``B = k B0`` is increased until a complex pair reaches the imaginary
    axis, then ``(omega, k)`` is polished by a root solve.  Draws whose
    crossing is real, too slow, or fails the spectral check are discarded.
    """
    rng = np.random.default_rng(rng)
    for attempt in range(1, max_attempts + 1):
        G = rng.normal(size=(n, n)) / np.sqrt(n)
        A = G - (np.linalg.eigvals(G).real.max() + rng.uniform(0.2, 1.0)) * np.eye(n)
        B0 = rng.normal(size=(n, n)) / np.sqrt(n)
        r = float(rng.uniform(0.5, 2.0))
        D2 = nonlinear_scale * rng.normal(size=(n, 2 * n, 2 * n)) / n
        D3 = nonlinear_scale * rng.normal(size=(n, 2 * n, 2 * n, 2 * n)) / n
        found = _crossing(A, B0, r, scan_nodes)
        if found is None:
            continue
        k, z = found
        if abs(z.imag) < min_omega:
            continue
        omega, k = _refine(A, B0, r, k, abs(z.imag))
        if omega < min_omega or not np.isfinite(k):
            continue
        sys = DDESystem(A, k * B0, r, D2, D3)
        try:
            hopf = find_hopf(sys, omega)
            rep = verify_hypothesis_H(sys, hopf)
        except DDECMError:
            continue
        if rep.spectral_gap < 0.05 or hopf.relative_residual > 1e-12:
            continue
        s = np.linalg.svd(char_matrix(sys, 1j * hopf.omega), compute_uv=False)
        if s.size > 1 and s[-2] / s[0] < 1e-6:
            continue
        return RandomHopfInstance(sys, hopf.omega, rep.spectral_gap, attempt)
    raise RuntimeError(f"no Hopf instance found in {max_attempts} draws (n={n})")
