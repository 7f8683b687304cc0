"""Characteristic matrix, Hopf root location and spectrum certification."""

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from . import numerics
from .errors import (DimensionMismatch, HypothesisViolated, NoConvergence,
                     NotOnAxis, NotSimple)

__all__ = [
    "DDESystem", "HopfPair", "HypothesisReport", "char_matrix",
    "char_matrix_derivative", "find_hopf", "verify_hypothesis_H",
    "pseudospectral_roots", "cheb", "symmetrize", "asymmetry", "term_scale",
]


def symmetrize(T):
    """Average a multilinear-form tensor over permutations of its input slots.

    ``T`` has shape ``(n, m, ..., m)``; axis 0 is the output component.
    """
    T = np.asarray(T, dtype=float)
    slots = list(range(1, T.ndim))
    perms = list(itertools.permutations(slots))
    return sum(T.transpose([0, *p]) for p in perms) / len(perms)


def asymmetry(T):
    T = np.asarray(T, dtype=float)
    return float(np.max(np.abs(T - symmetrize(T)), initial=0.0))


@dataclass(frozen=True, eq=False)
class DDESystem:
    """``x'(t) = A x(t) + B x(t-r) + fhat(x(t), x(t-r))``.

    ``D2`` (shape ``(n, 2n, 2n)``) and ``D3`` (shape ``(n, 2n, 2n, 2n)``) are
    the second and third differentials of ``fhat`` at the origin, acting on
    stacked arguments ``(x(t), x(t-r))``.  Both are symmetrized on
    construction, so ``fhat(X) = D2(X, X)/2 + D3(X, X, X)/6 + ...``.
    """

    A: np.ndarray
    B: np.ndarray
    r: float
    D2: np.ndarray = None
    D3: np.ndarray = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        n = A.shape[0]
        if A.shape != (n, n) or B.shape != (n, n):
            raise DimensionMismatch(f"A {A.shape} and B {B.shape} must be n x n")
        r = float(self.r)
        if not (r > 0 and np.isfinite(r)):
            raise ValueError(f"delay must be positive, got {self.r!r}")
        m = 2 * n
        D2 = np.zeros((n, m, m)) if self.D2 is None else np.asarray(self.D2, dtype=float)
        D3 = np.zeros((n, m, m, m)) if self.D3 is None else np.asarray(self.D3, dtype=float)
        if D2.shape != (n, m, m):
            raise DimensionMismatch(f"D2 must have shape {(n, m, m)}, got {D2.shape}")
        if D3.shape != (n, m, m, m):
            raise DimensionMismatch(f"D3 must have shape {(n, m, m, m)}, got {D3.shape}")
        for name, X in (("A", A), ("B", B), ("D2", D2), ("D3", D3)):
            if not np.all(np.isfinite(X)):
                raise ValueError(f"{name} has non-finite entries")
        for name, X in (("A", A), ("B", B), ("D2", symmetrize(D2)), ("D3", symmetrize(D3))):
            X.setflags(write=False)
            object.__setattr__(self, name, X)
        object.__setattr__(self, "r", r)

    @property
    def n(self):
        return self.A.shape[0]

    def d2(self, u, v):
        return np.einsum("ipq,p,q->i", self.D2, u, v)

    def d3(self, u, v, w):
        return np.einsum("ipqs,p,q,s->i", self.D3, u, v, w)

    def nonlinearity(self, X):
        """Cubic truncation ``D2(X,X)/2 + D3(X,X,X)/6`` of ``fhat``."""
        return self.d2(X, X) / 2 + self.d3(X, X, X) / 6

    def shifted(self, eps):
        """Copy with ``A + eps I`` and ``B exp(eps r)``.

        Every characteristic root of the copy is the corresponding root of
        ``self`` moved right by exactly ``eps``.
        """
        return DDESystem(self.A + eps * np.eye(self.n), self.B * np.exp(eps * self.r),
                         self.r, self.D2, self.D3)


def char_matrix(sys, lam):
    """``lam I - A - exp(-lam r) B``."""
    lam = complex(lam)
    return lam * np.eye(sys.n) - sys.A - np.exp(-lam * sys.r) * sys.B


def char_matrix_derivative(sys, lam):
    """d/dlam of :func:`char_matrix`: ``I + r exp(-lam r) B``."""
    lam = complex(lam)
    return np.eye(sys.n) + sys.r * np.exp(-lam * sys.r) * sys.B


def term_scale(sys, lam):
    """Size of the summands of the characteristic matrix at ``lam``."""
    return abs(lam) + np.linalg.norm(sys.A, 2) + abs(np.exp(-lam * sys.r)) * np.linalg.norm(sys.B, 2)


@dataclass(frozen=True)
class HopfPair:
    omega: float
    root_residual: float
    relative_residual: float
    simplicity_margin: float
    newton_iterations: int
    rightmost_other_root: complex = None

    @property
    def lam(self):
        return 1j * self.omega


def find_hopf(sys, omega_guess, tol_imaginary=1e-8, tol_root=1e-10,
              tol_rank=numerics.TOL_RANK, max_iter=100):
    """Locate a purely imaginary characteristic root near ``i omega_guess``.

    Complex Newton on ``det(char_matrix(lam))`` with the step
    ``1 / trace(M^{-1} M')``.  The converged root must lie on the imaginary
    axis within ``tol_imaginary * |lam|``; the system is never nudged onto
    the axis.

    Raises
    ------
    NoConvergence, NotOnAxis, NotSimple
    """
    if not omega_guess > 0:
        raise ValueError("omega_guess must be positive")
    lam = 1j * float(omega_guess)
    it = 0
    for it in range(1, max_iter + 1):
        M = char_matrix(sys, lam)
        try:
            tr = np.trace(np.linalg.solve(M, char_matrix_derivative(sys, lam)))
        except np.linalg.LinAlgError:
            break
        if not np.isfinite(tr) or tr == 0:
            break
        step = 1.0 / tr
        lam = lam - step
        if not np.isfinite(lam) or abs(lam) > 1e8:
            raise NoConvergence(f"Newton iteration diverged from i*{omega_guess}")
        if abs(step) <= 1e-15 * max(1.0, abs(lam)):
            break
    else:
        raise NoConvergence(f"no convergence in {max_iter} Newton steps (last lam={lam})")
    if lam.imag < 0:
        lam = lam.conjugate()
    if abs(lam.real) > tol_imaginary * abs(lam) or lam.imag <= tol_imaginary:
        raise NotOnAxis(f"nearest root {lam} is not on the imaginary axis", lam)
    omega = lam.imag
    M = char_matrix(sys, 1j * omega)
    s = numerics.singular_values(M)
    scale = term_scale(sys, 1j * omega)
    rel = s[-1] / scale
    if rel > tol_root:
        raise NoConvergence(f"relative residual {rel:.3e} at i*{omega} exceeds {tol_root:.1e}")
    margin = s[-2] / scale if s.size > 1 else 1.0
    if margin <= tol_rank:
        raise NotSimple(f"kernel of the characteristic matrix is not one-dimensional "
                        f"(relative sigma_(n-1)={margin:.3e})")
    return HopfPair(omega=float(omega), root_residual=float(abs(np.linalg.det(M))),
                    relative_residual=float(rel), simplicity_margin=float(margin),
                    newton_iterations=it)


def cheb(N):
    """Chebyshev points ``x_j = cos(pi j / N)`` and differentiation matrix."""
    if N == 0:
        return np.array([1.0]), np.zeros((1, 1))
    j = np.arange(N + 1)
    x = np.cos(np.pi * j / N)
    c = np.ones(N + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** j
    dX = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    return x, D


def pseudospectral_roots(sys, N=64):
    """Approximate characteristic roots by Chebyshev collocation.

    The generator of the solution semigroup acts on a history ``u`` on
    ``[-r, 0]`` as ``u'`` with the domain condition
    ``u'(0) = A u(0) + B u(-r)``.  Collocating ``u`` at ``N + 1`` Chebyshev
    nodes (node 0 is ``theta = 0``, node N is ``theta = -r``) gives a matrix
    of size ``n (N + 1)`` whose rightmost eigenvalues converge spectrally.
    """
    n = sys.n
    _, D = cheb(N)
    D = D * (2.0 / sys.r)
    G = np.kron(D, np.eye(n))
    G[:n, :] = 0.0
    G[:n, :n] = sys.A
    G[:n, N * n:] = sys.B
    ev = np.linalg.eigvals(G)
    return ev[np.argsort(-ev.real, kind="stable")]


@dataclass
class HypothesisReport:
    passed: bool
    hopf: HopfPair
    rightmost_roots: list
    rightmost_other_root: complex
    spectral_gap: float
    critical_pair_found: bool
    geometric_margin: float
    algebraic_margin: float
    n_nodes: int
    delta_spectrum: float
    failures: list = field(default_factory=list)
    certificate: str = ("heuristic: finite pseudospectral scan of a transcendental "
                        "spectrum, not a proof")


def verify_hypothesis_H(sys, hopf, n_nodes=64, delta_spectrum=1e-6, n_report=10,
                        tol_rank=numerics.TOL_RANK, strict=True):
    """Check simplicity of ``+-i omega`` and stability of the rest of the spectrum.

    Returns a :class:`HypothesisReport`; with ``strict`` a failing report is
    raised as :class:`HypothesisViolated`.
    """
    omega = hopf.omega
    roots = list(pseudospectral_roots(sys, n_nodes))
    match_tol = 1e-6 * max(1.0, omega)
    found = True
    for target in (1j * omega, -1j * omega):
        dist = [abs(z - target) for z in roots]
        i = int(np.argmin(dist))
        if dist[i] <= match_tol:
            roots.pop(i)
        else:
            found = False
    others = roots[:n_report]
    rightmost = complex(others[0]) if others else complex(-np.inf)

    M = char_matrix(sys, 1j * omega)
    s = numerics.singular_values(M)
    scale = term_scale(sys, 1j * omega)
    geometric = s[-2] / scale if s.size > 1 else 1.0
    algebraic = 0.0
    try:
        phi = numerics.right_null_vector(M, tol_rank, scale)
        psi = numerics.left_null_vector(M, tol_rank, scale)
        Md = char_matrix_derivative(sys, 1j * omega)
        algebraic = abs(psi @ Md @ phi) / max(np.linalg.norm(Md, 2), 1e-300)
    except (ArithmeticError, ValueError):
        pass

    failures = []
    if not found:
        failures.append(f"critical pair +-i{omega:.12g} not resolved by the scan")
    if geometric <= tol_rank:
        failures.append("i omega is not geometrically simple")
    if algebraic <= tol_rank:
        failures.append("i omega is not algebraically simple")
    if rightmost.real > -delta_spectrum:
        failures.append(f"root {rightmost} is not in the open left half-plane")
    report = HypothesisReport(
        passed=not failures,
        hopf=replace(hopf, rightmost_other_root=rightmost),
        rightmost_roots=[complex(z) for z in others],
        rightmost_other_root=rightmost,
        spectral_gap=float(-rightmost.real),
        critical_pair_found=found,
        geometric_margin=float(geometric),
        algebraic_margin=float(algebraic),
        n_nodes=n_nodes,
        delta_spectrum=delta_spectrum,
        failures=failures,
    )
    if strict and failures:
        raise HypothesisViolated("; ".join(failures), report=report,
                                 root=rightmost if rightmost.real > -delta_spectrum else None)
    return report
