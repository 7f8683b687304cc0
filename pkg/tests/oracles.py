"""Independent reference computations used by several test modules."""

from math import factorial

import numpy as np
import sympy


def taylor_by_expansion(sys, Q, W20, W11, W02):
    """``f_jk`` by expanding ``fhat(X(z, zb))`` symbolically.

    ``X = Q z + conj(Q) zb + W20 z**2/2 + W11 z zb + W02 zb**2/2`` and
    ``f_jk = j! k! [z**j zb**k] fhat(X)``.  Returns a dict keyed by ``(j, k)``.
    """
    z, zb = sympy.symbols("z zb")

    def num(c):
        c = complex(c)
        return sympy.Float(c.real, 30) + sympy.I * sympy.Float(c.imag, 30)

    X = [sympy.Poly(num(Q[p]) * z + num(np.conj(Q[p])) * zb
                    + num(W20[p]) / 2 * z ** 2 + num(W11[p]) * z * zb
                    + num(W02[p]) / 2 * zb ** 2, z, zb, domain="CC")
         for p in range(Q.size)]
    m = Q.size
    out = {key: np.zeros(sys.n, dtype=complex) for key in ((2, 0), (1, 1), (0, 2), (2, 1), (1, 2))}
    for i in range(sys.n):
        f = sympy.Poly(0, z, zb, domain="CC")
        for p in range(m):
            for q in range(m):
                if sys.D2[i, p, q]:
                    f += X[p] * X[q] * sympy.Float(sys.D2[i, p, q] / 2, 30)
                for s in range(m):
                    if sys.D3[i, p, q, s]:
                        f += X[p] * X[q] * X[s] * sympy.Float(sys.D3[i, p, q, s] / 6, 30)
        coeffs = dict(zip(f.monoms(), f.coeffs()))
        for (j, k) in out:
            c = complex(coeffs.get((j, k), 0))
            out[(j, k)][i] = c * factorial(j) * factorial(k)
    return out


def collocation_boundary_solve(A, B, r, rate, forcing, f, N=48):
    """Chebyshev collocation for ``w' = rate w + forcing`` on ``[-r, 0]``
    with ``w'(0) = A w(0) + B w(-r) + f``.

    ``forcing`` is any callable of ``theta``.  Returns the nodal values
    (row ``j`` at ``theta_j``, node 0 is ``theta = 0``) and the nodes.
    """
    n = A.shape[0]
    j = np.arange(N + 1)
    x = np.cos(np.pi * j / N)
    c = np.where((j == 0) | (j == N), 2.0, 1.0) * (-1.0) ** j
    dX = x[:, None] - x[None, :] + np.eye(N + 1)
    D = np.outer(c, 1 / c) / dX
    D -= np.diag(D.sum(axis=1))
    D *= 2.0 / r
    theta = r * (x - 1) / 2
    L = np.kron(D, np.eye(n)).astype(complex)
    rhs = np.zeros((N + 1) * n, dtype=complex)
    for k in range(1, N + 1):
        L[k * n:(k + 1) * n, k * n:(k + 1) * n] -= rate * np.eye(n)
        rhs[k * n:(k + 1) * n] = forcing(theta[k])
    L[:n, :n] -= A
    L[:n, N * n:] -= B
    rhs[:n] = f
    u = np.linalg.solve(L, rhs).reshape(N + 1, n)
    return u, theta


def clenshaw_curtis(N):
    """Nodes ``cos(pi j / N)`` and weights integrating over ``[-1, 1]``."""
    theta = np.pi * np.arange(N + 1) / N
    x = np.cos(theta)
    w = np.zeros(N + 1)
    v = np.ones(N - 1)
    inner = np.arange(1, N)
    if N % 2 == 0:
        w[0] = w[N] = 1.0 / (N ** 2 - 1)
        for k in range(1, N // 2):
            v -= 2 * np.cos(2 * k * theta[inner]) / (4 * k ** 2 - 1)
        v -= np.cos(N * theta[inner]) / (N ** 2 - 1)
    else:
        w[0] = w[N] = 1.0 / N ** 2
        for k in range(1, (N - 1) // 2 + 1):
            v -= 2 * np.cos(2 * k * theta[inner]) / (4 * k ** 2 - 1)
    w[inner] = 2 * v / N
    return x, w


def singular_boundary_solve(A, B, r, rate, forcing, f, psi0, N=48):
    """Collocation of a boundary problem whose operator has a one-dimensional
    kernel, with the kernel component removed by ``<Psi, w> = 0``.

    ``Psi(z) = psi0 exp(-rate z)`` on ``[0, r]`` and the pairing is
    ``Psi(0) w(0) + int_{-r}^0 Psi(t + r) B w(t) dt`` by Clenshaw-Curtis.
    Solved as a consistent overdetermined least-squares problem.
    """
    n = A.shape[0]
    _, wts = clenshaw_curtis(N)
    j = np.arange(N + 1)
    x = np.cos(np.pi * j / N)
    c = np.where((j == 0) | (j == N), 2.0, 1.0) * (-1.0) ** j
    D = np.outer(c, 1 / c) / (x[:, None] - x[None, :] + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    D *= 2.0 / r
    theta = r * (x - 1) / 2
    L = np.kron(D, np.eye(n)).astype(complex)
    rhs = np.zeros((N + 1) * n + 1, dtype=complex)
    for k in range(1, N + 1):
        L[k * n:(k + 1) * n, k * n:(k + 1) * n] -= rate * np.eye(n)
        rhs[k * n:(k + 1) * n] = forcing(theta[k])
    L[:n, :n] -= A
    L[:n, N * n:] -= B
    rhs[:n] = f
    row = np.zeros((N + 1) * n, dtype=complex)
    row[:n] += psi0
    for k in range(N + 1):
        row[k * n:(k + 1) * n] += (r / 2) * wts[k] * (psi0 * np.exp(-rate * (theta[k] + r))) @ B
    S = np.vstack([L, row[None, :]])
    u = np.linalg.lstsq(S, rhs, rcond=None)[0].reshape(N + 1, n)
    return u, theta
