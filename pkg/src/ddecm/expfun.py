"""Exact calculus on vector-valued exponential polynomials.

An :class:`ExpPolyFunction` is a finite sum ``sum_t P_t(theta) exp(mu_t theta)``
on a closed interval, where each ``P_t`` has vector coefficients.  Every
eigenfunction and every center-manifold coefficient of a constant-delay
system at a Hopf point is of this form, so the bilinear pairing, the
integrals entering the boundary systems and the linear ODE solves can all be
done in closed form.
"""

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .errors import DimensionMismatch, OutOfDomain

__all__ = [
    "ExpPolyFunction", "evaluate", "conjugate", "monomial_exp_integral",
    "bilinear_pair", "solve_linear_ode", "TOL_RESONANCE", "TOL_MERGE",
]

TOL_RESONANCE = 1e-10
TOL_MERGE = 1e-12
# |mu| * max(|a|, |b|) at or below this uses the power series of the integral
SERIES_SWITCH = 1.0
_SERIES_MAX_TERMS = 60


def _merge_terms(terms, n):
    merged = []
    for mu, coeffs in terms:
        mu = complex(mu)
        coeffs = np.array(coeffs, dtype=complex, ndmin=2)
        if coeffs.shape[1] != n:
            raise DimensionMismatch("term vectors must share one length")
        for i, (nu, c) in enumerate(merged):
            if abs(mu - nu) <= TOL_MERGE * max(1.0, abs(nu)):
                d = max(len(c), len(coeffs))
                acc = np.zeros((d, n), dtype=complex)
                acc[:len(c)] += c
                acc[:len(coeffs)] += coeffs
                merged[i] = (nu, acc)
                break
        else:
            merged.append((mu, coeffs))
    out = []
    for mu, c in merged:
        nz = np.flatnonzero(np.any(c != 0, axis=1))
        if nz.size:
            c = c[:nz[-1] + 1].copy()
            c.setflags(write=False)
            out.append((mu, c))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class ExpPolyFunction:
    """Vector function ``sum_t sum_k c_{t,k} theta**k exp(mu_t theta)``.

    Parameters
    ----------
    terms : sequence of (mu, coeffs)
        ``coeffs`` has shape ``(degree + 1, n)``; row ``k`` multiplies
        ``theta**k``.  Terms with (numerically) equal exponents are merged
        and trailing zero coefficients dropped.
    domain : (a, b)
    n : int
        Vector length; needed when ``terms`` is empty.
    orientation : {"column", "row"}
    """

    terms: tuple
    domain: tuple
    n: int
    orientation: str = "column"

    def __post_init__(self):
        if self.orientation not in ("column", "row"):
            raise ValueError(f"bad orientation {self.orientation!r}")
        a, b = map(float, self.domain)
        if not a < b:
            raise ValueError(f"empty domain {self.domain}")
        object.__setattr__(self, "domain", (a, b))
        object.__setattr__(self, "terms", _merge_terms(self.terms, self.n))

    @classmethod
    def exponential(cls, mu, vector, domain, orientation="column"):
        """Single term ``vector * exp(mu theta)``."""
        v = np.atleast_1d(np.asarray(vector, dtype=complex))
        return cls(((mu, v[None, :]),), domain, v.size, orientation)

    @classmethod
    def zero(cls, n, domain, orientation="column"):
        return cls((), domain, n, orientation)

    # -- inspection --------------------------------------------------------

    @property
    def exponents(self):
        return [mu for mu, _ in self.terms]

    @property
    def degree(self):
        return max((len(c) - 1 for _, c in self.terms), default=0)

    def coefficients(self, mu):
        """Polynomial coefficients attached to exponent ``mu`` (or zeros)."""
        for nu, c in self.terms:
            if abs(mu - nu) <= TOL_MERGE * max(1.0, abs(nu)):
                return c
        return np.zeros((1, self.n), dtype=complex)

    def evaluate(self, theta):
        a, b = self.domain
        theta = float(theta)
        slack = 1e-12 * max(1.0, b - a)
        if theta < a - slack or theta > b + slack:
            raise OutOfDomain(f"{theta} outside [{a}, {b}]")
        out = np.zeros(self.n, dtype=complex)
        for mu, c in self.terms:
            powers = theta ** np.arange(len(c))
            out += np.exp(mu * theta) * (powers @ c)
        return out

    __call__ = evaluate

    # -- algebra -----------------------------------------------------------

    def _like(self, terms):
        return ExpPolyFunction(tuple(terms), self.domain, self.n, self.orientation)

    def _check_compatible(self, other):
        if not isinstance(other, ExpPolyFunction):
            return NotImplemented
        if (other.n != self.n or other.orientation != self.orientation
                or not np.allclose(other.domain, self.domain)):
            raise DimensionMismatch("incompatible exponential polynomials")
        return True

    def __add__(self, other):
        if self._check_compatible(other) is NotImplemented:
            return NotImplemented
        return self._like(self.terms + other.terms)

    def __neg__(self):
        return self._like((mu, -c) for mu, c in self.terms)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        if scalar == 0:
            return self._like(())
        return self._like((mu, scalar * c) for mu, c in self.terms)

    __rmul__ = __mul__

    def conj(self):
        return self._like((np.conj(mu), np.conj(c)) for mu, c in self.terms)

    def derivative(self):
        """Exact derivative, ``(P' + mu P) exp(mu theta)`` per term."""
        out = []
        for mu, c in self.terms:
            d = mu * c
            if len(c) > 1:
                d = d.copy()
                d[:-1] += np.arange(1, len(c))[:, None] * c[1:]
            out.append((mu, d))
        return self._like(out)

    def times_exp(self, nu):
        """Multiply by the scalar ``exp(nu theta)``."""
        return self._like((mu + nu, c) for mu, c in self.terms)

    def integral(self, a=None, b=None):
        """Exact ``int_a^b f(theta) dtheta`` (defaults to the domain)."""
        a = self.domain[0] if a is None else a
        b = self.domain[1] if b is None else b
        out = np.zeros(self.n, dtype=complex)
        for mu, c in self.terms:
            for k, ck in enumerate(c):
                out += monomial_exp_integral(k, mu, a, b) * ck
        return out

    def max_abs_coefficient(self):
        return max((float(np.max(np.abs(c))) for _, c in self.terms), default=0.0)


def evaluate(f, theta):
    return f.evaluate(theta)


def conjugate(f):
    return f.conj()


def monomial_exp_integral(k, mu, a, b):
    """Closed form of ``int_a^b theta**k exp(mu theta) dtheta``.

    For ``|mu| max(|a|, |b|) <= 1`` the antiderivative is summed as a power
    series in ``mu``; elsewhere the finite closed-form antiderivative
    ``exp(mu t) sum_j (-1)**j k!/(k-j)! t**(k-j) / mu**(j+1)`` is used.
    """
    k = int(k)
    mu = complex(mu)
    a = float(a)
    b = float(b)
    L = max(abs(a), abs(b))
    if abs(mu) * L <= SERIES_SWITCH:
        total = 0j
        term = 1.0 + 0j  # mu**m / m!
        for m in range(_SERIES_MAX_TERMS):
            p = k + m + 1
            total += term * (b ** p - a ** p) / p
            if abs(term) * 2 * L ** p / p <= 1e-18 * max(abs(total), L ** (k + 1)):
                break
            term *= mu / (m + 1)
        return total

    def antiderivative(t):
        s = 0j
        for j in range(k + 1):
            s += (-1) ** j * (factorial(k) // factorial(k - j)) * t ** (k - j) / mu ** (j + 1)
        return np.exp(mu * t) * s

    return antiderivative(b) - antiderivative(a)


def _shift_polynomial(c, h):
    """Coefficients of ``P(theta + h)`` given those of ``P(theta)``."""
    d = len(c)
    out = np.zeros_like(c)
    for k in range(d):
        for j in range(k + 1):
            out[j] += comb(k, j) * h ** (k - j) * c[k]
    return out


def bilinear_pair(psi, phi, B, r):
    """Delay bilinear form ``psi(0) phi(0) + int_{-r}^0 psi(z + r) B phi(z) dz``.

    Parameters
    ----------
    psi : ExpPolyFunction
        Row function on ``[0, r]``.
    phi : ExpPolyFunction
        Column function on ``[-r, 0]``.
    B : (n, n) array_like
        Delayed-state matrix.
    r : float
        Delay.

    Returns
    -------
    complex
    """
    B = np.asarray(B, dtype=complex)
    if psi.orientation != "row" or phi.orientation != "column":
        raise DimensionMismatch("pairing needs a row psi and a column phi")
    if psi.n != phi.n or B.shape != (phi.n, phi.n):
        raise DimensionMismatch(
            f"psi length {psi.n}, phi length {phi.n}, B shape {B.shape}")
    total = complex(psi.evaluate(0.0) @ phi.evaluate(0.0))
    for nu, p in psi.terms:
        shifted = np.exp(nu * r) * _shift_polynomial(p, r)
        pB = shifted @ B
        for mu, q in phi.terms:
            # scalar polynomial coefficients of (row poly) B (column poly)
            prod = pB @ q.T
            for j in range(prod.shape[0]):
                for l in range(prod.shape[1]):
                    if prod[j, l] != 0:
                        total += prod[j, l] * monomial_exp_integral(j + l, nu + mu, -r, 0.0)
    return total


def solve_linear_ode(rate, forcing, value_at_0, tol_resonance=TOL_RESONANCE):
    """Solve ``w' = rate w + forcing`` with ``w(0) = value_at_0``.

    Each forcing term ``P(s) exp(mu s)`` contributes a particular solution
    ``Q(s) exp(mu s)``.  Off resonance ``Q' + (mu - rate) Q = P`` is solved
    with ``deg Q = deg P``; when ``|mu - rate| <= tol_resonance`` the term is
    resonant and ``Q`` is the antiderivative of ``P`` (one degree higher).
    The homogeneous part ``exp(rate s)`` absorbs the initial value.
    """
    rate = complex(rate)
    w0 = np.asarray(value_at_0, dtype=complex).reshape(forcing.n)
    terms = []
    p0 = np.zeros(forcing.n, dtype=complex)
    for mu, P in forcing.terms:
        d = mu - rate
        deg = len(P) - 1
        if abs(d) <= tol_resonance:
            Q = np.zeros((deg + 2, forcing.n), dtype=complex)
            Q[1:] = P / np.arange(1, deg + 2)[:, None]
            mu = rate
        else:
            # back substitution from the top degree down
            Q = np.zeros_like(P)
            Q[deg] = P[deg] / d
            for k in range(deg - 1, -1, -1):
                Q[k] = (P[k] - (k + 1) * Q[k + 1]) / d
        p0 += Q[0]
        terms.append((mu, Q))
    terms.append((rate, (w0 - p0)[None, :]))
    return ExpPolyFunction(tuple(terms), forcing.domain, forcing.n, forcing.orientation)
