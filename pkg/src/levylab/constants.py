"""Closed-form constants of the moment and large-deviation asymptotics.

``f_alpha(r)`` is a finite sum whose number of terms grows like ``1/(2r)``.
For the integrals we evaluate it in O(1) through generalized harmonic numbers
``H(J) = sum_{i=1}^J i**alpha``::

    f(r) = A(r) * (J**alpha - expm1(2 alpha atanh r) * H(J - 1)),
    A(r) = (2 / (1 + r))**alpha,   J = ceil((1 - r) / (2r)),

which avoids the cancellation between the two halves of the sum.  ``f`` is
continuous with kinks at ``r = 1/(2k+1)``; between kinks it is analytic, so
integrals are done segment by segment with Gauss-Legendre rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .medium import GapLaw


@dataclass(frozen=True)
class QuadratureConfig:
    atol: float = 1e-8
    rtol: float = 1e-8
    max_subdivisions: int = 200_000

    def __post_init__(self):
        if not (self.atol > 0 and self.rtol > 0 and self.max_subdivisions > 0):
            raise ValueError("quadrature tolerances and subdivision cap must be positive")


DEFAULT_QUADRATURE = QuadratureConfig()


def gaussian_abs_moment(q: float) -> float:
    """``E|N(0,1)|**q = sqrt(2**q / pi) * Gamma((q+1)/2)``."""
    if q < 0:
        raise ValueError(f"q must be non-negative, got {q}")
    return math.exp(0.5 * q * math.log(2.0) - 0.5 * math.log(math.pi)
                    + special.gammaln((q + 1.0) / 2.0))


def _terms(r: float) -> int:
    return math.ceil((1.0 - r) / (2.0 * r))


def f_alpha(alpha: float, r: float) -> float:
    """The finite sum ``sum_{j<J} ((2j+2)/(1+r))**alpha - (2j/(1-r))**alpha``."""
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    j = np.arange(_terms(r), dtype=float)
    return float(np.sum(((2 * j + 2) / (1 + r)) ** alpha - (2 * j / (1 - r)) ** alpha))


_EM_START = 64


def _harmonic(alpha: float, n: np.ndarray) -> np.ndarray:
    """``H(n) = sum_{i=1}^n i**alpha`` for integer arrays ``n >= 0``."""
    n = np.asarray(n, dtype=np.int64)
    small = np.concatenate([[0.0], np.cumsum(np.arange(1, _EM_START + 1, dtype=float) ** alpha)])
    out = np.empty(n.shape)
    low = n <= _EM_START
    out[low] = small[n[low]]
    m = n[~low].astype(float)
    if m.size:
        a = alpha
        # Euler-Maclaurin; the next omitted term is O(m**(a - 7))
        out[~low] = (
            float(special.zeta(-a))
            + m ** (a + 1) / (a + 1)
            + m**a / 2
            + a * m ** (a - 1) / 12
            - a * (a - 1) * (a - 2) * m ** (a - 3) / 720
            + a * (a - 1) * (a - 2) * (a - 3) * (a - 4) * m ** (a - 5) / 30240
        )
    return out


def f_alpha_fast(alpha: float, r) -> np.ndarray:
    """Vectorized ``f_alpha`` via harmonic numbers; agrees with the sum to ~1e-13."""
    r = np.asarray(r, dtype=float)
    big_j = np.ceil((1.0 - r) / (2.0 * r)).astype(np.int64)
    lead = (2.0 / (1.0 + r)) ** alpha
    e = np.expm1(2.0 * alpha * np.arctanh(r))
    return lead * (big_j.astype(float) ** alpha - e * _harmonic(alpha, big_j - 1))


def _check_d_region(alpha, q):
    if alpha < 1:
        raise ValueError(f"d_const needs alpha >= 1, got {alpha}")
    lower = 2 * alpha - 1
    if q < lower:
        raise ValueError(f"integral of r^(q-1) f_alpha diverges: need q >= 2*alpha - 1 = {lower}, "
                         f"got q = {q}")
    if q == lower and alpha == 1:
        raise ValueError("integral diverges at q = 2*alpha - 1 when alpha = 1 (needs alpha > 1)")
    if q - alpha + 1 <= 0:
        raise ValueError(f"Gamma(q - alpha + 1) needs q - alpha + 1 > 0, got {q - alpha + 1}")


_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _segment_integral(g, lo, hi):
    """Sum of Gauss-Legendre integrals of ``g`` over the segments ``[lo_i, hi_i]``."""
    half = (hi - lo) / 2.0
    mid = (hi + lo) / 2.0
    nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
    return float(np.sum(half * (g(nodes) @ _GL_W)))


def r_moment_integral(alpha: float, q: float,
                      config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``int_0^1 r**(q-1) f_alpha(r) dr``.

    Exact segment-wise quadrature on ``[r_K, 1]`` with ``r_k = 1/(2k+1)``;
    below ``r_K`` the leading asymptote ``f ~ r**-alpha / (alpha+1)`` is
    integrated in closed form, with ``K`` grown until its relative error
    estimate (order ``r_K`` times the tail) is below the tolerance.
    """
    _check_d_region(alpha, q)
    p = q - alpha  # tail integrand ~ r**(p-1)

    def g(r):
        return r ** (q - 1) * f_alpha_fast(alpha, r)

    k_max = 1
    while True:
        k_max *= 4
        r_k = 1.0 / (2 * k_max + 1)
        tail = r_k**p / (p * (alpha + 1))
        if r_k * tail <= config.rtol * 1e-2 or k_max >= config.max_subdivisions:
            break
    k = np.arange(k_max, dtype=float)
    hi = 1.0 / (2 * k + 1)
    lo = 1.0 / (2 * k + 3)
    body = 0.0
    # chunk to bound memory
    for start in range(0, k_max, 50_000):
        sl = slice(start, start + 50_000)
        body += _segment_integral(g, lo[sl], hi[sl])
    return body + tail


def d_const(mu: float, alpha: float, q: float,
            config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Prefactor of the ballistic term of the annealed ``q``-th moment."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    _check_d_region(alpha, q)
    ratio = math.exp(special.gammaln(q - alpha + 1) - special.gammaln(q - alpha + 1.5))
    return math.sqrt(2.0 / mu) * ratio * r_moment_integral(alpha, q, config)


def F_const(mu: float, alpha: float, a: float,
            config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Prefactor of the annealed tail ``P(X(t) > a t)``.

    The ``1/sqrt(1 - eta)`` endpoint singularity is removed with
    ``eta = 1 - u**2``; kinks of ``f_alpha(a / eta)`` are passed as breakpoints.
    """
    if not 0.0 < a <= 1.0:
        raise ValueError(f"a must lie in (0, 1], got {a}")
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if a == 1.0:
        return 0.0
    top = math.sqrt(1.0 - a)

    def h(u):
        eta = 1.0 - u * u
        r = min(a / eta, 1.0 - 1e-16)
        return 2.0 * f_alpha_fast(alpha, r) * eta ** (-alpha)

    # f(a/eta) has kinks where a/eta = 1/(2k+1), i.e. eta = a(2k+1)
    kinks = []
    k = 1
    while a * (2 * k + 1) < 1.0:
        kinks.append(math.sqrt(1.0 - a * (2 * k + 1)))
        k += 1
    edges = sorted({0.0, top, *kinks})
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(lambda u: float(h(u)), lo, hi, epsabs=config.atol,
                                epsrel=config.rtol, limit=config.max_subdivisions)
        total += val
    return total / math.sqrt(2.0 * math.pi * mu)


def gamma_exponent(alpha: float, q: float) -> float:
    """Moment scaling exponent: ``q/2`` up to ``q = 2 alpha - 1``, then ``q + 1/2 - alpha``."""
    if not q > 0:
        raise ValueError(f"q must be positive, got {q}")
    corner = 2.0 * alpha - 1.0
    return q / 2.0 if q <= corner else q + 0.5 - alpha


def moment_asymptote(mu: float, alpha: float, q: float, t: float, gap_law: GapLaw) -> float:
    """Leading behavior of the annealed ``E|X(t)|**q`` for the simple symmetric gas."""
    if not math.isfinite(mu):
        raise ValueError("moment asymptote needs a finite mean gap")
    if not gap_law.regularly_varying:
        raise ValueError(f"{gap_law} does not have a regularly varying tail")
    corner = 2.0 * alpha - 1.0
    diffusive = gaussian_abs_moment(q) * mu ** (q / 2.0) * t ** (q / 2.0)
    if q < corner or (q == 1 and alpha == 1):
        return diffusive
    ballistic = d_const(mu, alpha, q) * t ** (q + 0.5) * float(gap_law.tail(t))
    if q == corner:
        return diffusive + ballistic
    return ballistic
