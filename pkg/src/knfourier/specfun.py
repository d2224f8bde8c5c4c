"""Special functions behind the kernel: normalized Bessel, Gegenbauer, 1F1.

The normalized Bessel function

    j_a(z) = Gamma(a + 1) * sum_k (-1)^k / (k! Gamma(a + k + 1)) * (z / 2)^(2k)

is evaluated by its power series near the origin, by the Hankel large-argument
expansion far out on the real line, and by ``scipy.special.jv`` in the band
between the two where neither of the former is accurate in double precision.
Complex arguments use the series near the origin and ``scipy.special.jv``
beyond it.
The two Poisson-type integral representations are evaluated by Gauss-Jacobi
quadrature and serve as independent oracles for the series.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError

__all__ = [
    "REAL_RADIUS",
    "COMPLEX_RADIUS",
    "SERIES_RADIUS",
    "ASYMPTOTIC_RADIUS",
    "check_order",
    "bessel_normalized",
    "gegenbauer",
    "gegenbauer_explicit",
    "kummer_1f1",
    "gegenbauer_poisson_constant",
    "bessel_poisson_oracle",
    "gegenbauer_poisson_oracle",
]

REAL_RADIUS = 200.0
COMPLEX_RADIUS = 40.0
# Past this radius the alternating series loses more than ~1e-12 to cancellation.
SERIES_RADIUS = 6.0
ASYMPTOTIC_RADIUS = 25.0
ASYMPTOTIC_MIN_TERMS = 10

_SERIES_TERM_CAP = 400
_KUMMER_TERM_CAP = 10_000
_EPS = np.finfo(float).eps
# Above this degree the alternating explicit Gegenbauer sum cancels badly.
_GEGENBAUER_EXPLICIT_MAX = 7


def check_order(alpha):
    """Validate a Bessel order (finite, > -1) and return it as float."""
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= -1.0:
        raise DomainError(f"Bessel order must be finite and > -1, got {alpha!r}")
    return alpha


def _log_gamma_ratio(a, b):
    """log(Gamma(a) / Gamma(b)) for positive a, b."""
    return math.lgamma(a) - math.lgamma(b)


def _series(alpha, z):
    """Power series of j_alpha on an array (real or complex)."""
    w = -(z * 0.5) ** 2
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(1, _SERIES_TERM_CAP + 1):
        term = term * w / (k * (alpha + k))
        total = total + term
        # terms decrease monotonically once k(alpha + k) > |z/2|^2
        if k * (alpha + k) > np.max(np.abs(w), initial=0.0):
            if np.all(np.abs(term) <= _EPS * 0.25 * np.maximum(np.abs(total), 1e-300)):
                return total
    raise ConvergenceError(f"j_{alpha} series did not converge in {_SERIES_TERM_CAP} terms")


def _hankel_pq(alpha, x):
    """Hankel asymptotic P, Q sums; returns (P, Q, converged mask)."""
    mu = 4.0 * alpha * alpha
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    last = np.full_like(x, np.inf)
    done = np.zeros(x.shape, dtype=bool)
    converged = np.zeros(x.shape, dtype=bool)
    k = 0
    while k < 60 and not np.all(done):
        k += 1
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(term)
        # stop adding once the asymptotic terms start growing again
        growing = (mag > last) & (k > ASYMPTOTIC_MIN_TERMS)
        done |= growing
        active = ~done
        if k % 2:
            q = np.where(active, q + (-1) ** ((k - 1) // 2) * term, q)
        else:
            p = np.where(active, p + (-1) ** (k // 2) * term, p)
        small = mag <= _EPS * 0.1
        converged |= active & small & (k >= ASYMPTOTIC_MIN_TERMS)
        done |= small & (k >= ASYMPTOTIC_MIN_TERMS)
        last = mag
    return p, q, converged


def _prefactor(alpha, x):
    """Gamma(alpha + 1) * (2 / x)^alpha for x > 0, via logs."""
    return np.exp(math.lgamma(alpha + 1.0) + alpha * np.log(2.0 / x))


def _bessel_real(alpha, x):
    x = np.abs(x)
    out = np.empty_like(x)
    small = x <= SERIES_RADIUS
    if np.any(small):
        out[small] = _series(alpha, x[small])
    big = ~small
    if not np.any(big):
        return out
    xb = x[big]
    vals = np.empty_like(xb)
    far = xb >= ASYMPTOTIC_RADIUS
    todo = ~far
    if np.any(far):
        xf = xb[far]
        p, q, ok = _hankel_pq(alpha, xf)
        omega = xf - (0.5 * alpha + 0.25) * math.pi
        jv = np.sqrt(2.0 / (math.pi * xf)) * (p * np.cos(omega) - q * np.sin(omega))
        vals_far = _prefactor(alpha, xf) * jv
        # non-converged asymptotics (large order) fall back to the library routine
        far_idx = np.flatnonzero(far)
        vals[far_idx[ok]] = vals_far[ok]
        todo[far_idx[~ok]] = True
    if np.any(todo):
        xm = xb[todo]
        vals[todo] = _prefactor(alpha, xm) * special.jv(alpha, xm)
    out[big] = vals
    return out


def _bessel_complex(alpha, z):
    """Series near the origin, the library's complex J_alpha beyond it."""
    # j_alpha is even, so fold onto Re z >= 0 and stay off the branch cut
    z = np.where(z.real < 0, -z, z)
    out = np.empty_like(z)
    small = np.abs(z) <= SERIES_RADIUS
    if np.any(small):
        out[small] = _series(alpha, z[small])
    big = ~small
    if np.any(big):
        zb = z[big]
        out[big] = np.exp(math.lgamma(alpha + 1) + alpha * np.log(2.0 / zb)) * special.jv(alpha, zb)
    return out


def bessel_normalized(alpha, z, real_radius=REAL_RADIUS):
    """Normalized Bessel function ``j_alpha(z)``, with ``j_alpha(0) = 1``.

    Parameters
    ----------
    alpha : float
        Order, ``alpha > -1``.
    z : float, complex or array_like
        Argument. Real arguments are supported up to ``|z| <= 200``; arguments
        with a nonzero imaginary part are limited to ``|z| <= 40`` and use the
        power series up to ``|z| = 6``, the library's complex ``J_alpha`` beyond.
    real_radius : float, optional
        Cap on real arguments. The transform engine lifts it, since the
        large-argument expansion only improves past the default.

    Returns
    -------
    float, complex or ndarray
        Real output for real input.

    Raises
    ------
    DomainError
        If ``alpha`` is invalid or ``|z|`` exceeds the supported radius.
    ConvergenceError
        If the power series fails to converge within its term cap.
    """
    alpha = check_order(alpha)
    scalar = np.ndim(z) == 0
    z = np.asarray(z)
    if np.iscomplexobj(z) and np.any(z.imag != 0):
        z = z.astype(complex)
        if not np.all(np.isfinite(z)):
            raise DomainError("non-finite argument")
        if np.any(np.abs(z) > COMPLEX_RADIUS):
            raise DomainError(f"|z| > {COMPLEX_RADIUS} for complex argument")
        out = _bessel_complex(alpha, z.ravel()).reshape(z.shape)
    else:
        x = np.real(z).astype(float)
        if not np.all(np.isfinite(x)):
            raise DomainError("non-finite argument")
        if np.any(np.abs(x) > real_radius):
            raise DomainError(f"|z| > {real_radius} on the real line")
        flat = x.ravel()
        if alpha == -0.5:
            out = np.cos(flat)
        elif alpha == 0.5:
            out = np.ones_like(flat)
            nz = flat != 0
            out[nz] = np.sin(flat[nz]) / flat[nz]
        else:
            out = _bessel_real(alpha, flat)
        out = out.reshape(x.shape)
        if np.iscomplexobj(z):
            out = out.astype(complex)
    return out[()] if scalar else out


def gegenbauer_explicit(n, alpha, t):
    """Gegenbauer polynomial by its explicit finite sum (log-Gamma weights)."""
    n = int(n)
    alpha = float(alpha)
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    two_t = 2.0 * t
    for k in range(n // 2 + 1):
        logc = _log_gamma_ratio(n - k + alpha, alpha) - math.lgamma(k + 1) - math.lgamma(n - 2 * k + 1)
        total = total + (-1) ** k * math.exp(logc) * two_t ** (n - 2 * k)
    return total


def _gegenbauer_recurrence(n, alpha, t):
    prev = np.ones_like(t)
    if n == 0:
        return prev
    cur = 2.0 * alpha * t
    for m in range(2, n + 1):
        prev, cur = cur, (2.0 * t * (m + alpha - 1) * cur - (m + 2 * alpha - 2) * prev) / m
    return cur


def gegenbauer(n, alpha, t):
    """Gegenbauer (ultraspherical) polynomial ``C_n^(alpha)(t)`` on [-1, 1].

    Small degrees use the explicit finite sum; degrees above 7 switch to the
    three-term recurrence, which is stable on [-1, 1] while the alternating
    explicit sum is not.
    """
    n = int(n)
    if n < 0:
        raise DomainError(f"degree must be nonnegative, got {n}")
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha <= 0:
        raise DomainError(f"Gegenbauer order must be finite and > 0, got {alpha!r}")
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0) or not np.all(np.isfinite(t)):
        raise DomainError("Gegenbauer argument outside [-1, 1]")
    if n <= _GEGENBAUER_EXPLICIT_MAX:
        out = gegenbauer_explicit(n, alpha, t)
    else:
        out = _gegenbauer_recurrence(n, alpha, t)
    return out[()] if scalar else out


def kummer_1f1(a, b, x, rtol=1e-12):
    """Confluent hypergeometric function 1F1(a; b; x) for ``x >= 0``.

    Summed term by term, ``sum (a)_m x^m / ((b)_m m!)``.
    """
    a, b, x = float(a), float(b), float(x)
    if b <= 0 and b == math.floor(b):
        raise DomainError(f"b must not be a nonpositive integer, got {b}")
    if x < 0 or not math.isfinite(x):
        raise DomainError(f"x must be finite and >= 0, got {x}")
    term = 1.0
    total = 1.0
    for m in range(_KUMMER_TERM_CAP):
        term *= (a + m) * x / ((b + m) * (m + 1))
        total += term
        if term == 0.0 or (abs(term) <= rtol * abs(total) and m + 1 > a * x / b):
            return total
    raise ConvergenceError(f"1F1({a}; {b}; {x}) did not converge in {_KUMMER_TERM_CAP} terms")


def gegenbauer_poisson_constant(alpha, n):
    """``(2^(2 alpha + n) n! / pi) (alpha + n) B(alpha, alpha + n)``, in log space."""
    log_beta = math.lgamma(alpha) + math.lgamma(alpha + n) - math.lgamma(2 * alpha + n)
    logc = (2 * alpha + n) * math.log(2.0) + math.lgamma(n + 1) - math.log(math.pi) + log_beta
    return math.exp(logc) * (alpha + n)


def _jacobi_rule(alpha, x):
    """Symmetric Gauss-Jacobi rule for weight (1 - t^2)^(alpha - 1/2) on [-1, 1]."""
    npts = int(max(40, abs(x) * 0.75 + 40))
    return special.roots_jacobi(npts, alpha - 0.5, alpha - 0.5)


def bessel_poisson_oracle(alpha, x):
    """``j_alpha(x)`` from its Poisson integral, for ``alpha > -1/2``.

    ``2 Gamma(alpha+1) / (sqrt(pi) Gamma(alpha+1/2)) * int_0^1 (1-t^2)^(alpha-1/2) cos(xt) dt``,
    integrated exactly against the Jacobi weight.
    """
    alpha = float(alpha)
    if alpha <= -0.5:
        raise DomainError("Poisson representation requires alpha > -1/2")
    x = float(x)
    if abs(x) > REAL_RADIUS:
        raise DomainError(f"|x| > {REAL_RADIUS}")
    t, w = _jacobi_rule(alpha, x)
    # the integrand is even in t, so half the symmetric integral
    integral = 0.5 * np.dot(w, np.cos(x * t))
    logc = math.log(2.0) + math.lgamma(alpha + 1) - 0.5 * math.log(math.pi) - math.lgamma(alpha + 0.5)
    return math.exp(logc) * integral


def gegenbauer_poisson_oracle(alpha, n, u):
    """``u^n j_{alpha+n}(u)`` from Gegenbauer's generalisation of Poisson's integral.

    ``a_{alpha,n} int_0^1 C_n^(alpha)(t) (1-t^2)^(alpha-1/2) cos(ut - n pi/2) dt``.
    The phase ``- n pi/2`` (not ``+``) is the one that reproduces the left side
    for odd ``n``; the two agree for even ``n``.
    """
    alpha = float(alpha)
    if alpha <= 0:
        raise DomainError("Gegenbauer-Poisson representation requires alpha > 0")
    n = int(n)
    if n < 1:
        raise DomainError("degree must be a positive integer")
    u = float(u)
    if abs(u) > REAL_RADIUS:
        raise DomainError(f"|u| > {REAL_RADIUS}")
    t, w = _jacobi_rule(alpha, u)
    integrand = gegenbauer(n, alpha, t) * np.cos(u * t - 0.5 * n * math.pi)
    # C_n has parity (-1)^n and so does the shifted cosine; the product is even
    integral = 0.5 * np.dot(w, integrand)
    return gegenbauer_poisson_constant(alpha, n) * integral
