"""Closed-form test functions with analytic first and second derivatives.

Each object is a vectorized callable ``f(x)`` with ``derivative(x, order)``
for ``order`` in {1, 2}, which is what :func:`knfourier.heat.dunkl_laplacian`
needs. :func:`parse_function` reads the small string language used by the CLI.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParamError

__all__ = [
    "DeformedGaussian",
    "Bump",
    "OddGaussian",
    "Zero",
    "parse_function",
    "test_basket",
    "counterexample_family",
]


def _scalar_out(out, x):
    return out[()] if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class DeformedGaussian:
    """``amplitude * exp(-n * rate * |x|^(2/n))``."""

    rate: float
    n: int = 1
    amplitude: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ParamError(f"rate must be positive, got {self.rate}")

    parity = "even"

    @property
    def name(self):
        return f"gaussian:{self.rate!r}"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.amplitude * np.exp(-self.n * self.rate * np.abs(x) ** (2.0 / self.n))
        return _scalar_out(out, x)

    def log_abs(self, x):
        x = np.asarray(x, dtype=float)
        out = math.log(abs(self.amplitude)) - self.n * self.rate * np.abs(x) ** (2.0 / self.n)
        return _scalar_out(out, x)

    def derivative(self, x, order=1):
        # f' = -2a sgn(x) |x|^(2/n-1) f
        # f'' = (4a^2 |x|^(4/n-2) - 2a(2/n-1) |x|^(2/n-2)) f
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        a, p = self.rate, 2.0 / self.n
        f = self(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            if order == 1:
                out = -2 * a * np.sign(x) * ax ** (p - 1) * f
            elif order == 2:
                out = (4 * a * a * ax ** (2 * p - 2) - 2 * a * (p - 1) * ax ** (p - 2)) * f
            else:
                raise ValueError("order must be 1 or 2")
        return _scalar_out(out, x)


@dataclass(frozen=True)
class Bump:
    """Compactly supported bump ``exp(-c tau / (1 - tau))``, ``tau = (|x| / r)^(2/n)``.

    Supported on ``|x| < r`` with ``f(0) = 1``. Like the deformed Gaussian,
    it is a function of ``|x|^(2/n)``; after ``x = s^n`` it is the classical
    bump of radius ``r^(1/n)`` in ``s``. Larger sharpness ``c`` makes the
    transform decay faster, roughly like ``exp(-sqrt(2 c r^(1/n) |lam|^(1/n)))``.
    """

    radius: float = 2.0
    sharpness: float = 1.0
    n: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ParamError(f"bump radius must be positive, got {self.radius}")
        if not (math.isfinite(self.sharpness) and self.sharpness > 0):
            raise ParamError(f"bump sharpness must be positive, got {self.sharpness}")

    parity = "even"

    @property
    def name(self):
        if self.sharpness == 1.0:
            return f"bump:{self.radius!r}"
        return f"bump:{self.radius!r},{self.sharpness!r}"

    def _parts(self, x):
        x = np.asarray(x, dtype=float)
        p = 2.0 / self.n
        tau = (np.abs(x) / self.radius) ** p
        inside = tau < 1
        q = np.where(inside, 1 - tau, 1.0)
        g = np.where(inside, np.exp(self.sharpness * (1 - 1 / q)), 0.0)
        return x, tau, q, g

    def __call__(self, x):
        g = self._parts(x)[3]
        return _scalar_out(g, x)

    def derivative(self, x, order=1):
        # f = G(tau), G(tau) = exp(c - c/(1 - tau)):
        # G' = -c G / q^2, G'' = G (c^2/q^4 - 2c/q^3)
        # tau' = p tau / x, tau'' = p (p - 1) tau / x^2
        x, tau, q, g = self._parts(x)
        c, p = self.sharpness, 2.0 / self.n
        g1 = -c * g / q**2
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = np.where(g != 0, p * tau / x, 0.0)
            if order == 1:
                out = g1 * t1
            elif order == 2:
                g2 = g * (c * c / q**4 - 2 * c / q**3)
                t2 = np.where(g != 0, p * (p - 1) * tau / x**2, 0.0)
                out = g2 * t1 * t1 + g1 * t2
            else:
                raise ValueError("order must be 1 or 2")
        return _scalar_out(out, x)


@dataclass(frozen=True)
class OddGaussian:
    """``x * exp(-c x^2)``."""

    c: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c > 0):
            raise ParamError(f"c must be positive, got {self.c}")

    parity = "odd"

    @property
    def name(self):
        return "hermite1" if self.c == 0.5 else f"oddgaussian:{self.c!r}"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return _scalar_out(x * np.exp(-self.c * x * x), x)

    def derivative(self, x, order=1):
        x = np.asarray(x, dtype=float)
        c = self.c
        e = np.exp(-c * x * x)
        if order == 1:
            out = (1 - 2 * c * x * x) * e
        elif order == 2:
            out = (4 * c * c * x**3 - 6 * c * x) * e
        else:
            raise ValueError("order must be 1 or 2")
        return _scalar_out(out, x)


@dataclass(frozen=True)
class Zero:
    parity = "even"
    name = "zero"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return _scalar_out(np.zeros_like(x), x)

    def log_abs(self, x):
        x = np.asarray(x, dtype=float)
        return _scalar_out(np.full(x.shape, -np.inf), x)

    def derivative(self, x, order=1):
        return self(x)


def counterexample_family(params, a, b, delta):
    """``exp(-delta n |x|^(2/n))`` for ``a < delta < 1/(4b)``.

    Its own envelope rate is ``delta`` and its transform's is ``1/(4 delta)``,
    so it meets both decay conditions for the pair ``(a, b)`` while ``ab < 1/4``.
    """
    a, b, delta = float(a), float(b), float(delta)
    if not (a > 0 and b > 0):
        raise ParamError("a and b must be positive")
    if a * b >= 0.25:
        raise ParamError(f"need ab < 1/4, got {a * b}")
    if not (a < delta < 1 / (4 * b)):
        raise ParamError(f"delta must lie in ({a}, {1 / (4 * b)}), got {delta}")
    return DeformedGaussian(delta, params.n)


def _floats(text, count, spec):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ValueError(f"malformed function spec {spec!r}") from None
    if len(vals) != count or not all(math.isfinite(v) for v in vals):
        raise ValueError(f"malformed function spec {spec!r}")
    return vals


def parse_function(spec, params):
    """Build an evaluable from ``gaussian:<a>``, ``bump:<r>[,<c>]``, ``hermite1``,
    ``oddgaussian:<c>``, ``zero`` or ``counterexample:<a>,<b>,<delta>``.

    Raises ``ValueError`` for text that does not parse and
    :class:`~knfourier.errors.ParamError` for out-of-range parameters.
    """
    name, _, arg = spec.strip().partition(":")
    if name == "gaussian":
        return DeformedGaussian(_floats(arg, 1, spec)[0], params.n)
    if name == "bump":
        if "," in arg:
            return Bump(*_floats(arg, 2, spec), n=params.n)
        return Bump(_floats(arg, 1, spec)[0], n=params.n)
    if name == "oddgaussian":
        return OddGaussian(_floats(arg, 1, spec)[0])
    if name == "hermite1" and not arg:
        return OddGaussian(0.5)
    if name == "zero" and not arg:
        return Zero()
    if name == "counterexample":
        return counterexample_family(params, *_floats(arg, 3, spec))
    raise ValueError(f"malformed function spec {spec!r}")


def test_basket(params):
    """The five fixed functions used by the identity checks."""
    return [
        DeformedGaussian(0.3, params.n),
        DeformedGaussian(0.5, params.n),
        DeformedGaussian(1.0, params.n),
        # radius 4 and sharpness 8 in the substituted variable keep the
        # transform resolvable inside the default truncation radius
        Bump(4.0**params.n, 8.0, params.n),
        OddGaussian(1.0),
    ]


test_basket.__test__ = False  # keep pytest from collecting it
