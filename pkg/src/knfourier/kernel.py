"""Deformation parameters, the weighted measure and the transform kernel."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, ParamError, SingularPointError
from .specfun import REAL_RADIUS, bessel_normalized

__all__ = [
    "DeformParams",
    "KernelValue",
    "make_params",
    "measure_density",
    "kernel_parts",
    "kernel_b",
    "kernel_sup_estimate",
]

# (-i)^n for n mod 4, exact
_MINUS_I_POW = (1.0 + 0j, -1j, -1.0 + 0j, 1j)


@dataclass(frozen=True)
class DeformParams:
    """The pair (k, n); everything else is derived on access.

    Use :func:`make_params` to construct a validated instance.
    """

    k: float
    n: int

    @property
    def alpha(self) -> float:
        return self.k * self.n - self.n / 2

    @property
    def weight_exponent(self) -> float:
        return 2 * self.k + 2 / self.n - 2

    @cached_property
    def measure_const(self) -> float:
        a = self.alpha
        return math.exp(math.log(0.5) - math.lgamma(a + 1) + a * math.log(self.n / 2))

    @cached_property
    def odd_const(self) -> complex:
        """(-i)^n (n/2)^n Gamma(alpha+1) / Gamma(alpha+n+1)."""
        a, n = self.alpha, self.n
        mag = math.exp(n * math.log(n / 2) + math.lgamma(a + 1) - math.lgamma(a + n + 1))
        return _MINUS_I_POW[n % 4] * mag

    @property
    def s_weight_exponent(self) -> float:
        """Exponent 2kn - n + 1 = 2 alpha + 1 of the weight after x = s^n."""
        return 2 * self.alpha + 1


@dataclass(frozen=True)
class KernelValue:
    value: complex
    even_part: complex
    odd_part: complex


def make_params(k, n) -> DeformParams:
    """Validate ``k >= (n-1)/(2n)`` for a positive integer ``n``."""
    if isinstance(n, bool) or int(n) != n or int(n) < 1:
        raise ParamError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    k = float(k)
    if not math.isfinite(k):
        raise ParamError(f"k must be finite, got {k!r}")
    kmin = (n - 1) / (2 * n)
    if k < kmin - 1e-12:
        raise ParamError(f"k = {k} below (n-1)/(2n) = {kmin} for n = {n}")
    return DeformParams(max(k, kmin), n)


def measure_density(params: DeformParams, x):
    """Density of the weighted measure with respect to dx."""
    x = np.asarray(x, dtype=float)
    if params.weight_exponent < 0 and np.any(x == 0):
        raise SingularPointError("measure density is singular at x = 0")
    out = params.measure_const * np.abs(x) ** params.weight_exponent
    return out[()] if out.ndim == 0 else out


def kernel_parts(params: DeformParams, x, lam):
    """Even and odd summands of the kernel, broadcast over ``x`` and ``lam``.

    The even part is real; the odd part is ``odd_const`` times a real array.
    """
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lam, dtype=float)
    prod = lam * x
    arg = params.n * np.abs(prod) ** (1.0 / params.n)
    even = bessel_normalized(params.alpha, arg)
    odd = params.odd_const * prod * bessel_normalized(params.alpha + params.n, arg)
    return even, odd


def kernel_b(params: DeformParams, x, lam) -> KernelValue:
    """Kernel B_{k,n}(x, lambda) with its even/odd split."""
    even, odd = kernel_parts(params, x, lam)
    even = even.astype(complex) if np.ndim(even) else complex(even)
    if np.ndim(odd) == 0:
        odd = complex(odd)
    return KernelValue(even + odd, even, odd)


def kernel_sup_estimate(params: DeformParams, grid=None) -> float:
    """Max of |B| over a grid of products x*lambda (a lower bound on sup |B|).

    The default grid is 2000 log-spaced values of |x lambda| in
    [1e-3, 1e3], both signs, clipped to the Bessel function's real range.
    """
    if grid is None:
        top = min(1e3, (REAL_RADIUS / params.n) ** params.n)
        mags = np.minimum(np.logspace(-3, math.log10(top), 2000), top)
        grid = np.concatenate([-mags[::-1], mags])
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise DomainError("empty scan grid")
    kv = kernel_b(params, np.ones_like(grid), grid)
    return float(np.max(np.abs(kv.value)))
