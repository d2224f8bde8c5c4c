"""The (k, 2/n)-generalized Fourier transform, its inverse and its even/odd deformations.

Every integral is evaluated after the substitution ``x = ±s^n``:

    F f(lam) = c n int_0^inf s^(2a+1) [ (f(s^n) + f(-s^n)) j_a(n |lam|^(1/n) s)
               + K lam s^n (f(s^n) - f(-s^n)) j_{a+n}(n |lam|^(1/n) s) ] ds

with ``c`` the measure constant and ``K`` the odd-part constant of the kernel.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, DomainError, TruncationWarning
from .kernel import DeformParams
from .quadrature import (
    GridFunction,
    QuadSpec,
    adapt,
    effective_radius,
    guard_width,
    integrate_weighted,
)
from .specfun import COMPLEX_RADIUS, bessel_normalized

__all__ = [
    "TransformResult",
    "Transformer",
    "forward",
    "evaluate_checked",
    "inverse",
    "t1",
    "t2",
    "plancherel_defect",
    "GrowthReport",
    "growth_bound_check",
]

MAX_IMAG = 2.0
_CHUNK = 2_000_000  # kernel matrix entries per evaluation block
_MAX_PROBES = 48


@dataclass
class TransformResult:
    grid: GridFunction
    errors: np.ndarray
    params: DeformParams
    flagged: np.ndarray

    @property
    def ok(self):
        return not bool(np.any(self.flagged))


class _NodeCache:
    """Memo of ``fn(s) -> (even, odd)`` keyed by exact node value."""

    def __init__(self, fn):
        self.fn = fn
        self.keys = np.empty(0)
        self.even = np.empty(0, dtype=complex)
        self.odd = np.empty(0, dtype=complex)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        idx = np.searchsorted(self.keys, s)
        clip = np.minimum(idx, max(self.keys.size - 1, 0))
        hit = (idx < self.keys.size) & (self.keys[clip] == s) if self.keys.size else np.zeros(s.shape, bool)
        if not np.all(hit):
            new = np.unique(s[~hit])
            e, o = self.fn(new)
            keys = np.concatenate([self.keys, new])
            perm = np.argsort(keys, kind="stable")
            self.keys = keys[perm]
            self.even = np.concatenate([self.even, e.astype(complex)])[perm]
            self.odd = np.concatenate([self.odd, o.astype(complex)])[perm]
            idx = np.searchsorted(self.keys, s)
        return self.even[idx], self.odd[idx]


def _band_index(sigma):
    """Octave bands of ``sigma = |lam|^(1/n)``: band 0 is ``[0, 1]``, band j is ``(2^(j-1), 2^j]``."""
    sigma = np.asarray(sigma, dtype=float)
    j = np.ceil(np.log2(np.maximum(sigma, 1.0)))
    return j.astype(int)


class Transformer:
    """``F_{k,n} f`` as a reusable callable of ``lam``.

    Samples of ``f`` are cached by node. Each octave band of
    ``|lam|^(1/n)`` gets its own adaptive panel rule, built on first use
    with initial panels capped by the oscillation guard at the band's top
    frequency, so low frequencies stay cheap. Instances can be fed back into
    :func:`forward` / :func:`inverse` as evaluables.
    """

    def __init__(self, params, f, spec=None, lambdas=None):
        self.params = params
        self.spec = spec = spec or QuadSpec()
        n = params.n
        self._f = f
        w = params.s_weight_exponent

        # values below the input's own roundoff level carry no mass
        floor = float(getattr(f, "noise", 0.0))

        def bound(s):
            x = s**n
            mag = np.maximum(np.abs(f(x)) - floor, 0) + np.maximum(np.abs(f(-x)) - floor, 0)
            return mag * s**w

        self.radius, self.tail = effective_radius(bound, spec.truncation_radius, spec)
        self._samples = _NodeCache(self._sample)
        self._bands = {}
        self._build(0)
        rule = self._bands[0]
        even, odd = self._samples(rule.flat_nodes)
        l1 = rule.integrate(np.abs(even) + np.abs(odd) / np.maximum(rule.flat_nodes, 1e-300) ** n)[0]
        #: weighted L1 mass of the input, a bound on |F f| up to the kernel sup
        self.l1 = float(abs(l1))
        #: bound on the absolute roundoff in any value of the transform
        self.noise = 256 * np.finfo(float).eps * self.l1
        if lambdas is not None:
            self._warm(np.asarray(lambdas, dtype=float))

    def _sample(self, s):
        x = s**self.params.n
        fp = np.asarray(self._f(x))
        fm = np.asarray(self._f(-x))
        weight = self.params.measure_const * self.params.n * s**self.params.s_weight_exponent
        return (fp + fm) * weight, (fp - fm) * x * weight

    def _kernel_sum(self, lams, s, even, odd):
        """Matrix ``(len(lams), len(s))`` of integrand values."""
        p = self.params
        lams = np.asarray(lams, dtype=float)
        arg = p.n * np.abs(lams)[:, None] ** (1.0 / p.n) * s[None, :]
        out = np.zeros((lams.size, s.size))
        if np.any(even != 0):
            out = out + bessel_normalized(p.alpha, arg, np.inf) * even[None, :]
        if np.any(odd != 0):
            out = out + (p.odd_const * lams[:, None]) * bessel_normalized(p.alpha + p.n, arg, np.inf) * odd[None, :]
        return out

    def _integrand(self, lams, s):
        even, odd = self._samples(s)
        return self._kernel_sum(lams, s, even, odd)

    def _band_probes(self, j, extra=()):
        lo = 0.0 if j == 0 else 2.0 ** (j - 1)
        sig = np.linspace(lo, 2.0**j, 9) ** self.params.n
        extra = np.unique(np.abs(np.asarray(extra, dtype=float)))
        if extra.size > _MAX_PROBES:
            extra = extra[np.linspace(0, extra.size - 1, _MAX_PROBES).round().astype(int)]
        lam = np.unique(np.concatenate([sig, extra]))
        return np.concatenate([lam, -lam[lam > 0]])

    def _build(self, j, extra=(), edges=None):
        probes = self._band_probes(j, extra)
        freq = self.params.n * 2.0**j
        rule, *_ = adapt(
            lambda s: self._integrand(probes, s),
            0.0,
            self.radius,
            self.spec,
            max_width=guard_width(freq),
            edges=edges,
        )
        self._bands[j] = rule

    def _warm(self, lambdas):
        bands = _band_index(np.abs(lambdas) ** (1.0 / self.params.n))
        for j in np.unique(bands):
            if j not in self._bands:
                self._build(int(j), lambdas[bands == j])

    def refine(self, lambdas):
        """Continue adapting the affected bands so ``lambdas`` also meet tolerance."""
        lambdas = np.asarray(lambdas, dtype=float)
        bands = _band_index(np.abs(lambdas) ** (1.0 / self.params.n))
        for j in np.unique(bands):
            j = int(j)
            rule = self._bands.get(j)
            if rule is None:
                self._build(j, lambdas[bands == j])
                continue
            edges = np.concatenate([rule.left, rule.right[-1:]])
            lam = lambdas[bands == j]
            new, *_ = adapt(lambda s: self._integrand(lam, s), 0.0, self.radius, self.spec, edges=edges)
            self._bands[j] = new

    def evaluate(self, lambdas):
        """Transform values and error estimates at ``lambdas`` (any shape)."""
        lambdas = np.asarray(lambdas, dtype=float)
        shape = lambdas.shape
        lams = lambdas.ravel()
        values = np.zeros(lams.size, dtype=complex)
        errors = np.zeros(lams.size)
        bands = _band_index(np.abs(lams) ** (1.0 / self.params.n))
        for j in np.unique(bands):
            j = int(j)
            if j not in self._bands:
                self._build(j)
            rule = self._bands[j]
            s = rule.flat_nodes
            even, odd = self._samples(s)
            idx = np.flatnonzero(bands == j)
            step = max(1, _CHUNK // max(s.size, 1))
            for i in range(0, idx.size, step):
                part = idx[i : i + step]
                v, e = rule.integrate(self._kernel_sum(lams[part], s, even, odd))
                values[part] = v
                errors[part] = e
        return values.reshape(shape), errors.reshape(shape)

    def tolerance(self, values):
        return np.maximum(self.spec.abs_tol, self.spec.rel_tol * np.abs(values))

    def __call__(self, lambdas):
        return self.evaluate(lambdas)[0]


def _result(params, points, values, errors, tol, provenance="transformed"):
    flagged = errors > tol
    return TransformResult(GridFunction(points, values, provenance), errors, params, flagged)


def forward(params, f, lambdas, spec=None) -> TransformResult:
    """``F_{k,n} f`` at the (sorted, de-duplicated) points ``lambdas``.

    Points whose error estimate exceeds tolerance are flagged in the result
    rather than raising.
    """
    spec = spec or QuadSpec()
    lambdas = np.unique(np.asarray(lambdas, dtype=float).ravel())
    if lambdas.size == 0:
        raise DomainError("empty lambda list")
    if not np.all(np.isfinite(lambdas)):
        raise DomainError("non-finite lambda")
    tr = Transformer(params, f, spec, lambdas=lambdas)
    values, errors = evaluate_checked(tr, lambdas)
    return _result(params, lambdas, values, errors, tr.tolerance(values))


def evaluate_checked(tr, lambdas):
    """Evaluate a :class:`Transformer`, refine once where the error is too
    large, and fold the truncation tail into the error estimates."""
    values, errors = tr.evaluate(lambdas)
    bad = errors > tr.tolerance(values)
    if np.any(bad):
        tr.refine(lambdas[bad])
        values, errors = tr.evaluate(lambdas)
    if tr.tail > 0:
        warnings.warn(
            f"input magnitude {tr.tail:.3g} at truncation radius {tr.spec.truncation_radius:g} exceeds tolerance",
            TruncationWarning,
            stacklevel=2,
        )
        errors = np.maximum(errors, tr.tail)
    return values, errors


def inverse(params, g, xs, spec=None) -> TransformResult:
    """Inverse transform, ``F^{-1} g(x) = F g((-1)^n x)``."""
    xs = np.unique(np.asarray(xs, dtype=float).ravel())
    if xs.size == 0:
        raise DomainError("empty point list")
    sign = -1.0 if params.n % 2 else 1.0
    res = forward(params, g, sign * xs, spec)
    if sign < 0:
        return TransformResult(
            GridFunction(xs, res.grid.values[::-1], "transformed"),
            res.errors[::-1],
            params,
            res.flagged[::-1],
        )
    return res


def _check_z(z):
    z = np.asarray(z, dtype=complex).ravel()
    if np.any(np.abs(z.imag) > MAX_IMAG):
        raise DomainError(f"|Im z| > {MAX_IMAG}")
    return z


def _deformation(params, f, z, spec, odd):
    spec = spec or QuadSpec()
    z = _check_z(z)
    n = params.n
    w = params.s_weight_exponent
    ymax = float(np.max(np.abs(z.imag), initial=0.0))

    def parts(s):
        x = s**n
        fp = np.asarray(f(x))
        fm = np.asarray(f(-x))
        weight = params.measure_const * n * s**w
        return ((fp - fm) * x if odd else (fp + fm)) * weight

    def bound(s):
        return np.abs(parts(s)) * np.exp(n * ymax * s)

    radius, _ = effective_radius(bound, spec.truncation_radius, spec)
    zmax = float(np.max(np.abs(z), initial=0.0))
    if np.iscomplexobj(z) and np.any(z.imag != 0) and n * zmax * radius > COMPLEX_RADIUS:
        raise DomainError(
            f"complex Bessel argument up to {n * zmax * radius:.3g} exceeds radius {COMPLEX_RADIUS}"
        )
    order = params.alpha + (n if odd else 0)
    is_complex = bool(np.any(z.imag != 0))

    def integrand(s):
        arg = n * (z if is_complex else z.real)[:, None] * s[None, :]
        return bessel_normalized(order, arg, np.inf) * parts(s)[None, :]

    freq = n * float(np.max(np.abs(z.real), initial=0.0))
    _, val, _, _ = adapt(integrand, 0.0, radius, spec, max_width=guard_width(freq))
    if odd:
        val = params.odd_const * z**n * val
    return val.astype(complex)


def t1(params, f, z, spec=None):
    """Even-part deformation: ``int f_e(u) j_a(n z |u|^(1/n)) dmu(u)``, entire in ``z``."""
    return _deformation(params, f, z, spec, odd=False)


def t2(params, f, z, spec=None):
    """Odd-part deformation with the ``z^n j_{a+n}`` factor, entire in ``z``."""
    return _deformation(params, f, z, spec, odd=True)


def plancherel_defect(params, f, spec=None):
    """Relative mismatch ``| ||Ff|| - ||f|| | / ||f||`` of weighted L2 norms."""
    spec = spec or QuadSpec()
    norm_f = math.sqrt(abs(integrate_weighted(lambda x: np.abs(f(x)) ** 2, params, spec)))
    if norm_f <= spec.abs_tol:
        raise DegenerateInput("f has zero norm")
    tr = Transformer(params, f, spec)
    norm_ff = math.sqrt(abs(integrate_weighted(lambda lam: np.abs(tr(lam)) ** 2, params, spec)))
    return abs(norm_ff - norm_f) / norm_f


@dataclass
class GrowthReport:
    z: np.ndarray
    ratios: np.ndarray
    max_ratio: float


def growth_bound_check(params, f, rate, z, spec=None, which="t1"):
    """Ratios ``|T f(z)| / exp(n Im(z)^2 / (4 rate))`` for an envelope rate of ``f``."""
    if rate <= 0:
        raise DomainError("rate must be positive")
    z = _check_z(z)
    op = {"t1": t1, "t2": t2}[which]
    vals = op(params, f, z, spec)
    ratios = np.abs(vals) * np.exp(-params.n * z.imag**2 / (4 * rate))
    return GrowthReport(z, ratios, float(np.max(ratios)))
