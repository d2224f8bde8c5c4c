"""Adaptive Gauss-Kronrod panel quadrature against the weighted measure.

All integrals over the line are taken in the substituted variable ``x = ±s^n``
where the measure becomes the smooth polynomial weight ``n s^(2 alpha + 1) ds``
and the kernel argument ``n |lambda x|^(1/n) = n |lambda|^(1/n) s`` is linear in ``s``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from .errors import ConvergenceError, DomainError, TruncationWarning

__all__ = [
    "QuadSpec",
    "GridFunction",
    "QuadResult",
    "PanelRule",
    "kronrod_rule",
    "adapt",
    "effective_radius",
    "guard_width",
    "integrate_halfline",
    "integrate_weighted",
]

_EPS = np.finfo(float).eps
PROVENANCES = ("analytic", "sampled", "transformed")


@dataclass(frozen=True)
class QuadSpec:
    """Truncation and tolerance settings for the quadrature engine.

    ``truncation_radius`` is measured in the substituted variable ``s``.
    ``panel_order`` is the number of Kronrod points per panel; the embedded
    Gauss rule has ``panel_order // 2`` points.
    """

    truncation_radius: float = 30.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    panel_order: int = 15

    def __post_init__(self):
        if not (self.truncation_radius > 0 and math.isfinite(self.truncation_radius)):
            raise DomainError("truncation_radius must be positive and finite")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.panel_order < 2:
            raise DomainError("panel_order must be >= 2")
        if self.max_subdivisions < 0:
            raise DomainError("max_subdivisions must be >= 0")


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function on strictly increasing points."""

    points: np.ndarray
    values: np.ndarray
    provenance: str = "sampled"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        vals = np.asarray(self.values, dtype=complex).ravel()
        if pts.shape != vals.shape:
            raise DomainError("points and values differ in length")
        if pts.size > 1 and not np.all(np.diff(pts) > 0):
            raise DomainError("points must be strictly increasing")
        if np.any(np.isnan(vals)) or np.any(np.isnan(pts)):
            raise DomainError("NaN in grid function")
        if self.provenance not in PROVENANCES:
            raise DomainError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, f, points, provenance="analytic"):
        pts = np.asarray(points, dtype=float)
        return cls(pts, np.asarray(f(pts), dtype=complex), provenance)

    def __len__(self):
        return self.points.size


@dataclass
class QuadResult:
    value: complex
    error: float
    converged: bool
    truncated: bool
    radius: float


@lru_cache(maxsize=None)
def kronrod_rule(order=15):
    """Kronrod nodes with Kronrod and embedded Gauss weights on [-1, 1].

    Returns ``(nodes, w_kronrod, w_gauss)``, each of length ``2m + 1`` with
    ``m = max(1, order // 2)``; ``w_gauss`` is zero at the Kronrod-only nodes.
    The Kronrod nodes are the zeros of the Stieltjes polynomial, found from
    its orthogonality conditions in the Legendre basis.
    """
    m = max(1, int(order) // 2)
    xg, wg = legendre.leggauss(m)
    xq, wq = legendre.leggauss(2 * m + 4)
    pm = legendre.legval(xq, np.eye(m + 2)[m])
    basis = np.array([legendre.legval(xq, np.eye(m + 2)[j]) for j in range(m + 2)])
    amat = np.einsum("q,iq,jq->ij", wq * pm, basis[: m + 1], basis[: m + 1])
    rhs = -np.einsum("q,iq->i", wq * pm * basis[m + 1], basis[: m + 1])
    coef = np.linalg.lstsq(amat, rhs, rcond=None)[0]
    stieltjes = np.concatenate([coef, [1.0]])
    xk = np.sort(np.real(legendre.legroots(stieltjes)))
    nodes = np.sort(np.concatenate([xg, xk]))
    vander = legendre.legvander(nodes, 2 * m).T
    moments = np.zeros(2 * m + 1)
    moments[0] = 2.0
    wk = np.linalg.solve(vander, moments)
    w_gauss = np.zeros_like(nodes)
    for x, w in zip(xg, wg):
        w_gauss[np.argmin(np.abs(nodes - x))] = w
    return nodes, wk, w_gauss


@dataclass
class PanelRule:
    """A fixed composite Kronrod rule on a set of contiguous panels."""

    left: np.ndarray
    right: np.ndarray
    order: int = 15
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    gauss_weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        x, wk, wg = kronrod_rule(self.order)
        half = 0.5 * (self.right - self.left)[:, None]
        mid = 0.5 * (self.right + self.left)[:, None]
        self.nodes = mid + half * x
        self.weights = half * wk
        self.gauss_weights = half * wg

    @property
    def npanels(self):
        return self.left.size

    @property
    def flat_nodes(self):
        return self.nodes.ravel()

    def integrate(self, values):
        """Integrate sampled values of shape ``(..., npanels * K)``.

        Returns ``(integral, error)``; the error is the summed per-panel
        Kronrod-Gauss difference.
        """
        v = np.asarray(values).reshape(values.shape[:-1] + self.nodes.shape)
        kron = np.sum(v * self.weights, axis=-1)
        gauss = np.sum(v * self.gauss_weights, axis=-1)
        return kron.sum(axis=-1), np.abs(kron - gauss).sum(axis=-1)


def guard_width(frequency):
    """Panel width cap resolving oscillations ``cos(frequency * s)``."""
    frequency = float(frequency)
    if frequency <= 0:
        return math.inf
    return math.pi / (4.0 * frequency)


def _as_2d(vals, npts):
    vals = np.asarray(vals)
    if vals.ndim == 1:
        vals = vals[None, :]
    if vals.shape[-1] != npts:
        raise DomainError("integrand returned the wrong number of values")
    return vals


def adapt(func, a, b, spec=None, max_width=None, edges=None):
    """Adaptive bisection on ``[a, b]`` for a vector-valued integrand.

    Parameters
    ----------
    func : callable
        ``func(s)`` maps a 1-D node array to an array of shape ``(m, len(s))``
        (or ``(len(s),)`` for a scalar integrand).
    max_width : float, optional
        Cap on the initial panel width (oscillation guard).
    edges : array_like, optional
        Initial partition; overrides ``max_width``.

    Returns
    -------
    rule : PanelRule
        The final panel tree.
    value, error : ndarray
        Integrals and summed error estimates, shape ``(m,)``.
    converged : bool
    """
    spec = spec or QuadSpec()
    order = spec.panel_order
    if edges is None:
        npan = 1
        if max_width is not None and math.isfinite(max_width) and max_width > 0:
            npan = max(1, int(math.ceil((b - a) / max_width)))
        edges = np.linspace(a, b, npan + 1)
    edges = np.asarray(edges, dtype=float)
    left, right = edges[:-1].copy(), edges[1:].copy()

    def evaluate(lft, rgt):
        rule = PanelRule(lft, rgt, order)
        vals = _as_2d(func(rule.flat_nodes), rule.flat_nodes.size)
        v = vals.reshape(vals.shape[:-1] + rule.nodes.shape)
        kron = np.sum(v * rule.weights, axis=-1)
        gauss = np.sum(v * rule.gauss_weights, axis=-1)
        scale = np.sum(np.abs(v) * rule.weights, axis=-1)
        # shapes (m, P) -> (P, m)
        return kron.T, np.abs(kron - gauss).T, 50 * _EPS * scale.T

    kron, err, noise = evaluate(left, right)
    done = np.all(err <= noise, axis=1)
    width_floor = 1e-13 * max(abs(b - a), 1e-300)
    bisections = 0
    converged = False
    while True:
        total = kron.sum(axis=0)
        tol = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))
        active_err = np.where(done[:, None], 0.0, err)
        if np.all(active_err.sum(axis=0) <= tol):
            converged = True
            break
        score = np.max(active_err / tol, axis=1)
        order_idx = np.argsort(-score, kind="stable")
        remaining = np.cumsum(score[order_idx][::-1])[::-1]
        # smallest prefix leaving at most half the tolerance in untouched panels
        nsel = int(np.searchsorted(-remaining, -0.5, side="left"))
        nsel = max(1, min(nsel, int(np.count_nonzero(score > 0))))
        sel = order_idx[:nsel]
        sel = sel[(right[sel] - left[sel]) > width_floor]
        if sel.size == 0:
            break
        if bisections + sel.size > spec.max_subdivisions:
            break
        bisections += sel.size
        mid = 0.5 * (left[sel] + right[sel])
        new_left = np.concatenate([left[sel], mid])
        new_right = np.concatenate([mid, right[sel]])
        k2, e2, n2 = evaluate(new_left, new_right)
        keep = np.ones(left.size, dtype=bool)
        keep[sel] = False
        left = np.concatenate([left[keep], new_left])
        right = np.concatenate([right[keep], new_right])
        kron = np.concatenate([kron[keep], k2])
        err = np.concatenate([err[keep], e2])
        done = np.concatenate([done[keep], np.all(e2 <= n2, axis=1)])
    perm = np.argsort(left, kind="stable")
    rule = PanelRule(left[perm], right[perm], order)
    return rule, kron.sum(axis=0), err.sum(axis=0), converged


def effective_radius(mag, radius, spec=None, npts=128):
    """Shrink ``[0, radius]`` to where the integrand magnitude is non-negligible.

    ``mag(s)`` bounds the integrand magnitude. Returns ``(r_eff, tail)``
    where ``tail`` is the magnitude at the truncation radius when it exceeds
    tolerance, else 0.
    """
    spec = spec or QuadSpec()
    s = np.linspace(0.0, radius, npts + 1)[1:]
    m = np.asarray(mag(s), dtype=float)
    if m.ndim > 1:
        m = m.max(axis=0)
    m = np.where(np.isfinite(m), m, np.inf)
    peak = float(np.max(m)) if m.size else 0.0
    if peak == 0.0:
        return float(s[0]), 0.0
    # trim where the magnitude is well below tolerance, but only report a
    # tail that is above tolerance itself
    tol = max(spec.abs_tol, spec.rel_tol * peak)
    above = np.flatnonzero(m > 1e-3 * tol)
    last = int(above[-1])
    tail = float(m[-1]) if m[-1] > tol else 0.0
    return float(s[min(last + 2, npts - 1)]), tail


def _warn_tail(tail, radius):
    if tail > 0:
        warnings.warn(
            f"integrand magnitude {tail:.3g} at truncation radius {radius:g} exceeds tolerance",
            TruncationWarning,
            stacklevel=3,
        )


def integrate_halfline(f, weight_exponent, spec=None, full_output=False):
    """``int_0^inf f(s) s^weight_exponent ds``, truncated at ``spec.truncation_radius``.

    Emits :class:`TruncationWarning` when ``f`` has not decayed at the
    truncation radius; raises :class:`ConvergenceError` when the subdivision
    cap is reached.
    """
    spec = spec or QuadSpec()
    w = float(weight_exponent)

    def integrand(s):
        return np.asarray(f(s)) * s**w

    radius, tail = effective_radius(lambda s: np.abs(integrand(s)), spec.truncation_radius, spec)
    _warn_tail(tail, spec.truncation_radius)
    _, val, err, ok = adapt(integrand, 0.0, radius, spec)
    if not ok:
        raise ConvergenceError(f"subdivision cap reached (error estimate {err[0]:.3g})")
    value = val[0].item()
    if full_output:
        return value, QuadResult(complex(val[0]), float(err[0]), ok, tail > 0, radius)
    return value


def integrate_weighted(f, params, spec=None, frequency=0.0, full_output=False):
    """``int_R f(x) dmu_{k,n}(x)`` in the substituted variable ``x = ±s^n``.

    ``frequency`` (oscillation of the integrand in ``s``) caps the initial
    panel width at ``pi / (4 frequency)``.
    """
    spec = spec or QuadSpec()
    n = params.n
    w = params.s_weight_exponent
    const = params.measure_const * n

    def integrand(s):
        x = s**n
        return (np.asarray(f(x)) + np.asarray(f(-x))) * s**w

    def bound(s):
        x = s**n
        return (np.abs(f(x)) + np.abs(f(-x))) * s**w

    radius, tail = effective_radius(bound, spec.truncation_radius, spec)
    _warn_tail(tail, spec.truncation_radius)
    _, val, err, ok = adapt(integrand, 0.0, radius, spec, max_width=guard_width(frequency))
    if not ok:
        raise ConvergenceError(f"subdivision cap reached (error estimate {err[0]:.3g})")
    value = (const * val[0]).item()
    if full_output:
        return value, QuadResult(complex(value), float(const * err[0]), ok, tail > 0, radius)
    return value
