"""Deformed-Gaussian decay envelopes and uncertainty-principle audits.

An envelope is a bound ``|f(x)| <= C exp(-n a |x|^(2/n))`` measured from
samples. :func:`audit` fits one to ``f`` and one to its transform and compares
the rate product against the sharp threshold 1/4.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linprog

from .errors import (
    DegenerateInput,
    FitError,
    KnFourierError,
    ParamError,
    TruncationWarning,
)
from .functions import counterexample_family
from .kernel import DeformParams
from .quadrature import GridFunction, QuadSpec, integrate_weighted
from .transform import Transformer, forward

__all__ = [
    "DecayEnvelope",
    "Verdict",
    "AuditReport",
    "audit_grid",
    "fit_envelope",
    "hardy_classify",
    "classify_against",
    "miyachi_functional",
    "cowling_price_norms",
    "counterexample_family",
    "audit",
]

THRESHOLD = 0.25
DEFAULT_TOL = 0.02
FLOOR_RATIO = 1e-12
MIN_SAMPLES = 8
LOG_DEAD_ZONE = 1e-10  # log+ arguments this close to 0 are roundoff
TAIL_SCAN = 256  # scan points used to detect a live tail


@dataclass(frozen=True)
class DecayEnvelope:
    rate: float
    constant: float
    residual: float
    n: int

    def bound(self, x):
        x = np.asarray(x, dtype=float)
        return self.constant * np.exp(-self.n * self.rate * np.abs(x) ** (2.0 / self.n))


class Verdict(str, enum.Enum):
    ZERO = "Zero"
    GAUSSIAN_ONLY = "GaussianOnly"
    UNDERDETERMINED = "Underdetermined"


@dataclass
class AuditReport:
    envelope_f: DecayEnvelope | None
    envelope_Ff: DecayEnvelope | None
    product: float | None
    verdict: Verdict | None
    margin: float | None
    miyachi: float | None = None
    cowling_price: tuple | None = None
    errors: list = field(default_factory=list)
    against: dict | None = None

    def to_dict(self):
        def env(e):
            if e is None:
                return None
            return {"rate": e.rate, "constant": e.constant, "residual": e.residual}

        def num(v):
            return "infinite" if v is not None and math.isinf(v) else v

        cp = None
        if self.cowling_price is not None:
            cp = {"p_norm": num(self.cowling_price[0]), "q_norm": num(self.cowling_price[1])}
        return {
            "envelope_f": env(self.envelope_f),
            "envelope_Ff": env(self.envelope_Ff),
            "product": self.product,
            "verdict": None if self.verdict is None else self.verdict.value,
            "margin": self.margin,
            "miyachi": num(self.miyachi),
            "cowling_price": cp,
            "against": None if self.against is None else dict(self.against),
            "errors": list(self.errors),
        }


def audit_grid(n, lo=0.25, hi=25.0, per_sign=64):
    """Geometric grid on ``lo <= |x| <= hi^n``, both signs.

    The upper end scales with ``n`` so that the window reaches the same
    ``|x|^(2/n)`` for every ``n``.
    """
    mags = np.geomspace(lo, hi**n, per_sign)
    return np.concatenate([-mags[::-1], mags])


def _upper_hull(t, y):
    """Indices of the upper concave hull of points sorted by ``t``."""
    hull = []
    for i in range(t.size):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            # drop i1 if it lies on or below the chord i0 -> i
            cross = (t[i1] - t[i0]) * (y[i] - y[i0]) - (y[i1] - y[i0]) * (t[i] - t[i0])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(hull)


def fit_envelope(samples: GridFunction, n, floor=None) -> DecayEnvelope:
    """Tight bound ``C exp(-n a |x|^(2/n))`` over the samples of ``|f|``.

    The rate comes from a Chebyshev (minimax) line fit of ``log|f|`` against
    ``|x|^(2/n)`` over the upper hull of the super-floor samples, ties broken
    towards the larger rate. The constant is then raised until the bound holds
    at every super-floor sample. ``floor`` defaults to ``1e-12 max|f|``.
    """
    x = np.asarray(samples.points, dtype=float)
    mag = np.abs(np.asarray(samples.values))
    peak = float(np.max(mag)) if mag.size else 0.0
    if not peak > 0 or not math.isfinite(peak):
        raise FitError("all samples are zero")
    if floor is None:
        floor = FLOOR_RATIO * peak
    keep = mag > floor
    if not np.any(keep):
        raise FitError("all mass is below the floor")
    if np.count_nonzero(keep) < MIN_SAMPLES:
        raise DegenerateInput(f"only {np.count_nonzero(keep)} samples above the floor, need {MIN_SAMPLES}")
    if not np.any(np.abs(x[keep]) >= 1):
        raise DegenerateInput("no super-floor sample with |x| >= 1")
    t = np.abs(x[keep]) ** (2.0 / n)
    # work relative to the peak so that rescaling f leaves the program unchanged
    y = np.log(mag[keep] / peak)
    # merge mirrored points: keep the larger magnitude at each |x|
    order = np.lexsort((-y, t))
    t, y = t[order], y[order]
    first = np.concatenate([[True], np.diff(t) > 0])
    th, yh = t[first], y[first]
    hull = _upper_hull(th, yh)
    th, yh = th[hull], yh[hull]

    if th.size == 1:
        raise DegenerateInput("envelope is determined by a single point")
    # variables (beta, a, e): |y_i - beta + n a t_i| <= e, a >= 0
    a_ub = np.concatenate(
        [
            np.column_stack([-np.ones_like(th), n * th, -np.ones_like(th)]),
            np.column_stack([np.ones_like(th), -n * th, -np.ones_like(th)]),
        ]
    )
    b_ub = np.concatenate([-yh, yh])
    bounds = [(None, None), (0, None), (0, None)]
    first_pass = linprog([0, 0, 1], A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not first_pass.success:
        raise FitError(f"envelope program failed: {first_pass.message}")
    e_star = first_pass.x[2]
    bounds[2] = (0, e_star * (1 + 1e-9) + 1e-12)
    second = linprog([0, -1, 0], A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    beta, rate = (second.x[0], second.x[1]) if second.success else first_pass.x[:2]
    # a total decay across the window below roundoff is no decay
    if not n * rate * float(np.max(t)) > 1e-9:
        raise FitError("samples show no decay")
    # lift so that the bound holds at every kept sample
    beta = beta + max(0.0, float(np.max(y + n * rate * t - beta)))
    residual = float(max(0.0, np.max(y + n * rate * t - beta)))
    return DecayEnvelope(float(rate), peak * float(math.exp(beta)), residual, int(n))


def hardy_classify(env_f: DecayEnvelope, env_Ff: DecayEnvelope, tol=DEFAULT_TOL) -> Verdict:
    """Place the rate product against 1/4 with tolerance ``tol``."""
    if env_f.n != env_Ff.n:
        raise ParamError(f"envelopes for different n ({env_f.n} vs {env_Ff.n})")
    product = env_f.rate * env_Ff.rate
    if product > THRESHOLD + tol:
        return Verdict.ZERO
    if product < THRESHOLD - tol:
        return Verdict.UNDERDETERMINED
    return Verdict.GAUSSIAN_ONLY


def classify_against(env_f: DecayEnvelope, env_Ff: DecayEnvelope, a, b, tol=DEFAULT_TOL):
    """Check the decay conditions for a given pair ``(a, b)`` and classify it.

    A fitted envelope of rate ``r >= a`` implies a bound of rate ``a`` with the
    same constant, so the conditions hold when both fitted rates reach the
    targets (up to relative ``tol``). The verdict is that of the product ``ab``.
    Returns ``{"a", "b", "conditions_hold", "verdict"}``.
    """
    a, b = float(a), float(b)
    if not (a > 0 and b > 0):
        raise ParamError("a and b must be positive")
    target_f = DecayEnvelope(a, env_f.constant, 0.0, env_f.n)
    target_Ff = DecayEnvelope(b, env_Ff.constant, 0.0, env_Ff.n)
    verdict = hardy_classify(target_f, target_Ff, tol)
    holds = bool(env_f.rate >= a * (1 - tol) and env_Ff.rate >= b * (1 - tol))
    return {"a": a, "b": b, "conditions_hold": holds, "verdict": verdict.value}


def _log_abs(values, noise=0.0):
    mag = np.abs(values)
    with np.errstate(divide="ignore"):
        return np.where(mag > noise, np.log(np.where(mag > 0, mag, 1.0)), -np.inf)


def _log_magnitude(f):
    """``x -> (log|f(x)|, uncertainty of that log)``.

    Exact when ``f`` has ``log_abs``. Otherwise values below ``f.noise`` are
    treated as zero and the log carries a relative uncertainty of
    ``noise / |f|``.
    """
    exact = getattr(f, "log_abs", None)
    if exact is not None:
        return lambda x: (exact(x), 0.0)
    noise = float(getattr(f, "noise", 0.0))

    def logmag(x):
        mag = np.abs(f(x))
        with np.errstate(divide="ignore"):
            unc = np.where(mag > noise, noise / np.where(mag > 0, mag, 1.0), np.inf)
        return _log_abs(mag, noise), unc

    return logmag


def _live_radius(logmag, params, spec, npts=128):
    """Scan for where ``logmag`` turns ``-inf`` for good on both half-lines.

    Returns ``(radius, edge)``: the integration radius (in s) and the last
    scan point with a finite value (``None`` if the values stay finite up to
    the truncation radius).
    """
    radius = spec.truncation_radius
    s = np.linspace(0.0, radius, npts + 1)[1:]
    x = s**params.n
    alive = np.isfinite(logmag(x)[0]) | np.isfinite(logmag(-x)[0])
    if not np.any(alive):
        return 0.0, None
    last = int(np.flatnonzero(alive)[-1])
    if last + 2 >= npts - 1:
        return radius, None
    return float(s[last + 2]), float(s[last])


def _weighted_or_infinite(integrand, params, spec, live=None, threshold=0.0):
    """Weighted integral, or ``math.inf`` when the integrand has not died out.

    ``live`` is the output of :func:`_live_radius`. If the data went to zero
    at ``edge`` while the integrand there still exceeds ``threshold``, the
    decay is not resolved and the result is ``math.inf``.
    """
    if live is not None:
        radius, edge = live
        if radius == 0.0:
            return 0.0
        if edge is not None:
            xe = np.array([edge**params.n, -(edge**params.n)])
            if np.max(np.abs(integrand(xe))) > threshold:
                return math.inf
        spec = replace(spec, truncation_radius=radius)
    # cheap tail scan first: a live tail means divergence, and adaptive
    # quadrature on a growing integrand only burns the subdivision budget
    radius = spec.truncation_radius
    s = np.linspace(0.0, radius, TAIL_SCAN + 1)[1:]
    xs = s**params.n
    tail = np.abs(integrand(xs[-TAIL_SCAN // 16 :])) + np.abs(integrand(-xs[-TAIL_SCAN // 16 :]))
    if np.max(tail) > threshold:
        return math.inf
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        value, info = integrate_weighted(integrand, params, spec, full_output=True)
    if info.truncated or any(issubclass(w.category, TruncationWarning) for w in caught):
        return math.inf
    return float(np.real(value))


def miyachi_functional(params: DeformParams, Ff, b, C, spec=None):
    """``int log+(exp(n b |x|^(2/n)) |Ff(x)| / C) dmu``, or ``math.inf``.

    Evaluated in log space; a log+ argument within 1e-10 of zero counts as
    zero. For sampled transforms the argument is reduced by its roundoff
    uncertainty ``noise / |Ff|``, values below ``noise`` count as zero, and
    the integral stops where ``Ff`` is numerically zero for good. Returns
    ``math.inf`` when the integrand has not died out at the truncation radius.
    """
    if not (b > 0 and C > 0):
        raise ParamError("b and C must be positive")
    spec = spec or QuadSpec()
    n = params.n
    log_c = math.log(C)
    logmag = _log_magnitude(Ff)

    def integrand(x):
        x = np.asarray(x, dtype=float)
        lm, unc = logmag(x)
        # only the part of the argument that exceeds its own uncertainty counts
        arg = n * b * np.abs(x) ** (2.0 / n) + lm - log_c - unc
        return np.where(arg > LOG_DEAD_ZONE, arg, 0.0)

    return _weighted_or_infinite(integrand, params, spec, _live_radius(logmag, params, spec), LOG_DEAD_ZONE)


def _weighted_norm(params, f, rate, p, spec):
    n = params.n
    logmag = _log_magnitude(f)

    def log_g(x):
        x = np.asarray(x, dtype=float)
        return n * rate * np.abs(x) ** (2.0 / n) + logmag(x)[0]

    if math.isinf(p):
        s = np.linspace(0.0, spec.truncation_radius, 2001)
        lg = np.maximum(log_g(s**n), log_g(-(s**n)))
        top = int(np.argmax(lg))
        if top == lg.size - 1 and lg[-1] > lg[-2] + 1e-12:
            return math.inf
        return float(np.exp(lg[top]))
    def integrand(x):
        return np.exp(p * log_g(x))

    live = _live_radius(logmag, params, spec)
    top = live[1] if live[1] is not None else live[0]
    s = np.linspace(0.0, top, 129)[1:]
    peak = float(np.max(integrand(s**n) + integrand(-(s**n)))) if top > 0 else 0.0
    threshold = max(spec.abs_tol, spec.rel_tol * peak)
    value = _weighted_or_infinite(integrand, params, spec, live, threshold)
    return value if math.isinf(value) else value ** (1.0 / p)


def cowling_price_norms(params: DeformParams, f, Ff, a, b, p, q, spec=None):
    """Weighted norms ``||exp(n a |x|^(2/n)) f||_p`` and ``||exp(n b |x|^(2/n)) Ff||_q``.

    Either entry may be ``math.inf``. ``p = q = inf`` is rejected.
    """
    p, q = float(p), float(q)
    if math.isinf(p) and math.isinf(q):
        raise ParamError("need min(p, q) finite")
    if not (p >= 1 and q >= 1):
        raise ParamError("exponents must be >= 1")
    if not (a > 0 and b > 0):
        raise ParamError("a and b must be positive")
    spec = spec or QuadSpec()
    return _weighted_norm(params, f, a, p, spec), _weighted_norm(params, Ff, b, q, spec)


def audit(
    params: DeformParams,
    f,
    spec=None,
    *,
    tol=DEFAULT_TOL,
    grid=None,
    miyachi=True,
    cowling_price=True,
    p=2.0,
    q=2.0,
    against=None,
) -> AuditReport:
    """Fit envelopes to ``f`` and ``F f`` and classify the pair.

    Component failures are recorded in ``errors`` instead of raising. The
    Cowling-Price norms use half the fitted rates so that they are finite for
    the extremal Gaussians. ``against=(a, b)`` also checks the decay
    conditions for that pair (see :func:`classify_against`).
    """
    spec = spec or QuadSpec()
    grid = audit_grid(params.n) if grid is None else np.asarray(grid, dtype=float)
    report = AuditReport(None, None, None, None, None)
    try:
        report.envelope_f = fit_envelope(GridFunction(grid, f(grid), "analytic"), params.n)
    except KnFourierError as exc:
        report.errors.append(f"envelope_f: {exc}")
    try:
        res = forward(params, f, grid, spec)
        vals = np.where(np.abs(res.grid.values) > 10 * res.errors, res.grid.values, 0.0)
        report.envelope_Ff = fit_envelope(GridFunction(res.grid.points, vals, "transformed"), params.n)
    except KnFourierError as exc:
        report.errors.append(f"envelope_Ff: {exc}")
    if report.envelope_f is None or report.envelope_Ff is None:
        return report
    ef, eF = report.envelope_f, report.envelope_Ff
    report.product = ef.rate * eF.rate
    report.verdict = hardy_classify(ef, eF, tol)
    report.margin = abs(report.product - THRESHOLD)
    if against is not None:
        try:
            report.against = classify_against(ef, eF, *against, tol=tol)
        except KnFourierError as exc:
            report.errors.append(f"against: {exc}")
    if miyachi or cowling_price:
        tr = Transformer(params, f, spec)
        try:
            if miyachi:
                report.miyachi = miyachi_functional(params, tr, eF.rate, eF.constant, spec)
            if cowling_price:
                report.cowling_price = cowling_price_norms(params, f, tr, ef.rate / 2, eF.rate / 2, p, q, spec)
        except KnFourierError as exc:
            report.errors.append(f"functionals: {exc}")
    return report
