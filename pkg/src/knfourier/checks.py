"""The identity suite behind ``knfourier check`` and the acceptance tests.

Each check returns a :class:`CheckResult` holding the measured worst-case
value and its threshold. Nothing here raises for a failed identity; callers
decide what a failure means.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import KnFourierError, TruncationWarning
from .functions import DeformedGaussian, test_basket
from .heat import symbol_defect
from .quadrature import QuadSpec
from .specfun import (
    bessel_normalized,
    bessel_poisson_oracle,
    gegenbauer_poisson_oracle,
)
from .transform import Transformer, forward, inverse, plancherel_defect, t1, t2

__all__ = [
    "CheckResult",
    "SPECTRAL_RATES",
    "POISSON_ORDERS",
    "spectral_lambdas",
    "check_plancherel",
    "check_roundtrip",
    "check_split",
    "check_spectral",
    "check_poisson",
    "poisson_table",
    "check_symbol",
    "run_checks",
]

SPECTRAL_RATES = (0.3, 0.5, 1.0)
POISSON_ORDERS = (-0.4, 0.0, 0.5, 1.5)
POISSON_ARGS = np.linspace(0.0, 50.0, 101)
POISSON_DEGREES = (1, 2, 3)
# the exact transform is compared where it is at least this fraction of its peak
SPECTRAL_DYNAMIC_RANGE = 1e-6
ROUNDTRIP_POINTS = np.concatenate([-np.geomspace(0.05, 4, 12)[::-1], [0.0], np.geomspace(0.05, 4, 12)])
SPLIT_POINTS = np.linspace(0.0, 3.0, 13)
SYMBOL_LAMBDAS = np.linspace(-4.0, 4.0, 17)

THRESHOLDS = {
    "plancherel": 1e-5,
    "roundtrip": 1e-5,
    "split": 1e-8,
    "spectral": 1e-6,
    "poisson": 1e-8,
    "symbol": 1e-5,
}


@dataclass
class CheckResult:
    name: str
    value: float | None
    threshold: float
    passed: bool | None
    detail: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    error: str | None = None

    def to_dict(self):
        return {
            "name": self.name,
            "value": self.value,
            "threshold": self.threshold,
            "passed": self.passed,
            "detail": self.detail,
            "warnings": list(self.warnings),
            "error": self.error,
        }


def _worst(name, per_item, threshold):
    value = max(per_item.values()) if per_item else None
    passed = None if value is None else bool(value <= threshold)
    return CheckResult(name, value, threshold, passed, dict(per_item))


def check_plancherel(params, spec=None):
    """Relative Plancherel defect over the test basket."""
    per = {f.name: plancherel_defect(params, f, spec) for f in test_basket(params)}
    return _worst("plancherel", per, THRESHOLDS["plancherel"])


def check_roundtrip(params, spec=None, xs=ROUNDTRIP_POINTS):
    """``sup |F^{-1} F f - f|`` over the test basket."""
    per = {}
    for f in test_basket(params):
        tr = Transformer(params, f, spec)
        back = inverse(params, tr, xs, spec)
        per[f.name] = float(np.max(np.abs(back.grid.values - f(back.grid.points))))
    return _worst("roundtrip", per, THRESHOLDS["roundtrip"])


def check_split(params, spec=None, xs=SPLIT_POINTS):
    """``|T1 f(x) + T2 f(x) - F f(x^n)|`` on ``x >= 0`` over the test basket."""
    per = {}
    xs = np.asarray(xs, dtype=float)
    for f in test_basket(params):
        whole = forward(params, f, xs**params.n, spec)
        idx = np.searchsorted(whole.grid.points, xs**params.n)
        parts = t1(params, f, xs, spec) + t2(params, f, xs, spec)
        per[f.name] = float(np.max(np.abs(parts - whole.grid.values[idx])))
    return _worst("split", per, THRESHOLDS["split"])


def spectral_lambdas(params, rate, npts=41):
    """Symmetric grid on which the exact transform stays above the dynamic range."""
    n = params.n
    sigma_max = math.sqrt(-math.log(SPECTRAL_DYNAMIC_RANGE) * 4 * rate / n)
    sigma = np.linspace(0.0, sigma_max, (npts + 1) // 2)
    lam = sigma**n
    return np.concatenate([-lam[:0:-1], lam])


def spectral_exact(params, rate, lam):
    """``(2a)^-(alpha+1) exp(-(n/4a) |lam|^(2/n))``."""
    n = params.n
    lam = np.asarray(lam, dtype=float)
    return (2 * rate) ** -(params.alpha + 1) * np.exp(-(n / (4 * rate)) * np.abs(lam) ** (2.0 / n))


def check_spectral(params, spec=None, rates=SPECTRAL_RATES):
    """Max relative error of the deformed-Gaussian eigen-relation."""
    per = {}
    for a in rates:
        lam = spectral_lambdas(params, a)
        res = forward(params, DeformedGaussian(a, params.n), lam, spec)
        exact = spectral_exact(params, a, res.grid.points)
        per[f"gaussian:{a!r}"] = float(np.max(np.abs(res.grid.values - exact) / exact))
    return _worst("spectral", per, THRESHOLDS["spectral"])


def poisson_table(orders=POISSON_ORDERS, args=POISSON_ARGS, degrees=POISSON_DEGREES):
    """Rows ``(alpha, degree, x, series, oracle, abs_err)``; degree 0 is the Bessel form.

    The Bessel form needs ``alpha > -1/2`` and the Gegenbauer form ``alpha > 0``;
    orders outside those ranges are skipped for that form.
    """
    rows = []
    u = np.asarray(args, dtype=float)
    for alpha in orders:
        forms = []
        if alpha > -0.5:
            forms.append(0)
        if alpha > 0:
            forms.extend(degrees)
        for deg in forms:
            if deg == 0:
                series = bessel_normalized(alpha, u)
                oracle = np.array([bessel_poisson_oracle(alpha, x) for x in u])
            else:
                series = u**deg * bessel_normalized(alpha + deg, u)
                oracle = np.array([gegenbauer_poisson_oracle(alpha, deg, x) for x in u])
            for x, sv, ov in zip(u, series, oracle):
                rows.append((float(alpha), deg, float(x), float(sv), float(ov), float(abs(sv - ov))))
    return rows


def check_poisson(orders=POISSON_ORDERS, args=POISSON_ARGS, degrees=POISSON_DEGREES):
    """Worst Poisson-oracle mismatch per (form, order)."""
    per = {}
    for alpha, deg, _, _, _, err in poisson_table(orders, args, degrees):
        key = f"bessel:{alpha!r}" if deg == 0 else f"gegenbauer:{alpha!r}:{deg}"
        per[key] = max(per.get(key, 0.0), err)
    return _worst("poisson", per, THRESHOLDS["poisson"])


def check_symbol(params, spec=None, lambdas=SYMBOL_LAMBDAS):
    """Symbol identity defect over the Gaussian basket members; skipped when inadmissible."""
    if params.weight_exponent <= 0:
        return CheckResult("symbol", None, THRESHOLDS["symbol"], None, {"skipped": "2k + 2/n - 2 <= 0"})
    per = {f.name: symbol_defect(params, f, lambdas, spec) for f in test_basket(params)}
    return _worst("symbol", per, THRESHOLDS["symbol"])


def run_checks(params, spec=None):
    """Run the whole suite. Truncation warnings are attached to the check that raised them."""
    spec = spec or QuadSpec()
    jobs = [
        ("plancherel", lambda: check_plancherel(params, spec)),
        ("roundtrip", lambda: check_roundtrip(params, spec)),
        ("split", lambda: check_split(params, spec)),
        ("spectral", lambda: check_spectral(params, spec)),
        ("poisson", check_poisson),
        ("symbol", lambda: check_symbol(params, spec)),
    ]
    results = []
    for name, job in jobs:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                res = job()
            except KnFourierError as exc:
                res = CheckResult(name, None, THRESHOLDS[name], False, error=f"{type(exc).__name__}: {exc}")
        msgs = sorted({str(w.message) for w in caught if issubclass(w.category, TruncationWarning)})
        res.warnings.extend(msgs)
        results.append(res)
    return results
