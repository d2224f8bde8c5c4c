"""Acceptance criteria 1-10. Each test prints one ``criterion N: PASS|FAIL`` line."""
import math
import warnings

import numpy as np
import pytest

from knfourier.audit import Verdict, audit, cowling_price_norms, miyachi_functional
from knfourier.checks import (
    check_plancherel,
    check_poisson,
    check_roundtrip,
    check_spectral,
    check_split,
    check_symbol,
)
from knfourier.cli import main
from knfourier.errors import ParamError
from knfourier.functions import DeformedGaussian, counterexample_family, test_basket
from knfourier.heat import HeatFlow, gaussian_solution, heat_residual
from knfourier.kernel import kernel_b, make_params
from knfourier.transform import forward, growth_bound_check

# two admissible k for each n in {1, 2, 3}
PARAM_SETS = [(0.0, 1), (1.0, 1), (0.5, 2), (1.0, 2), (0.5, 3), (1.0, 3)]

# tolerances, one per criterion
CLASSICAL_TRANSFORM_REL = 1e-6
CLASSICAL_KERNEL_ABS = 1e-10
SPECTRAL_REL = 1e-6
PLANCHEREL_MAX = 1e-5
ROUNDTRIP_MAX = 1e-5
POISSON_ABS = 1e-8
SPLIT_ABS = 1e-8
SEMIGROUP_ABS = 1e-5
HEAT_CLOSED_FORM_ABS = 1e-5
RESIDUAL_ORDER_MIN = 1.8
SYMBOL_MAX = 1e-5
PRODUCT_REL = 0.02
HARDY_SLACK = 0.02
CP_REL = 1e-6


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail

    return emit


@pytest.fixture(autouse=True)
def _quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        yield


def test_criterion_01_classical_reduction(report):
    p = make_params(0, 1)
    lam = np.linspace(-5, 5, 101)
    res = forward(p, lambda x: np.exp(-x * x / 2), lam)
    ref = np.exp(-lam**2 / 2)
    rel = float(np.max(np.abs(res.grid.values - ref) / ref))
    x = np.linspace(-10, 10, 100)
    lam2 = np.linspace(-10, 10, 100)
    kv = kernel_b(p, x[:, None], lam2[None, :]).value
    kerr = float(np.max(np.abs(kv - np.exp(-1j * np.outer(x, lam2)))))
    ok = rel <= CLASSICAL_TRANSFORM_REL and kerr <= CLASSICAL_KERNEL_ABS
    report(1, ok, f"transform rel {rel:.2e}, kernel abs {kerr:.2e}")


def test_criterion_02_spectral_identity(report):
    worst = {}
    for k, n in PARAM_SETS:
        res = check_spectral(make_params(k, n))
        worst[(k, n)] = res.value
    top = max(worst.values())
    report(2, top <= SPECTRAL_REL, f"worst rel {top:.2e} over {len(worst)} parameter sets x 3 rates")


def test_criterion_03_plancherel_and_inversion(report):
    plan, trip = 0.0, 0.0
    for k, n in PARAM_SETS:
        p = make_params(k, n)
        plan = max(plan, check_plancherel(p).value)
        trip = max(trip, check_roundtrip(p).value)
    ok = plan <= PLANCHEREL_MAX and trip <= ROUNDTRIP_MAX
    report(3, ok, f"plancherel {plan:.2e}, round trip {trip:.2e}")


def test_criterion_04_poisson_oracles(report):
    res = check_poisson()
    report(4, res.value <= POISSON_ABS, f"worst abs {res.value:.2e} over {len(res.detail)} (form, order) pairs")


def test_criterion_05_split_identity(report):
    worst = 0.0
    for k, n in PARAM_SETS:
        worst = max(worst, check_split(make_params(k, n)).value)
    report(5, worst <= SPLIT_ABS, f"worst abs {worst:.2e}")


def test_criterion_06_growth(report):
    a = 1.0
    ys = np.linspace(0.0, 2.0, 9)
    xs = np.linspace(-1.0, 1.0, 9)
    ok, notes = True, []
    for k, n in PARAM_SETS:
        p = make_params(k, n)
        z = (xs[None, :] + 1j * ys[:, None]).ravel()
        rep = growth_bound_check(p, DeformedGaussian(a, n), a, z)
        per_y = rep.ratios.reshape(ys.size, xs.size).max(axis=1)
        bounded = bool(np.all(np.isfinite(per_y)))
        tail = per_y[ys >= 1.0]
        # equal up to roundoff counts as non-increasing
        monotone = bool(np.all(np.diff(tail) <= 1e-12 * tail[:-1]))
        ok &= bounded and monotone
        notes.append(f"({k:g},{n}) max {per_y.max():.4g}")
    report(6, ok, "; ".join(notes))


def test_criterion_07_heat(report):
    sg, cf, orders, sym = 0.0, 0.0, [], 0.0
    xs = np.linspace(-2, 2, 9)
    for k, n in PARAM_SETS:
        p = make_params(k, n)
        flow = HeatFlow(p, DeformedGaussian(0.5, n))
        for t in (0.1, 0.5, 1.0):
            cf = max(cf, float(np.max(np.abs(flow.state(t, xs).values - gaussian_solution(p, 0.5, t, xs)))))
    for k, n in [(0.5, 1), (0.5, 2)]:
        p = make_params(k, n)
        flow = HeatFlow(p, DeformedGaussian(0.5, n))
        for t1, t2 in [(0.1, 0.5), (0.5, 1.0)]:
            nested = HeatFlow(p, flow.at(t1)).state(t2, xs).values
            sg = max(sg, float(np.max(np.abs(nested - flow.state(t1 + t2, xs).values))))
    probes = [(t, x) for t in (0.2, 0.6) for x in (-1.5, -0.5, 0.4, 1.2)]
    for k, n in [(1.0, 1), (0.5, 2), (1.0, 3)]:
        p = make_params(k, n)
        flow = HeatFlow(p, DeformedGaussian(0.5, n))
        coarse = heat_residual(p, flow, probes, 1e-2, 1e-2)
        fine = heat_residual(p, flow, probes, 5e-3, 5e-3)
        orders.append(math.log2(coarse / fine))
    for k, n in PARAM_SETS:
        res = check_symbol(make_params(k, n))
        if res.passed is not None:
            sym = max(sym, res.value)
    ok = sg <= SEMIGROUP_ABS and cf <= HEAT_CLOSED_FORM_ABS and min(orders) >= RESIDUAL_ORDER_MIN and sym <= SYMBOL_MAX
    report(7, ok, f"semigroup {sg:.2e}, closed form {cf:.2e}, order {min(orders):.2f}, symbol {sym:.2e}")


def test_criterion_08_hardy_sharpness(report):
    ok, gauss_dev, basket_max = True, 0.0, 0.0
    for k, n in PARAM_SETS:
        p = make_params(k, n)
        for a in (0.3, 0.5, 1.0):
            rep = audit(p, DeformedGaussian(a, n), miyachi=False, cowling_price=False)
            gauss_dev = max(gauss_dev, abs(rep.product / 0.25 - 1))
            ok &= rep.verdict == Verdict.GAUSSIAN_ONLY
        rep = audit(p, counterexample_family(p, 0.1, 0.1, 0.5), against=(0.1, 0.1), miyachi=False, cowling_price=False)
        ok &= rep.against["conditions_hold"] and rep.against["verdict"] == Verdict.UNDERDETERMINED.value
        for f in test_basket(p):
            rep = audit(p, f, miyachi=False, cowling_price=False)
            if rep.product is not None:
                basket_max = max(basket_max, rep.product)
    ok &= gauss_dev <= PRODUCT_REL and basket_max <= 0.25 + HARDY_SLACK
    report(8, ok, f"gaussian product dev {gauss_dev:.2e}, basket max product {basket_max:.4f}")


def test_criterion_09_functionals(report):
    p = make_params(1.0, 2)
    n, b, C, a = p.n, 0.4, 1.7, 0.3
    m = (
        miyachi_functional(p, DeformedGaussian(b, n, C), b, C),
        miyachi_functional(p, DeformedGaussian(2 * b, n, C), b, C),
        miyachi_functional(p, DeformedGaussian(b, n, 2 * C), b, C),
    )
    g = DeformedGaussian(2 * a, n)
    finite, _ = cowling_price_norms(p, g, g, a, a, 2, 2)
    closed = (4 * a) ** (-(p.alpha + 1) / 2)
    divergent, _ = cowling_price_norms(p, DeformedGaussian(a, n), g, a, a, 2, 2)
    try:
        cowling_price_norms(p, g, g, a, a, math.inf, math.inf)
        rejected = False
    except ParamError:
        rejected = True
    ok = m == (0.0, 0.0, math.inf) and abs(finite / closed - 1) <= CP_REL and divergent == math.inf and rejected
    report(9, ok, f"miyachi {m}, cowling-price rel {abs(finite / closed - 1):.2e}, divergent {divergent}, p=q=inf rejected {rejected}")


def test_criterion_10_determinism(report, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    codes = (main(["check", "--out", str(a)]), main(["check", "--out", str(b)]))
    same = a.read_bytes() == b.read_bytes()
    report(10, same and codes == (0, 0), f"exit codes {codes}, identical bytes {same}")
