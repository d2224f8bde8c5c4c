import math
import warnings

import numpy as np
import pytest

from knfourier.errors import DegenerateInput, DomainError, TruncationWarning
from knfourier.functions import Bump, DeformedGaussian, OddGaussian, Zero, test_basket
from knfourier.kernel import make_params
from knfourier.quadrature import QuadSpec
from knfourier.transform import (
    Transformer,
    forward,
    growth_bound_check,
    inverse,
    plancherel_defect,
    t1,
    t2,
)


def exact_gaussian(p, a, lam):
    n = p.n
    return (2 * a) ** -(p.alpha + 1) * np.exp(-(n / (4 * a)) * np.abs(lam) ** (2.0 / n))


def test_classical_gaussian():
    p = make_params(0, 1)
    lam = np.linspace(-5, 5, 41)
    res = forward(p, lambda x: np.exp(-x * x / 2), lam)
    assert res.ok
    ref = np.exp(-lam**2 / 2)
    assert np.max(np.abs(res.grid.values - ref) / ref) <= 1e-6


@pytest.mark.parametrize("k,n", [(0.0, 1), (1.0, 1), (0.5, 2), (1.0, 2), (1 / 3, 3), (1.0, 3)])
def test_spectral_identity(k, n):
    p = make_params(k, n)
    for a in (0.3, 0.5, 1.0):
        sig = np.linspace(0, math.sqrt(-math.log(1e-6) * 4 * a / n), 11)
        lam = np.concatenate([-(sig[:0:-1] ** n), sig**n])
        res = forward(p, DeformedGaussian(a, n), lam)
        ref = exact_gaussian(p, a, res.grid.points)
        assert np.max(np.abs(res.grid.values - ref) / ref) <= 1e-6


def test_zero_input():
    p = make_params(1.0, 2)
    assert np.all(forward(p, Zero(), [-1.0, 0.0, 2.0]).grid.values == 0)
    assert np.all(inverse(p, Zero(), [-1.0, 0.0, 2.0]).grid.values == 0)


def test_forward_rejects_bad_grids():
    p = make_params(0, 1)
    with pytest.raises(DomainError):
        forward(p, Zero(), [])
    with pytest.raises(DomainError):
        forward(p, Zero(), [np.inf])


@pytest.mark.parametrize("k,n", [(0.5, 1), (0.5, 2), (1.0, 3)])
def test_parity_intertwining(k, n):
    p = make_params(k, n)
    lam = np.linspace(-3, 3, 13)
    even = forward(p, Bump(2.0**n, 1.0, n), lam).grid.values
    odd = forward(p, OddGaussian(1.0), lam).grid.values
    assert np.allclose(even, even[::-1], rtol=0, atol=1e-13)
    assert np.allclose(odd, -odd[::-1], rtol=0, atol=1e-13)


def test_inverse_equals_forward_for_even_n():
    p = make_params(1.0, 2)
    f = OddGaussian(1.0)
    xs = np.linspace(-2, 2, 9)
    assert np.array_equal(inverse(p, f, xs).grid.values, forward(p, f, xs).grid.values)


def test_inverse_classical():
    p = make_params(0, 1)
    xs = np.linspace(-4, 4, 17)
    res = inverse(p, lambda lam: np.exp(-lam * lam / 2), xs)
    assert np.max(np.abs(res.grid.values - np.exp(-xs**2 / 2))) <= 1e-10


@pytest.mark.parametrize("k,n", [(0.0, 1), (1.0, 1), (0.5, 2)])
def test_round_trip_basket(k, n):
    p = make_params(k, n)
    xs = np.linspace(-3, 3, 13)
    for f in test_basket(p):
        back = inverse(p, Transformer(p, f), xs).grid.values
        assert np.max(np.abs(back - f(xs))) <= 1e-5 * (1 + np.max(np.abs(f(xs))))


def test_linearity():
    p = make_params(1.0, 2)
    lam = np.linspace(-3, 3, 7)
    f, g = DeformedGaussian(0.5, 2), OddGaussian(1.0)
    lhs = forward(p, lambda x: 2 * f(x) - 3 * g(x), lam).grid.values
    rhs = 2 * forward(p, f, lam).grid.values - 3 * forward(p, g, lam).grid.values
    assert np.max(np.abs(lhs - rhs)) <= 1e-10


def test_t1_t2_examples():
    p = make_params(0, 1)
    xs = np.linspace(0, 3, 7)
    herm = lambda u: u * np.exp(-u * u / 2)
    assert np.all(t1(p, herm, xs) == 0)
    assert np.all(t2(p, DeformedGaussian(0.5, 1), xs) == 0)
    assert t2(p, herm, [0.0])[0] == 0
    assert np.max(np.abs(t2(p, herm, xs) - (-1j * xs * np.exp(-xs**2 / 2)))) <= 1e-10


@pytest.mark.parametrize("k,n", [(1.0, 1), (0.5, 2), (1.0, 3)])
def test_t1_gaussian(k, n):
    p = make_params(k, n)
    a = 0.5
    xs = np.linspace(0, 3, 7)
    ref = (2 * a) ** -(p.alpha + 1) * np.exp(-(n / (4 * a)) * xs**2)
    assert np.max(np.abs(t1(p, DeformedGaussian(a, n), xs) - ref)) <= 1e-10


def test_plancherel_examples():
    p = make_params(0, 1)
    assert plancherel_defect(p, lambda x: np.exp(-x * x / 2)) <= 1e-8
    for k, n in [(1.0, 1), (0.5, 2), (1.0, 3)]:
        q = make_params(k, n)
        assert plancherel_defect(q, DeformedGaussian(0.5, n)) <= 1e-6
    with pytest.raises(DegenerateInput):
        plancherel_defect(p, Zero())


def test_truncation_warning_on_small_radius():
    p = make_params(0, 1)
    with pytest.warns(TruncationWarning):
        res = forward(p, DeformedGaussian(0.01, 1), [0.0, 1.0], QuadSpec(truncation_radius=3.0))
    assert not res.ok


def test_growth_bound_examples():
    p = make_params(0.5, 1)
    a = 1.0
    f = DeformedGaussian(a, 1)
    real = growth_bound_check(p, f, a, [0.5, 1.0])
    assert np.allclose(real.ratios, np.abs(t1(p, f, [0.5, 1.0])), rtol=1e-15)
    ys = np.linspace(0, 2, 9)
    rep = growth_bound_check(p, f, a, 1j * ys)
    assert np.max(np.abs(rep.ratios - (2 * a) ** -(p.alpha + 1))) <= 1e-8
    with pytest.raises(DomainError):
        growth_bound_check(p, f, a, [3j])
    with pytest.raises(DomainError):
        growth_bound_check(p, f, 0.0, [1.0])
