import numpy as np
import pytest

from knfourier.errors import ParamError
from knfourier.functions import (
    Bump,
    DeformedGaussian,
    OddGaussian,
    Zero,
    counterexample_family,
    parse_function,
    test_basket,
)
from knfourier.kernel import make_params


def test_parse_function():
    p = make_params(1.0, 2)
    assert parse_function("gaussian:0.5", p) == DeformedGaussian(0.5, 2)
    assert parse_function("bump:3", p) == Bump(3.0, 1.0, 2)
    assert parse_function("bump:3,2", p) == Bump(3.0, 2.0, 2)
    assert parse_function("hermite1", p) == OddGaussian(0.5)
    assert parse_function("oddgaussian:2", p) == OddGaussian(2.0)
    assert isinstance(parse_function("zero", p), Zero)
    assert parse_function("counterexample:0.1,0.1,0.5", p) == DeformedGaussian(0.5, 2)


@pytest.mark.parametrize("text", ["", "gaussian", "gaussian:x", "gaussian:1,2", "bump:1,2,3", "hermite1:2", "sinc:1", "gaussian:nan"])
def test_parse_function_malformed(text):
    with pytest.raises(ValueError):
        parse_function(text, make_params(0, 1))


def test_parse_function_out_of_range():
    p = make_params(0, 1)
    for text in ("gaussian:-1", "bump:0", "counterexample:0.2,1,0.3"):
        with pytest.raises(ParamError):
            parse_function(text, p)


def test_counterexample_family_examples():
    p = make_params(0, 1)
    assert counterexample_family(p, 0.1, 0.1, 0.5) == DeformedGaussian(0.5, 1)
    with pytest.raises(ParamError):
        counterexample_family(p, 0.1, 0.1, 0.1)
    with pytest.raises(ParamError):
        counterexample_family(p, 0.2, 1.0, 0.3)
    with pytest.raises(ParamError):
        counterexample_family(p, 0.5, 0.5, 0.6)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_derivatives_match_finite_differences(n):
    fns = [DeformedGaussian(0.7, n, 1.5), Bump(2.0**n, 1.5, n), OddGaussian(0.8), Zero()]
    x = np.concatenate([-np.linspace(0.3, 1.9, 9), np.linspace(0.3, 1.9, 9)])
    h = 1e-4
    for f in fns:
        d1 = (f(x + h) - f(x - h)) / (2 * h)
        d2 = (f(x + h) - 2 * f(x) + f(x - h)) / h**2
        assert np.allclose(f.derivative(x, 1), d1, rtol=1e-6, atol=1e-7)
        assert np.allclose(f.derivative(x, 2), d2, rtol=1e-4, atol=1e-4)


def test_log_abs_consistent():
    f = DeformedGaussian(0.4, 3, 2.0)
    x = np.linspace(-5, 5, 11)
    assert np.allclose(f.log_abs(x), np.log(f(x)), rtol=1e-14)


def test_basket_members():
    for n in (1, 2, 3):
        basket = test_basket(make_params(1.0, n))
        assert len(basket) == 5
        assert [f.parity for f in basket].count("odd") == 1
        x = np.linspace(-3, 3, 13)
        for f in basket:
            sign = 1 if f.parity == "even" else -1
            assert np.allclose(f(-x), sign * f(x), rtol=0, atol=0)
