import math

import numpy as np
import pytest

from knfourier.errors import DomainError, ParamError, SingularPointError
from knfourier.kernel import kernel_b, kernel_parts, kernel_sup_estimate, make_params, measure_density

mpmath = pytest.importorskip("mpmath")

PARAMS = [(0.0, 1), (1.0, 1), (0.25, 2), (0.5, 2), (1.0, 2), (1 / 3, 3), (1.0, 3), (0.75, 4)]


def test_make_params_examples():
    p = make_params(0, 1)
    assert p.alpha == -0.5 and p.weight_exponent == 0
    p = make_params(0.5, 2)
    assert p.alpha == 0 and p.weight_exponent == 0
    with pytest.raises(ParamError):
        make_params(0.1, 2)


@pytest.mark.parametrize("bad", [0, -1, 1.5, True])
def test_make_params_rejects_bad_n(bad):
    with pytest.raises(ParamError):
        make_params(1.0, bad)


def test_make_params_invariants():
    for k, n in PARAMS:
        p = make_params(k, n)
        assert p.alpha >= -0.5
        assert p.weight_exponent > -1


def test_measure_density_examples():
    xs = np.array([-3.0, -0.5, 0.0, 1.0, 7.0])
    assert np.allclose(measure_density(make_params(0, 1), xs), 1 / math.sqrt(2 * math.pi), rtol=1e-15)
    assert np.allclose(measure_density(make_params(0.5, 2), xs), 0.5, rtol=1e-15)
    with pytest.raises(SingularPointError):
        measure_density(make_params(1 / 3, 3), 0.0)


def test_measure_density_even_and_positive():
    xs = np.linspace(0.1, 5, 20)
    for k, n in PARAMS:
        p = make_params(k, n)
        d = measure_density(p, xs)
        assert np.all(d > 0)
        assert np.array_equal(d, measure_density(p, -xs))


def test_measure_constant_matches_mpmath():
    for k, n in PARAMS:
        p = make_params(k, n)
        a = mpmath.mpf(p.alpha)
        ref = (n / mpmath.mpf(2)) ** a / (2 * mpmath.gamma(a + 1))
        assert p.measure_const == pytest.approx(float(ref), rel=1e-13)


def test_kernel_lambda_zero():
    for k, n in PARAMS:
        kv = kernel_b(make_params(k, n), np.linspace(-4, 4, 9), 0.0)
        assert np.all(kv.value == 1) and np.all(kv.odd_part == 0)


def test_kernel_classical_case():
    p = make_params(0, 1)
    x = np.linspace(-10, 10, 100)
    lam = np.linspace(-7, 7, 100)
    X, L = np.meshgrid(x, lam)
    kv = kernel_b(p, X, L)
    assert np.max(np.abs(kv.value - np.exp(-1j * L * X))) <= 1e-10


def test_kernel_half_two_example():
    kv = kernel_b(make_params(0.5, 2), 1.0, 1.0)
    ref = float(mpmath.besselj(0, 2) - mpmath.besselj(2, 2))
    assert abs(kv.value - ref) <= 1e-13


def test_kernel_value_is_sum_of_parts():
    x = np.linspace(-5, 5, 23)
    for k, n in PARAMS:
        kv = kernel_b(make_params(k, n), x[:, None], x[None, :] * 1.3)
        assert np.array_equal(kv.value, kv.even_part + kv.odd_part)


@pytest.mark.parametrize("k,n", PARAMS)
def test_kernel_symmetry_parity_and_reality(k, n):
    p = make_params(k, n)
    x = np.linspace(-6, 6, 41)[:, None]
    lam = np.linspace(-5, 5, 37)[None, :]
    kv = kernel_b(p, x, lam)
    assert np.array_equal(kv.value, kernel_b(p, lam.T, x.T).value.T)
    even_m, odd_m = kernel_parts(p, -x, lam)
    assert np.array_equal(even_m, kv.even_part.real)
    assert np.allclose(odd_m, -kv.odd_part, rtol=0, atol=0)
    if n % 2 == 0:
        assert np.max(np.abs(kv.value.imag) / (1 + np.abs(kv.value))) <= 1e-12
    else:
        conj = kernel_b(p, x, -lam).value
        assert np.max(np.abs(conj - np.conj(kv.value))) <= 1e-12


def test_kernel_sup_estimate():
    assert kernel_sup_estimate(make_params(0, 1)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        kernel_sup_estimate(make_params(0, 1), grid=[])
    grid = np.linspace(-100, 100, 4001)
    sup = kernel_sup_estimate(make_params(0.5, 2), grid)
    assert math.isfinite(sup) and sup >= 1.0
