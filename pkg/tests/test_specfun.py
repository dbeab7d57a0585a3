"""Oracle tests for the Bessel kernel.

The oracles here deliberately avoid the production code paths: a test-local
power series, plain bisection, and a fixed-step RK4 integration of Bessel's
ODE.
"""

import math

import numpy as np
import pytest

from disklab import specfun


def series_j(m, x, terms=60):
    """Test-local power series; trustworthy for x <= 6 or so."""
    half = 0.5 * x
    term = half**m / math.factorial(m)
    total = term
    for k in range(1, terms):
        term *= -(half * half) / (k * (m + k))
        total += term
    return total


def bisect_zero(f, a, b, iters=80):
    fa = f(a)
    for _ in range(iters):
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fa * fm <= 0.0:
            b = mid
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def test_trivial_values():
    assert specfun.bessel_j(0, 0.0) == 1.0
    assert specfun.bessel_j(1, 0.0) == 0.0
    assert specfun.bessel_j_prime(0, 0.0) == 0.0
    assert specfun.bessel_j_prime(1, 0.0) == pytest.approx(0.5, abs=1e-15)


def test_first_zero_against_series_bisection():
    j01 = bisect_zero(lambda x: series_j(0, x), 2.0, 3.0)
    assert abs(j01 - 2.404825557695773) < 1e-12
    assert abs(specfun.bessel_j(0, j01)) < 1e-12
    assert abs(specfun.bessel_zero(0, 1).value - j01) < 1e-12

    j11 = bisect_zero(lambda x: series_j(1, x), 3.0, 4.5)
    assert abs(specfun.bessel_zero(1, 1).value - 3.831705970207512) < 1e-10
    assert abs(j11 - 3.831705970207512) < 1e-12


def test_critical_point_of_j0():
    # j_{1,1} is a critical point of J_0 since J_0' = -J_1
    assert abs(specfun.bessel_j_prime(0, 3.831705970207512)) < 1e-10


def test_derivative_identity_against_finite_difference():
    eps = 1e-6
    for m in (0, 1, 4, 23):
        for x in (0.7, 3.3, 19.0, 145.2):
            fd = (specfun.bessel_j(m, x + eps) - specfun.bessel_j(m, x - eps)) / (2 * eps)
            assert specfun.bessel_j_prime(m, x) == pytest.approx(fd, abs=5e-9)


def test_zero_residual_and_wronskian_sample():
    # |J_m(j_mk)| small and J_m'(j) = -J_{m+1}(j) at a zero
    for m in (0, 3, 25, 110, 200):
        for k in (1, 4, 11, 30):
            j = specfun.bessel_zero(m, k).value
            assert abs(specfun.bessel_j(m, j)) < 1e-10
            lhs = specfun.bessel_j_prime(m, j)
            rhs = -specfun.bessel_j(m + 1, j)
            assert abs(lhs - rhs) < 1e-10


def test_interlacing():
    for m in (0, 2, 9, 40):
        for k in (1, 2, 6):
            a = specfun.bessel_zero(m, k).value
            b = specfun.bessel_zero(m + 1, k).value
            c = specfun.bessel_zero(m, k + 1).value
            assert a < b < c


def test_zero_monotonicity_in_k_and_m():
    ks = [specfun.bessel_zero(7, k).value for k in range(1, 12)]
    assert all(x < y for x, y in zip(ks, ks[1:]))
    ms = [specfun.bessel_zero(m, 3).value for m in range(0, 12)]
    assert all(x < y for x, y in zip(ms, ms[1:]))


def rk4_bessel(m, x0, y0, dy0, x_end, n_steps):
    """Fixed-step RK4 on y'' + y'/x + (1 - m^2/x^2) y = 0."""

    def rhs(x, y, v):
        return v, -v / x - (1.0 - (m * m) / (x * x)) * y

    h = (x_end - x0) / n_steps
    xs = [x0]
    ys = [y0]
    y, v, x = y0, dy0, x0
    for _ in range(n_steps):
        k1y, k1v = rhs(x, y, v)
        k2y, k2v = rhs(x + 0.5 * h, y + 0.5 * h * k1y, v + 0.5 * h * k1v)
        k3y, k3v = rhs(x + 0.5 * h, y + 0.5 * h * k2y, v + 0.5 * h * k2v)
        k4y, k4v = rhs(x + h, y + h * k3y, v + h * k3v)
        y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        x += h
        xs.append(x)
        ys.append(y)
    return np.array(xs), np.array(ys)


@pytest.mark.parametrize("m", [0, 1, 5, 17])
def test_ode_oracle(m):
    x0 = 1.0
    y0 = series_j(m, x0)
    h = 1e-7
    dy0 = (series_j(m, x0 + h) - series_j(m, x0 - h)) / (2 * h)
    xs, ys = rk4_bessel(m, x0, y0, dy0, 50.0, 49000)
    sample = np.linspace(0, len(xs) - 1, 100).astype(int)
    ours = specfun.bessel_j(m, xs[sample])
    assert np.max(np.abs(ours - ys[sample])) < 1e-8


def test_zero_cache_is_bit_stable():
    a = specfun.bessel_zero(13, 5).value
    b = specfun.bessel_zero(13, 5).value
    assert a == b
    # a fresh row computation for a new order must also be deterministic
    c1 = specfun.bessel_zero(131, 2).value
    c2 = specfun.bessel_zero(131, 2).value
    assert c1 == c2


def test_zeros_up_to():
    zs = specfun.zeros_up_to(4, 30.0)
    vals = [z.value for z in zs]
    assert vals == sorted(vals)
    assert all(v <= 30.0 for v in vals)
    assert specfun.zeros_up_to(4, 40.0)[len(zs)].value > 30.0


def test_domain_errors():
    with pytest.raises(ValueError):
        specfun.bessel_j(-1, 1.0)
    with pytest.raises(ValueError):
        specfun.bessel_j(0, -0.5)
    with pytest.raises(ValueError):
        specfun.bessel_j(0, 2.0e6)
    with pytest.raises(ValueError):
        specfun.bessel_zero(2, 0)


def test_dump_zero_table(tmp_path):
    path = tmp_path / "zeros.csv"
    specfun.dump_zero_table(path, 2, 3)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "m,k,j"
    assert len(lines) == 1 + 3 * 3
    m, k, j = lines[1].split(",")
    assert (m, k) == ("0", "1")
    assert abs(float(j) - 2.404825557695773) < 1e-12
