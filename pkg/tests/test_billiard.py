"""Billiard flow, chart, and orbit-average tests."""

import math
from fractions import Fraction

import numpy as np
import pytest

from disklab import billiard
from disklab.billiard import ActionAngle, PhasePoint


def random_interior_points(n, rng, e_range=(0.3, 3.0)):
    r = np.sqrt(rng.uniform(0, 1, n)) * 0.999
    phi = rng.uniform(0, 2 * np.pi, n)
    e = rng.uniform(*e_range, n)
    psi = rng.uniform(0, 2 * np.pi, n)
    return [
        PhasePoint(r[i] * np.cos(phi[i]), r[i] * np.sin(phi[i]),
                   e[i] * np.cos(psi[i]), e[i] * np.sin(psi[i]))
        for i in range(n)
    ]


def test_reflect_examples():
    assert np.allclose(billiard.reflect((1, 0), (1, 0)), (-1, 0))
    assert np.allclose(billiard.reflect((1, 0), (0, 1)), (0, 1))
    s = 1 / math.sqrt(2)
    assert np.allclose(billiard.reflect((0, 1), (s, s)), (s, -s), atol=1e-15)


def test_reflect_matches_mirror_matrix():
    rng = np.random.default_rng(3)
    for _ in range(50):
        phi = rng.uniform(0, 2 * np.pi)
        z = np.array([np.cos(phi), np.sin(phi)])
        xi = rng.normal(size=2)
        mirror = np.eye(2) - 2.0 * np.outer(z, z)
        assert np.allclose(billiard.reflect(z, xi), mirror @ xi, atol=1e-14)


def test_reflect_is_involution_and_preserves_invariants():
    rng = np.random.default_rng(4)
    for _ in range(100):
        phi = rng.uniform(0, 2 * np.pi)
        z = np.array([np.cos(phi), np.sin(phi)])
        xi = rng.normal(size=2)
        r1 = billiard.reflect(z, xi)
        r2 = billiard.reflect(z, r1)
        assert np.max(np.abs(r2 - xi)) < 1e-14
        assert abs(np.hypot(*r1) - np.hypot(*xi)) < 1e-14
        # tangential component z x xi is preserved
        assert abs((z[0] * r1[1] - z[1] * r1[0]) - (z[0] * xi[1] - z[1] * xi[0])) < 1e-14


def test_reflect_off_boundary_rejected():
    with pytest.raises(ValueError):
        billiard.reflect((0.5, 0), (1, 0))


def test_flow_free_transport_and_one_bounce():
    p = PhasePoint(0, 0, 0, 1)
    q = billiard.flow(p, 0.5)
    assert np.allclose((q.x, q.y, q.xi_x, q.xi_y), (0, 0.5, 0, 1), atol=1e-14)
    q = billiard.flow(p, 1.5)
    assert np.allclose((q.x, q.y, q.xi_x, q.xi_y), (0, 0.5, 0, -1), atol=1e-12)


def test_flow_group_property_and_reversibility():
    p = PhasePoint(0.2, -0.1, 0.7, 1.1)
    q1 = billiard.flow(billiard.flow(p, 0.8), 1.7)
    q2 = billiard.flow(p, 2.5)
    assert np.allclose((q1.x, q1.y, q1.xi_x, q1.xi_y), (q2.x, q2.y, q2.xi_x, q2.xi_y), atol=1e-11)
    back = billiard.flow(billiard.flow(p, 2.5), -2.5)
    assert np.allclose((back.x, back.y), (p.x, p.y), atol=1e-11)


def test_conservation_along_flow():
    rng = np.random.default_rng(11)
    for p in random_interior_points(40, rng):
        e0, j0 = p.E, p.J
        alpha0 = to_alpha(p)
        # long enough for >= 100 reflections
        tau = 110 * 2.0 / e0
        q = billiard.flow(p, tau)
        assert abs(q.E - e0) < 1e-9
        assert abs(q.J - j0) < 1e-9
        assert abs(to_alpha(q) - alpha0) < 1e-9
        assert q.x**2 + q.y**2 <= 1 + 1e-12


def to_alpha(p):
    return -math.asin(max(-1.0, min(1.0, p.J / p.E)))


def test_chord_time_law():
    rng = np.random.default_rng(7)
    for p in random_interior_points(20, rng):
        alpha = to_alpha(p)
        expected = 2.0 * math.cos(alpha) / p.E
        angles = billiard.bounce_angles(p, 6)
        # time between bounces = chord length / speed; recover from geometry
        chord = 2.0 * math.cos(alpha)
        for a, b in zip(angles, angles[1:]):
            gap = abs(math.sin(0.5 * ((b - a) % (2 * math.pi))))
            assert abs(2.0 * gap - chord) < 1e-12
        del expected


def test_tangential_chain_is_boundary_rotation():
    p = PhasePoint(1.0, 0.0, 0.0, 2.0)  # J = 2 = E, tangential
    q = billiard.flow(p, math.pi / 2 / 2.0)  # quarter turn at angular speed 2
    assert np.allclose((q.x, q.y), (0, 1), atol=1e-12)
    assert abs(q.J - p.J) < 1e-12


def test_action_angle_paper_examples():
    aa = billiard.to_action_angle(PhasePoint(0, 0, 0, 1))
    assert (aa.s, aa.theta, aa.E, aa.J) == pytest.approx((0, 0, 1, 0), abs=1e-15)
    p = billiard.from_action_angle(ActionAngle(s=0, theta=math.pi / 2, E=2, J=0))
    assert np.allclose((p.x, p.y, p.xi_x, p.xi_y), (0, 0, -2, 0), atol=1e-15)


def test_chart_round_trip():
    rng = np.random.default_rng(23)
    for p in random_interior_points(500, rng):
        aa = billiard.to_action_angle(p)
        back = billiard.from_action_angle(aa)
        err = max(abs(back.x - p.x), abs(back.y - p.y),
                  abs(back.xi_x - p.xi_x), abs(back.xi_y - p.xi_y))
        assert err < 1e-12
        assert abs(aa.J) <= aa.E * (1 + 1e-12) or abs(p.x**2 + p.y**2) > 1


def test_chart_equivariance_under_rotation():
    rng = np.random.default_rng(5)
    for p in random_interior_points(50, rng):
        tau = rng.uniform(0, 2 * np.pi)
        a0 = billiard.to_action_angle(p)
        a1 = billiard.to_action_angle(billiard.rotation_flow(p, tau))
        dtheta = (a1.theta - a0.theta - tau) % (2 * math.pi)
        assert min(dtheta, 2 * math.pi - dtheta) < 1e-12
        assert abs(a1.s - a0.s) < 1e-12
        assert abs(a1.E - a0.E) < 1e-12
        assert abs(a1.J - a0.J) < 1e-14


def test_rotation_flow_trivia():
    p = PhasePoint(1, 0, 0, 1)
    q = billiard.rotation_flow(p, 2 * math.pi)
    assert np.allclose((q.x, q.y, q.xi_x, q.xi_y), (1, 0, 0, 1), atol=1e-14)
    q = billiard.rotation_flow(p, math.pi)
    assert np.allclose((q.x, q.y, q.xi_x, q.xi_y), (-1, 0, 0, -1), atol=1e-14)


def test_orbit_periods():
    assert billiard.orbit_period(Fraction(0, 1)) == (2, pytest.approx(4.0))
    q, length = billiard.orbit_period(Fraction(1, 4))
    assert q == 4 and length == pytest.approx(4 * math.sqrt(2), abs=1e-12)
    q, length = billiard.orbit_period(Fraction(1, 6))
    assert q == 3 and length == pytest.approx(3 * math.sqrt(3), abs=1e-12)
    with pytest.raises(ValueError):
        billiard.orbit_period(Fraction(1, 2))


def test_orbit_average_constants_and_moment():
    const = billiard.orbit_average(lambda x, y, u, v: np.full_like(x, 2.5),
                                   Fraction(1, 3), 1.0, 0.7)
    assert const == pytest.approx(2.5, abs=1e-13)
    rsq = lambda x, y, u, v: x * x + y * y
    assert billiard.orbit_average(rsq, Fraction(0, 1), 1.0, 0.0) == pytest.approx(1 / 3, abs=1e-12)
    # |z|^2 = s^2 + sin^2(alpha) along each chord
    assert billiard.orbit_average(rsq, Fraction(1, 4), 1.0, 1.1) == pytest.approx(2 / 3, abs=1e-12)


def test_orbit_average_matches_flow_following():
    """Independent oracle: time-average the observable along the actual flow."""
    frac = Fraction(1, 5)
    e0, theta = 1.0, 0.4
    alpha = math.pi / 5
    start = billiard.from_action_angle(
        ActionAngle(s=-math.cos(alpha) + 1e-9, theta=theta, E=e0, J=-e0 * math.sin(alpha)))
    _, length = billiard.orbit_period(frac)
    obs = lambda x, y, u, v: np.exp(x) * (y + 0.3) ** 2
    n = 40000
    taus = (np.arange(n) + 0.5) * (length / e0) / n
    acc = 0.0
    for tau in taus:
        q = billiard.flow(start, float(tau))
        acc += float(obs(np.array(q.x), q.y, q.xi_x, q.xi_y))
    direct = acc / n
    ours = billiard.orbit_average(obs, frac, e0, theta)
    assert ours == pytest.approx(direct, abs=5e-7)


def test_orbit_average_depends_only_on_theta_and_E():
    # two points of the same orbit, different s: same average by construction;
    # shifting theta by the bounce increment must leave the average unchanged
    obs = lambda x, y, u, v: np.cos(3 * x) + y**2
    frac = Fraction(1, 4)
    a1 = billiard.orbit_average(obs, frac, 1.0, 0.2)
    a2 = billiard.orbit_average(obs, frac, 1.0, 0.2 + math.pi + 2 * math.pi / 4)
    assert a1 == pytest.approx(a2, abs=1e-12)


def test_orbit_average_rejects_non_rational():
    with pytest.raises(TypeError):
        billiard.orbit_average(lambda x, y, u, v: x, 0.123, 1.0, 0.0)


def test_torus_measure_const():
    assert billiard.torus_measure_const(1, 0) == pytest.approx(1 / (4 * math.pi), abs=1e-15)
    assert billiard.torus_measure_const(2, 0) == pytest.approx(1 / (4 * math.pi), abs=1e-15)
    with pytest.raises(ValueError):
        billiard.torus_measure_const(1.0, 1.0)


def test_dense_orbit_equidistribution():
    alpha = 1.0  # irrational multiple of pi
    j = -math.sin(alpha)
    p = billiard.from_action_angle(ActionAngle(s=0.0, theta=0.3, E=1.0, J=j))
    angles = billiard.bounce_angles(p, 10**4)
    assert billiard.sup_discrepancy(angles) < 0.02


def test_trace_rows():
    rows = billiard.trace(PhasePoint(0, 0, 0, 1), [0.0, 0.5, 1.5])
    assert len(rows) == 3
    tau, x, y, xi_x, xi_y, s, theta, e, jj, alpha = rows[-1]
    assert (x, y) == pytest.approx((0, 0.5), abs=1e-12)
    assert xi_y == pytest.approx(-1, abs=1e-12)
    assert e == pytest.approx(1.0, abs=1e-14)
