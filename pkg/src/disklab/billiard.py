"""Classical billiard dynamics on the unit disk.

Free transport between boundary hits, specular reflection at |z| = 1, and the
action-angle chart

    x = (J/E) cos(theta) - s sin(theta)      E = |xi|
    y = (J/E) sin(theta) + s cos(theta)      J = x xi_y - y xi_x
    xi_x = -E sin(theta)                     theta = atan2(-xi_x, xi_y)
    xi_y =  E cos(theta)                     s = -x sin(theta) + y cos(theta)

in which the flow is translation of s at speed E.  The reflection angle
alpha = -arcsin(J/E) is a flow invariant; rational alpha/pi gives closed
orbits (the torus is foliated by q' chords of length 2 cos(alpha), with the
chart angle jumping by pi + 2 alpha at each bounce), irrational alpha/pi gives
orbits whose bounce points are dense on the circle.

Trajectories are computed by exact chord stepping: the next boundary hit
solves |z + t xi|^2 = 1 in closed form, so there is no time-discretisation
error beyond the root itself.  Exactly tangential states (|J| = E) rotate
along the boundary at angular speed J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .util import gauss_legendre, wrap_angle

__all__ = [
    "PhasePoint",
    "ActionAngle",
    "TorusSpec",
    "reflect",
    "flow",
    "bounce_angles",
    "to_action_angle",
    "from_action_angle",
    "rotation_flow",
    "orbit_period",
    "orbit_average",
    "torus_measure_const",
    "trace",
]

_TANGENT_TOL = 1e-12
_BOUNDARY_TOL = 1e-10
_MAX_BOUNCES = 10**7


@dataclass(frozen=True)
class PhasePoint:
    x: float
    y: float
    xi_x: float
    xi_y: float

    @property
    def z(self) -> np.ndarray:
        return np.array([self.x, self.y])

    @property
    def xi(self) -> np.ndarray:
        return np.array([self.xi_x, self.xi_y])

    @property
    def E(self) -> float:
        return math.hypot(self.xi_x, self.xi_y)

    @property
    def J(self) -> float:
        return self.x * self.xi_y - self.y * self.xi_x


@dataclass(frozen=True)
class ActionAngle:
    s: float
    theta: float
    E: float
    J: float

    @property
    def alpha(self) -> float:
        ratio = self.J / self.E
        return -math.asin(max(-1.0, min(1.0, ratio)))


@dataclass(frozen=True)
class TorusSpec:
    """Joint level set of (E, J) with its normalised invariant measure constant."""

    E: float
    J: float

    @property
    def c(self) -> float:
        return torus_measure_const(self.E, self.J)


def reflect(z, xi) -> np.ndarray:
    """Specular reflection at a boundary point: xi - 2 (z . xi) z."""
    z = np.asarray(z, dtype=float)
    xi = np.asarray(xi, dtype=float)
    r = math.hypot(z[0], z[1])
    if abs(r - 1.0) > _BOUNDARY_TOL:
        raise ValueError(f"reflection point must lie on the unit circle, |z| = {r}")
    return xi - 2.0 * float(z @ xi) * z


def _chord_time(z, xi) -> float:
    """First t > 0 with |z + t xi| = 1 for an inward or interior ray."""
    a = float(xi @ xi)
    b = float(z @ xi)
    c = float(z @ z) - 1.0
    disc = b * b - a * c
    return (-b + math.sqrt(max(disc, 0.0))) / a


def flow(p: PhasePoint, tau: float) -> PhasePoint:
    """Billiard flow for time tau (either sign)."""
    E = p.E
    if E == 0.0:
        raise ValueError("the flow is undefined at xi = 0")
    if tau < 0.0:
        rev = flow(PhasePoint(p.x, p.y, -p.xi_x, -p.xi_y), -tau)
        return PhasePoint(rev.x, rev.y, -rev.xi_x, -rev.xi_y)
    J = p.J
    if E - abs(J) <= _TANGENT_TOL * E:
        # tangential chain: boundary rotation at angular speed J
        return rotation_flow(p, J * tau)
    z = p.z
    xi = p.xi
    remaining = float(tau)
    for _ in range(_MAX_BOUNCES):
        if float(z @ z) >= 1.0 - 1e-14 and float(z @ xi) > 0.0:
            xi = reflect(z / math.hypot(z[0], z[1]), xi)
        t_hit = _chord_time(z, xi)
        if t_hit >= remaining:
            z = z + remaining * xi
            return PhasePoint(z[0], z[1], xi[0], xi[1])
        z = z + t_hit * xi
        z = z / math.hypot(z[0], z[1])  # snap to the circle
        xi = reflect(z, xi)
        remaining -= t_hit
    raise RuntimeError("bounce budget exhausted (near-tangential start?)")


def bounce_angles(p: PhasePoint, n: int) -> np.ndarray:
    """Polar angles of the first n boundary hits of the forward orbit."""
    z, xi = p.z, p.xi
    out = np.empty(n)
    for i in range(n):
        if float(z @ z) >= 1.0 - 1e-14 and float(z @ xi) > 0.0:
            xi = reflect(z / math.hypot(z[0], z[1]), xi)
        t_hit = _chord_time(z, xi)
        z = z + t_hit * xi
        z = z / math.hypot(z[0], z[1])
        out[i] = math.atan2(z[1], z[0])
        xi = reflect(z, xi)
    return out


def to_action_angle(p: PhasePoint) -> ActionAngle:
    E = p.E
    if E == 0.0:
        raise ValueError("action-angle chart excludes xi = 0")
    theta = math.atan2(-p.xi_x, p.xi_y) % (2.0 * math.pi)
    s = -p.x * math.sin(theta) + p.y * math.cos(theta)
    return ActionAngle(s=s, theta=theta, E=E, J=p.J)


def from_action_angle(a: ActionAngle) -> PhasePoint:
    if a.E == 0.0:
        raise ValueError("action-angle chart excludes E = 0")
    ct, st = math.cos(a.theta), math.sin(a.theta)
    rho = a.J / a.E
    return PhasePoint(
        x=rho * ct - a.s * st,
        y=rho * st + a.s * ct,
        xi_x=-a.E * st,
        xi_y=a.E * ct,
    )


def rotation_flow(p: PhasePoint, tau: float) -> PhasePoint:
    """Simultaneous rotation of position and momentum by angle tau."""
    c, s = math.cos(tau), math.sin(tau)
    return PhasePoint(
        x=c * p.x - s * p.y,
        y=s * p.x + c * p.y,
        xi_x=c * p.xi_x - s * p.xi_y,
        xi_y=s * p.xi_x + c * p.xi_y,
    )


def _as_fraction(alpha0) -> Fraction:
    if isinstance(alpha0, Fraction):
        return alpha0
    if isinstance(alpha0, tuple) and len(alpha0) == 2:
        return Fraction(int(alpha0[0]), int(alpha0[1]))
    if isinstance(alpha0, int):
        return Fraction(alpha0, 1)
    raise TypeError(
        "alpha0 must be the rational multiple of pi, given as Fraction or (p, q)"
    )


def orbit_period(alpha0) -> tuple[int, float]:
    """(bounce count, total length) of the closed orbit at alpha0 = (p/q) pi.

    The chart angle advances by pi + 2 alpha0 per bounce, so the orbit closes
    after the least q' with q' (pi - 2 alpha0) = 0 mod 2 pi; each chord has
    length 2 cos(alpha0).
    """
    frac = _as_fraction(alpha0)
    if abs(frac) >= Fraction(1, 2):
        raise ValueError("alpha0/pi must lie in (-1/2, 1/2)")
    p, q = frac.numerator, frac.denominator
    q_prime = 2 * q // math.gcd(q - 2 * p, 2 * q)
    alpha = math.pi * p / q
    return q_prime, q_prime * 2.0 * math.cos(alpha)


def orbit_average(a, alpha0, E0: float, theta: float, n_gauss: int = 48) -> float:
    """Arclength average of the observable a over the closed orbit through
    chart angle theta on {alpha = alpha0, E = E0}.

    a must be vectorised: a(x, y, xi_x, xi_y) -> array.  The orbit is the union
    of q' chords at chart angles theta + n (pi + 2 alpha0); each chord is
    integrated with Gauss-Legendre in the abscissa s.
    """
    frac = _as_fraction(alpha0)
    q_prime, _ = orbit_period(frac)
    alpha = math.pi * frac.numerator / frac.denominator
    if E0 <= 0.0:
        raise ValueError("E0 must be positive")
    J0 = -E0 * math.sin(alpha)
    half = math.cos(alpha)
    nodes, weights = gauss_legendre(-half, half, n_gauss)
    total = 0.0
    for n in range(q_prime):
        th = theta + n * (math.pi + 2.0 * alpha)
        ct, st = math.cos(th), math.sin(th)
        x = (J0 / E0) * ct - nodes * st
        y = (J0 / E0) * st + nodes * ct
        vals = np.asarray(a(x, y, np.full_like(x, -E0 * st), np.full_like(x, E0 * ct)))
        total += float(weights @ vals)
    return total / (q_prime * 2.0 * half)


def torus_measure_const(E: float, J: float) -> float:
    """Normalisation c(E, J) of the invariant measure c ds dtheta on T_(E,J)."""
    if abs(J) >= E:
        raise ValueError("tangential torus |J| = E carries no ds dtheta chart")
    alpha = -math.asin(J / E)
    return 1.0 / (2.0 * math.pi * 2.0 * math.cos(alpha))


def trace(p: PhasePoint, taus) -> list[tuple]:
    """Sample the orbit of p at the given times.

    Rows are (tau, x, y, xi_x, xi_y, s, theta, E, J, alpha), matching the CSV
    emitted by the command-line `trace` experiment.
    """
    rows = []
    for tau in taus:
        q = flow(p, float(tau))
        aa = to_action_angle(q)
        rows.append(
            (float(tau), q.x, q.y, q.xi_x, q.xi_y, aa.s, aa.theta, aa.E, aa.J, aa.alpha)
        )
    return rows


def sup_discrepancy(angles: np.ndarray) -> float:
    """Sup-norm discrepancy of points on the circle against the uniform measure."""
    u = np.sort(wrap_angle(np.asarray(angles)) / (2.0 * math.pi))
    n = u.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))
