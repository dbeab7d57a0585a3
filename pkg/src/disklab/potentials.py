"""Named bounded potentials on the closed disk.

Potentials are pointwise-evaluable callables of polar coordinates, vectorised
over numpy arrays, with flags the Galerkin assembly uses to pick fast paths
(radial => block-diagonal in the angular index, even in theta => real matrix).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["Potential", "ZERO", "RSQ", "X", "XSQ", "Y", "constant", "by_name"]


@dataclass(frozen=True)
class Potential:
    name: str
    fn: Callable  # fn(r, theta) -> array, broadcasting
    radial: bool = False
    even_theta: bool = True
    smooth: bool = True
    bound: float = 1.0  # sup |V| over the closed disk

    def __call__(self, r, theta):
        return self.fn(r, theta)

    @property
    def is_zero(self) -> bool:
        return self.name == "zero"

    def as_observable(self):
        """Adapt to a phase-space observable a(x, y, xi_x, xi_y)."""

        def obs(x, y, xi_x, xi_y):
            return self.fn(np.hypot(x, y), np.arctan2(y, x))

        return obs


ZERO = Potential("zero", lambda r, th: np.zeros(np.broadcast(r, th).shape), radial=True, bound=0.0)
RSQ = Potential("rsq", lambda r, th: np.broadcast_to(np.asarray(r, float) ** 2, np.broadcast(r, th).shape), radial=True, bound=1.0)
X = Potential("x", lambda r, th: r * np.cos(th), bound=1.0)
Y = Potential("y", lambda r, th: r * np.sin(th), even_theta=False, bound=1.0)
XSQ = Potential("xsq", lambda r, th: (r * np.cos(th)) ** 2, bound=1.0)


def constant(c: float) -> Potential:
    c = float(c)
    return Potential(
        f"const:{c!r}",
        lambda r, th: np.full(np.broadcast(r, th).shape, c),
        radial=True,
        bound=abs(c),
    )


def radial_step(r_cut: float, height: float = 1.0) -> Potential:
    """Discontinuous radial well: height inside r < r_cut, 0 outside."""
    r_cut, height = float(r_cut), float(height)
    return Potential(
        f"step:{r_cut!r}:{height!r}",
        lambda r, th: np.where(np.broadcast_to(np.asarray(r, float), np.broadcast(r, th).shape) < r_cut, height, 0.0),
        radial=True,
        smooth=False,
        bound=abs(height),
    )


def by_name(spec: str) -> Potential:
    """Parse a potential descriptor: zero | rsq | x | y | xsq | const:<c> | step:<r>:<h>."""
    if spec == "zero":
        return ZERO
    if spec == "rsq":
        return RSQ
    if spec == "x":
        return X
    if spec == "y":
        return Y
    if spec == "xsq":
        return XSQ
    if spec.startswith("const:"):
        return constant(float(spec.split(":", 1)[1]))
    if spec.startswith("step:"):
        parts = spec.split(":")
        return radial_step(float(parts[1]), float(parts[2]) if len(parts) > 2 else 1.0)
    raise ValueError(f"unknown potential descriptor {spec!r}")
