"""Shared numerical helpers: quadrature rules, low-discrepancy sampling, warnings."""

from __future__ import annotations

import numpy as np


class PrecisionWarning(UserWarning):
    """A quadrature or truncation self-check exceeded its tolerance."""


class GuardError(RuntimeError):
    """A numerical guard was violated (e.g. sweep window beyond the trusted spectrum)."""


def gauss_legendre(a: float, b: float, n: int):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(int(n))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def angular_grid(n: int):
    """Uniform periodic grid on [0, 2pi); the rectangle rule on it integrates
    trigonometric polynomials of degree < n exactly."""
    n = int(n)
    thetas = 2.0 * np.pi * np.arange(n) / n
    return thetas, 2.0 * np.pi / n


_HALTON_PRIMES = (2, 3, 5, 7, 11, 13)


def halton(n: int, dims: int, skip: int = 20) -> np.ndarray:
    """Deterministic Halton sequence, shape (n, dims), entries in (0, 1)."""
    if dims > len(_HALTON_PRIMES):
        raise ValueError("halton supports at most %d dimensions" % len(_HALTON_PRIMES))
    out = np.empty((n, dims))
    for d in range(dims):
        base = _HALTON_PRIMES[d]
        idx = np.arange(skip + 1, skip + n + 1, dtype=np.int64)
        col = np.zeros(n)
        f = 1.0
        while idx.any():
            f /= base
            col += f * (idx % base)
            idx //= base
        out[:, d] = col
    return out


def wrap_angle(theta):
    """Map an angle (array ok) to [0, 2pi)."""
    return np.mod(theta, 2.0 * np.pi)
