"""Bessel functions of the first kind: values, derivatives, and positive zeros.

Self-contained kernel (no scipy): the rest of the package builds the Dirichlet
disk spectrum out of these three routines.  Evaluation strategy, chosen so the
absolute error stays below 1e-12 for x <= 1e3:

* x < 8: the alternating power series.  Its cancellation grows like e^x, so
  8 is the last point where double precision keeps ~1e-13 absolute accuracy.
* 8 <= x: Miller backward recurrence, normalised with
  J_0 + 2*(J_2 + J_4 + ...) = 1.  Start order is x + 14*x^(1/3) + margin,
  high enough that the minimal solution has decayed by ~e^-40.
* x >= 2e4 and x >= 8*m^2: Hankel modulus/phase asymptotics (cheaper than the
  recurrence once x is this large; the order restriction keeps the expansion
  inside its convergent-looking range).

Zeros are bracketed by an outward scan (first bracket seeded by the large-order
asymptotic j_{m,1} ~ m + 1.8557*m^(1/3)) and polished by safeguarded Newton.
Every zero is cached per (m, k); the cache is append-only so repeated lookups
are bit-identical.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BesselZero",
    "ConvergenceError",
    "bessel_j",
    "bessel_j_prime",
    "bessel_zero",
    "zeros_up_to",
    "dump_zero_table",
]

_SERIES_MAX_X = 8.0
_ASYMPTOTIC_MIN_X = 2.0e4
_MAX_X = 1.0e6


class ConvergenceError(RuntimeError):
    """A zero search failed to converge within its iteration budget."""


@dataclass(frozen=True)
class BesselZero:
    """The k-th positive zero j_{m,k} of J_m."""

    m: int
    k: int
    value: float


def _check_order(m) -> int:
    mi = int(m)
    if mi != m or mi < 0:
        raise ValueError(f"order must be a nonnegative integer, got {m!r}")
    return mi


def bessel_j(m, x):
    """J_m(x) for integer m >= 0 and x in [0, 1e6]; scalar or ndarray x."""
    m = _check_order(m)
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr).ravel()
    if arr.size and (arr.min() < 0.0 or arr.max() > _MAX_X):
        raise ValueError("argument must lie in [0, 1e6]")
    out = np.empty_like(arr)
    small = arr < _SERIES_MAX_X
    asym = (~small) & (arr >= _ASYMPTOTIC_MIN_X) & (arr >= 8.0 * m * m)
    mid = ~(small | asym)
    if small.any():
        out[small] = _series_j(m, arr[small])
    if mid.any():
        out[mid] = _miller_j(m, arr[mid])
    if asym.any():
        out[asym] = _hankel_j(m, arr[asym])
    if scalar:
        return float(out[0])
    return out.reshape(np.shape(x))


def bessel_j_prime(m, x):
    """J_m'(x) via J_m' = (J_{m-1} - J_{m+1})/2, with J_0' = -J_1."""
    m = _check_order(m)
    if m == 0:
        return -bessel_j(1, x) if np.ndim(x) == 0 else -bessel_j(1, x)
    return 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))


def _series_j(m, x):
    """Power series sum_k (-1)^k (x/2)^(m+2k) / (k! (m+k)!); x < 8 only."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0.0
    if m == 0:
        out[~pos] = 1.0
    if not pos.any():
        return out
    xr = x[pos]
    half = 0.5 * xr
    logt0 = m * np.log(half) - math.lgamma(m + 1)
    term = np.where(logt0 < -745.0, 0.0, np.exp(logt0))
    total = term.copy()
    q = half * half
    for k in range(1, 80):
        term = -term * q / (k * (m + k))
        total += term
        if np.max(np.abs(term)) < 1e-20 * max(1.0, float(np.max(np.abs(total)))):
            break
    out[pos] = total
    return out


def _miller_start(m: int, xmax: float) -> int:
    start = int(max(m, xmax) + 14.0 * max(xmax, 1.0) ** (1.0 / 3.0) + 26)
    return start + (start % 2)


def _miller_j(m, x):
    """Backward recurrence normalised by J_0 + 2*sum J_{2k} = 1 (vector in x)."""
    x = np.asarray(x, dtype=float)
    # bucket by magnitude so small arguments do not pay for the largest start order
    order = np.argsort(x)
    out = np.empty_like(x)
    i = 0
    while i < x.size:
        lo_val = x[order[i]]
        jend = i
        while jend < x.size and x[order[jend]] <= 2.0 * lo_val + 64.0:
            jend += 1
        sel = order[i:jend]
        out[sel] = _miller_block(m, x[sel])
        i = jend
    return out


def _miller_block(m, x):
    start = _miller_start(m, float(np.max(x)))
    jp = np.zeros_like(x)            # J_{n+1}
    jc = np.full_like(x, 1e-30)      # J_n, n = start
    ssum = np.zeros_like(x)
    target = np.zeros_like(x)
    for n in range(start, 0, -1):
        jm = (2.0 * n) / x * jc - jp
        jp = jc
        jc = jm                       # jc = J_{n-1}
        if n - 1 == m:
            target = jc.copy()
        if (n - 1) % 2 == 0 and n - 1 != 0:
            ssum = ssum + 2.0 * jc
        big = np.abs(jc) > 1e250
        if big.any():
            scale = np.where(big, 1e-250, 1.0)
            jc = jc * scale
            jp = jp * scale
            ssum = ssum * scale
            target = target * scale
    ssum = ssum + jc                  # add J_0
    return target / ssum


def _hankel_j(m, x):
    """Large-argument modulus/phase expansion; requires x >> m^2."""
    x = np.asarray(x, dtype=float)
    mu = 4.0 * m * m
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, 24):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if k % 2 == 1:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += -term if (k // 2) % 2 == 1 else term
        if np.max(np.abs(term)) < 1e-17:
            break
    chi = x - (0.5 * m + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


# ---------------------------------------------------------------------------
# zeros


_zero_rows: dict[int, list[float]] = {}
_zero_lock = threading.Lock()


def _first_zero_lower_bound(m: int) -> float:
    if m == 0:
        return 1.5
    return m + 1.8557571 * m ** (1.0 / 3.0)


def _refine_zero(m: int, a: float, b: float) -> float:
    """Safeguarded Newton inside a sign-change bracket [a, b]."""
    fa = bessel_j(m, a)
    fb = bessel_j(m, b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise ConvergenceError(f"no sign change in bracket for j_{{{m},?}}")
    x = 0.5 * (a + b)
    for _ in range(100):
        f = bessel_j(m, x)
        if f == 0.0:
            return x
        if f * fa < 0.0:
            b = x
        else:
            a, fa = x, f
        d = bessel_j_prime(m, x)
        step_ok = d != 0.0
        if step_ok:
            xn = x - f / d
            step_ok = a < xn < b
        xn = xn if step_ok else 0.5 * (a + b)
        if abs(xn - x) <= 1e-13 * max(1.0, abs(xn)):
            return xn
        x = xn
    raise ConvergenceError(f"zero refinement for order {m} did not converge")


def _extend_row(m: int, need_k: int | None = None, up_to: float | None = None) -> None:
    row = _zero_rows.setdefault(m, [])
    scan_step = 1.0
    while (need_k is not None and len(row) < need_k) or (
        up_to is not None and (not row or row[-1] <= up_to)
    ):
        if not row:
            a = _first_zero_lower_bound(m)
        else:
            a = row[-1] + 0.5
        fa = bessel_j(m, a)
        found = False
        for _ in range(400):
            b = a + scan_step
            fb = bessel_j(m, b)
            if fa == 0.0 or fa * fb < 0.0:
                found = True
                break
            a, fa = b, fb
        if not found:
            raise ConvergenceError(f"could not bracket zero {len(row) + 1} of J_{m}")
        row.append(_refine_zero(m, a, b))


def bessel_zero(m, k) -> BesselZero:
    """The k-th positive zero of J_m (k >= 1), accurate to ~1e-12 relative."""
    m = _check_order(m)
    k = int(k)
    if k < 1:
        raise ValueError("zero index k must be >= 1")
    row = _zero_rows.get(m)
    if row is None or len(row) < k:
        with _zero_lock:
            _extend_row(m, need_k=k)
        row = _zero_rows[m]
    return BesselZero(m, k, row[k - 1])


def zeros_up_to(m, x_max: float) -> list[BesselZero]:
    """All zeros j_{m,k} <= x_max, in increasing order."""
    m = _check_order(m)
    with _zero_lock:
        _extend_row(m, up_to=float(x_max))
    row = _zero_rows[m]
    return [BesselZero(m, k + 1, v) for k, v in enumerate(row) if v <= x_max]


def dump_zero_table(path, m_max: int, k_max: int) -> None:
    """Write the zero table as CSV `m,k,j` with 17 significant digits."""
    lines = ["m,k,j"]
    for m in range(int(m_max) + 1):
        for k in range(1, int(k_max) + 1):
            z = bessel_zero(m, k)
            lines.append(f"{m},{k},{z.value:.17g}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
