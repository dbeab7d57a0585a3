"""Quasimode builders and residual diagnostics.

A quasimode here is a finite expansion u = sum c_{m,k} psi_{m,k} over Dirichlet
disk modes together with a semiclassical parameter h and an energy E0, meant to
make (-h^2 Lap + h^2 V - E0^2) u small in L^2.  Because the expansion lives in
a finite Galerkin basis, the residual norm is computed exactly in-basis:

    ||r|| = ||(h^2 A - E0^2 I) c||_2,    A the matrix of -Lap + V,

which for V = 0 reduces to sqrt(sum |c|^2 (h^2 j^2 - E0^2)^2).  Exact
eigenmodes give residual 0; spectral clusters of half-width R(lambda) around
lambda give residual of order R(lambda)/lambda ~ h^2 when R is bounded.

The angular index m of a mode carries angular momentum J = h m, so a family
concentrating on the invariant set {alpha = alpha0} selects h m close to
J* = -E0 sin(alpha0).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import diskmodes, specfun
from .diskmodes import GalerkinOperator, ModeIndex
from .potentials import Potential, ZERO

__all__ = [
    "Quasimode",
    "QuasimodeFamily",
    "OrderReport",
    "single_mode",
    "whispering_gallery",
    "cluster",
    "torus_packet",
    "residual_norm",
    "classify_family",
    "save_quasimode",
    "load_quasimode",
]

_NORM_TOL = 1e-12


@dataclass
class Quasimode:
    """Finite coefficient expansion over Dirichlet disk modes."""

    E0: float
    h: float
    modes: list  # list[ModeIndex]
    coeffs: np.ndarray  # complex, unit l2 norm
    potential: str = "zero"
    family: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.h <= 0:
            raise ValueError("h must be positive")
        if len(self.modes) != self.coeffs.size:
            raise ValueError("modes and coeffs disagree in length")
        total = float(np.sum(np.abs(self.coeffs) ** 2))
        if abs(total - 1.0) > _NORM_TOL:
            raise ValueError(f"coefficients must have unit norm, got {total}")

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def evaluate(self, r, theta):
        """u(r, theta), broadcasting over array arguments."""
        out = None
        for md, c in zip(self.modes, self.coeffs):
            term = c * diskmodes.eigenmode_eval(md, r, theta)
            out = term if out is None else out + term
        return out


@dataclass
class QuasimodeFamily:
    members: list  # list[Quasimode], h strictly decreasing
    target_order: float = 2.0

    def __post_init__(self):
        hs = [q.h for q in self.members]
        if any(b >= a for a, b in zip(hs, hs[1:])):
            raise ValueError("family must have strictly decreasing h")

    @property
    def hs(self) -> np.ndarray:
        return np.array([q.h for q in self.members])


def single_mode(m: int, k: int, E0: float = 1.0) -> Quasimode:
    """The exact eigenmode psi_{m,k} as a quasimode with h = E0 / j."""
    md = diskmodes.mode(m, k)
    return Quasimode(E0=E0, h=E0 / md.j, modes=[md], coeffs=np.array([1.0 + 0j]),
                     family="single_mode", metadata={"m": m, "k": k})


def whispering_gallery(m: int, E0: float = 1.0) -> Quasimode:
    """psi_{m,1} for large m: interior mass escapes to the boundary as m grows."""
    if m < 1:
        raise ValueError("whispering-gallery modes need m >= 1")
    q = single_mode(m, 1, E0)
    q.family = "whispering_gallery"
    return q


def cluster(lambda_center: float, window: float, V: Potential = ZERO,
            basis=None, op: GalerkinOperator | None = None, rule="equal",
            E0: float = 1.0) -> Quasimode:
    """Normalised combination of Galerkin eigenfunctions of -Lap + V with
    eigenvalue in [lambda - window, lambda + window]; h = E0 lambda^{-1/2}.

    rule: "equal" or an explicit weight vector over the window (normalised
    here).  The in-basis residual and the bound window/lambda * E0^2 (plus
    Galerkin truncation slack for V != 0) are recorded in metadata.
    """
    if lambda_center <= 0 or window < 0:
        raise ValueError("need lambda_center > 0 and window >= 0")
    if V.is_zero and op is None:
        if basis is None:
            raise ValueError("cluster needs a basis or a Galerkin operator")
        eigs = np.array([md.lam for md in basis])
        vecs = None
        modes = list(basis)
    else:
        if op is None:
            op = diskmodes.galerkin_matrix(V, basis)
        eigs, vecs = diskmodes.hermitian_eigensolve(op.matrix)
        modes = list(op.basis)
    sel = np.flatnonzero(np.abs(eigs - lambda_center) <= window)
    if sel.size == 0:
        raise ValueError(
            f"no eigenvalue in [{lambda_center - window}, {lambda_center + window}]")
    if isinstance(rule, str):
        if rule != "equal":
            raise ValueError(f"unknown coefficient rule {rule!r}")
        v = np.full(sel.size, 1.0 / math.sqrt(sel.size), dtype=complex)
    else:
        v = np.asarray(rule, dtype=complex)
        if v.size != sel.size:
            raise ValueError("weight vector length must match the window content")
        v = v / np.linalg.norm(v)
    if vecs is None:
        coeffs_modes = [modes[i] for i in sel]
        coeffs = v
    else:
        coeffs_modes = modes
        coeffs = vecs[:, sel] @ v
        coeffs = coeffs / np.linalg.norm(coeffs)
    h = E0 / math.sqrt(lambda_center)
    q = Quasimode(E0=E0, h=h, modes=coeffs_modes, coeffs=coeffs, potential=V.name,
                  family="cluster",
                  metadata={"lambda_center": lambda_center, "window": window,
                            "n_in_window": int(sel.size)})
    res = residual_norm(q, V, op=op)
    q.metadata["residual"] = res
    q.metadata["residual_bound"] = (window / lambda_center) * E0**2
    if not V.is_zero:
        q.metadata["residual_bound_note"] = (
            "bound refers to the Galerkin spectrum; truncation of the basis "
            "adds unquantified slack"
        )
    return q


def torus_packet(alpha0: float, E0: float = 1.0, h_target: float = 0.05,
                 width: float | None = None) -> Quasimode:
    """Gaussian-weighted superposition of modes whose lattice point
    (h m, h j_{m,k}) lies within `width` of (J*, E0), J* = -E0 sin(alpha0).

    h is set to E0 / j of the central mode, so its energy atom sits at E0
    exactly.  V = 0 only.
    """
    alpha0 = float(alpha0)
    if not -math.pi / 2 < alpha0 < math.pi / 2:
        raise ValueError("alpha0 must lie in (-pi/2, pi/2)")
    if width is None:
        width = 2.2 * h_target
    j_star = -E0 * math.sin(alpha0)
    m_center = round(j_star / h_target)
    target_j = E0 / h_target
    candidates = specfun.zeros_up_to(abs(m_center), target_j + 4 * math.pi)
    if not candidates:
        raise ValueError("no radial zero near the requested energy; decrease h_target")
    zc = min(candidates, key=lambda z: abs(z.value - target_j))
    h = E0 / zc.value
    lo_m = math.ceil((j_star - width) / h)
    hi_m = math.floor((j_star + width) / h)
    modes, amps = [], []
    sigma = 0.5 * width
    for mm in range(lo_m, hi_m + 1):
        for z in specfun.zeros_up_to(abs(mm), (E0 + width) / h):
            if abs(h * z.value - E0) > width:
                continue
            dj = h * mm - j_star
            de = h * z.value - E0
            modes.append(ModeIndex(mm, z.k, z.value, z.value**2))
            amps.append(math.exp(-(dj * dj + de * de) / (2.0 * sigma * sigma)))
    if not modes:
        raise ValueError("selection window is empty; enlarge width or h_target")
    amps = np.asarray(amps, dtype=complex)
    amps = amps / np.linalg.norm(amps)
    return Quasimode(E0=E0, h=h, modes=modes, coeffs=amps, family="torus_packet",
                     metadata={"alpha0": alpha0, "width": width,
                               "m_center": m_center, "j_center": zc.value})


def residual_norm(q: Quasimode, V: Potential = ZERO,
                  op: GalerkinOperator | None = None) -> float:
    """||(-h^2 Lap + h^2 V - E0^2) u||_{L^2}, exactly in-basis."""
    if V.is_zero and op is None:
        lams = np.array([md.lam for md in q.modes])
        return float(np.sqrt(np.sum(q.weights * (q.h**2 * lams - q.E0**2) ** 2)))
    if op is None:
        raise ValueError("a Galerkin operator is required for a nonzero potential")
    c = np.zeros(len(op.basis), dtype=complex)
    for md, cc in zip(q.modes, q.coeffs):
        c[op.index_of(md)] = cc  # KeyError if the support escapes the basis
    return float(np.linalg.norm(q.h**2 * (op.matrix @ c) - q.E0**2 * c))


@dataclass
class OrderReport:
    hs: np.ndarray
    residuals: np.ndarray
    slope: float | None
    label: str

    def __str__(self):
        s = "all residuals at rounding level" if self.slope is None else f"slope {self.slope:.4f}"
        return f"{self.label} ({s})"


def classify_family(family: QuasimodeFamily, V: Potential = ZERO,
                    ops=None) -> OrderReport:
    """Least-squares slope of log residual against log h.

    Families whose residuals vanish identically are labelled o(h^2); otherwise
    the label reflects whether the slope is consistent with h^2 decay.
    """
    members = family.members
    if len(members) < 3:
        raise ValueError("need at least 3 family members to fit an order")
    if ops is None:
        ops = [None] * len(members)
    res = np.array([residual_norm(q, V, op=o) for q, o in zip(members, ops)])
    hs = family.hs
    if np.max(res) <= 1e-12:
        return OrderReport(hs, res, None, "o(h^2)")
    if np.min(res) <= 0.0:
        raise ValueError("mixed zero and nonzero residuals; family is inhomogeneous")
    slope, _ = np.polyfit(np.log(hs), np.log(res), 1)
    slope = float(slope)
    if slope > 2.1:
        label = "o(h^2)"
    elif slope >= 1.9:
        label = "O(h^2)"
    else:
        label = "coarser than h^2"
    return OrderReport(hs, res, slope, label)


# ---------------------------------------------------------------------------
# JSON persistence (bit-exact round trip)


def save_quasimode(q: Quasimode, path) -> None:
    payload = {
        "E0": q.E0,
        "h": q.h,
        "potential": q.potential,
        "modes": [
            {"m": md.m, "k": md.k, "re": float(c.real), "im": float(c.imag)}
            for md, c in zip(q.modes, q.coeffs)
        ],
    }
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_quasimode(path) -> Quasimode:
    with open(path, encoding="ascii") as fh:
        payload = json.load(fh)
    modes = [diskmodes.mode(entry["m"], entry["k"]) for entry in payload["modes"]]
    coeffs = np.array([complex(entry["re"], entry["im"]) for entry in payload["modes"]])
    return Quasimode(E0=payload["E0"], h=payload["h"], modes=modes, coeffs=coeffs,
                     potential=payload["potential"])
