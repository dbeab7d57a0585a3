"""Dirichlet eigenbasis of the unit disk and Galerkin discretisation of -Lap + V.

The basis functions are

    psi_{m,k}(r, theta) = N_{m,k} J_{|m|}(j_{|m|,k} r) e^{i m theta},
    N_{m,k} = 1 / (sqrt(pi) |J'_{|m|}(j_{|m|,k})|),

orthonormal in L^2 of the disk with eigenvalue j^2 for -Lap.  Matrix elements
of a potential are computed by tensor quadrature: Gauss-Legendre in r against
the weight r, and a uniform angular grid whose rectangle rule is exact for
the trigonometric polynomials generated by the basis.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .potentials import Potential
from .util import PrecisionWarning, angular_grid, gauss_legendre

__all__ = [
    "ModeIndex",
    "GalerkinOperator",
    "mode",
    "basis_modes",
    "normalization",
    "eigenmode_eval",
    "normal_derivative_amplitude",
    "boundary_derivative_coeff",
    "galerkin_matrix",
    "hermitian_eigensolve",
    "sector_overlap",
    "angular_integrals",
    "save_galerkin",
    "load_galerkin",
]


@dataclass(frozen=True)
class ModeIndex:
    """Angular index m (signed), radial index k >= 1, zero j = j_{|m|,k}, lam = j^2."""

    m: int
    k: int
    j: float
    lam: float


def mode(m: int, k: int) -> ModeIndex:
    z = specfun.bessel_zero(abs(int(m)), int(k))
    return ModeIndex(int(m), int(k), z.value, z.value * z.value)


def basis_modes(m_max: int, j_max: float) -> list[ModeIndex]:
    """All modes with |m| <= m_max and j_{|m|,k} <= j_max, sorted by (lam, m, k)."""
    out = []
    for mm in range(int(m_max) + 1):
        for z in specfun.zeros_up_to(mm, float(j_max)):
            out.append(ModeIndex(mm, z.k, z.value, z.value**2))
            if mm > 0:
                out.append(ModeIndex(-mm, z.k, z.value, z.value**2))
    out.sort(key=lambda md: (md.lam, md.m, md.k))
    return out


def normalization(m: int, k: int) -> float:
    """N with integral |N J_{|m|}(j r) e^{i m theta}|^2 over the disk equal to 1."""
    z = specfun.bessel_zero(abs(int(m)), int(k))
    return 1.0 / (math.sqrt(math.pi) * abs(specfun.bessel_j_prime(abs(int(m)), z.value)))


def eigenmode_eval(md: ModeIndex, r, theta):
    """psi_{m,k}(r, theta); r may be scalar or array in [0, 1]."""
    r_arr = np.asarray(r, dtype=float)
    if r_arr.size and (r_arr.min() < 0.0 or r_arr.max() > 1.0 + 1e-12):
        raise ValueError("radius must lie in [0, 1]")
    n = normalization(md.m, md.k)
    radial = n * specfun.bessel_j(abs(md.m), md.j * r_arr)
    return radial * np.exp(1j * md.m * np.asarray(theta, dtype=float))


def normal_derivative_amplitude(md: ModeIndex) -> float:
    """|d_r psi_{m,k}| on the boundary circle: N j |J'(j)| = j / sqrt(pi)."""
    return md.j / math.sqrt(math.pi)


def boundary_derivative_coeff(md: ModeIndex) -> float:
    """Signed boundary coefficient N j J'(j) = sign(J'(j)) j / sqrt(pi)."""
    jp = specfun.bessel_j_prime(abs(md.m), md.j)
    return math.copysign(md.j / math.sqrt(math.pi), jp)


# ---------------------------------------------------------------------------
# quadrature defaults


def default_radial_order(j_max: float) -> int:
    return int(0.75 * j_max) + 40


def _radial_matrix(modes, r_nodes):
    """Rows N_p J_{|m_p|}(j_p r_i), grouped by |m| for vectorised evaluation."""
    out = np.empty((len(modes), r_nodes.size))
    for p, md in enumerate(modes):
        out[p] = normalization(md.m, md.k) * specfun.bessel_j(abs(md.m), md.j * r_nodes)
    return out


def angular_integrals(dms, t0: float, t1: float) -> np.ndarray:
    """Closed-form integrals of e^{i d theta} over (t0, t1) for each d in dms."""
    dms = np.asarray(dms, dtype=int)
    out = np.empty(dms.shape, dtype=complex)
    zero = dms == 0
    out[zero] = t1 - t0
    d = dms[~zero]
    out[~zero] = (np.exp(1j * d * t1) - np.exp(1j * d * t0)) / (1j * d)
    return out


def sector_overlap(modes, r0: float, r1: float, t0: float, t1: float,
                   n_r: int | None = None) -> np.ndarray:
    """Hermitian matrix of inner products over the annular sector
    r in (r0, r1), theta in (t0, t1): angular factors in closed form,
    radial Bessel products by Gauss-Legendre."""
    if not modes:
        raise ValueError("empty basis")
    j_max = max(md.j for md in modes)
    if n_r is None:
        n_r = default_radial_order(j_max)
    nodes, weights = gauss_legendre(float(r0), float(r1), n_r)
    rad = _radial_matrix(modes, nodes)
    rad_w = rad * (weights * nodes)
    radial_part = rad_w @ rad.T
    ms = np.array([md.m for md in modes])
    ang = angular_integrals(ms[None, :] - ms[:, None], float(t0), float(t1))
    gram = radial_part * ang
    return 0.5 * (gram + gram.conj().T)


@dataclass
class GalerkinOperator:
    """Dense matrix of -Lap + V over an ordered Dirichlet-mode basis."""

    basis: list
    matrix: np.ndarray
    potential: str
    n_r: int
    n_theta: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def lams(self) -> np.ndarray:
        return np.array([md.lam for md in self.basis])

    def index_of(self, md: ModeIndex) -> int:
        key = (md.m, md.k)
        lookup = self.__dict__.setdefault(
            "_lookup", {(b.m, b.k): i for i, b in enumerate(self.basis)}
        )
        if key not in lookup:
            raise KeyError(f"mode {key} is not in the Galerkin basis")
        return lookup[key]


def galerkin_matrix(V: Potential, basis, n_r: int | None = None,
                    n_theta: int | None = None, self_check: bool = True) -> GalerkinOperator:
    """Assemble A_pq = lam_p delta_pq + <psi_p, V psi_q>.

    The angular grid size is forced to at least 2 max|m_p - m_q| + 1 so the
    angular integrals are exact; when self_check is on, the assembly is
    repeated at doubled orders and a PrecisionWarning is raised if entries
    move by more than the contract (1e-8 for smooth V, 1e-4 otherwise).
    """
    basis = list(basis)
    if not basis:
        raise ValueError("empty basis")
    m_max = max(abs(md.m) for md in basis)
    j_max = max(md.j for md in basis)
    if n_r is None:
        n_r = default_radial_order(j_max)
    min_angular = 4 * m_max + 1
    if n_theta is None:
        n_theta = max(min_angular, 16)
    elif n_theta < min_angular:
        n_theta = min_angular
    mat = _assemble(V, basis, n_r, n_theta)
    diagnostics = {"n_r": n_r, "n_theta": n_theta}
    if self_check and not V.is_zero:
        mat2 = _assemble(V, basis, 2 * n_r, 2 * n_theta)
        drift = float(np.max(np.abs(mat - mat2)))
        diagnostics["quadrature_drift"] = drift
        tol = 1e-8 if V.smooth else 1e-4
        diagnostics["quadrature_tol"] = tol
        if drift > tol:
            warnings.warn(
                f"Galerkin quadrature self-check: order-doubling moved entries by "
                f"{drift:.3e} > {tol:.0e}",
                PrecisionWarning,
                stacklevel=2,
            )
    herm = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
    diagnostics["hermiticity_defect"] = herm
    mat = 0.5 * (mat + mat.conj().T)
    if not np.isrealobj(mat) and float(np.max(np.abs(mat.imag))) < 1e-14 * max(
        1.0, float(np.max(np.abs(mat.real)))
    ):
        mat = np.ascontiguousarray(mat.real)
    return GalerkinOperator(basis, mat, V.name, n_r, n_theta, diagnostics)


def _assemble(V: Potential, basis, n_r: int, n_theta: int) -> np.ndarray:
    lams = np.array([md.lam for md in basis])
    if V.is_zero:
        return np.diag(lams)
    nodes, weights = gauss_legendre(0.0, 1.0, n_r)
    thetas, dtheta = angular_grid(n_theta)
    vals = V(nodes[:, None], thetas[None, :])  # (n_r, n_theta)
    # angular transform: C[d, i] = integral V(r_i, theta) e^{i d theta} dtheta
    fft = np.fft.fft(vals, axis=1)  # sum_q V e^{-i d theta_q}
    real_entries = V.even_theta
    rad = _radial_matrix(basis, nodes)
    rad_w = rad * (weights * nodes)
    ms = [md.m for md in basis]
    blocks = {}
    for i, mm in enumerate(ms):
        blocks.setdefault(mm, []).append(i)
    n = len(basis)
    out = np.zeros((n, n), dtype=float if real_entries else complex)
    m_values = sorted(blocks)
    for ma in m_values:
        pa = blocks[ma]
        for mb in m_values:
            if V.radial and mb != ma:
                continue
            pb = blocks[mb]
            d = mb - ma
            # angular integral of V e^{i d theta}: rectangle rule via the FFT
            coeff = fft[:, (-d) % n_theta] * dtheta
            if real_entries:
                coeff = coeff.real
            if np.max(np.abs(coeff)) < 1e-300:
                continue
            out[np.ix_(pa, pb)] += (rad_w[pa] * coeff) @ rad[pb].T
    out[np.arange(n), np.arange(n)] += lams
    return out


def hermitian_eigensolve(matrix: np.ndarray):
    """Eigenpairs of a Hermitian matrix, ascending, with a deterministic phase
    convention (first component above threshold made positive real)."""
    h = np.asarray(matrix)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    if float(np.max(np.abs(h - h.conj().T))) > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian within 1e-12 (relative)")
    w, v = np.linalg.eigh(h)
    for col in range(v.shape[1]):
        vec = v[:, col]
        idx = np.flatnonzero(np.abs(vec) > 1e-8 * np.max(np.abs(vec)))
        lead = vec[idx[0]]
        if np.iscomplexobj(v):
            v[:, col] = vec * (lead.conjugate() / abs(lead))
        elif lead < 0:
            v[:, col] = -vec
    return w, v


# ---------------------------------------------------------------------------
# serialisation


def save_galerkin(op: GalerkinOperator, csv_path, descriptor_path) -> None:
    """Textual form: CSV of entries `p,q,re,im` plus a JSON sidecar."""
    n = len(op.basis)
    lines = ["p,q,re,im"]
    mat = np.asarray(op.matrix, dtype=complex)
    for p in range(n):
        for q in range(n):
            z = mat[p, q]
            lines.append(f"{p},{q},{float(z.real)!r},{float(z.imag)!r}")
    with open(csv_path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    desc = {
        "basis": [[md.m, md.k] for md in op.basis],
        "potential": op.potential,
        "n_r": op.n_r,
        "n_theta": op.n_theta,
        "diagnostics": {k: v for k, v in op.diagnostics.items()},
    }
    with open(descriptor_path, "w", encoding="ascii") as fh:
        json.dump(desc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_galerkin(csv_path, descriptor_path) -> GalerkinOperator:
    with open(descriptor_path, encoding="ascii") as fh:
        desc = json.load(fh)
    basis = [mode(m, k) for m, k in desc["basis"]]
    n = len(basis)
    mat = np.zeros((n, n), dtype=complex)
    with open(csv_path, encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != "p,q,re,im":
            raise ValueError("unexpected CSV header for a Galerkin operator")
        for line in fh:
            p, q, re, im = line.strip().split(",")
            mat[int(p), int(q)] = complex(float(re), float(im))
    if float(np.max(np.abs(mat.imag))) == 0.0:
        mat = np.ascontiguousarray(mat.real)
    return GalerkinOperator(basis, mat, desc["potential"], desc["n_r"], desc["n_theta"],
                            desc.get("diagnostics", {}))
