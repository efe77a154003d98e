"""Spectrum of the scaled rotating-wave Hamiltonian ``g`` for period tripling.

In the Fock basis of the rotating frame (``Q + iP = sqrt(2 lam) a``)

    g = 1/4 (lam (2n + 1) - 1)^2 - (f/6) (2 lam)^{3/2} (a^3 + a^dagger^3),

which couples only Fock states with equal ``n mod 3``. Each sector ``k`` is
diagonalized separately.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.linalg import eigh

from ._parallel import parallel_map
from .errors import ConvergenceError, ModelValidityError
from .fock import (FockBasis, SectorBasis, coherent_state, embed,
                   ladder_cubed_elements, sector_split)

HERMITIAN_TOL = 1e-12
RESIDUAL_TOL = 1e-10
TRUNCATION_TOL = 1e-10
CROSSING_RTOL = 1e-6
MIN_WELL_F = 0.05


@dataclass
class SymmetryBlock:
    k: int
    f: float
    lam: float
    sector: SectorBasis
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def full_vector(self, level: int, dim: int) -> np.ndarray:
        return embed(self.sector, self.eigenvectors[:, level], dim)


@dataclass
class MultipletRecord:
    f: float
    lam: float
    g_k: tuple[float, float, float]
    splittings: tuple[float, float, float]
    quasienergies: tuple[float, float, float]


@dataclass
class IntrawellState:
    m: int
    amplitudes: np.ndarray


@dataclass(frozen=True)
class Crossing:
    f_cross: float
    k_pair: tuple[int, int]
    method: str = "numeric"


@dataclass
class Triplet:
    """Lowest eigenpair of each symmetry sector at one ``(f, lam)``."""

    f: float
    lam: float
    n_max: int
    energies: np.ndarray
    vectors: list[np.ndarray] = field(repr=False)


def well_radius(f: float) -> float:
    return 0.5 * (f + math.sqrt(f * f + 4))


def default_nmax(f: float, lam: float) -> int:
    """Truncation with ample room above the wells (mean occupation ~ Q0^2 / 2 lam)."""
    return max(60, math.ceil(12 * well_radius(f) ** 2 / (2 * lam)))


def _coupling(f: float, lam: float, n: np.ndarray) -> np.ndarray:
    return -(f / 6) * (2 * lam) ** 1.5 * np.sqrt((n + 1) * (n + 2) * (n + 3))


def build_g_block(f: float, lam: float, sector: SectorBasis) -> np.ndarray:
    n = sector.indices.astype(float)
    mat = np.diag(0.25 * (lam * (2 * n + 1) - 1) ** 2)
    off = _coupling(f, lam, n[:-1])
    return mat + np.diag(off, 1) + np.diag(off, -1)


def build_g_full(f: float, lam: float, basis: FockBasis) -> np.ndarray:
    n = np.arange(basis.dim, dtype=float)
    diag = np.diag(0.25 * (lam * (2 * n + 1) - 1) ** 2)
    return diag - (f / 6) * (2 * lam) ** 1.5 * ladder_cubed_elements(basis)


def diagonalize(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""
    matrix = np.asarray(matrix)
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    if np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    vals, vecs = eigh(matrix)
    resid = np.linalg.norm(matrix @ vecs - vecs * vals, axis=0)
    if resid.size and resid.max() > RESIDUAL_TOL * scale:
        raise ConvergenceError(f"eigen-residual {resid.max():.3e} exceeds tolerance")
    return vals, vecs


def symmetry_blocks(f: float, lam: float, n_max: int) -> list[SymmetryBlock]:
    out = []
    for sector in sector_split(FockBasis(n_max, 3)):
        mat = build_g_block(f, lam, sector)
        vals, vecs = diagonalize(mat)
        out.append(SymmetryBlock(sector.k, f, lam, sector, mat, vals, vecs))
    return out


def lowest_triplet(f: float, lam: float, n_max: int | None = None, level: int = 0,
                   check: bool = False) -> Triplet:
    """Level ``level`` of each sector; ``check`` verifies truncation convergence."""
    if f < 0 or lam <= 0:
        raise ModelValidityError("need f >= 0 and lam > 0")
    n_max = default_nmax(f, lam) if n_max is None else n_max
    blocks = symmetry_blocks(f, lam, n_max)
    energies = np.array([b.eigenvalues[level] for b in blocks])
    if check:
        bigger = np.array([b.eigenvalues[level] for b in symmetry_blocks(f, lam, n_max + 6)])
        if np.max(np.abs(bigger - energies)) > TRUNCATION_TOL:
            raise ConvergenceError(
                f"truncation n_max={n_max} not converged at f={f}, lam={lam}")
    vectors = [b.full_vector(level, n_max + 1) for b in blocks]
    return Triplet(f, lam, n_max, energies, vectors)


def fold_quasienergy(E: float, k: int, K: int = 3, omegaF: float = 1.0,
                     hbar: float = 1.0) -> float:
    """Quasienergy of the Floquet state built from a sector-``k`` RWA eigenstate."""
    period = hbar * omegaF
    eps = math.fmod(E + period * k / K, period)
    if eps < 0:
        eps += period
    return 0.0 if eps >= period else eps


def multiplet_record(f: float, lam: float, n_max: int | None = None,
                     detuning_ratio: float = 1 / 303) -> MultipletRecord:
    """Lowest triplet at ``(f, lam)``; quasienergies in units of ``hbar*omegaF``.

    ``Xi / (hbar omegaF) = detuning_ratio / lam`` fixes the conversion of the
    dimensionless ``g`` to quasienergy.
    """
    g = lowest_triplet(f, lam, n_max).energies
    scale = detuning_ratio / lam
    eps = tuple(fold_quasienergy(scale * g[k], k, 3) for k in range(3))
    return MultipletRecord(f, lam, tuple(g), tuple(g - g[0]), eps)


def scan_f(f_grid, lam: float, n_max: int | None = None, detuning_ratio: float = 1 / 303,
           workers: int | None = None) -> list[MultipletRecord]:
    f_grid = np.asarray(f_grid, dtype=float)
    if np.any(np.diff(f_grid) < 0):
        raise ValueError("f grid must be sorted ascending")
    if n_max is None:
        n_max = default_nmax(float(f_grid.max()), lam)
    return parallel_map(lambda f: multiplet_record(float(f), lam, n_max, detuning_ratio),
                        f_grid, workers)


def _bisect_crossing(f_lo, f_hi, d_lo, pair, lam, n_max):
    k, kp = pair
    while f_hi - f_lo > CROSSING_RTOL * max(abs(f_hi), 1e-300):
        mid = 0.5 * (f_lo + f_hi)
        g = lowest_triplet(mid, lam, n_max).energies
        d = g[k] - g[kp]
        if d == 0:
            return mid
        if np.sign(d) == np.sign(d_lo):
            f_lo, d_lo = mid, d
        else:
            f_hi = mid
    return 0.5 * (f_lo + f_hi)


def find_crossings(records: list[MultipletRecord], n_max: int | None = None) -> list[Crossing]:
    """Bracket sign changes of ``g^(k) - g^(k')`` on the scan grid, then bisect."""
    if not records:
        return []
    lam = records[0].lam
    if n_max is None:
        n_max = default_nmax(max(r.f for r in records), lam)
    out = []
    for pair in combinations(range(3), 2):
        k, kp = pair
        diffs = np.array([r.g_k[k] - r.g_k[kp] for r in records])
        for i in range(len(records) - 1):
            if diffs[i] == 0:
                out.append(Crossing(records[i].f, pair))
            elif diffs[i] * diffs[i + 1] < 0:
                fc = _bisect_crossing(records[i].f, records[i + 1].f, diffs[i], pair, lam, n_max)
                out.append(Crossing(fc, pair))
    return sorted(out, key=lambda c: c.f_cross)


def fix_phases(vectors, f: float, lam: float) -> list[np.ndarray]:
    """Rotate each vector so its overlap with the coherent state at ``(Q0, 0)`` is real positive."""
    dim = len(vectors[0])
    ref = coherent_state(well_radius(f) / math.sqrt(2 * lam), dim)
    out = []
    for v in vectors:
        ov = np.vdot(ref, v)
        if abs(ov) < 1e-300:
            raise ModelValidityError("sector eigenvector orthogonal to the well coherent state")
        out.append(np.asarray(v, dtype=complex) * (abs(ov) / ov))
    return out


def well_centers(f: float) -> list[complex]:
    """Phase-space minima ``Q_m + i P_m`` of g, counted counterclockwise from ``P_0 = 0``."""
    Q0 = well_radius(f)
    return [Q0 * np.exp(2j * np.pi * m / 3) for m in range(3)]


def intrawell_states(vectors, f: float, lam: float,
                     localization_threshold: float = 0.5) -> list[IntrawellState]:
    """Broken-symmetry states ``Psi_m = 3^{-1/2} sum_k phi^(k) exp(2 pi i m k / 3)``.

    ``vectors`` are the lowest eigenvectors of sectors k = 0, 1, 2 in the full
    Fock basis.
    """
    if f < MIN_WELL_F:
        raise ModelValidityError(f"f={f} below {MIN_WELL_F}: wells are not separated")
    phis = fix_phases(vectors, f, lam)
    dim = len(phis[0])
    states = []
    for m, center in enumerate(well_centers(f)):
        psi = sum(phis[k] * np.exp(2j * np.pi * m * k / 3) for k in range(3)) / math.sqrt(3)
        psi = psi / np.linalg.norm(psi)
        ref = coherent_state(center / math.sqrt(2 * lam), dim)
        weight = abs(np.vdot(ref, psi)) ** 2 / np.vdot(ref, ref).real
        if weight < localization_threshold:
            raise ModelValidityError(
                f"Psi_{m} overlap {weight:.3f} with its well coherent state is below "
                f"{localization_threshold}")
        states.append(IntrawellState(m, psi))
    return states


def overlap_defect(states: list[IntrawellState]) -> float:
    """Largest deviation of the intrawell Gram matrix from the identity."""
    mat = np.array([s.amplitudes for s in states])
    gram = mat.conj() @ mat.T
    return float(np.max(np.abs(gram - np.eye(len(states)))))
