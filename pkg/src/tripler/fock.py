"""Truncated Fock-space operators and the Z_K sector decomposition."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


@dataclass(frozen=True)
class FockBasis:
    n_max: int
    K: int = 3

    def __post_init__(self):
        if self.K < 2:
            raise ValueError("K must be at least 2")
        if self.n_max < 3 * self.K:
            raise ValueError(f"n_max={self.n_max} too small; need n_max >= 3K = {3 * self.K}")

    @property
    def dim(self) -> int:
        return self.n_max + 1


@dataclass(frozen=True)
class SectorBasis:
    k: int
    indices: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.indices)


def annihilation(basis: FockBasis) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, basis.dim, dtype=float)), 1)


def number_operator(basis: FockBasis) -> np.ndarray:
    return np.diag(np.arange(basis.dim, dtype=float))


def ladder_cubed_elements(basis: FockBasis) -> np.ndarray:
    """Matrix of ``a^3 + a^dagger^3`` in the truncated basis."""
    n = np.arange(basis.dim - 3, dtype=float)
    off = np.sqrt((n + 1) * (n + 2) * (n + 3))
    return np.diag(off, 3) + np.diag(off, -3)


def rotation_phase(n, K: int = 3):
    """Eigenvalue ``exp(-2 pi i n / K)`` of the phase-plane rotation on ``|n>``."""
    return np.exp(-2j * np.pi * (np.asarray(n) % K) / K)


def rotation_matrix(basis: FockBasis) -> np.ndarray:
    return np.diag(rotation_phase(np.arange(basis.dim), basis.K))


def sector_split(basis: FockBasis) -> list[SectorBasis]:
    return [SectorBasis(k, np.arange(k, basis.dim, basis.K)) for k in range(basis.K)]


def sector_projector(basis: FockBasis, k: int) -> np.ndarray:
    p = np.zeros(basis.dim)
    p[k::basis.K] = 1.0
    return np.diag(p)


def embed(sector: SectorBasis, vec: np.ndarray, dim: int) -> np.ndarray:
    """Lift a sector vector into the full truncated basis."""
    out = np.zeros(dim, dtype=np.result_type(vec, float))
    out[sector.indices] = vec
    return out


def coherent_state(alpha: complex, dim: int) -> np.ndarray:
    """Fock amplitudes of the coherent state ``|alpha>`` (not renormalised)."""
    n = np.arange(dim)
    if alpha == 0:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1.0
        return out
    logmag = -abs(alpha) ** 2 / 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(logmag + 1j * n * np.angle(alpha))
