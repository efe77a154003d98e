"""Exact Floquet spectrum of the lab-frame driven Duffing oscillator.

The one-period propagator is an ordered product of midpoint exponentials
``exp(-i H(t_j + dt/2) dt / hbar)``, each exponentiated exactly through a
Hermitian eigendecomposition, so the monodromy matrix is unitary by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, schur

from .errors import ConvergenceError
from .fock import FockBasis, annihilation
from .params import LabParams, ScaledParams, to_scaled

EIGENPHASE_TOL = 1e-6
LEAKAGE_TOL = 1e-4


@dataclass
class LabHamiltonian:
    params: LabParams
    n_max: int
    q_matrix: np.ndarray
    p_matrix: np.ndarray
    H0: np.ndarray
    drive: np.ndarray  # coefficient of cos(omegaF t)

    def at(self, t: float) -> np.ndarray:
        return self.H0 + math.cos(self.params.omegaF * t) * self.drive

    @property
    def dim(self) -> int:
        return self.n_max + 1


@dataclass
class MonodromyResult:
    U: np.ndarray
    quasienergies: np.ndarray
    eigenvectors: np.ndarray
    tF: float
    hbar: float
    omegaF: float
    steps: int
    overlap_map: dict = field(default_factory=dict)


@dataclass
class RwaComparison:
    indices: tuple[int, int, int]
    overlaps: tuple[float, float, float]
    runner_up: tuple[float, float, float]
    quasienergies: tuple[float, float, float]
    spacing_dev: tuple[float, float, float]
    spacing_dev_rwa: tuple[float, float, float]
    leakage: float
    ambiguous: bool

    @property
    def spacing_err(self) -> float:
        """Largest deviation of a neighbouring quasienergy spacing from hbar*omegaF/3."""
        return max(abs(x) for x in self.spacing_dev)

    @property
    def rwa_residual(self) -> float:
        return max(abs(a - b) for a, b in zip(self.spacing_dev, self.spacing_dev_rwa))


def build_lab_hamiltonian(lab: LabParams, n_max: int) -> LabHamiltonian:
    FockBasis(n_max, 3)
    # pad so that truncated products carry exact matrix elements below n_max
    pad = FockBasis(n_max + 4, 3)
    a = annihilation(pad)
    x0 = math.sqrt(lab.hbar / (2 * lab.omega0))
    q = x0 * (a + a.T)
    p = 1j * (lab.hbar / (2 * x0)) * (a.T - a)
    q2 = q @ q
    q3 = q2 @ q
    q4 = q2 @ q2
    cut = slice(0, n_max + 1)
    n = np.arange(n_max + 1)
    H0 = np.diag(lab.hbar * lab.omega0 * (n + 0.5)) + 0.25 * lab.gamma * q4[cut, cut]
    drive = -(lab.F / 3) * q3[cut, cut]
    return LabHamiltonian(lab, n_max, q[cut, cut], p[cut, cut], H0, drive)


def _step(H: np.ndarray, dt: float, hbar: float) -> np.ndarray:
    e, v = eigh(H)
    return (v * np.exp(-1j * e * dt / hbar)) @ v.conj().T


def propagate(h: LabHamiltonian, t0: float, t1: float, steps: int) -> np.ndarray:
    dt = (t1 - t0) / steps
    U = np.eye(h.dim, dtype=complex)
    for j in range(steps):
        U = _step(h.at(t0 + (j + 0.5) * dt), dt, h.params.hbar) @ U
    return U


def propagate_period(h: LabHamiltonian, steps: int, periods: int = 1) -> MonodromyResult:
    """Monodromy over ``periods`` drive periods; quasienergies refer to one period."""
    lab = h.params
    tF = 2 * math.pi / lab.omegaF
    U = propagate(h, 0.0, periods * tF, steps * periods)
    T, Z = schur(U, output="complex")
    phases = np.angle(np.diag(T))
    # U psi = exp(-i eps periods tF / hbar) psi
    eps = (-phases * lab.hbar / (periods * tF)) % (lab.hbar * lab.omegaF / periods)
    return MonodromyResult(U, eps, Z, tF * periods, lab.hbar, lab.omegaF / periods, steps)


def unitarity_error(U: np.ndarray, interior: int | None = None) -> float:
    n = U.shape[0] if interior is None else interior
    D = U.conj().T @ U - np.eye(U.shape[0])
    return float(np.max(np.abs(D[:n, :n])))


def leakage(vec: np.ndarray, fraction: float = 0.1) -> float:
    """Weight of ``vec`` in the top ``fraction`` of the Fock basis."""
    top = int(math.ceil(len(vec) * (1 - fraction)))
    return float(np.sum(np.abs(vec[top:]) ** 2))


def match_states(mono: MonodromyResult, probes) -> list[tuple[int, float, float]]:
    """For each probe vector: (eigenvector index, best overlap, runner-up overlap)."""
    out = []
    for v in probes:
        ov = np.abs(mono.eigenvectors.conj().T @ v) ** 2
        order = np.argsort(ov)[::-1]
        out.append((int(order[0]), float(ov[order[0]]), float(ov[order[1]])))
    return out


def _wrap(x: float, period: float) -> float:
    return (x + period / 2) % period - period / 2


def match_to_rwa(mono: MonodromyResult, rwa_energies, rwa_vectors,
                 conversion: ScaledParams) -> RwaComparison:
    """Pair the lowest RWA triplet with monodromy eigenstates and compare spacings.

    ``rwa_energies`` are dimensionless ``g^(k)``; ``rwa_vectors`` are the sector
    eigenvectors in the Fock basis, which coincides with the lab frame at t = 0.
    """
    dim = mono.eigenvectors.shape[0]
    probes = []
    for v in rwa_vectors:
        v = np.asarray(v)[:dim]
        probes.append(np.concatenate([v, np.zeros(dim - len(v), dtype=v.dtype)]))
    found = match_states(mono, probes)
    idx = tuple(i for i, _, _ in found)
    best = tuple(o for _, o, _ in found)
    second = tuple(s for _, _, s in found)
    ambiguous = any(s > 0.9 * b for b, s in zip(best, second)) or len(set(idx)) < 3
    eps = tuple(float(mono.quasienergies[i]) for i in idx)
    period = mono.hbar * mono.omegaF
    dev = tuple(_wrap(eps[(k + 1) % 3] - eps[k] - period / 3, period) for k in range(3))
    g = np.asarray(rwa_energies, dtype=float)
    dev_rwa = tuple(float(conversion.Xi * (g[(k + 1) % 3] - g[k])) for k in range(3))
    leak = max(leakage(mono.eigenvectors[:, i]) for i in idx)
    mono.overlap_map.update({k: idx[k] for k in range(3)})
    return RwaComparison(idx, best, second, eps, dev, dev_rwa, leak, ambiguous)


def monodromy_vs_rwa(lab: LabParams, n_max: int, steps: int, rwa_energies, rwa_vectors,
                     check_steps: bool = True) -> tuple[MonodromyResult, RwaComparison]:
    """Run the monodromy at ``steps`` (and ``2 steps`` when checking) and compare."""
    h = build_lab_hamiltonian(lab, n_max)
    sp = to_scaled(lab)
    mono = propagate_period(h, steps)
    cmp = match_to_rwa(mono, rwa_energies, rwa_vectors, sp)
    if check_steps:
        fine = propagate_period(h, 2 * steps)
        cmp_fine = match_to_rwa(fine, rwa_energies, rwa_vectors, sp)
        period = lab.hbar * lab.omegaF
        drift = max(abs(_wrap(a - b, period)) for a, b in zip(cmp.quasienergies, cmp_fine.quasienergies))
        if drift > EIGENPHASE_TOL:
            raise ConvergenceError(
                f"eigenphases moved by {drift:.2e} on step halving (steps={steps})")
        mono, cmp = fine, cmp_fine
    if cmp.leakage > LEAKAGE_TOL:
        raise ConvergenceError(
            f"matched Floquet states leak {cmp.leakage:.1e} into the top of the basis; raise n_max")
    return mono, cmp
