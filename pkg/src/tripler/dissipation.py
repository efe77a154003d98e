"""Weak damping in the rotating frame, and the incoherent hopping picture.

The master equation is

    drho/dt = -(i/hbar)[H_RWA, rho]
              - Gamma (nbar + 1) (a^+a rho - 2 a rho a^+ + rho a^+a)
              - Gamma nbar (a a^+ rho - 2 a^+ rho a + rho a a^+),

so ``2 Gamma`` is the energy decay rate. Time is measured in the units implied
by ``H`` and ``hbar``; with ``H = g / lam`` and ``hbar = 1`` the unit is
``1 / delta_omega``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla
from scipy.linalg import eigh, eigvalsh

from .errors import ConvergenceError, ModelValidityError
from .fock import FockBasis, number_operator, sector_projector
from .rwa import build_g_full, intrawell_states, lowest_triplet, well_radius
from .wkb import WkbResult, geometry

TRACE_GUARD = 1e-6
POSITIVITY_GUARD = -1e-6


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray

    @classmethod
    def pure(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def purity(self) -> float:
        return float(np.vdot(self.matrix, self.matrix).real)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))[0])

    def expect(self, psi_left, psi_right=None) -> complex:
        """``<left| rho |right>``."""
        psi_right = psi_left if psi_right is None else psi_right
        return complex(np.vdot(psi_left, self.matrix @ psi_right))


@dataclass
class Trajectory:
    times: np.ndarray
    states: list[DensityMatrix]
    observations: list = field(default_factory=list)


@dataclass
class HoppingModel:
    t_tun: complex
    W: float | None
    Omega: dict[tuple[int, int], float]
    regime: str

    @property
    def max_Omega(self) -> float:
        return max(abs(v) for v in self.Omega.values())


class _Ladder:
    """Ladder operators with their diagonal and shift structure exposed."""

    def __init__(self, dim: int):
        self.dim = dim
        self.a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)
        self.ad = self.a.T.copy()
        self.n = self.ad @ self.a
        self.aad = self.a @ self.ad
        self.n_diag = np.arange(dim, dtype=float)
        self.aad_diag = np.append(np.arange(1, dim, dtype=float), 0.0)
        s = np.sqrt(np.arange(1, dim, dtype=float))
        self.sqrt_outer = np.outer(s, s)

    def lower(self, rho):
        """``a rho a^+``."""
        out = np.zeros_like(rho)
        out[:-1, :-1] = self.sqrt_outer * rho[1:, 1:]
        return out

    def raise_(self, rho):
        """``a^+ rho a``."""
        out = np.zeros_like(rho)
        out[1:, 1:] = self.sqrt_outer * rho[:-1, :-1]
        return out


def rwa_hamiltonian(f: float, lam: float, n_max: int, Xi: float | None = None) -> np.ndarray:
    """``Xi * g`` in the Fock basis; ``Xi`` defaults to ``1 / lam`` (delta_omega = hbar = 1)."""
    Xi = 1.0 / lam if Xi is None else Xi
    return Xi * build_g_full(f, lam, FockBasis(n_max, 3))


def lindblad_rhs(rho, H, Gamma: float, nbar: float = 0.0, hbar: float = 1.0,
                 _ops: _Ladder | None = None) -> np.ndarray:
    rho = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    ops = _ops or _Ladder(rho.shape[0])
    out = (-1j / hbar) * (H @ rho - rho @ H)
    if Gamma:
        nd = ops.n_diag
        out -= Gamma * (nbar + 1) * (nd[:, None] * rho + rho * nd[None, :] - 2 * ops.lower(rho))
        if nbar:
            ad = ops.aad_diag
            out -= Gamma * nbar * (ad[:, None] * rho + rho * ad[None, :] - 2 * ops.raise_(rho))
    return out


def evolve(rho0, H, Gamma: float, nbar: float, T: float, dt: float, hbar: float = 1.0,
           record_every: int = 1, observe: Callable | None = None,
           keep_states: bool = True, positivity_every: int = 200) -> Trajectory:
    """Fixed-step RK4 integration with per-step Hermitization and trace/positivity guards."""
    rho = rho0.matrix if isinstance(rho0, DensityMatrix) else np.asarray(rho0, dtype=complex)
    rho = rho.astype(complex)
    ops = _Ladder(rho.shape[0])
    steps = int(round(T / dt))
    if steps < 1:
        raise ValueError("T must be at least one step")
    tr0 = np.trace(rho).real
    rhs = lambda r: lindblad_rhs(r, H, Gamma, nbar, hbar, ops)  # noqa: E731
    times, states, obs = [0.0], [], []
    if keep_states:
        states.append(DensityMatrix(rho.copy()))
    if observe is not None:
        obs.append(observe(rho))
    for s in range(1, steps + 1):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        drift = abs(np.trace(rho).real - tr0)
        if drift > TRACE_GUARD:
            raise ConvergenceError(f"trace drifted by {drift:.2e} at t={s * dt:.6g}; reduce dt")
        if positivity_every and (s % positivity_every == 0 or s == steps):
            lo = eigvalsh(rho)[0]
            if lo < POSITIVITY_GUARD:
                raise ConvergenceError(
                    f"density matrix lost positivity (min eigenvalue {lo:.2e}) at t={s * dt:.6g}")
        if s % record_every == 0 or s == steps:
            times.append(s * dt)
            if keep_states:
                states.append(DensityMatrix(rho.copy()))
            if observe is not None:
                obs.append(observe(rho))
    return Trajectory(np.array(times), states, obs)


def liouvillian(H, Gamma: float, nbar: float = 0.0, hbar: float = 1.0) -> sps.csc_matrix:
    """Sparse superoperator acting on row-major ``vec(rho)``."""
    dim = H.shape[0]
    ops = _Ladder(dim)
    I = sps.identity(dim, format="csr")
    Hs = sps.csr_matrix(H)

    def lr(A, B):  # vec(A rho B) = kron(A, B^T) vec(rho)
        return sps.kron(sps.csr_matrix(A), sps.csr_matrix(B).T)

    L = (-1j / hbar) * (lr(Hs, I) - lr(I, Hs))
    L = L - Gamma * (nbar + 1) * (lr(ops.n, I) - 2 * lr(ops.a, ops.ad) + lr(I, ops.n))
    if nbar:
        L = L - Gamma * nbar * (lr(ops.aad, I) - 2 * lr(ops.ad, ops.a) + lr(I, ops.aad))
    return L.tocsc()


def steady_state(H, Gamma: float, nbar: float = 0.0, hbar: float = 1.0) -> DensityMatrix:
    """Stationary state from the Liouvillian null space with the trace fixed to one."""
    if Gamma <= 0:
        raise ModelValidityError("a unique steady state needs Gamma > 0")
    dim = H.shape[0]
    L = liouvillian(H, Gamma, nbar, hbar).tolil()
    L[0, :] = 0
    L[0, np.arange(dim) * (dim + 1)] = 1.0
    rhs = np.zeros(dim * dim, dtype=complex)
    rhs[0] = 1.0
    rho = spla.spsolve(L.tocsc(), rhs).reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho / np.trace(rho).real)


def well_states(f: float, lam: float, n_max: int) -> list[np.ndarray]:
    trip = lowest_triplet(f, lam, n_max)
    return [s.amplitudes for s in intrawell_states(trip.vectors, f, lam)]


def well_populations(rho: DensityMatrix, states) -> np.ndarray:
    return np.array([rho.expect(psi).real for psi in states])


def multiplet_populations(rho: DensityMatrix, f: float, lam: float, n_max: int,
                          levels: int = 2) -> np.ndarray:
    """Total population of the ``j``-th tunnel-split triplet, ``j < levels``."""
    out = []
    for j in range(levels):
        trip = lowest_triplet(f, lam, n_max, level=j)
        out.append(sum(rho.expect(v).real for v in trip.vectors))
    return np.array(out)


def boltzmann_ratio(f: float) -> float:
    """Stationary population ratio of neighbouring intrawell levels at zero temperature."""
    geo = geometry(f, 1.0)
    top = 1 + 2 * f * geo.Q0
    if top <= geo.omega_min:
        raise ModelValidityError(f"intrawell population ratio is not positive at f={f}")
    return (top - geo.omega_min) / (top + geo.omega_min)


def tunnel_hopping_integral(wkb: WkbResult, delta_omega: float, hbar: float = 1.0) -> complex:
    lam = wkb.lam
    return (hbar * delta_omega / (2 * lam)) * wkb.C_tun * complex(
        math.exp(-wkb.S_tun / lam) * math.cos(wkb.phase),
        math.exp(-wkb.S_tun / lam) * math.sin(wkb.phase))


def hopping_model(f: float, lam: float, delta_omega: float, Gamma: float, hbar: float,
                  wkb: WkbResult) -> HoppingModel:
    if not f > 0:
        raise ModelValidityError("hopping needs separated wells (f > 0)")
    t = tunnel_hopping_integral(wkb, delta_omega, hbar)
    split = wkb.splittings
    Omega = {(k, kp): (split[k] - split[kp]) * delta_omega / lam
             for k in range(3) for kp in range(3) if k != kp}
    max_Om = max(abs(v) for v in Omega.values())
    if Gamma <= 0:
        return HoppingModel(t, None, Omega, "coherent")
    W = lam * abs(t) ** 2 / (hbar**2 * Gamma * well_radius(f) ** 2)
    regime = "incoherent" if Gamma / lam > max_Om else "coherent"
    return HoppingModel(t, W, Omega, regime)


def ring_hamiltonian(t_tun: complex) -> np.ndarray:
    """Three-site ring with ``<Psi_m|H|Psi_{m+1}> = t_tun``."""
    H = np.zeros((3, 3), dtype=complex)
    for m in range(3):
        H[m, (m + 1) % 3] = t_tun
        H[(m + 1) % 3, m] = np.conj(t_tun)
    return H


def ring_sector_energies(t_tun: complex) -> np.ndarray:
    """Ring energies ordered by sector ``k``: eigenvector ``sum_m exp(-2 pi i m k/3) |m>``."""
    H = ring_hamiltonian(t_tun)
    vals, vecs = eigh(H)
    out = np.empty(3)
    for k in range(3):
        chi = np.exp(-2j * np.pi * np.arange(3) * k / 3) / math.sqrt(3)
        out[k] = np.vdot(chi, H @ chi).real
    # the sector vectors diagonalize the circulant; vals is their sorted set
    assert np.allclose(np.sort(out), vals, atol=1e-12 * max(1.0, abs(t_tun)))
    return out


def rate_matrix(W: float) -> np.ndarray:
    return W * (np.ones((3, 3)) - 3 * np.eye(3))


def three_state_kinetics(p0, W: float, t):
    """Closed-form solution of the symmetric three-well hopping equations."""
    p0 = np.asarray(p0, dtype=float)
    if np.any(p0 < 0) or abs(p0.sum() - 1) > 1e-12:
        raise ValueError("p0 must be a probability vector")
    t = np.asarray(t, dtype=float)
    decay = np.exp(-3 * W * t)[..., None]
    return 1 / 3 + (p0 - 1 / 3) * decay


def dephasing_block_check(basis: FockBasis, vectors=None, tol: float = 1e-10) -> bool:
    """``a^+a`` commutes with every sector projector, and is diagonal in sector eigenvectors."""
    n = number_operator(basis)
    for k in range(basis.K):
        P = sector_projector(basis, k)
        if not np.array_equal(P @ n, n @ P):
            return False
    if vectors is not None:
        for i, u in enumerate(vectors):
            for j, v in enumerate(vectors):
                if i != j and abs(np.vdot(u, n @ v)) > tol:
                    return False
    return True


def coherence_decay_rate(f: float, lam: float, Gamma: float, n_max: int, T: float,
                         dt: float, nbar: float = 0.0) -> float:
    """Fitted decay rate of ``|<Psi_0|rho|Psi_1>|`` starting from ``(Psi_0 + Psi_1)/sqrt 2``."""
    psis = well_states(f, lam, n_max)
    rho0 = DensityMatrix.pure(psis[0] + psis[1])
    H = rwa_hamiltonian(f, lam, n_max)
    left, right = psis[0], psis[1]
    traj = evolve(rho0, H, Gamma, nbar, T, dt, keep_states=False,
                  observe=lambda r: abs(np.vdot(left, r @ right)))
    y = np.log(np.asarray(traj.observations))
    slope = np.polyfit(traj.times, y, 1)[0]
    return float(-slope)
