"""Semiclassical tunnel splitting of the lowest triplet of ``g(Q, P)``.

The classical Hamiltonian function in the rotating frame is

    g(Q, P) = 1/4 (Q^2 + P^2 - 1)^2 - (f/3) (Q^3 - 3 Q P^2),

with three minima on a circle of radius ``Q0``. Tunneling between them splits
the threefold degenerate intrawell level ``g0`` into

    g^(k) - g0 = C_tun exp(-S_tun / lam) cos(Phi_tun / lam - 2 pi k / 3).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, ModelValidityError
from .rwa import Crossing

QUAD_TOL = 1e-10


@dataclass(frozen=True)
class ClassicalGeometry:
    f: float
    lam: float
    Q0: float
    Q1: float
    Q2: float
    P0: float
    P1: float
    P2: float
    g_min: float
    omega_min: float
    Q_B: float
    g0: float


@dataclass(frozen=True)
class WkbResult:
    f: float
    lam: float
    S_tun: float
    Phi_tun: float
    C_tun: float
    theta1: float
    K_tun: complex
    S_classical: float
    Phi_classical: float
    geometry: ClassicalGeometry

    @property
    def log_envelope(self) -> float:
        return math.log(abs(self.C_tun)) - self.S_tun / self.lam

    @property
    def phase(self) -> float:
        """``Phi_tun / lam`` (unwrapped)."""
        return self.Phi_tun / self.lam

    @property
    def phase_mod_pi(self) -> float:
        return self.phase % math.pi

    @property
    def splittings(self) -> tuple[float, float, float]:
        amp = self.C_tun * math.exp(-self.S_tun / self.lam)
        return tuple(amp * math.cos(self.phase - 2 * math.pi * k / 3) for k in range(3))

    def splitting(self, k: int) -> float:
        return self.splittings[k % 3]


def g_classical(Q, P, f):
    return 0.25 * (Q**2 + P**2 - 1) ** 2 - (f / 3) * (Q**3 - 3 * Q * P**2)


def geometry(f: float, lam: float) -> ClassicalGeometry:
    if not f > 0:
        raise ModelValidityError("f must be positive: at f = 0 the minima merge into a ring")
    if not lam > 0:
        raise ModelValidityError("lam must be positive")
    Q0 = 0.5 * (f + math.sqrt(f * f + 4))
    g_min = -f * Q0 * (Q0**2 + 3) / 12
    omega_min = math.sqrt(3 * f * Q0 * (Q0**2 + 1))
    P1 = math.sqrt(3) * Q0 / 2
    return ClassicalGeometry(
        f=f, lam=lam, Q0=Q0, Q1=-Q0 / 2, Q2=-Q0 / 2, P0=0.0, P1=P1, P2=-P1,
        g_min=g_min, omega_min=omega_min, Q_B=Q0 - 0.75 * f,
        g0=g_min + 0.5 * lam * omega_min,
    )


def branch_A(Q, f):
    return 1 - Q**2 - 2 * f * Q


def branch_B(Q, f, g0):
    return branch_A(Q, f) ** 2 - 4 * (g_classical(Q, 0.0, f) - g0)


def branch_B_classical(Q, geo: ClassicalGeometry):
    """``B`` at ``g0 = g_min``, in factored form (double root at ``Q1``)."""
    return (16 * geo.f / 3) * (Q - geo.Q1) ** 2 * (Q - geo.Q_B)


def _sqrt_B(B):
    # B^{1/2} = i |B|^{1/2} where B < 0
    B = np.asarray(B, dtype=float)
    return np.where(B >= 0, np.sqrt(np.abs(B)) + 0j, 1j * np.sqrt(np.abs(B)))


def _momentum(A, B):
    sb = _sqrt_B(B)
    return -np.sqrt(A + sb + 0j), sb


def momentum_branch(Q, f: float, lam: float, g0: float | None = None):
    """Decaying-branch momentum ``P`` with ``g(Q, P) = g0`` and ``dg/dP = P B^{1/2}``.

    ``g0`` defaults to ``g_min + lam omega_min / 2``. Returns ``(P, dg/dP)``.
    """
    geo = geometry(f, lam)
    Q = np.asarray(Q, dtype=float)
    if np.any(Q < geo.Q1 - 1e-12) or np.any(Q > geo.Q0 + 1e-12):
        raise ValueError(f"Q must lie in [Q1, Q0] = [{geo.Q1}, {geo.Q0}]")
    g0 = geo.g0 if g0 is None else g0
    P, sb = _momentum(branch_A(Q, f), branch_B(Q, f, g0))
    return P, P * sb


def classical_momentum(Q, geo: ClassicalGeometry):
    """``(P_cl, B_cl^{1/2})`` on the decaying branch at ``lam = 0``.

    Above ``Q_B`` the root is written as ``P^2 = (A^2 - B) / (A - B^{1/2})`` with
    the double zero at ``Q0`` factored out, which avoids cancellation near the well.
    """
    Q = np.asarray(Q, dtype=float)
    f, Q0 = geo.f, geo.Q0
    A = branch_A(Q, f)
    B = branch_B_classical(Q, geo)
    sb = _sqrt_B(B)
    # g(Q, 0) - g_min = (Q - Q0)^2 (Q^2 + b Q + c) / 4
    b = 2 * Q0 - 4 * f / 3
    c = Q0 * b / 2
    above = B >= 0
    with np.errstate(invalid="ignore", divide="ignore"):
        inner = np.where(above, (Q**2 + b * Q + c) / (np.sqrt(np.abs(B)) - A), 0.0)
        p_above = -1j * np.abs(Q - Q0) * np.sqrt(np.abs(inner))
    p_below = -np.sqrt(A + sb + 0j)
    return np.where(above, p_above, p_below), sb


@lru_cache(maxsize=16)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _gl(h, a: float, b: float, n: int):
    """Gauss-Legendre on [a, b] after ``Q = a + u^2`` (left half) and ``Q = b - u^2`` (right half)."""
    x, w = _gauss_legendre(n)
    c = 0.5 * (a + b)
    total = 0.0
    for end, sign in ((a, 1.0), (b, -1.0)):
        L = math.sqrt(abs(c - end))
        u = 0.5 * L * (x + 1)
        Q = end + sign * u**2
        total = total + 0.5 * L * np.sum(w * h(Q) * 2 * u)
    return total


def endpoint_quad(h, a: float, b: float, name: str = "integral", tol: float = QUAD_TOL,
                  n0: int = 32, n_max: int = 4096):
    """Integrate ``h`` (vectorized, possibly complex) over [a, b] with endpoint singularities.

    Integrable ``|Q - a|^{-1/2}`` and ``|Q - b|^{-1/2}`` behaviour is removed by
    the square substitution; nodes are doubled until two successive estimates
    agree to ``tol`` (absolute, relative to max(1, |value|)).
    """
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    n = n0
    prev = _gl(h, a, b, n)
    while n < n_max:
        n *= 2
        cur = _gl(h, a, b, n)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return sign * cur
        prev = cur
    raise ConvergenceError(f"quadrature for {name} did not converge on [{a}, {b}]")


def _Y(Q, geo: ClassicalGeometry, Qm: float):
    P, sb = classical_momentum(Q, geo)
    return geo.omega_min / (2 * P * sb) - 0.5j / np.abs(Q - Qm)


def geometric_phase(geo: ClassicalGeometry) -> float:
    """Phase of ``Psi_1`` relative to ``Psi_0 = N_3 Psi_1``."""
    beta = (2 * geo.omega_min + 1j * math.sqrt(3) * (geo.f * geo.Q0 - 1)) / (3 * geo.Q0**2)
    return 0.5 * float(np.angle(beta + 1)) + geo.P1 * geo.Q1 / (2 * geo.lam)


def tunnel_prefactor(geo: ClassicalGeometry) -> float:
    f, Q0 = geo.f, geo.Q0
    return (-1.5 * math.sqrt(geo.lam) * geo.omega_min
            * (2 * (Q0**2 + 1) / (3 * math.pi**2 * Q0**2)) ** 0.25
            * math.sqrt(f * (2 * Q0 - f)))


@lru_cache(maxsize=4096)
def _classical_integrals(f: float):
    """Lambda-independent integrals: (S_cl, Phi_cl, K_tun)."""
    geo = geometry(f, 1.0)
    im_p = lambda Q: classical_momentum(Q, geo)[0].imag  # noqa: E731
    re_p = lambda Q: classical_momentum(Q, geo)[0].real  # noqa: E731
    S_cl = (endpoint_quad(im_p, geo.Q0, geo.Q_B, "Im P_cl on [Q_B, Q0]")
            + endpoint_quad(im_p, geo.Q_B, geo.Q1, "Im P_cl on [Q1, Q_B]"))
    Phi_cl = endpoint_quad(re_p, geo.Q_B, geo.Q1, "Re P_cl on [Q1, Q_B]")
    K = (endpoint_quad(lambda Q: _Y(Q, geo, geo.Q0), geo.Q0, geo.Q_B, "K_tun well-0 leg")
         + endpoint_quad(lambda Q: _Y(Q, geo, geo.Q1), geo.Q_B, geo.Q1, "K_tun well-1 leg"))
    return float(S_cl), float(Phi_cl), complex(K)


def tunnel_quantities(f: float, lam: float) -> WkbResult:
    geo = geometry(f, lam)
    S_cl, Phi_cl, K = _classical_integrals(float(f))
    theta1 = geometric_phase(geo)
    S = S_cl + lam * K.imag
    Phi = Phi_cl + lam * K.real + lam * theta1
    return WkbResult(f=f, lam=lam, S_tun=S, Phi_tun=Phi, C_tun=tunnel_prefactor(geo),
                     theta1=theta1, K_tun=K, S_classical=S_cl, Phi_classical=Phi_cl,
                     geometry=geo)


def splitting(f: float, lam: float, k: int) -> float:
    return tunnel_quantities(f, lam).splitting(k)


def pair_for_lattice_index(j: int) -> tuple[int, int]:
    """Sector pair that crosses when ``Phi_tun / lam = j pi / 3``."""
    return {1: (0, 1), 2: (0, 2), 0: (1, 2)}[j % 3]


def crossing_locations(f_lo: float, f_hi: float, lam: float, n_grid: int = 400,
                       rtol: float = 1e-8) -> list[Crossing]:
    """Drive amplitudes in [f_lo, f_hi] where ``Phi_tun / lam`` hits the lattice ``j pi / 3``."""
    if not 0 < f_lo < f_hi:
        raise ValueError("need 0 < f_lo < f_hi")
    grid = np.linspace(f_lo, f_hi, n_grid)
    phase = np.array([tunnel_quantities(f, lam).phase for f in grid])
    out = []
    for i in range(n_grid - 1):
        lo, hi = sorted((phase[i], phase[i + 1]))
        for j in range(math.ceil(lo / (math.pi / 3)), math.floor(hi / (math.pi / 3)) + 1):
            target = j * math.pi / 3
            fn = lambda f: tunnel_quantities(f, lam).phase - target  # noqa: E731
            if fn(grid[i]) == 0:
                root = grid[i]
            elif fn(grid[i + 1]) == 0:
                continue
            else:
                root = brentq(fn, grid[i], grid[i + 1], xtol=rtol * grid[i], rtol=rtol)
            out.append(Crossing(float(root), pair_for_lattice_index(j), "wkb"))
    return out


def triplet_harmonic(g) -> complex:
    """Complex amplitude ``z`` with ``g_k - mean(g) = Re(z exp(-2 pi i k / 3))``.

    For the WKB pattern ``z = C_tun exp(-S_tun/lam) exp(i Phi_tun/lam)``.
    """
    g = np.asarray(g, dtype=float)
    d = g - g.mean()
    return complex((2 / 3) * np.sum(d * np.exp(2j * np.pi * np.arange(3) / 3)))


def wkb_harmonic(w: WkbResult) -> complex:
    return w.C_tun * math.exp(-w.S_tun / w.lam) * complex(math.cos(w.phase), math.sin(w.phase))
