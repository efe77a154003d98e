"""Lab-frame expectation values, period-3 diagnostics and Fourier spectra.

The rotating-frame state evolves under ``exp(-i Xi g t / hbar)`` with
``Xi / hbar = delta_omega / lam``. The lab coordinate follows from

    <q(t)> = C Re[ <Q + iP>(t) exp(-i omegaF t / 3) ],   Q + iP = sqrt(2 lam) a.

Evolution is done in the eigenbasis of each symmetry sector, so arbitrarily
long windows cost nothing beyond the number of sample times.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelValidityError
from .floquet import LabHamiltonian, _step
from .params import ScaledParams
from .rwa import symmetry_blocks

SPACING_RTOL = 1e-9


@dataclass
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values)
        if self.times.ndim != 1 or len(self.times) < 2:
            raise ValueError("a time series needs at least two samples")
        if self.values.shape != self.times.shape:
            raise ValueError("times and values differ in length")
        steps = np.diff(self.times)
        if steps[0] <= 0 or np.max(np.abs(steps - steps[0])) > SPACING_RTOL * max(
                abs(self.times[-1]), steps[0]):
            raise ValueError("time grid must be uniform and increasing")

    @property
    def dt(self) -> float:
        return float((self.times[-1] - self.times[0]) / (len(self.times) - 1))

    @property
    def span(self) -> float:
        return float(self.times[-1] - self.times[0])


@dataclass
class SpectralPeaks:
    frequencies: np.ndarray  # cycles per unit time
    weights: np.ndarray
    resolution: float
    resolved: bool = True

    def nearest(self, nu: float) -> tuple[float, float]:
        i = int(np.argmin(np.abs(self.frequencies - nu)))
        return float(self.frequencies[i]), float(self.weights[i])


class RotatingEvolution:
    """Closed-form evolution of a rotating-frame state in the sector eigenbases.

    With ``tunneling=False`` every level ``j`` of the three sectors is assigned the
    sector-averaged energy, which removes the tunnel splitting while keeping the
    eigenvectors.
    """

    def __init__(self, psi0, f: float, lam: float, n_max: int, tunneling: bool = True,
                 cutoff: float = 1e-13):
        psi0 = np.asarray(psi0, dtype=complex)
        if abs(np.linalg.norm(psi0) - 1) > 1e-8:
            raise ValueError("state must be normalized")
        self.lam = lam
        blocks = symmetry_blocks(f, lam, n_max)
        levels = min(len(b.eigenvalues) for b in blocks)
        mean = np.mean([b.eigenvalues[:levels] for b in blocks], axis=0)
        self.parts = []
        for b in blocks:
            idx = b.sector.indices
            c = b.eigenvectors.conj().T @ psi0[idx]
            E = b.eigenvalues.copy()
            if not tunneling:
                E[:levels] = mean
            keep = np.abs(c) > cutoff
            self.parts.append((b.k, idx, b.eigenvectors[:, keep], c[keep], E[keep]))
        # <sector k-1| a |sector k>; a lowers n by one, hence the sector label
        self.pairs = []
        for k in range(3):
            kk, idx_k, V_k, c_k, E_k = self.parts[k]
            km, idx_m, V_m, c_m, E_m = self.parts[(k - 1) % 3]
            if not len(c_k) or not len(c_m):
                continue
            n = idx_k
            # a|n> = sqrt(n)|n-1>; row index of n-1 inside the lower sector
            pos = {int(v): i for i, v in enumerate(idx_m)}
            A = np.zeros((len(idx_m), len(idx_k)))
            for j, nj in enumerate(n):
                if nj > 0:
                    A[pos[int(nj - 1)], j] = math.sqrt(nj)
            M = V_m.conj().T @ A @ V_k
            self.pairs.append((np.conj(c_m)[:, None] * M * c_k[None, :],
                               E_m[:, None] - E_k[None, :]))

    def expect_a(self, tau) -> np.ndarray:
        """``<a>`` at dimensionless rotating-frame times ``tau = Xi t / hbar``."""
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        out = np.zeros(tau.shape, dtype=complex)
        for W, dE in self.pairs:
            w = W.ravel()
            nz = np.abs(w) > 0
            w, d = w[nz], dE.ravel()[nz]
            for s in range(0, len(tau), 4096):
                chunk = tau[s:s + 4096]
                out[s:s + 4096] += np.exp(1j * np.outer(chunk, d)) @ w
        return out


def expect_q(psi0, conversion: ScaledParams, times, n_max: int,
             tunneling: bool = True) -> TimeSeries:
    """Lab coordinate ``<q(t)>`` for the rotating-frame initial state ``psi0``."""
    times = np.asarray(times, dtype=float)
    ev = RotatingEvolution(psi0, conversion.f, conversion.lam, n_max, tunneling)
    a = ev.expect_a(conversion.frequency_scale * times)
    z = math.sqrt(2 * conversion.lam) * a
    q = conversion.C * np.real(z * np.exp(-1j * conversion.omegaF * times / 3))
    return TimeSeries(times, q, {"observable": "q", "tunneling": tunneling})


def expect_q_lab(h: LabHamiltonian, psi0, periods: int, steps: int,
                 samples_per_period: int) -> TimeSeries:
    """Cross-check: ``<q(t)>`` from exact lab-frame propagation of ``psi0``.

    ``psi0`` is read in the lab Fock basis, which coincides with the rotating-frame
    basis at ``t = 0`` up to the small detuning of the oscillator frequency.
    """
    if steps % samples_per_period:
        raise ValueError("steps must be a multiple of samples_per_period")
    psi = np.asarray(psi0, dtype=complex)[: h.dim].copy()
    psi /= np.linalg.norm(psi)
    tF = 2 * math.pi / h.params.omegaF
    dt = tF / steps
    stride = steps // samples_per_period
    times, vals = [0.0], [np.vdot(psi, h.q_matrix @ psi).real]
    for j in range(periods * steps):
        psi = _step(h.at((j + 0.5) * dt), dt, h.params.hbar) @ psi
        if (j + 1) % stride == 0:
            times.append((j + 1) * dt)
            vals.append(np.vdot(psi, h.q_matrix @ psi).real)
    return TimeSeries(np.array(times), np.array(vals), {"observable": "q", "frame": "lab"})


def _shift_samples(series: TimeSeries, shift_time: float) -> int:
    s = shift_time / series.dt
    n = int(round(s))
    if n < 1 or abs(s - n) > 1e-6 * max(1.0, s):
        raise ValueError("shift must be a whole number of samples")
    return n


def _mismatch(values: np.ndarray, n: int) -> float:
    rms = math.sqrt(np.mean(np.abs(values) ** 2))
    if rms == 0:
        return 0.0
    d = values[n:] - values[:-n]
    return float(math.sqrt(np.mean(np.abs(d) ** 2)) / (math.sqrt(2) * rms))


def period3_score(series: TimeSeries, tF: float) -> tuple[float, float]:
    """Normalized RMS mismatch of the series with itself shifted by 3 tF and by tF."""
    if series.span < 12 * tF * (1 - 1e-9):
        raise ValueError("series must span at least 12 drive periods")
    v = series.values
    return (_mismatch(v, _shift_samples(series, 3 * tF)),
            _mismatch(v, _shift_samples(series, tF)))


def alias_frequency(nu: float, dt: float) -> float:
    """Apparent frequency in ``[0, 1/(2 dt)]`` of a real tone ``nu`` sampled every ``dt``."""
    fs = 1.0 / dt
    r = nu % fs
    return min(r, fs - r)


def parseval_error(series: TimeSeries) -> float:
    x = series.values * np.hanning(len(series.values))
    X = np.fft.fft(x)
    lhs = np.sum(np.abs(x) ** 2)
    rhs = np.sum(np.abs(X) ** 2) / len(x)
    return float(abs(lhs - rhs) / max(lhs, 1e-300))


def spectrum(series: TimeSeries, target_splitting: float | None = None,
             rel_threshold: float = 1e-3, max_peaks: int = 20) -> SpectralPeaks:
    """Hann-windowed one-sided power spectrum reduced to its local maxima.

    ``target_splitting`` is an angular frequency; if the window is shorter than
    ``4 / |target_splitting|`` a warning is issued and ``resolved`` is false.
    """
    v = np.asarray(series.values)
    n = len(v)
    w = np.hanning(n)
    X = np.fft.rfft(np.real(v) * w)
    P = np.abs(X) ** 2
    freqs = np.fft.rfftfreq(n, series.dt)
    resolved = True
    if target_splitting is not None and series.span < 4 / abs(target_splitting):
        warnings.warn(
            f"window {series.span:.3g} is shorter than 4/|Omega| = {4 / abs(target_splitting):.3g}; "
            "splitting peaks are not resolved", RuntimeWarning, stacklevel=2)
        resolved = False
    top = P.max() if len(P) else 0.0
    picks = []
    for i in range(1, len(P) - 1):
        if P[i] >= P[i - 1] and P[i] > P[i + 1] and P[i] >= rel_threshold * top:
            # parabolic refinement on the log power
            a, b, c = np.log(P[i - 1:i + 2] + 1e-300)
            den = a - 2 * b + c
            off = 0.5 * (a - c) / den if den < 0 else 0.0
            picks.append((freqs[i] + off * (freqs[1] - freqs[0]), P[i]))
    picks.sort(key=lambda p: -p[1])
    picks = picks[:max_peaks]
    return SpectralPeaks(np.array([p[0] for p in picks]), np.array([p[1] for p in picks]),
                         float(freqs[1] - freqs[0]), resolved)


def sideband_frequencies(g, conversion: ScaledParams) -> dict[tuple[int, int], float]:
    """``omegaF/3 + Omega_{k, k-1}`` (angular) for the three ordered pairs visible in ``<q>``."""
    g = np.asarray(g, dtype=float)
    out = {}
    for k in range(3):
        km = (k - 1) % 3
        out[(k, km)] = conversion.omegaF / 3 + (g[k] - g[km]) * conversion.frequency_scale
    return out


def stroboscopic_times(conversion: ScaledParams, n_samples: int, stride_periods: int,
                       t0: float = 0.0) -> np.ndarray:
    """Sample every ``stride_periods`` drive periods; ``stride_periods`` must not be a multiple of 3."""
    if stride_periods % 3 == 0:
        raise ModelValidityError("a stride of a multiple of 3 periods hides the omegaF/3 carrier")
    return t0 + np.arange(n_samples) * stride_periods * conversion.tF


def expect_q_stroboscopic(psi0, conversion: ScaledParams, n_max: int, n_samples: int,
                          stride_periods: int, offset: float = 0.0,
                          tunneling: bool = True) -> TimeSeries:
    """``<q>`` at ``t_j = offset + j * stride_periods * tF`` for very long windows.

    The carrier phase ``omegaF t / 3`` is reduced with integer arithmetic on the
    period count, so strides of ``10^12`` periods keep full precision.
    """
    if stride_periods % 3 == 0:
        raise ModelValidityError("a stride of a multiple of 3 periods hides the omegaF/3 carrier")
    j = np.arange(n_samples)
    times = offset + j * (stride_periods * conversion.tF)
    ev = RotatingEvolution(psi0, conversion.f, conversion.lam, n_max, tunneling)
    a = ev.expect_a(conversion.frequency_scale * times)
    z = math.sqrt(2 * conversion.lam) * a
    cycles = np.array([(int(i) * stride_periods) % 3 for i in j], dtype=float)
    carrier = np.exp(-1j * (2 * math.pi * cycles / 3 + conversion.omegaF * offset / 3))
    q = conversion.C * np.real(z * carrier)
    return TimeSeries(times, q, {"observable": "q", "tunneling": tunneling,
                                 "stride_periods": stride_periods})
