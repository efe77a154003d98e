import math

import numpy as np
import pytest
from scipy.linalg import eigh

from tripler.floquet import (MonodromyResult, build_lab_hamiltonian, leakage, match_to_rwa,
                             propagate, propagate_period, unitarity_error)
from tripler.params import LabParams, lab_from_dimensionless, to_scaled
from tripler.rwa import fold_quasienergy, symmetry_blocks


def _contains(values, target, period, tol):
    d = (np.asarray(values) - target + period / 2) % period - period / 2
    return np.min(np.abs(d)) < tol


def test_harmonic_quasienergies():
    lab = LabParams(omega0=1.0, gamma=0.0, F=0.0, omegaF=3.03)
    mono = propagate_period(build_lab_hamiltonian(lab, 20), steps=8)
    assert _contains(mono.quasienergies, 0.5, 3.03, 1e-10)
    assert _contains(mono.quasienergies, 0.47, 3.03, 1e-10)
    assert np.all((mono.quasienergies >= 0) & (mono.quasienergies < 3.03))
    assert len(mono.quasienergies) == 21


def test_undriven_anharmonic_matches_diagonalization():
    lab = LabParams(omega0=1.0, gamma=0.02, F=0.0, omegaF=3.03)
    h = build_lab_hamiltonian(lab, 30)
    mono = propagate_period(h, steps=4)
    E = eigh(h.H0, eigvals_only=True) % 3.03
    for e in E:
        assert _contains(mono.quasienergies, e, 3.03, 1e-6)


def test_canonical_commutator_interior():
    lab = lab_from_dimensionless(1.0, 0.3)
    h = build_lab_hamiltonian(lab, 40)
    c = h.q_matrix @ h.p_matrix - h.p_matrix @ h.q_matrix
    n = h.dim - 1
    assert np.max(np.abs(c[:n, :n] - 1j * lab.hbar * np.eye(n))) < 1e-10


@pytest.fixture(scope="module")
def small_drive():
    lab = lab_from_dimensionless(1.0, 0.3, delta_omega=0.03, omegaF=3.03)
    return build_lab_hamiltonian(lab, 45)


def test_unitarity_and_norm(small_drive):
    mono = propagate_period(small_drive, steps=200)
    assert unitarity_error(mono.U, small_drive.dim - 1) < 1e-8
    psi = np.zeros(small_drive.dim, complex)
    psi[3] = 1
    assert np.linalg.norm(mono.U @ psi) == pytest.approx(1.0, abs=1e-8)


def test_three_period_composition(small_drive):
    U1 = propagate_period(small_drive, steps=200).U
    U3 = propagate(small_drive, 0.0, 3 * 2 * math.pi / small_drive.params.omegaF, 600)
    assert np.max(np.abs(U3 - U1 @ U1 @ U1)) < 1e-8


def test_step_halving_order(small_drive):
    # eigenphases of a smooth, well-separated subset
    ref = propagate_period(small_drive, steps=1600).quasienergies
    errs = []
    for steps in (100, 200, 400):
        q = propagate_period(small_drive, steps=steps).quasienergies
        errs.append(max(np.min(np.abs(ref - x)) for x in q[:10]))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.8)


def test_match_identity_case():
    """Synthetic monodromy built from the RWA itself gives zero residuals."""
    f, lam = 1.0, 0.3
    lab = lab_from_dimensionless(f, lam)
    sp = to_scaled(lab)
    n_max = 80
    dim = n_max + 1
    vecs, eps = [], []
    for b in symmetry_blocks(f, lam, n_max):
        for j in range(b.sector.dim):
            vecs.append(b.full_vector(j, dim))
            eps.append(fold_quasienergy(sp.Xi * b.eigenvalues[j], b.k, 3, sp.omegaF, sp.hbar))
    Z = np.array(vecs).T
    mono = MonodromyResult(np.eye(dim), np.array(eps), Z, sp.tF, sp.hbar, sp.omegaF, 0)
    blocks = symmetry_blocks(f, lam, n_max)
    g = [b.eigenvalues[0] for b in blocks]
    cmp = match_to_rwa(mono, g, [b.full_vector(0, dim) for b in blocks], sp)
    assert cmp.rwa_residual < 1e-14
    assert not cmp.ambiguous
    assert min(cmp.overlaps) == pytest.approx(1.0)


def test_ambiguous_matching_flagged():
    dim = 12
    Z = np.eye(dim, dtype=complex)
    mono = MonodromyResult(np.eye(dim), np.linspace(0, 1, dim), Z, 1.0, 1.0, 2 * math.pi, 0)
    probe = (Z[:, 0] + Z[:, 1]) / math.sqrt(2)
    sp = to_scaled(lab_from_dimensionless(1.0, 0.3))
    cmp = match_to_rwa(mono, [0, 0, 0], [probe, Z[:, 4], Z[:, 8]], sp)
    assert cmp.ambiguous


def test_leakage():
    v = np.zeros(100)
    v[95] = 1
    assert leakage(v) == 1.0
    v = np.zeros(100)
    v[5] = 1
    assert leakage(v) == 0.0
