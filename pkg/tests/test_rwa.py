import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import grid_g_levels
from tripler.errors import ModelValidityError
from tripler.fock import FockBasis, annihilation, rotation_matrix, sector_split
from tripler.rwa import (build_g_block, build_g_full, default_nmax, diagonalize,
                         find_crossings, fold_quasienergy, intrawell_states, lowest_triplet,
                         multiplet_record, overlap_defect, scan_f, symmetry_blocks,
                         well_centers)

# -(1/6) (0.6)^{3/2} sqrt(6), evaluated with mpmath
COUPLING_F1_L03 = -0.18973665961010276


def test_block_entries():
    sector = sector_split(FockBasis(30))[0]
    m = build_g_block(1.0, 0.3, sector)
    assert m[0, 1] == pytest.approx(COUPLING_F1_L03, rel=1e-14)
    assert m[0, 0] == pytest.approx(0.1225, abs=1e-15)
    assert np.array_equal(m, m.T)


def test_zero_drive_spectrum_and_ordering():
    blocks = symmetry_blocks(0.0, 0.3, 60)
    lowest = sorted((b.eigenvalues[0], b.k) for b in blocks)
    assert [k for _, k in lowest] == [1, 2, 0]
    assert [e for e, _ in lowest] == pytest.approx([0.0025, 0.0625, 0.1225], abs=1e-15)


def test_diagonalize_small_cases():
    vals, vecs = diagonalize(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert vals == pytest.approx([-1.0, 1.0])
    assert np.allclose(vecs.T @ vecs, np.eye(2))
    with pytest.raises(ValueError):
        diagonalize(np.array([[0.0, 1.0], [0.5, 0.0]]))


@given(f=st.floats(0, 3), lam=st.floats(0.1, 0.5))
def test_sector_union_equals_full_spectrum(f, lam):
    n_max = 60
    full = np.linalg.eigvalsh(build_g_full(f, lam, FockBasis(n_max)))
    union = np.sort(np.concatenate([b.eigenvalues for b in symmetry_blocks(f, lam, n_max)]))
    assert np.max(np.abs(full - union)) < 1e-10 * max(1.0, np.max(np.abs(full)))


@given(f=st.floats(0, 3), lam=st.floats(0.1, 0.6))
def test_eigenvectors_unitary(f, lam):
    for b in symmetry_blocks(f, lam, 45):
        V = b.eigenvectors
        assert np.max(np.abs(V.T @ V - np.eye(len(V)))) < 1e-10
        assert np.all(np.diff(b.eigenvalues) >= 0)


@pytest.mark.parametrize("f", [0.0, 1.0, 2.0, 3.0])
def test_default_truncation_converged(f):
    lowest_triplet(f, 0.3, check=True)


def test_position_grid_oracle_agrees():
    union = np.sort(np.concatenate([b.eigenvalues for b in symmetry_blocks(1.0, 0.3, 150)]))
    assert np.max(np.abs(grid_g_levels(1.0, 0.3) - union[:6])) < 1e-6


def test_fold_quasienergy():
    assert fold_quasienergy(0.0, 1, 3, omegaF=2.0) == pytest.approx(2.0 / 3)
    assert fold_quasienergy(2.0, 0, 3, omegaF=2.0) == 0.0
    assert fold_quasienergy(-0.1, 0) == pytest.approx(0.9)
    eps = [fold_quasienergy(0.1, k) for k in range(3)]
    assert np.diff(eps) == pytest.approx([1 / 3, 1 / 3], abs=1e-15)
    eps = sorted(fold_quasienergy(0.37, k) for k in range(3))
    assert np.diff(eps + [eps[0] + 1]) == pytest.approx([1 / 3] * 3, abs=1e-15)


@given(E=st.floats(-50, 50), k=st.integers(0, 5), K=st.integers(2, 6))
def test_fold_range(E, k, K):
    assert 0.0 <= fold_quasienergy(E, k, K, omegaF=1.7) < 1.7


def test_scan_zero_drive_record():
    rec = scan_f([0.0, 0.1], 0.3, 60)
    assert rec[0].g_k == pytest.approx((0.1225, 0.0025, 0.0625), abs=1e-14)
    assert all(0 <= e < 1 for r in rec for e in r.quasienergies)
    with pytest.raises(ValueError):
        scan_f([0.2, 0.1], 0.3, 60)


def test_multiplet_forms_with_drive():
    spread = [np.ptp(multiplet_record(f, 0.3).g_k) for f in (0.0, 0.5, 1.0, 2.0, 3.0)]
    assert spread[0] == pytest.approx(0.12)
    assert spread[-1] < 1e-3 * spread[0]
    assert spread[2] < spread[0]


def test_numeric_crossings_at_lambda_03():
    grid = np.linspace(0.8, 2.5, 60)
    found = find_crossings(scan_f(grid, 0.3, 163), 163)
    # bisection results frozen at relative f accuracy 1e-6
    assert [c.k_pair for c in found] == [(1, 2), (0, 1), (0, 2), (1, 2)]
    assert [c.f_cross for c in found] == pytest.approx([0.948683, 1.5, 1.897367, 2.224859],
                                                      rel=5e-6)


def test_intrawell_states():
    f, lam = 2.0, 0.1
    n_max = default_nmax(f, lam)
    trip = lowest_triplet(f, lam, n_max)
    states = intrawell_states(trip.vectors, f, lam)
    assert overlap_defect(states) < 1e-12
    a = annihilation(FockBasis(n_max))
    for s, centre in zip(states, well_centers(f)):
        mean = np.vdot(s.amplitudes, a @ s.amplitudes) * np.sqrt(2 * lam)
        assert abs(mean / centre - 1) < lam
    N = rotation_matrix(FockBasis(n_max))
    assert abs(np.vdot(states[2].amplitudes, N @ states[0].amplitudes)) > 0.99


@given(f=st.floats(0.6, 3), lam=st.floats(0.1, 0.3))
def test_intrawell_unit_norm(f, lam):
    trip = lowest_triplet(f, lam, 90)
    for s in intrawell_states(trip.vectors, f, lam):
        assert np.linalg.norm(s.amplitudes) == pytest.approx(1.0, abs=1e-12)


def test_intrawell_refuses_degenerate_ring():
    trip = lowest_triplet(0.01, 0.3, 60)
    with pytest.raises(ModelValidityError):
        intrawell_states(trip.vectors, 0.01, 0.3)
