import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tripler import observables as ob
from tripler.dissipation import well_states
from tripler.errors import ModelValidityError
from tripler.floquet import build_lab_hamiltonian
from tripler.params import lab_for_detuning_ratio, lab_from_dimensionless, to_scaled
from tripler.rwa import lowest_triplet
from tripler.wkb import geometry

F, LAM, NMAX = 1.0, 0.3, 60


@pytest.fixture(scope="module")
def setup():
    sp = to_scaled(lab_from_dimensionless(F, LAM))
    return sp, well_states(F, LAM, NMAX), lowest_triplet(F, LAM, NMAX)


def test_time_series_validation():
    with pytest.raises(ValueError):
        ob.TimeSeries([0.0], [1.0])
    with pytest.raises(ValueError):
        ob.TimeSeries([0.0, 1.0, 3.0], [1.0, 2.0, 3.0])
    s = ob.TimeSeries(np.linspace(0, 2, 5), np.zeros(5))
    assert s.dt == 0.5 and s.span == 2.0


def test_sector_eigenstate_has_no_coordinate(setup):
    sp, _, trip = setup
    t = np.arange(0, 15 * sp.tF, sp.tF / 40)
    for v in trip.vectors:
        q = ob.expect_q(v, sp, t, NMAX).values
        assert np.max(np.abs(q)) < 1e-10 * sp.C * 2


def test_well_state_oscillates_at_one_third(setup):
    f, lam, n = 1.0, 0.1, 120
    sp = to_scaled(lab_from_dimensionless(f, lam))
    psi = well_states(f, lam, n)[0]
    Q0 = geometry(f, lam).Q0
    t = np.arange(0, 15 * sp.tF, sp.tF / 40)
    q = ob.expect_q(psi, sp, t, n, tunneling=False).values
    ref = sp.C * Q0 * np.cos(sp.omegaF * t / 3)
    assert np.max(np.abs(q - ref)) < lam * sp.C * Q0


def test_time_shift_maps_wells(setup):
    sp, psis, _ = setup
    t = np.arange(0, 15 * sp.tF, sp.tF / 40)
    q0 = ob.expect_q(psis[0], sp, t, NMAX, tunneling=False).values
    q2 = ob.expect_q(psis[2], sp, t, NMAX, tunneling=False).values
    assert np.max(np.abs(q0[40:] - q2[:-40])) < 1e-6 * sp.C


def test_period3_score_on_cosines():
    tF = 2.0
    t = np.arange(0, 20 * tF, tF / 30)
    s3, s1 = ob.period3_score(ob.TimeSeries(t, np.cos(2 * math.pi * t / (3 * tF))), tF)
    assert s3 < 1e-12
    assert s1 == pytest.approx(math.sqrt(1.5), rel=2e-2)
    s3, s1 = ob.period3_score(ob.TimeSeries(t, np.cos(2 * math.pi * t / tF)), tF)
    assert s3 < 1e-12 and s1 < 1e-12
    with pytest.raises(ValueError):
        ob.period3_score(ob.TimeSeries(t[:300], t[:300]), tF)
    with pytest.raises(ValueError):
        ob.period3_score(ob.TimeSeries(np.arange(0, 40, 0.7), np.zeros(58)), tF)


def test_tunneling_degrades_period_tripling(setup):
    sp, psis, _ = setup
    t = np.arange(0, 900 * sp.tF, sp.tF / 8)
    on = ob.period3_score(ob.expect_q(psis[0], sp, t, NMAX), sp.tF)
    off = ob.period3_score(ob.expect_q(psis[0], sp, t, NMAX, tunneling=False), sp.tF)
    assert off[0] < 1e-10
    assert on[0] > 1e-3
    assert on[1] > 1 and off[1] > 1


@given(nu=st.floats(0.05, 0.45), amp=st.floats(0.1, 10))
def test_pure_tone_within_one_bin(nu, amp):
    t = np.arange(2048) * 1.0
    s = ob.TimeSeries(t, amp * np.cos(2 * math.pi * nu * t + 0.3))
    pk = ob.spectrum(s)
    assert abs(pk.frequencies[0] - nu) < pk.resolution
    assert ob.parseval_error(s) < 1e-8


def test_alias_frequency():
    assert ob.alias_frequency(0.3, 1.0) == pytest.approx(0.3)
    assert ob.alias_frequency(0.7, 1.0) == pytest.approx(0.3)
    assert ob.alias_frequency(5.25, 0.5) == pytest.approx(0.75)


def test_two_state_superposition_single_sideband(setup):
    sp, _, trip = setup
    sb = ob.sideband_frequencies(trip.energies, sp)
    phi = (trip.vectors[0] + trip.vectors[1]) / math.sqrt(2)
    t = np.arange(0, 6000 * sp.tF, sp.tF / 8)
    pk = ob.spectrum(ob.expect_q(phi, sp, t, NMAX), rel_threshold=1e-2)
    assert len(pk.frequencies) == 1
    assert abs(pk.frequencies[0] - sb[(1, 0)] / (2 * math.pi)) < pk.resolution


def test_well_state_shows_three_sidebands(setup):
    sp, psis, trip = setup
    sb = ob.sideband_frequencies(trip.energies, sp)
    t = np.arange(0, 6000 * sp.tF, sp.tF / 8)
    pk = ob.spectrum(ob.expect_q(psis[0], sp, t, NMAX), target_splitting=1e-3)
    assert pk.resolved
    found = sorted(pk.frequencies[:3])
    want = sorted(v / (2 * math.pi) for v in sb.values())
    assert np.max(np.abs(np.array(found) - want)) < pk.resolution


def test_short_window_warns(setup):
    sp, psis, trip = setup
    sb = ob.sideband_frequencies(trip.energies, sp)
    t = np.arange(0, 100 * sp.tF, sp.tF / 8)
    s = ob.expect_q(psis[0], sp, t, NMAX)
    with pytest.warns(RuntimeWarning):
        pk = ob.spectrum(s, target_splitting=sb[(1, 0)] - sp.omegaF / 3)
    assert not pk.resolved


def test_stroboscopic_matches_direct(setup):
    sp, psis, _ = setup
    s = ob.expect_q_stroboscopic(psis[0], sp, NMAX, 50, 7, offset=0.3)
    d = ob.expect_q(psis[0], sp, s.times, NMAX)
    assert np.max(np.abs(s.values - d.values)) < 1e-9 * sp.C
    with pytest.raises(ModelValidityError):
        ob.expect_q_stroboscopic(psis[0], sp, NMAX, 50, 9)
    with pytest.raises(ModelValidityError):
        ob.stroboscopic_times(sp, 10, 3)


def test_lab_frame_agrees_with_rotating_frame():
    lab = lab_for_detuning_ratio(F, LAM, 1 / 303)
    sp = to_scaled(lab)
    n = 70
    psi = well_states(F, LAM, n)[0]
    lab_series = ob.expect_q_lab(build_lab_hamiltonian(lab, n), psi, 12, 400, 40)
    rot = ob.expect_q(psi, sp, lab_series.times, n)
    assert np.max(np.abs(lab_series.values - rot.values)) < 0.03 * sp.C * 2
    assert ob.period3_score(lab_series, sp.tF)[0] < 0.01
