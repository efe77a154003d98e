import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import mp_tunnel_integrals
from tripler.errors import ModelValidityError
from tripler.wkb import (_classical_integrals, branch_A, branch_B, branch_B_classical,
                         classical_momentum, crossing_locations, endpoint_quad, geometry,
                         momentum_branch, triplet_harmonic, tunnel_quantities, wkb_harmonic)

# mpmath evaluations at f = 1
Q0_F1 = 1.6180339887498948
G_MIN_F1 = -0.75751416197912285
OMEGA_MIN_F1 = 4.1907404952763484
Q_B_F1 = 0.86803398874989485
A_Q1_F1 = 1.9635254915624211
B_Q1_F1_L03 = 2.514444297165809
C_TUN_F1_L03 = -2.8458482972331258


def test_geometry_reference():
    geo = geometry(1.0, 0.3)
    assert geo.Q0 == pytest.approx(Q0_F1, rel=1e-15)
    assert geo.g_min == pytest.approx(G_MIN_F1, rel=1e-14)
    assert geo.omega_min == pytest.approx(OMEGA_MIN_F1, rel=1e-14)
    assert geo.Q_B == pytest.approx(Q_B_F1, rel=1e-14)
    assert geo.Q1 < geo.Q_B < geo.Q0


def test_geometry_limits_and_domain():
    geo = geometry(1e-9, 0.3)
    assert geo.Q0 == pytest.approx(1.0, abs=1e-8)
    assert abs(geo.g_min) < 1e-8 and geo.omega_min < 1e-4
    for f in (0.0, -1.0):
        with pytest.raises(ModelValidityError):
            geometry(f, 0.3)


def test_branch_values_at_q1():
    geo = geometry(1.0, 0.3)
    assert branch_A(geo.Q1, 1.0) == pytest.approx(A_Q1_F1, rel=1e-14)
    assert branch_A(geo.Q1, 1.0) == pytest.approx(geo.P1**2, rel=1e-14)
    assert branch_B(geo.Q1, 1.0, geo.g0) == pytest.approx(B_Q1_F1_L03, rel=1e-12)


@given(f=st.floats(0.05, 3))
def test_classical_b_factorization(f):
    geo = geometry(f, 0.3)
    Q = np.linspace(geo.Q1, geo.Q0, 22)[1:-1]
    direct = branch_B(Q, f, geo.g_min)
    factored = branch_B_classical(Q, geo)
    scale = np.max(np.abs(direct))
    assert np.max(np.abs(direct - factored)) < 1e-10 * scale


def test_momentum_branch_properties():
    geo = geometry(1.2, 0.2)
    Q = np.linspace(geo.Q1 + 1e-3, geo.Q0 - 1e-3, 200)
    # at finite lam the momentum is real inside the intrawell allowed regions
    P, dgdP = momentum_branch(Q, 1.2, 0.2)
    assert np.all(P.imag <= 0)
    Pc, _ = classical_momentum(Q, geo)
    assert np.all(Pc.imag < 0)
    above = Q > geo.Q_B
    assert np.all(Pc[above].real == 0) and np.all(Pc[~above].real != 0)
    with pytest.raises(ValueError):
        momentum_branch(geo.Q0 + 0.1, 1.2, 0.2)


def test_momentum_solves_g_equal_g0():
    f, lam = 1.4, 0.25
    geo = geometry(f, lam)
    Q = np.linspace(geo.Q1 + 0.01, geo.Q0 - 0.01, 30)
    P, _ = momentum_branch(Q, f, lam)
    g = 0.25 * (Q**2 + P**2 - 1) ** 2 - (f / 3) * (Q**3 - 3 * Q * P**2)
    assert np.max(np.abs(g - geo.g0)) < 1e-12


def test_branch_continuity_at_branch_point():
    geo = geometry(1.7, 0.3)
    eps = 1e-12
    lo, _ = classical_momentum(geo.Q_B - eps, geo)
    hi, _ = classical_momentum(geo.Q_B + eps, geo)
    assert abs(complex(lo) - complex(hi)) < 1e-5


@pytest.mark.parametrize("f", [1.0, 2.5])
def test_integrals_against_arbitrary_precision(f):
    S, Phi, K = _classical_integrals(f)
    S_ref, Phi_ref, K_ref = mp_tunnel_integrals(f)
    assert S == pytest.approx(float(S_ref), abs=1e-10)
    assert Phi == pytest.approx(float(Phi_ref), abs=1e-10)
    assert K == pytest.approx(complex(K_ref), abs=1e-9)


def test_quadrature_stable_under_node_doubling():
    geo = geometry(1.3, 1.0)
    h = lambda Q: classical_momentum(Q, geo)[0].imag  # noqa: E731
    coarse = endpoint_quad(h, geo.Q0, geo.Q_B, n0=64)
    fine = endpoint_quad(h, geo.Q0, geo.Q_B, n0=512)
    assert abs(coarse - fine) < 1e-8


def test_prefactor_reference():
    assert tunnel_quantities(1.0, 0.3).C_tun == pytest.approx(C_TUN_F1_L03, rel=1e-13)


@given(f=st.floats(0.2, 3), lam=st.floats(0.05, 0.5))
def test_splitting_cosine_sum_and_bound(f, lam):
    w = tunnel_quantities(f, lam)
    s = w.splittings
    env = abs(w.C_tun) * math.exp(-w.S_tun / lam)
    assert abs(sum(s)) <= 1e-14 * max(env, 1e-300) * 10
    assert max(abs(x) for x in s) <= env * (1 + 1e-12)
    assert triplet_harmonic(np.array(s)) == pytest.approx(wkb_harmonic(w), rel=1e-10)


def test_action_positive_and_growing():
    S = [tunnel_quantities(f, 0.3).S_tun for f in np.linspace(1.0, 3.0, 9)]
    assert S[0] > 0 and np.all(np.diff(S) > 0)


def test_semiclassical_limit():
    f = 1.5
    S_cl, Phi_cl, _ = _classical_integrals(f)
    geo = geometry(f, 1.0)
    for lam in (1e-3, 1e-5):
        w = tunnel_quantities(f, lam)
        assert abs(lam * w.K_tun) < 10 * lam
        assert w.S_tun == pytest.approx(S_cl, abs=10 * lam)
        # lam * theta1 keeps the finite geometric piece P1 Q1 / 2
        assert w.Phi_tun == pytest.approx(Phi_cl + geo.P1 * geo.Q1 / 2, abs=10 * lam)


def test_envelope_shrinks_with_lambda():
    env = [tunnel_quantities(1.5, lam).log_envelope for lam in (0.4, 0.3, 0.2, 0.1, 0.05)]
    assert np.all(np.diff(env) < 0)


def test_crossing_lattice():
    lam = 0.3
    cr = crossing_locations(0.8, 2.5, lam)
    assert [c.k_pair for c in cr] == [(1, 2), (0, 1), (0, 2), (1, 2)]
    for c in cr:
        w = tunnel_quantities(c.f_cross, lam)
        s = w.splittings
        k, kp = c.k_pair
        assert abs(s[k] - s[kp]) < 1e-7 * abs(w.C_tun) * math.exp(-w.S_tun / lam)
    at01 = next(c for c in cr if c.k_pair == (0, 1))
    assert tunnel_quantities(at01.f_cross, lam).phase % math.pi == pytest.approx(math.pi / 3,
                                                                                abs=1e-7)


def test_no_crossing_inside_one_cell():
    cr = crossing_locations(0.8, 2.5, 0.3)
    gaps = [(a.f_cross, b.f_cross) for a, b in zip(cr, cr[1:])]
    lo, hi = gaps[0]
    assert crossing_locations(lo + 1e-3, hi - 1e-3, 0.3) == []
