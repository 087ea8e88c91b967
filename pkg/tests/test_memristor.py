"""Device-model unit tests.

The oracle values here were hand-derived from the closed forms before the
implementation existed: the conductance interpolation is linear in u, so
R_M(u=0.5) is the harmonic midpoint 2/(1/r_min + 1/r_max), and the state
rate is I_ion over the disc charge z·e·π·r_d²·l_d.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mcnn_phase.memristor import (
    BundledVcm,
    DomainError,
    VcmParams,
    ionic_current,
    state_coordinate,
    state_derivative,
    static_resistance,
)

P = VcmParams()
N_MID = math.sqrt(P.n_d_min * P.n_d_max)  # u = 0.5 on the log axis


def test_state_coordinate_endpoints():
    assert state_coordinate(P.n_d_min, P) == 0.0
    assert state_coordinate(P.n_d_max, P) == 1.0
    assert state_coordinate(N_MID, P) == pytest.approx(0.5, abs=1e-15)


def test_state_coordinate_stays_in_unit_interval():
    # log-ratio round-off must never leak u outside [0, 1] anywhere in range
    for n in np.geomspace(P.n_d_min, P.n_d_max, 4001):
        u = state_coordinate(float(n), P)
        assert 0.0 <= u <= 1.0
    with pytest.raises(DomainError):
        state_coordinate(P.n_d_min * (1 - 1e-12), P)


def test_resistance_harmonic_midpoint():
    # G(0.5) = (G_min + G_max)/2 -> R = 2/(1/2k + 1/20k) = 40000/11
    assert static_resistance(0.0, N_MID, P) == pytest.approx(40000.0 / 11.0, rel=1e-12)


def test_resistance_bounds():
    assert static_resistance(0.0, P.n_d_min, P) == pytest.approx(P.r_m_max)
    assert static_resistance(0.0, P.n_d_max, P) == pytest.approx(P.r_m_min)


def test_charge_denominator_recomputed():
    # z * e * pi * r_d^2 * l_d, evaluated independently
    expect = 2.0 * 1.602176634e-19 * math.pi * (45e-9) ** 2 * 0.4e-9
    assert expect == pytest.approx(8.154085875866749e-43, rel=1e-12)
    assert P.charge_denominator == pytest.approx(expect, rel=1e-15)


def test_state_rate_from_ionic_current():
    # A -6.823 uA ionic current through the default disc moves the donor
    # concentration at ~8.37e36 m^-3/s (recomputed, not taken on faith).
    rate = 6.823e-6 / P.charge_denominator
    assert rate == pytest.approx(8.368e36, rel=1e-3)


def test_window_closes_at_bounds():
    # drive pushing n upward at n_max is blocked, and vice versa
    drive_up_v = -1.0 if P.polarity == -1 else 1.0
    assert state_derivative(drive_up_v, P.n_d_max, P) == 0.0
    assert state_derivative(-drive_up_v, P.n_d_min, P) == 0.0


def test_window_open_against_the_bound():
    # pulling away from a bound is not blocked: full window there
    drive_up_v = -1.0 if P.polarity == -1 else 1.0
    assert state_derivative(-drive_up_v, P.n_d_max, P) != 0.0
    assert state_derivative(drive_up_v, P.n_d_min, P) != 0.0


def test_zero_voltage_is_inert():
    assert ionic_current(0.0, N_MID, P) == 0.0
    assert state_derivative(0.0, N_MID, P) == 0.0


def test_sinh_point_value():
    # polarity -1, v=1: drive < 0 so W = u^m = 0.25 at the midpoint
    expect = P.i_s * math.sinh(1.0 / P.v_0) * 0.25
    assert ionic_current(1.0, N_MID, P) == pytest.approx(expect, rel=1e-12)
    assert state_derivative(1.0, N_MID, P) == pytest.approx(
        -expect / P.charge_denominator, rel=1e-12
    )


def test_domain_error_outside_bounds():
    with pytest.raises(DomainError):
        static_resistance(0.0, P.n_d_min / 2, P)
    with pytest.raises(DomainError):
        ionic_current(0.0, P.n_d_max * 2, P)


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        VcmParams(n_d_min=2e27, n_d_max=1e25)
    with pytest.raises(ValueError):
        VcmParams(polarity=0)
    with pytest.raises(ValueError):
        VcmParams(window_exponent=0.5)
    with pytest.raises(ValueError):
        VcmParams(i_s=-1e-12)


def test_vectorized_matches_scalar():
    n = np.array([P.n_d_min, N_MID, P.n_d_max])
    v = np.array([-2.0, 0.5, 2.0])
    vec = state_derivative(v, n, P)
    for i in range(3):
        assert vec[i] == state_derivative(float(v[i]), float(n[i]), P)


@given(st.floats(min_value=0.0, max_value=1.0))
def test_resistance_monotone_in_u(u):
    n = P.n_d_min * (P.n_d_max / P.n_d_min) ** u
    r = static_resistance(0.0, n, P)
    assert P.r_m_min - 1e-9 <= r <= P.r_m_max + 1e-9
    # conductance interpolation means higher u -> lower resistance
    n_hi = P.n_d_min * (P.n_d_max / P.n_d_min) ** min(1.0, u + 0.05)
    assert static_resistance(0.0, n_hi, P) <= r + 1e-9


@given(
    st.floats(min_value=-3.0, max_value=3.0),
    st.floats(min_value=0.0, max_value=1.0),
)
def test_rate_sign_follows_drive(v, u):
    n = P.n_d_min * (P.n_d_max / P.n_d_min) ** u
    rate = state_derivative(v, n, P)
    drive = P.polarity * v
    if drive > 0:
        assert rate >= 0.0
    elif drive < 0:
        assert rate <= 0.0
    else:
        assert rate == 0.0


def test_protocol_adapter_consistency():
    model = BundledVcm(P)
    assert model.bounds() == (P.n_d_min, P.n_d_max)
    assert model.resistance(0.7, N_MID) == static_resistance(0.7, N_MID, P)
    assert model.ionic_current(0.7, N_MID) == ionic_current(0.7, N_MID, P)
    assert model.state_rate(0.7, N_MID) == state_derivative(0.7, N_MID, P)
