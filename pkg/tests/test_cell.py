import math

import numpy as np
import pytest

from mcnn_phase.cell import (
    ISOLATED,
    CellParams,
    CellState,
    NeighborSignals,
    derivative_arrays,
    extracell_current,
    output_nonlinearity,
    state_derivative,
    voltage_derivative,
)
from mcnn_phase.memristor import VcmParams


def test_output_nonlinearity_shape():
    assert output_nonlinearity(0.0) == 0.0
    assert output_nonlinearity(0.5) == 0.5
    assert output_nonlinearity(1.0) == 1.0
    assert output_nonlinearity(2.7) == 1.0
    assert output_nonlinearity(-4.0) == -1.0
    # odd function
    for v in (0.3, 0.99, 1.01, 5.0):
        assert output_nonlinearity(-v) == -output_nonlinearity(v)


def test_output_nonlinearity_vectorized():
    v = np.array([-2.0, -0.5, 0.0, 0.5, 2.0])
    np.testing.assert_allclose(output_nonlinearity(v), [-1, -0.5, 0, 0.5, 1])


def test_extracell_current_input_term():
    # center B weight 1 with a 0.5 V input through r = 1 kOhm -> 0.5 mA
    p = CellParams(b_template=CellParams.template_from_row_major(
        [0, 0, 0, 0, 1.0, 0, 0, 0, 0]))
    nb = NeighborSignals(v_u_neighbors=((0, 0, 0), (0, 0.5, 0), (0, 0, 0)))
    assert extracell_current(p, nb) == pytest.approx(0.5e-3, rel=1e-12)


def test_extracell_current_bias_term():
    p = CellParams(z_bias=0.25)
    assert extracell_current(p, ISOLATED) == pytest.approx(0.25e-3, rel=1e-12)


def test_extracell_excludes_center_feedback():
    # the center feedback weight acts on the cell's own output, which is part
    # of the in-cell dynamics, not the aggregated neighbor current
    p = CellParams()
    assert extracell_current(p, ISOLATED) == 0.0


def test_extracell_neighbor_feedback_term():
    a = [0.0] * 9
    a[0] = 1.5  # top-left neighbor weight
    a[4] = 2.0
    p = CellParams(a_template=CellParams.template_from_row_major(a))
    nb = NeighborSignals(v_y_neighbors=((0.8, 0, 0), (0, 0.0, 0), (0, 0, 0)))
    assert extracell_current(p, nb) == pytest.approx(1.5 * 0.8 / 1e3, rel=1e-12)


def test_voltage_derivative_worked_point():
    # A00=2, r=1 kOhm, c=1 nF, v=2 V, n=n_d_min (R_M = 20 kOhm):
    # (2 mA - 2 mA - 0.1 mA) / 1 nF = -1.0e5 V/s
    p = CellParams()
    s = CellState(2.0, p.memristor.n_d_min)
    assert voltage_derivative(p, s) == pytest.approx(-1.0e5, rel=1e-12)


def test_full_derivative_worked_point_positive_drift():
    # same voltage point; with polarity +1 a positive v pushes n upward
    p = CellParams(memristor=VcmParams(polarity=1))
    dv, dn = state_derivative(p, CellState(2.0, p.memristor.n_d_min))
    assert dv == pytest.approx(-1.0e5, rel=1e-12)
    assert dn > 0.0


def test_saturated_equilibrium_voltage():
    # In saturation V_Y = sign(v), so dv = 0 at v* = A00*R_M/(r+R_M) * 1 V.
    # At n_d_min (R_M = 20 kOhm, R = 1 kOhm): v* = 40/21 V.
    p = CellParams()
    v_star = 40.0 / 21.0
    s = CellState(v_star, p.memristor.n_d_min)
    assert abs(voltage_derivative(p, s)) < 1e-9 * abs(
        voltage_derivative(p, CellState(3.0, p.memristor.n_d_min)))


def test_derivative_odd_symmetry():
    # the isolated cell ODE is odd in v at fixed n: f(-v) = -f(v) for the
    # voltage component (V_Y and both resistive terms are odd)
    p = CellParams()
    n = math.sqrt(p.memristor.n_d_min * p.memristor.n_d_max)
    for v in (0.2, 0.9, 1.5, 2.8):
        dv_pos = voltage_derivative(p, CellState(v, n))
        dv_neg = voltage_derivative(p, CellState(-v, n))
        assert dv_neg == pytest.approx(-dv_pos, rel=1e-12)


def test_external_current_shifts_balance():
    p = CellParams()
    s = CellState(0.0, p.memristor.n_d_max)
    assert voltage_derivative(p, s) == 0.0
    assert voltage_derivative(p, s, i_ext=1e-3) == pytest.approx(1e6, rel=1e-12)


def test_derivative_arrays_bitwise_matches_scalar():
    """The vectorized path must agree bit for bit with the scalar path.

    Sign brackets for the nullcline bisection are taken from the array
    pass, then refined through the scalar evaluator; any systematic
    difference would corrupt root brackets.
    """
    p = CellParams()
    v = np.linspace(-3, 3, 13)
    n = np.geomspace(p.memristor.n_d_min, p.memristor.n_d_max, 7)
    vv, nn = np.meshgrid(v, n)
    dv_arr, dn_arr = derivative_arrays(p, vv, nn)
    for j in range(nn.shape[0]):
        for i in range(nn.shape[1]):
            dv, dn = state_derivative(p, CellState(float(vv[j, i]), float(nn[j, i])))
            assert dv_arr[j, i] == dv
            assert dn_arr[j, i] == dn


def test_template_must_have_nine_entries():
    with pytest.raises(ValueError):
        CellParams(a_template=CellParams.template_from_row_major([1, 2, 3]))


def test_invalid_cell_params():
    with pytest.raises(ValueError):
        CellParams(r=0.0)
    with pytest.raises(ValueError):
        CellParams(c=-1e-9)
