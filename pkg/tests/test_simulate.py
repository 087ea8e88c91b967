import math

import numpy as np
import pytest

from mcnn_phase.cell import CellParams, CellState
from mcnn_phase.field import PhaseGrid
from mcnn_phase.memristor import VcmParams, static_resistance
from mcnn_phase.simulate import (
    SolverConfig,
    reference_integrate,
    simulate_trajectory,
)

P = CellParams()
P3 = CellParams(r=3e3)


def test_axis_seed_is_stationary():
    t = simulate_trajectory(P, CellState(0.0, 1e26), SolverConfig())
    assert t.status == "ok"
    assert t.solver_stats.rejected_steps == 0
    assert all(s.v_c == 0.0 for _, s in t.points)
    n0 = t.points[0][1].n_d
    for _, s in t.points:
        assert s.n_d == pytest.approx(n0, rel=1e-14)


def test_report_grid_embedded_in_points():
    cfg = SolverConfig(report_points=200)
    t = simulate_trajectory(P, CellState(1.25, 1e27), cfg)
    times = [pt[0] for pt in t.points]
    assert times == sorted(times)
    assert times[0] == 0.0
    assert times[-1] == pytest.approx(cfg.horizon)
    # every report time is hit exactly by a clipped step
    report = {cfg.horizon * k / 199 for k in range(200)}
    hit = {round(x, 18) for x in times}
    missing = [r for r in report if round(r, 18) not in hit]
    assert not missing
    # dense output: accepted steps between report times are kept as well
    assert len(times) >= 200


def test_bistable_terminal_self_consistency():
    """The locked state must satisfy the saturated balance equation."""
    t = simulate_trajectory(P, CellState(1.25, 1e27), SolverConfig())
    assert t.status == "ok"
    v_t, n_t = t.terminal.v_c, t.terminal.n_d
    r_m = static_resistance(v_t, n_t, P.memristor)
    v_star = P.a_center * r_m / (P.r + r_m)
    assert v_t == pytest.approx(v_star, rel=1e-2)
    assert v_t > 1.0  # genuinely saturated


def test_monostable_decay_to_origin():
    t = simulate_trajectory(P3, CellState(0.5, P3.memristor.n_d_max),
                            SolverConfig())
    assert t.status == "ok"
    assert abs(t.terminal.v_c) < 1e-9


def test_state_stays_in_bounds():
    lo, hi = P.memristor.n_d_min, P.memristor.n_d_max
    for seed in (CellState(2.9, 1.1e25), CellState(-2.9, 1.9e27),
                 CellState(1.25, 1e27)):
        t = simulate_trajectory(P, seed, SolverConfig())
        for _, s in t.points:
            assert lo <= s.n_d <= hi


def test_voltage_trapping_region():
    # |v| can never exceed the largest saturated equilibrium by more than
    # the decay allows: from inside, trajectories stay inside
    v_cap = 40.0 / 21.0
    t = simulate_trajectory(P, CellState(1.8, 3e26), SolverConfig())
    assert max(abs(s.v_c) for _, s in t.points) <= v_cap + 1e-6


def test_sign_field_consistency():
    """Between report points the voltage moves with its sampled derivative,
    provided the segment does not straddle the voltage nullcline (there the
    sampled endpoint signs say nothing about the motion in between)."""
    from mcnn_phase.cell import state_derivative

    def branch(n):
        r_m = static_resistance(2.0, n, P.memristor)
        return P.a_center * r_m / (P.r + r_m)

    t = simulate_trajectory(P, CellState(2.5, 4e25), SolverConfig())
    pts = t.points
    checked = 0
    margin = 1e-4  # V; tangency closer than this is indistinguishable
    for k in range(len(pts) - 1):
        _, s0 = pts[k]
        _, s1 = pts[k + 1]
        side0 = s0.v_c - branch(s0.n_d)
        side1 = s1.v_c - branch(s1.n_d)
        if min(abs(side0), abs(side1)) < margin or side0 * side1 <= 0:
            continue  # on/near the voltage nullcline: excluded
        if min(abs(s0.v_c), abs(s1.v_c)) < margin or s0.v_c * s1.v_c <= 0:
            continue
        dv0, _ = state_derivative(P, s0)
        dv1, _ = state_derivative(P, s1)
        if dv0 > 0 and dv1 > 0:
            assert s1.v_c >= s0.v_c - 1e-9
            checked += 1
        elif dv0 < 0 and dv1 < 0:
            assert s1.v_c <= s0.v_c + 1e-9
            checked += 1
    assert checked >= 20


def test_external_model_is_honored():
    class FrozenState:
        def __init__(self, base):
            self.base = base

        def bounds(self):
            return (self.base.n_d_min, self.base.n_d_max)

        def resistance(self, v_c, n_d):
            return static_resistance(v_c, n_d, self.base)

        def ionic_current(self, v_c, n_d):
            return 0.0

        def state_rate(self, v_c, n_d):
            return 0.0 * np.asarray(n_d, dtype=float)

    t = simulate_trajectory(P, CellState(1.25, 1e27), SolverConfig(),
                            model=FrozenState(P.memristor))
    assert t.status == "ok"
    assert t.terminal.n_d == pytest.approx(1e27, rel=1e-12)
    # with n frozen at 1e27 the voltage locks onto the local branch value
    r_m = static_resistance(1.0, 1e27, P.memristor)
    assert t.terminal.v_c == pytest.approx(2.0 * r_m / (1e3 + r_m), rel=1e-6)


def test_non_finite_derivative_abort():
    # v_0 so small that sinh overflows immediately
    p = CellParams(memristor=VcmParams(v_0=1e-4))
    t = simulate_trajectory(p, CellState(1.25, 1e27), SolverConfig())
    assert t.status == "non-finite-derivative"
    assert t.diagnostic is not None
    assert t.diagnostic["t"] == 0.0
    assert t.points  # partial output survives


def test_step_underflow_on_unresolvable_rate():
    class Runaway:
        """Rate both huge and violently oscillatory in v: meeting the error
        tolerance would need a step below the hard floor, so the controller
        must fail loudly instead of hanging.
        """

        def __init__(self, base):
            self.base = base

        def bounds(self):
            return (self.base.n_d_min, self.base.n_d_max)

        def resistance(self, v_c, n_d):
            return static_resistance(v_c, n_d, self.base)

        def ionic_current(self, v_c, n_d):
            return 0.0

        def state_rate(self, v_c, n_d):
            return 1e43 * math.sin(float(v_c) * 1e12)

    t = simulate_trajectory(P, CellState(1.25, 1e27), SolverConfig(),
                            model=Runaway(P.memristor))
    assert t.status == "step-underflow"
    assert t.points[-1][0] < SolverConfig().horizon
    assert t.diagnostic is not None


def test_seed_outside_bounds_rejected():
    with pytest.raises(ValueError):
        simulate_trajectory(P, CellState(0.0, 1e24), SolverConfig())


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(horizon=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(report_points=1)


def test_max_step_is_respected():
    cfg = SolverConfig(max_step=1e-6)
    t = simulate_trajectory(P, CellState(1.25, 1e27), cfg)
    times = [pt[0] for pt in t.points]
    assert max(np.diff(times)) <= 1e-6 + 1e-18


def test_reference_requires_enough_steps():
    with pytest.raises(ValueError):
        reference_integrate(P, CellState(1.0, 1e26), n_steps=100)


def test_reference_python_fallback_matches_kernel():
    """The numba kernel and the pure-python loop are the same algorithm."""
    from mcnn_phase.memristor import BundledVcm

    init = CellState(0.9, 4e26)
    fast = reference_integrate(P, init, horizon=2e-5, n_steps=10_000)
    slow = reference_integrate(P, init, horizon=2e-5, n_steps=10_000,
                               model=BundledVcm(P.memristor))
    assert fast.terminal.v_c == pytest.approx(slow.terminal.v_c, rel=1e-12)
    assert fast.terminal.n_d == pytest.approx(slow.terminal.n_d, rel=1e-12)


def test_adaptive_agrees_with_reference():
    g = PhaseGrid()
    for p, seed in ((P, CellState(-1.7, 8e26)), (P3, CellState(0.8, 2e26))):
        t = simulate_trajectory(p, seed, SolverConfig())
        ref = reference_integrate(p, seed, n_steps=200_000)
        assert t.status == "ok"
        dv = abs(t.terminal.v_c - ref.terminal.v_c) / g.v_span
        dy = abs(math.log(t.terminal.n_d / ref.terminal.n_d)) / g.axis_span
        assert dv < 1e-4 and dy < 1e-4


def test_linear_state_integration_also_supported():
    cfg = SolverConfig(log_state=False)
    t = simulate_trajectory(P, CellState(1.25, 1e27), cfg)
    assert t.status == "ok"
    ref = simulate_trajectory(P, CellState(1.25, 1e27), SolverConfig())
    assert t.terminal.v_c == pytest.approx(ref.terminal.v_c, rel=1e-4)
