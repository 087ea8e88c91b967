"""Time integration of the cell's second-order dynamics.

The system is numerically awkward rather than classically stiff: the
capacitor relaxes in microseconds while the vacancy concentration crawls
over milliseconds and spans two decades.  Two measures tame it without
an implicit solver:

* the state is integrated in the log coordinate y = ln(n_d) by default
  (dy/dt = dN_d/dt / n_d), which linearises the decades; and
* the embedded Dormand-Prince 5(4) pair controls error per component,
  with separate absolute floors for the voltage and the state axis.

Accepted steps are clipped to land exactly on >= 200 evenly spaced
report times, so the reported polyline needs no interpolant and the
point list contains both the report grid and every accepted step.

``reference_integrate`` is a deliberately naive fixed-step classical RK4
in the same coordinates.  It exists to cross-check the adaptive path in
tests (terminal-state agreement, Richardson order probes) and is
accelerated transparently when numba is importable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import cell as cell_mod
from .cell import CellParams, CellState, NeighborSignals, ISOLATED
from .memristor import DomainError, MemristorModel

__all__ = [
    "SolverConfig",
    "SolverStats",
    "Trajectory",
    "simulate_trajectory",
    "reference_integrate",
]

MIN_STEP = 1e-18  # s; below this the step controller reports stiffness failure

# Dormand-Prince 5(4) tableau (FSAL: the 7th stage of an accepted step is
# the first stage of the next one).
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (
    5179 / 57600,
    0.0,
    7571 / 16695,
    393 / 640,
    -92097 / 339200,
    187 / 2100,
    1 / 40,
)
_ERR = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


@dataclass(frozen=True)
class SolverConfig:
    rel_tol: float = 1e-6
    abs_tol_v: float = 1e-9     # V
    abs_tol_n: float = 1e-9     # in the integrated state coordinate
    max_step: float | None = None  # s
    horizon: float = 1e-3       # s
    log_state: bool = True
    report_points: int = 200

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol_v <= 0 or self.abs_tol_n <= 0:
            raise ValueError("tolerances must be positive")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.max_step is not None and self.max_step <= 0:
            raise ValueError("max_step must be positive when given")
        if self.report_points < 2:
            raise ValueError("report_points must be at least 2")


@dataclass(frozen=True)
class SolverStats:
    steps: int
    rejected_steps: int
    min_step: float


@dataclass(frozen=True)
class Trajectory:
    initial: CellState
    points: tuple[tuple[float, CellState], ...]
    terminal: CellState
    solver_stats: SolverStats
    status: str = "ok"  # ok | step-underflow | non-finite-derivative
    diagnostic: dict | None = None


def _make_rhs(
    p: CellParams,
    nb: NeighborSignals,
    model: MemristorModel | None,
    log_state: bool,
):
    """Scalar right-hand side in (v_c, integration coordinate).

    The bundled-model fast path inlines the device algebra with plain
    ``math`` calls; a pluggable model goes through its own methods.
    """
    i_ext = cell_mod.extracell_current(p, nb)
    r, c, a00 = p.r, p.c, p.a_center

    if model is not None:
        lo, hi = model.bounds()

        def rhs_model(v: float, w: float) -> tuple[float, float]:
            n = math.exp(w) if log_state else w
            n = min(max(n, lo), hi)
            f = 0.5 * (abs(v + 1.0) - abs(v - 1.0))
            dv = (i_ext + a00 * f / r) / c - v / (r * c) - v / (
                float(model.resistance(v, n)) * c
            )
            dn = float(model.state_rate(v, n))
            return dv, (dn / n if log_state else dn)

        return rhs_model

    m = p.memristor
    ln_lo = math.log(m.n_d_min)
    ln_ratio = math.log(m.n_d_max / m.n_d_min)
    g_min, g_max = 1.0 / m.r_m_max, 1.0 / m.r_m_min
    i_s, v_0, expo = m.i_s, m.v_0, m.window_exponent
    pol = float(m.polarity)
    denom = m.charge_denominator
    n_lo, n_hi = m.n_d_min, m.n_d_max

    def rhs(v: float, w: float) -> tuple[float, float]:
        if log_state:
            n = math.exp(w)
            ln_n = w
        else:
            n = min(max(w, n_lo), n_hi)
            ln_n = math.log(n)
        u = (ln_n - ln_lo) / ln_ratio
        u = 0.0 if u < 0.0 else (1.0 if u > 1.0 else u)
        g_m = g_min + (g_max - g_min) * u
        f = 0.5 * (abs(v + 1.0) - abs(v - 1.0))
        dv = (i_ext + a00 * f / r) / c - v / (r * c) - v * g_m / c
        drive = pol * v
        if drive > 0.0:
            win = (1.0 - u) ** expo
        elif drive < 0.0:
            win = u**expo
        else:
            win = 0.0
        i_ion = -pol * i_s * math.sinh(v / v_0) * win
        dn = -i_ion / denom
        return dv, (dn / n if log_state else dn)

    return rhs


def _finite(*values: float) -> bool:
    return all(math.isfinite(x) for x in values)


def _check_init(p: CellParams, init: CellState, model: MemristorModel | None):
    lo, hi = (
        model.bounds()
        if model is not None
        else (p.memristor.n_d_min, p.memristor.n_d_max)
    )
    if not (lo <= init.n_d <= hi):
        raise DomainError(f"initial n_d {init.n_d:g} outside [{lo:g}, {hi:g}]")
    if not math.isfinite(init.v_c):
        raise ValueError("initial v_c must be finite")
    return lo, hi


def simulate_trajectory(
    p: CellParams,
    init: CellState,
    cfg: SolverConfig = SolverConfig(),
    nb: NeighborSignals = ISOLATED,
    model: MemristorModel | None = None,
) -> Trajectory:
    """Adaptive Dormand-Prince 5(4) run from ``init`` over cfg.horizon."""
    lo, hi = _check_init(p, init, model)
    rhs = _make_rhs(p, nb, model, cfg.log_state)

    if cfg.log_state:
        w_lo, w_hi = math.log(lo), math.log(hi)
        w = math.log(init.n_d)
    else:
        w_lo, w_hi = lo, hi
        w = init.n_d
    w = min(max(w, w_lo), w_hi)
    v = init.v_c

    def to_state(vv: float, ww: float) -> CellState:
        n = math.exp(ww) if cfg.log_state else ww
        return CellState(float(vv), float(min(max(n, lo), hi)))

    horizon = cfg.horizon
    n_report = max(2, cfg.report_points)
    report = [horizon * k / (n_report - 1) for k in range(n_report)]
    max_step = cfg.max_step if cfg.max_step is not None else horizon

    points: list[tuple[float, CellState]] = [(0.0, to_state(v, w))]
    steps = rejected = 0
    min_step_seen = math.inf

    def finish(status: str, diagnostic: dict | None = None) -> Trajectory:
        stats = SolverStats(
            steps, rejected, min_step_seen if steps else 0.0
        )
        return Trajectory(
            initial=points[0][1],
            points=tuple(points),
            terminal=points[-1][1],
            solver_stats=stats,
            status=status,
            diagnostic=diagnostic,
        )

    def eval_rhs(vv: float, ww: float):
        try:
            dv, dw = rhs(vv, ww)
        except (OverflowError, ValueError):
            return None
        if not _finite(dv, dw):
            return None
        return dv, dw

    k1 = eval_rhs(v, w)
    if k1 is None:
        return finish(
            "non-finite-derivative",
            {"t": 0.0, "v_c": v, "state_coord": w},
        )

    t = 0.0
    h = min(max_step, horizon / 1e4)
    report_idx = 1

    while t < horizon:
        target = report[report_idx] if report_idx < n_report else horizon
        h_try = min(h, max_step)
        hit_target = False
        if t + h_try >= target:
            h_try = target - t
            hit_target = True
        elif (target - t) <= h_try * 1.05 and (target - t) <= max_step:
            # stretch slightly rather than leaving a sliver step behind,
            # but never beyond the configured cap
            h_try = target - t
            hit_target = True

        ks = [k1]
        failed_stage = False
        for row in _A[1:]:
            tv = v + h_try * sum(a * ks[idx][0] for idx, a in enumerate(row))
            tw = w + h_try * sum(a * ks[idx][1] for idx, a in enumerate(row))
            k = eval_rhs(tv, tw)
            if k is None:
                failed_stage = True
                break
            ks.append(k)

        if not failed_stage:
            v_new = v + h_try * sum(b * k[0] for b, k in zip(_B5, ks))
            w_new = w + h_try * sum(b * k[1] for b, k in zip(_B5, ks))
            err_v = h_try * sum(e * k[0] for e, k in zip(_ERR, ks))
            err_w = h_try * sum(e * k[1] for e, k in zip(_ERR, ks))
            if not _finite(v_new, w_new, err_v, err_w):
                failed_stage = True

        if failed_stage:
            rejected += 1
            h = h_try / 2.0
            if h < MIN_STEP:
                return finish(
                    "non-finite-derivative",
                    {"t": t, "v_c": v, "state_coord": w},
                )
            continue

        scale_v = cfg.abs_tol_v + cfg.rel_tol * max(abs(v), abs(v_new))
        scale_w = cfg.abs_tol_n + cfg.rel_tol * max(abs(w), abs(w_new))
        err = max(abs(err_v) / scale_v, abs(err_w) / scale_w)

        if err <= 1.0:
            t = target if hit_target else t + h_try
            clamped = min(max(w_new, w_lo), w_hi)
            v, w = v_new, clamped
            steps += 1
            min_step_seen = min(min_step_seen, h_try)
            points.append((t, to_state(v, w)))
            while report_idx < n_report and report[report_idx] <= t:
                report_idx += 1
            if clamped == w_new:
                k1 = ks[6]  # FSAL
            else:
                k1 = eval_rhs(v, w)
                if k1 is None:
                    return finish(
                        "non-finite-derivative",
                        {"t": t, "v_c": v, "state_coord": w},
                    )
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err**-0.2))
            if hit_target:
                # Keep the natural proposal: a step clipped onto a report
                # time says nothing about the error-optimal step size.
                h = max(h, h_try * factor)
            else:
                h = h_try * factor
        else:
            rejected += 1
            h = h_try * max(0.2, 0.9 * err**-0.2)

        if h < MIN_STEP:
            return finish("step-underflow", {"t": t, "h": h})

    return finish("ok")


# ---------------------------------------------------------------------------
# Fixed-step RK4 reference (test oracle)

_NUMBA_KERNEL = None
_NUMBA_FAILED = False


def _get_numba_kernel():
    global _NUMBA_KERNEL, _NUMBA_FAILED
    if _NUMBA_KERNEL is not None or _NUMBA_FAILED:
        return _NUMBA_KERNEL
    try:
        import numpy as np  # noqa: F401  (numba needs it at compile time)
        from numba import njit
    except ImportError:
        _NUMBA_FAILED = True
        return None

    @njit(cache=True)
    def rhs_nb(v, w, log_state, i_ext, r, c, a00, ln_lo, ln_ratio, g_min,
               g_max, i_s, v_0, expo, pol, denom):
        if log_state:
            n = math.exp(w)
            ln_n = w
        else:
            n = w
            ln_n = math.log(n)
        u = (ln_n - ln_lo) / ln_ratio
        if u < 0.0:
            u = 0.0
        elif u > 1.0:
            u = 1.0
        g_m = g_min + (g_max - g_min) * u
        f = 0.5 * (abs(v + 1.0) - abs(v - 1.0))
        dv = (i_ext + a00 * f / r) / c - v / (r * c) - v * g_m / c
        drive = pol * v
        if drive > 0.0:
            win = (1.0 - u) ** expo
        elif drive < 0.0:
            win = u**expo
        else:
            win = 0.0
        i_ion = -pol * i_s * math.sinh(v / v_0) * win
        dn = -i_ion / denom
        if log_state:
            return dv, dn / n
        return dv, dn

    @njit(cache=True)
    def kernel(v0, w0, h, n_steps, stride, log_state, i_ext, r, c, a00,
               ln_lo, ln_ratio, g_min, g_max, i_s, v_0, expo, pol, denom,
               w_lo, w_hi, rec_t, rec_v, rec_w):
        v = v0
        w = w0
        n_rec = 0
        for step in range(n_steps):
            k1v, k1w = rhs_nb(v, w, log_state, i_ext, r, c, a00, ln_lo,
                              ln_ratio, g_min, g_max, i_s, v_0, expo, pol,
                              denom)
            k2v, k2w = rhs_nb(v + 0.5 * h * k1v, w + 0.5 * h * k1w, log_state,
                              i_ext, r, c, a00, ln_lo, ln_ratio, g_min, g_max,
                              i_s, v_0, expo, pol, denom)
            k3v, k3w = rhs_nb(v + 0.5 * h * k2v, w + 0.5 * h * k2w, log_state,
                              i_ext, r, c, a00, ln_lo, ln_ratio, g_min, g_max,
                              i_s, v_0, expo, pol, denom)
            k4v, k4w = rhs_nb(v + h * k3v, w + h * k3w, log_state, i_ext, r,
                              c, a00, ln_lo, ln_ratio, g_min, g_max, i_s, v_0,
                              expo, pol, denom)
            v = v + h * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
            w = w + h * (k1w + 2.0 * k2w + 2.0 * k3w + k4w) / 6.0
            if w < w_lo:
                w = w_lo
            elif w > w_hi:
                w = w_hi
            if not (math.isfinite(v) and math.isfinite(w)):
                return v, w, step + 1, n_rec, 1
            if (step + 1) % stride == 0 and (step + 1) < n_steps:
                rec_t[n_rec] = h * (step + 1)
                rec_v[n_rec] = v
                rec_w[n_rec] = w
                n_rec += 1
        return v, w, n_steps, n_rec, 0

    _NUMBA_KERNEL = kernel
    return kernel


def reference_integrate(
    p: CellParams,
    init: CellState,
    horizon: float = 1e-3,
    n_steps: int = 1_000_000,
    log_state: bool = True,
    nb: NeighborSignals = ISOLATED,
    model: MemristorModel | None = None,
    record_points: int = 256,
) -> Trajectory:
    """Fixed-step classical RK4 oracle over ``horizon`` with ``n_steps`` steps."""
    if n_steps < 10_000:
        raise ValueError("reference_integrate requires n_steps >= 10^4")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    lo, hi = _check_init(p, init, model)

    if log_state:
        w_lo, w_hi = math.log(lo), math.log(hi)
        w = min(max(math.log(init.n_d), w_lo), w_hi)
    else:
        w_lo, w_hi = lo, hi
        w = init.n_d
    v = init.v_c
    h = horizon / n_steps
    stride = max(1, n_steps // max(2, record_points))

    def to_state(vv: float, ww: float) -> CellState:
        n = math.exp(ww) if log_state else ww
        return CellState(float(vv), float(min(max(n, lo), hi)))

    points: list[tuple[float, CellState]] = [(0.0, to_state(v, w))]
    kernel = _get_numba_kernel() if model is None else None

    if kernel is not None:
        import numpy as np

        m = p.memristor
        cap = n_steps // stride + 2
        rec_t = np.empty(cap)
        rec_v = np.empty(cap)
        rec_w = np.empty(cap)
        v_end, w_end, done, n_rec, bad = kernel(
            float(v), float(w), float(h), int(n_steps), int(stride),
            bool(log_state), cell_mod.extracell_current(p, nb), p.r, p.c,
            p.a_center, math.log(m.n_d_min), math.log(m.n_d_max / m.n_d_min),
            1.0 / m.r_m_max, 1.0 / m.r_m_min, m.i_s, m.v_0,
            m.window_exponent, float(m.polarity), m.charge_denominator,
            w_lo, w_hi, rec_t, rec_v, rec_w,
        )
        for idx in range(n_rec):
            points.append((float(rec_t[idx]), to_state(rec_v[idx], rec_w[idx])))
        status = "ok" if bad == 0 else "non-finite-derivative"
        t_end = h * done
        diagnostic = None
        if bad:
            diagnostic = {"t": t_end, "v_c": float(v_end), "state_coord": float(w_end)}
        else:
            points.append((horizon, to_state(v_end, w_end)))
        stats = SolverStats(steps=int(done), rejected_steps=0, min_step=h)
        return Trajectory(
            initial=points[0][1],
            points=tuple(points),
            terminal=points[-1][1],
            solver_stats=stats,
            status=status,
            diagnostic=diagnostic,
        )

    rhs = _make_rhs(p, nb, model, log_state)
    status = "ok"
    diagnostic = None
    done = 0
    for step in range(n_steps):
        try:
            k1 = rhs(v, w)
            k2 = rhs(v + 0.5 * h * k1[0], w + 0.5 * h * k1[1])
            k3 = rhs(v + 0.5 * h * k2[0], w + 0.5 * h * k2[1])
            k4 = rhs(v + h * k3[0], w + h * k3[1])
            v = v + h * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0
            w = w + h * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0
        except (OverflowError, ValueError):
            status = "non-finite-derivative"
        if status == "ok" and not _finite(v, w):
            status = "non-finite-derivative"
        if status != "ok":
            diagnostic = {"t": h * (step + 1), "v_c": v, "state_coord": w}
            done = step + 1
            break
        w = min(max(w, w_lo), w_hi)
        done = step + 1
        if done % stride == 0 and done < n_steps:
            points.append((h * done, to_state(v, w)))
    if status == "ok":
        points.append((horizon, to_state(v, w)))
    stats = SolverStats(steps=done, rejected_steps=0, min_step=h)
    return Trajectory(
        initial=points[0][1],
        points=tuple(points),
        terminal=points[-1][1],
        solver_stats=stats,
        status=status,
        diagnostic=diagnostic,
    )
