"""Electrical equations of a single memristive cellular-network cell.

The cell is the parallel combination of a linear resistor ``R``, a linear
capacitor ``C`` and a memristor, fed by a piecewise-linear self-feedback
current and (optionally) coupling currents from a 3x3 neighborhood:

    C * dV_C/dt = I_ext + A00 * V_Y / R - V_C / R - V_C / R_M(V_C, N_d)

with output voltage V_Y = f(V_C) = (|V_C + 1| - |V_C - 1|) / 2, the
standard unity-gain saturation.  The memristor contributes both the
state-dependent resistance R_M and the second state equation for N_d
(see :mod:`mcnn_phase.memristor`), which together make the cell a
second-order autonomous system on the (V_C, N_d) plane.

Template weights are dimensionless; every weighted voltage (neighbor
outputs, inputs, and the bias ``z`` times a 1 V reference) is converted
to a current through the cell resistor, matching the self-feedback
convention I_A00 = A00 * V_Y / R.  The center entry of the A template is
*excluded* from the extracell sum and applied as self-feedback.

All functions are pure.  ``voltage_derivative`` and the private array
evaluator accept NumPy arrays in the state arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import memristor
from .memristor import MemristorModel, VcmParams

__all__ = [
    "CellParams",
    "CellState",
    "NeighborSignals",
    "output_nonlinearity",
    "extracell_current",
    "self_feedback_current",
    "voltage_derivative",
    "state_derivative",
]

V_REF = 1.0  # V, reference voltage turning the dimensionless bias z into a current

Template = tuple[tuple[float, float, float], ...]

_ZERO_3X3: Template = ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
_DEFAULT_A: Template = ((0.0, 0.0, 0.0), (0.0, 2.0, 0.0), (0.0, 0.0, 0.0))


def _as_template(rows) -> Template:
    grid = tuple(tuple(float(x) for x in row) for row in rows)
    if len(grid) != 3 or any(len(row) != 3 for row in grid):
        raise ValueError("template must be a 3x3 grid")
    if not all(np.isfinite(x) for row in grid for x in row):
        raise ValueError("template entries must be finite")
    return grid


@dataclass(frozen=True)
class CellParams:
    """Cell circuit parameters plus the embedded memristor parameters."""

    r: float = 1e3            # Ohm
    c: float = 1e-9           # F
    a_template: Template = _DEFAULT_A
    b_template: Template = _ZERO_3X3
    z_bias: float = 0.0
    memristor: VcmParams = field(default_factory=VcmParams)

    def __post_init__(self) -> None:
        if self.r <= 0.0 or self.c <= 0.0:
            raise ValueError("r and c must be positive")
        object.__setattr__(self, "a_template", _as_template(self.a_template))
        object.__setattr__(self, "b_template", _as_template(self.b_template))
        if not np.isfinite(self.z_bias):
            raise ValueError("z_bias must be finite")

    @property
    def a_center(self) -> float:
        """Self-feedback weight A00."""
        return self.a_template[1][1]

    @staticmethod
    def template_from_row_major(values) -> Template:
        vals = [float(x) for x in values]
        if len(vals) != 9:
            raise ValueError("row-major template needs exactly 9 entries")
        return _as_template([vals[0:3], vals[3:6], vals[6:9]])


@dataclass(frozen=True)
class CellState:
    v_c: float  # V
    n_d: float  # m^-3


@dataclass(frozen=True)
class NeighborSignals:
    """Prescribed 3x3 neighborhood outputs and inputs (static boundary data).

    Defaults describe the isolated cell: all neighbor outputs and inputs
    zero, so the extracell current reduces to the bias term.
    """

    v_y_neighbors: Template = _ZERO_3X3
    v_u_neighbors: Template = _ZERO_3X3

    def __post_init__(self) -> None:
        object.__setattr__(self, "v_y_neighbors", _as_template(self.v_y_neighbors))
        object.__setattr__(self, "v_u_neighbors", _as_template(self.v_u_neighbors))


ISOLATED = NeighborSignals()


def output_nonlinearity(v_c):
    """Unity-gain saturation f(v) = (|v+1| - |v-1|) / 2.

    Odd, identity on [-1, 1], clamped to +/-1 outside.
    """
    v = np.asarray(v_c, dtype=float)
    y = 0.5 * (np.abs(v + 1.0) - np.abs(v - 1.0))
    return y if y.ndim else float(y)


def extracell_current(p: CellParams, nb: NeighborSignals = ISOLATED) -> float:
    """Coupling-plus-bias current in amperes.

    Sums A-weighted neighbor outputs (center excluded), B-weighted inputs
    (center included) and the bias z * V_REF, all divided by the cell
    resistance.
    """
    total = p.z_bias * V_REF
    for k in range(3):
        for l in range(3):
            if not (k == 1 and l == 1):
                total += p.a_template[k][l] * nb.v_y_neighbors[k][l]
            total += p.b_template[k][l] * nb.v_u_neighbors[k][l]
    return total / p.r


def self_feedback_current(p: CellParams, v_c):
    """Self-coupling current A00 * f(v_c) / r."""
    i = p.a_center * np.asarray(output_nonlinearity(v_c)) / p.r
    return i if i.ndim else float(i)


def _resistance(p: CellParams, v, n, model: MemristorModel | None):
    if model is None:
        return memristor.static_resistance(v, n, p.memristor)
    return model.resistance(v, n)


def _state_rate(p: CellParams, v, n, model: MemristorModel | None):
    if model is None:
        return memristor.state_derivative(v, n, p.memristor)
    return model.state_rate(v, n)


def voltage_derivative(
    p: CellParams,
    s: CellState,
    i_ext: float = 0.0,
    model: MemristorModel | None = None,
) -> float:
    """dV_C/dt in V/s at the given state, for a prescribed extracell current."""
    r_m = _resistance(p, s.v_c, s.n_d, model)
    return float(
        (i_ext + self_feedback_current(p, s.v_c)) / p.c
        - s.v_c / (p.r * p.c)
        - s.v_c / (r_m * p.c)
    )


def state_derivative(
    p: CellParams,
    s: CellState,
    nb: NeighborSignals = ISOLATED,
    model: MemristorModel | None = None,
) -> tuple[float, float]:
    """(dV_C/dt, dN_d/dt) — the full second-order right-hand side."""
    i_ext = extracell_current(p, nb)
    dv = voltage_derivative(p, s, i_ext, model)
    dn = float(_state_rate(p, s.v_c, s.n_d, model))
    return (dv, dn)


def derivative_arrays(
    p: CellParams,
    v_c: np.ndarray,
    n_d: np.ndarray,
    i_ext: float = 0.0,
    model: MemristorModel | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised right-hand side over matching arrays of states.

    Identical algebra to :func:`state_derivative`; used by the phase-plane
    sampler where per-point Python dispatch would dominate the cost.
    """
    v = np.asarray(v_c, dtype=float)
    n = np.asarray(n_d, dtype=float)
    r_m = np.asarray(_resistance(p, v, n, model), dtype=float)
    f = np.asarray(output_nonlinearity(v))
    dv = (i_ext + p.a_center * f / p.r) / p.c - v / (p.r * p.c) - v / (r_m * p.c)
    dn = np.asarray(_state_rate(p, v, n, model), dtype=float)
    dn = np.broadcast_to(dn, dv.shape)
    return dv, dn
