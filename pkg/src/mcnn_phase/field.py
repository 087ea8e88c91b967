"""Vector-field sampling, arrow normalization and sign-region maps.

The raw right-hand side of the cell mixes quantities whose magnitudes
differ by ~30 orders (volts per second against m^-3 per second), so a
naive arrow angle atan2(dn, dv) degenerates to vertical/horizontal
everywhere.  Angles and norms are therefore computed on *scaled*
derivatives: each component is divided by the span of its plotted axis
per reference time T_REF = 1 ms, i.e. "full axis traversals per
millisecond".  On a logarithmic state axis the state component is
d(ln n_d)/dt = dn_dt / n_d, so the arrow matches on-screen motion.

Arrows all share one length: the endpoint of a normalized arrow lies on
an axis-aligned ellipse whose radii default to 40% of the grid spacing.
Speed is carried separately by ``norm_scaled`` (Euclidean norm of the
scaled pair) and by ``color_index``, a log10 interpolation between the
smallest and largest nonzero norms of the rendered field.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import cell as cell_mod
from .cell import CellParams, CellState, NeighborSignals, ISOLATED
from .memristor import DomainError, MemristorModel

__all__ = [
    "T_REF",
    "PhaseGrid",
    "VectorFieldSample",
    "SignRegionMap",
    "field_scales",
    "default_radii",
    "sample_vector_field",
    "normalize_vector",
    "magnitude_and_color",
    "field_norm_range",
    "non_finite_samples",
    "drm2_regions",
    "worker_count",
]

T_REF = 1e-3  # s, reference time for axis-span scaling (trajectory horizon)

_LOG_ALIASES = ("log", "logarithmic")
_LINEAR_ALIASES = ("linear", "lin")


def worker_count() -> int:
    """Worker cap from the MCNN_THREADS environment variable (default 1)."""
    raw = os.environ.get("MCNN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class PhaseGrid:
    """Rectangular sampling grid over the (V_C, N_d) plane."""

    v_c_range: tuple[float, float] = (-3.0, 3.0)
    n_d_range: tuple[float, float] = (0.1e26, 20e26)
    v_c_samples: int = 21
    n_d_samples: int = 21
    n_d_axis_scale: str = "log"

    def __post_init__(self) -> None:
        if not (self.v_c_range[0] < self.v_c_range[1]):
            raise ValueError("v_c_range must be ordered")
        if not (0.0 < self.n_d_range[0] < self.n_d_range[1]):
            raise ValueError("n_d_range must be positive and ordered")
        if self.v_c_samples < 2 or self.n_d_samples < 2:
            raise ValueError("need at least 2 samples per axis")
        if self.n_d_axis_scale not in _LOG_ALIASES + _LINEAR_ALIASES:
            raise ValueError("n_d_axis_scale must be 'log' or 'linear'")

    @property
    def log_axis(self) -> bool:
        return self.n_d_axis_scale in _LOG_ALIASES

    def v_nodes(self) -> np.ndarray:
        return np.linspace(self.v_c_range[0], self.v_c_range[1], self.v_c_samples)

    def n_nodes(self) -> np.ndarray:
        lo, hi = self.n_d_range
        if self.log_axis:
            nodes = np.exp(np.linspace(math.log(lo), math.log(hi), self.n_d_samples))
            # exp/log round-trips can overshoot the bounds by an ulp, which
            # the device model treats as a domain error.
            nodes = np.clip(nodes, lo, hi)
        else:
            nodes = np.linspace(lo, hi, self.n_d_samples)
        nodes[0], nodes[-1] = lo, hi
        return nodes

    def n_to_axis(self, n_d):
        """Plotting/axis coordinate of a concentration (ln n_d on log axes)."""
        return np.log(n_d) if self.log_axis else np.asarray(n_d, dtype=float)

    def axis_to_n(self, y):
        n = np.exp(y) if self.log_axis else np.asarray(y, dtype=float)
        return np.clip(n, self.n_d_range[0], self.n_d_range[1])

    @property
    def v_span(self) -> float:
        return self.v_c_range[1] - self.v_c_range[0]

    @property
    def axis_span(self) -> float:
        lo, hi = self.n_d_range
        return math.log(hi / lo) if self.log_axis else hi - lo

    @property
    def v_spacing(self) -> float:
        return self.v_span / (self.v_c_samples - 1)

    @property
    def axis_spacing(self) -> float:
        return self.axis_span / (self.n_d_samples - 1)

    def state_rate_to_axis(self, dn_dt, n_d):
        """Convert dN_d/dt into the axis coordinate's rate."""
        if self.log_axis:
            return np.asarray(dn_dt, dtype=float) / np.asarray(n_d, dtype=float)
        return np.asarray(dn_dt, dtype=float)


@dataclass(frozen=True)
class VectorFieldSample:
    point: CellState
    dv_dt: float        # V/s
    dn_dt: float        # m^-3 / s
    theta: float | None  # radians in (-pi, pi]; None for the zero vector
    norm_scaled: float
    color_index: float


@dataclass(frozen=True)
class SignRegionMap:
    """Per-node sign labels of (dV_C/dt, dN_d/dt).

    Labels are two-character strings over {+, -, 0}; a ``0`` in either
    slot marks exact membership of the corresponding nullcline set.
    ``labels[j][i]`` belongs to state row ``j``, voltage column ``i``.
    """

    v_nodes: tuple[float, ...]
    n_nodes: tuple[float, ...]
    labels: tuple[tuple[str, ...], ...]

    def distinct_region_labels(self) -> set[str]:
        """Labels of full-sign regions present (nullcline nodes excluded)."""
        return {
            lab for row in self.labels for lab in row if "0" not in lab
        }


def field_scales(g: PhaseGrid) -> tuple[float, float]:
    """(S_V, S_N): axis spans per T_REF, in raw-derivative units of each axis."""
    return (g.v_span / T_REF, g.axis_span / T_REF)


def default_radii(g: PhaseGrid) -> tuple[float, float]:
    """Ellipse radii: 40% of the grid spacing along each plotted axis."""
    return (0.4 * g.v_spacing, 0.4 * g.axis_spacing)


def normalize_vector(dv_dt, dn_dt, scales, radii):
    """Constant-length arrow direction for one derivative pair.

    Returns ``(theta, endpoint)`` where theta = atan2(dn_dt/S_N, dv_dt/S_V)
    in (-pi, pi] and endpoint = (a*cos(theta), b*sin(theta)) lies on the
    axis-aligned ellipse with radii (a, b).  The caller is responsible for
    converting dn_dt to the axis coordinate first on logarithmic axes.
    A zero derivative pair has no direction: returns ``(None, None)``.
    """
    s_v, s_n = scales
    if s_v <= 0.0 or s_n <= 0.0:
        raise ValueError("scales must be positive")
    a, b = radii
    if a <= 0.0 or b <= 0.0:
        raise ValueError("radii must be positive")
    x = dv_dt / s_v
    y = dn_dt / s_n
    if x == 0.0 and y == 0.0:
        return (None, None)
    theta = math.atan2(y, x)
    if theta == -math.pi:  # normalize the branch cut to (-pi, pi]
        theta = math.pi
    return (theta, (a * math.cos(theta), b * math.sin(theta)))


def magnitude_and_color(dv_dt, dn_dt, scales, norm_range=None):
    """Scaled Euclidean norm and log-interpolated color index.

    ``norm_range`` is the (smallest, largest) nonzero scaled norm of the
    field being rendered; the color index interpolates log10(norm)
    between them, clipped to [0, 1].  Without a range (or with a
    degenerate one) all nonzero vectors map to 0.5; the zero vector
    always maps to 0.0.
    """
    s_v, s_n = scales
    if s_v <= 0.0 or s_n <= 0.0:
        raise ValueError("scales must be positive")
    norm = math.hypot(dv_dt / s_v, dn_dt / s_n)
    if norm == 0.0:
        return (0.0, 0.0)
    if not norm_range:
        return (norm, 0.5)
    m_min, m_max = norm_range
    if not (m_min > 0.0 and m_max > m_min):
        return (norm, 0.5)
    t = (math.log10(norm) - math.log10(m_min)) / (
        math.log10(m_max) - math.log10(m_min)
    )
    return (norm, min(1.0, max(0.0, t)))


def field_norm_range(norms) -> tuple[float, float] | None:
    """(min, max) over the nonzero entries, or None if all vanish."""
    nz = [x for x in norms if x > 0.0]
    if not nz:
        return None
    return (min(nz), max(nz))


def non_finite_samples(field) -> list[VectorFieldSample]:
    """Samples whose rates overflowed double precision.

    Extreme parameter choices (e.g. a vanishing thermal voltage) push
    sinh past the float range; the evaluation then records inf rather
    than failing, and callers that need encodable output use this to
    report the affected nodes instead of emitting invalid artifacts.
    """
    bad = []
    for s in field:
        values = [s.dv_dt, s.dn_dt, s.norm_scaled, s.color_index]
        if s.theta is not None:
            values.append(s.theta)
        if not all(math.isfinite(x) for x in values):
            bad.append(s)
    return bad


def _check_grid_bounds(p: CellParams, g: PhaseGrid, model: MemristorModel | None):
    lo, hi = model.bounds() if model is not None else (
        p.memristor.n_d_min,
        p.memristor.n_d_max,
    )
    if g.n_d_range[0] < lo or g.n_d_range[1] > hi:
        raise DomainError(
            f"grid n_d_range {g.n_d_range} exceeds model bounds ({lo:g}, {hi:g})"
        )


def _raw_derivatives(
    p: CellParams,
    g: PhaseGrid,
    nb: NeighborSignals,
    model: MemristorModel | None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Node coordinates and raw derivative arrays, shape (n_rows, n_cols)."""
    v = g.v_nodes()
    n = g.n_nodes()
    vv, nn = np.meshgrid(v, n)  # row-major: state varies by row, voltage by column
    i_ext = cell_mod.extracell_current(p, nb)
    workers = worker_count()
    if workers == 1 or g.n_d_samples < 2 * workers:
        dv, dn = cell_mod.derivative_arrays(p, vv, nn, i_ext, model)
    else:
        # Row-chunked evaluation with an ordered merge: output is identical
        # to the single-worker path regardless of scheduling.
        chunks = np.array_split(np.arange(g.n_d_samples), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    lambda idx: cell_mod.derivative_arrays(
                        p, vv[idx], nn[idx], i_ext, model
                    ),
                    chunks,
                )
            )
        dv = np.vstack([part[0] for part in parts])
        dn = np.vstack([part[1] for part in parts])
    return vv, nn, dv, dn


def sample_vector_field(
    p: CellParams,
    g: PhaseGrid,
    nb: NeighborSignals = ISOLATED,
    model: MemristorModel | None = None,
    scales: tuple[float, float] | None = None,
) -> list[VectorFieldSample]:
    """Evaluate the cell derivative at every grid node, row-major (V_C fastest).

    Each sample carries the raw derivative pair plus the normalized angle,
    scaled norm and color index used by the renderer.
    """
    _check_grid_bounds(p, g, model)
    vv, nn, dv, dn = _raw_derivatives(p, g, nb, model)
    s = scales if scales is not None else field_scales(g)
    radii = default_radii(g)
    dn_axis = g.state_rate_to_axis(dn, nn)

    norms = np.hypot(dv / s[0], dn_axis / s[1])
    rng = field_norm_range(norms.ravel().tolist())

    samples: list[VectorFieldSample] = []
    for j in range(g.n_d_samples):
        for i in range(g.v_c_samples):
            theta, _ = normalize_vector(dv[j, i], dn_axis[j, i], s, radii)
            norm, color = magnitude_and_color(dv[j, i], dn_axis[j, i], s, rng)
            samples.append(
                VectorFieldSample(
                    point=CellState(float(vv[j, i]), float(nn[j, i])),
                    dv_dt=float(dv[j, i]),
                    dn_dt=float(dn[j, i]),
                    theta=theta,
                    norm_scaled=float(norm),
                    color_index=float(color),
                )
            )
    return samples


def _sign_char(x: float) -> str:
    if x > 0.0:
        return "+"
    if x < 0.0:
        return "-"
    return "0"


def _infer_shape(field: list[VectorFieldSample]) -> tuple[int, int]:
    """Recover (n_rows, n_cols) from row-major ordering (V_C fastest)."""
    n_cols = 1
    while n_cols < len(field) and (
        field[n_cols].point.v_c > field[n_cols - 1].point.v_c
    ):
        n_cols += 1
    n_rows, rem = divmod(len(field), n_cols)
    if rem or n_rows < 1:
        raise ValueError("field is not a complete row-major grid")
    return n_rows, n_cols


def drm2_regions(field: list[VectorFieldSample]) -> SignRegionMap:
    """Label every node with the sign pair of its raw derivatives.

    Exact zeros keep a ``0`` in the corresponding slot, assigning the node
    to the nullcline set rather than any open region.
    """
    n_rows, n_cols = _infer_shape(field)
    labels = tuple(
        tuple(
            _sign_char(field[j * n_cols + i].dv_dt)
            + _sign_char(field[j * n_cols + i].dn_dt)
            for i in range(n_cols)
        )
        for j in range(n_rows)
    )
    v_nodes = tuple(field[i].point.v_c for i in range(n_cols))
    n_nodes = tuple(field[j * n_cols].point.n_d for j in range(n_rows))
    return SignRegionMap(v_nodes=v_nodes, n_nodes=n_nodes, labels=labels)
