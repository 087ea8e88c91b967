"""Nullcline extraction on the sampled phase plane.

Crossings of each scaled derivative are located on grid edges by sign
change, refined by bisection until the derivative magnitude drops below
the tolerance, and linked cell by cell (marching squares, with the
ambiguous four-crossing case resolved by the sign at the cell center).

Exact degeneracies need special treatment: for the isolated cell the
derivative pair vanishes *identically* along whole lines (the V_C = 0
column for both variables, and the half-rows at the state bounds where
the window kills the ionic current).  Runs of three or more exactly-zero
nodes along a grid line are therefore collapsed into analytic straight
segments instead of being chased crossing-by-crossing, and edges touching
such runs are excluded from the marching pass so the degenerate locus is
reported exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import cell as cell_mod
from .cell import CellParams, CellState, NeighborSignals, ISOLATED
from .field import PhaseGrid, field_scales, _raw_derivatives
from .memristor import MemristorModel

__all__ = ["Nullcline", "extract_nullclines", "scaled_point_eval"]

MAX_BISECT = 80

Point = tuple[float, float]


@dataclass(frozen=True)
class Nullcline:
    variable: str  # "V_C" or "N_d"
    polylines: tuple[tuple[Point, ...], ...]

    def vertices(self):
        for line in self.polylines:
            yield from line


def scaled_point_eval(
    p: CellParams,
    g: PhaseGrid,
    nb: NeighborSignals = ISOLATED,
    model: MemristorModel | None = None,
) -> Callable[[float, float], tuple[float, float]]:
    """Pointwise scaled derivative pair as a function of (v_c, axis coord).

    This is the single evaluation path shared by nullcline refinement,
    SDR extraction and equilibrium refinement, so that a vertex accepted
    here reproduces its tolerance bound when re-checked through
    state_derivative.
    """
    s_v, s_n = field_scales(g)

    def eval_point(v: float, y: float) -> tuple[float, float]:
        n = float(np.clip(g.axis_to_n(y), g.n_d_range[0], g.n_d_range[1]))
        dv, dn = cell_mod.state_derivative(p, CellState(v, n), nb, model)
        dn_axis = dn / n if g.log_axis else dn
        return (dv / s_v, dn_axis / s_n)

    return eval_point


def _bisect(f: Callable[[float], float], a: float, b: float, fa: float, fb: float,
            tol: float) -> float:
    """Root of f on [a, b] (fa, fb of opposite sign), to |f| <= tol."""
    best_t, best_f = (a, abs(fa)) if abs(fa) <= abs(fb) else (b, abs(fb))
    for _ in range(MAX_BISECT):
        mid = 0.5 * (a + b)
        fm = f(mid)
        if abs(fm) < best_f:
            best_t, best_f = mid, abs(fm)
        if abs(fm) <= tol:
            return mid
        if (fa < 0.0) != (fm < 0.0):
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return best_t


def _zero_runs(mask_line: np.ndarray, min_len: int):
    """(start, stop) index pairs of runs of True with length >= min_len."""
    runs = []
    start = None
    for idx, flag in enumerate(mask_line):
        if flag and start is None:
            start = idx
        elif not flag and start is not None:
            if idx - start >= min_len:
                runs.append((start, idx - 1))
            start = None
    if start is not None and len(mask_line) - start >= min_len:
        runs.append((start, len(mask_line) - 1))
    return runs


def _component_field(
    p: CellParams,
    g: PhaseGrid,
    nb: NeighborSignals,
    model: MemristorModel | None,
) -> tuple[np.ndarray, np.ndarray]:
    """Scaled derivative component arrays (F_V, F_N), shape (rows, cols)."""
    _, nn, dv, dn = _raw_derivatives(p, g, nb, model)
    s_v, s_n = field_scales(g)
    dn_axis = g.state_rate_to_axis(dn, nn)
    return dv / s_v, dn_axis / s_n


def _extract_component(
    F: np.ndarray,
    v: np.ndarray,
    y: np.ndarray,
    g: PhaseGrid,
    eval_component: Callable[[float, float], float],
    tol: float,
) -> list[list[Point]]:
    """All polylines of one component's zero set, in (v_c, n_d) coordinates."""
    n_rows, n_cols = F.shape
    zero = F == 0.0
    consumed = np.zeros_like(zero)

    # Polylines are carried in (v_c, axis-coordinate) space throughout and
    # converted to concentrations once, at the very end.
    polylines: list[list[Point]] = []

    def to_n(yv: float) -> float:
        return float(np.clip(g.axis_to_n(yv), g.n_d_range[0], g.n_d_range[1]))

    # Degenerate exact-zero runs along grid lines -> analytic segments.
    for i in range(n_cols):
        for j0, j1 in _zero_runs(zero[:, i], 3):
            polylines.append([(float(v[i]), float(y[j0])), (float(v[i]), float(y[j1]))])
            consumed[j0 : j1 + 1, i] = True
    for j in range(n_rows):
        for i0, i1 in _zero_runs(zero[j, :], 3):
            polylines.append([(float(v[i0]), float(y[j])), (float(v[i1]), float(y[j]))])
            consumed[j, i0 : i1 + 1] = True

    # Crossing vertices on edges between non-consumed nodes.
    vertices: dict[tuple, Point] = {}
    segments: set[frozenset] = set()

    def node_key(j: int, i: int):
        return ("n", j, i)

    def register_node(j: int, i: int):
        key = node_key(j, i)
        vertices.setdefault(key, (float(v[i]), float(y[j])))
        return key

    def horiz_vertex(j: int, i: int):
        """Crossing on the edge (j,i)-(j,i+1), or None."""
        if consumed[j, i] or consumed[j, i + 1]:
            return None
        f1, f2 = F[j, i], F[j, i + 1]
        if f1 == 0.0 and f2 == 0.0:
            return None  # short degenerate edge; nodes registered separately
        if f1 == 0.0:
            return register_node(j, i)
        if f2 == 0.0:
            return register_node(j, i + 1)
        if (f1 < 0.0) != (f2 < 0.0):
            key = ("h", j, i)
            if key not in vertices:
                root = _bisect(
                    lambda vv: eval_component(vv, float(y[j])),
                    float(v[i]), float(v[i + 1]), float(f1), float(f2), tol,
                )
                vertices[key] = (root, float(y[j]))
            return key
        return None

    def vert_vertex(j: int, i: int):
        if consumed[j, i] or consumed[j + 1, i]:
            return None
        f1, f2 = F[j, i], F[j + 1, i]
        if f1 == 0.0 and f2 == 0.0:
            return None
        if f1 == 0.0:
            return register_node(j, i)
        if f2 == 0.0:
            return register_node(j + 1, i)
        if (f1 < 0.0) != (f2 < 0.0):
            key = ("v", j, i)
            if key not in vertices:
                root = _bisect(
                    lambda yy: eval_component(float(v[i]), yy),
                    float(y[j]), float(y[j + 1]), float(f1), float(f2), tol,
                )
                vertices[key] = (float(v[i]), root)
            return key
        return None

    for j in range(n_rows - 1):
        for i in range(n_cols - 1):
            found = []
            for key in (
                horiz_vertex(j, i),       # bottom
                vert_vertex(j, i + 1),    # right
                horiz_vertex(j + 1, i),   # top
                vert_vertex(j, i),        # left
            ):
                if key is not None and key not in found:
                    found.append(key)
            if len(found) == 2:
                segments.add(frozenset(found))
            elif len(found) == 4:
                bottom, right, top, left = found
                center = eval_component(
                    0.5 * (float(v[i]) + float(v[i + 1])),
                    0.5 * (float(y[j]) + float(y[j + 1])),
                )
                corner = F[j, i]
                if (center >= 0.0) == (corner >= 0.0):
                    # Curve separates the two off-diagonal corners.
                    segments.add(frozenset((bottom, right)))
                    segments.add(frozenset((top, left)))
                else:
                    segments.add(frozenset((bottom, left)))
                    segments.add(frozenset((top, right)))

    polylines.extend(_chain_segments(vertices, segments))
    return [[(pv, to_n(py)) for pv, py in line] for line in polylines]


def _chain_segments(
    vertices: dict[tuple, Point], segments: set[frozenset]
) -> list[list[Point]]:
    """Link crossing segments into maximal polylines (open chains first)."""
    adjacency: dict[tuple, list[tuple]] = {}
    for seg in segments:
        k1, k2 = sorted(seg, key=lambda k: (vertices[k], str(k)))
        adjacency.setdefault(k1, []).append(k2)
        adjacency.setdefault(k2, []).append(k1)

    unused = {tuple(sorted(seg, key=str)) for seg in segments}

    def take(k1, k2) -> bool:
        key = tuple(sorted((k1, k2), key=str))
        if key in unused:
            unused.discard(key)
            return True
        return False

    def walk(start: tuple) -> list[tuple]:
        chain = [start]
        current = start
        while True:
            next_key = None
            for cand in sorted(adjacency.get(current, []), key=str):
                if take(current, cand):
                    next_key = cand
                    break
            if next_key is None:
                return chain
            chain.append(next_key)
            current = next_key

    ordered = sorted(adjacency, key=lambda k: (vertices[k], str(k)))
    chains: list[list[tuple]] = []
    for key in ordered:  # open chains from endpoints of odd degree
        if len(adjacency[key]) == 1:
            chain = walk(key)
            if len(chain) > 1:
                chains.append(chain)
    for key in ordered:  # remaining closed loops
        chain = walk(key)
        if len(chain) > 1:
            chain.append(chain[0])
            chains.append(chain)
    return [[vertices[k] for k in chain] for chain in chains]


def extract_nullclines(
    p: CellParams,
    g: PhaseGrid,
    tol: float = 1e-9,
    nb: NeighborSignals = ISOLATED,
    model: MemristorModel | None = None,
) -> tuple[Nullcline, Nullcline]:
    """(V_C nullcline, N_d nullcline) over the grid, vertices within tol."""
    F_V, F_N = _component_field(p, g, nb, model)
    v = g.v_nodes()
    y = np.asarray(g.n_to_axis(g.n_nodes()), dtype=float)
    point_eval = scaled_point_eval(p, g, nb, model)

    lines_v = _extract_component(
        F_V, v, y, g, lambda vv, yy: point_eval(vv, yy)[0], tol
    )
    lines_n = _extract_component(
        F_N, v, y, g, lambda vv, yy: point_eval(vv, yy)[1], tol
    )

    def freeze(lines: list[list[Point]]) -> tuple[tuple[Point, ...], ...]:
        return tuple(
            tuple((float(a), float(b)) for a, b in line)
            for line in sorted(lines, key=lambda ln: ln[0])
        )

    return (
        Nullcline(variable="V_C", polylines=freeze(lines_v)),
        Nullcline(variable="N_d", polylines=freeze(lines_n)),
    )
