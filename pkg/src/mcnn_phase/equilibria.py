"""Equilibrium location, classification, and frozen-state dynamic routes.

Three kinds of equilibria coexist in this system and need three different
detectors:

* **on-continuum** — for the isolated cell every point of the V_C = 0
  axis is an equilibrium (zero bias freezes the memristor, zero voltage
  kills every current).  The line is reported per grid row with its
  *transverse* stability, the sign of dV̇_C/dV_C across the axis, which
  is exactly the middle-piece slope of the frozen-state route.  Where
  that slope changes sign along the axis the flip point is refined by
  bisection and reported as a non-hyperbolic marker.
* **boundary** — a saturated voltage equilibrium paired with a state
  bound where the window has already cut the ionic current to exactly
  zero.  The state-side Jacobian column is one-sided (inward), since the
  dynamics only exist on one side of the bound.
* **isolated** — transversal nullcline intersections away from the two
  structures above, polished by a damped 2-D Newton iteration on the
  scaled derivative pair.

Eigenvalues are reported for the raw (V/s)-system: the Jacobian is
computed in scaled coordinates for conditioning and un-scaled row-wise,
which is a similarity transform at an equilibrium and therefore leaves
eigenvalues intact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import cell as cell_mod
from .cell import CellParams, CellState, NeighborSignals, ISOLATED
from .field import PhaseGrid, T_REF, field_scales
from .memristor import MemristorModel
from .nullclines import MAX_BISECT, Nullcline, _bisect, extract_nullclines, scaled_point_eval

__all__ = ["Equilibrium", "SDRCurve", "extract_sdr", "find_equilibria"]

FD_FRACTION = 1e-6      # finite-difference step as a fraction of axis span
EIG_ZERO = 1e-6         # 1/s; |Re lambda| below this is treated as marginal


@dataclass(frozen=True)
class Equilibrium:
    point: CellState
    kind: str            # "isolated" | "on-continuum" | "boundary"
    classification: str  # "stable" | "unstable" | "saddle" | "non-hyperbolic"
    eigenvalues: tuple[complex, complex]
    refined: bool = True


@dataclass(frozen=True)
class SDRCurve:
    """V̇_C against V_C at a frozen memristor state (1st-order route)."""

    n_d_fixed: float
    samples: tuple[tuple[float, float], ...]        # (v_c, dv_dt raw V/s)
    zero_crossings: tuple[tuple[float, str], ...]   # (v_c, "stable"|"unstable")


def extract_sdr(
    p: CellParams,
    n_d_fixed: float,
    v_c_range: tuple[float, float] = (-3.0, 3.0),
    samples: int = 601,
    tol: float = 1e-9,
    nb: NeighborSignals = ISOLATED,
    model: MemristorModel | None = None,
) -> SDRCurve:
    """Sample the frozen-state route and refine its zero crossings."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    lo, hi = v_c_range
    if not lo < hi:
        raise ValueError("v_c_range must be ordered")
    span = hi - lo
    s_v = span / T_REF
    i_ext = cell_mod.extracell_current(p, nb)

    vs = np.linspace(lo, hi, samples)
    dv, _ = cell_mod.derivative_arrays(
        p, vs, np.full_like(vs, float(n_d_fixed)), i_ext, model
    )

    def raw(v: float) -> float:
        return cell_mod.voltage_derivative(
            p, CellState(v, float(n_d_fixed)), i_ext, model
        )

    crossings: list[tuple[float, str]] = []

    def stability(v_star: float) -> str:
        delta = FD_FRACTION * span
        va, vb = max(lo, v_star - delta), min(hi, v_star + delta)
        slope = (raw(vb) - raw(va)) / (vb - va)
        return "stable" if slope < 0.0 else "unstable"

    for i in range(samples):
        if dv[i] == 0.0:
            if i > 0 and dv[i - 1] == 0.0:
                continue  # collapse runs of exact zeros to their first node
            crossings.append((float(vs[i]), stability(float(vs[i]))))
        elif i > 0 and dv[i - 1] != 0.0 and (dv[i] < 0.0) != (dv[i - 1] < 0.0):
            root = _bisect(
                lambda v: raw(v) / s_v,
                float(vs[i - 1]), float(vs[i]),
                float(dv[i - 1] / s_v), float(dv[i] / s_v),
                tol,
            )
            crossings.append((root, stability(root)))

    return SDRCurve(
        n_d_fixed=float(n_d_fixed),
        samples=tuple((float(v), float(d)) for v, d in zip(vs, dv)),
        zero_crossings=tuple(sorted(crossings)),
    )


def _eig_2x2(j00: float, j01: float, j10: float, j11: float):
    tr = j00 + j11
    det = j00 * j11 - j01 * j10
    root = cmath.sqrt(complex(tr * tr / 4.0 - det))
    lams = (tr / 2.0 + root, tr / 2.0 - root)
    return tuple(sorted(lams, key=lambda z: (-z.real, -z.imag)))


def _classify(eigenvalues) -> str:
    scale = max(abs(z) for z in eigenvalues)
    thr = max(EIG_ZERO, 1e-12 * scale)
    res = [z.real for z in eigenvalues]
    if any(abs(x) <= thr for x in res):
        return "non-hyperbolic"
    if all(x < 0 for x in res):
        return "stable"
    if all(x > 0 for x in res):
        return "unstable"
    return "saddle"


class _Workspace:
    """Shared evaluation context for one find_equilibria call."""

    def __init__(self, p, g, tol, nb, model):
        self.p = p
        self.g = g
        self.tol = tol
        self.nb = nb
        self.model = model
        self.eval = scaled_point_eval(p, g, nb, model)
        self.s_v, self.s_n = field_scales(g)
        self.y_lo = float(g.n_to_axis(g.n_d_range[0]))
        self.y_hi = float(g.n_to_axis(g.n_d_range[1]))
        self.dv = FD_FRACTION * g.v_span
        self.dy = FD_FRACTION * g.axis_span

    def to_n(self, y: float) -> float:
        return float(
            np.clip(self.g.axis_to_n(y), self.g.n_d_range[0], self.g.n_d_range[1])
        )

    def jacobian_scaled(self, v: float, y: float):
        """FD Jacobian of the scaled pair wrt (v, y); y-column one-sided
        automatically when y sits on the axis range edge."""
        y_a, y_b = max(self.y_lo, y - self.dy), min(self.y_hi, y + self.dy)
        f_vp = self.eval(v + self.dv, y)
        f_vm = self.eval(v - self.dv, y)
        f_yp = self.eval(v, y_b)
        f_ym = self.eval(v, y_a)
        dvv = 2.0 * self.dv
        dyy = y_b - y_a
        return (
            ((f_vp[0] - f_vm[0]) / dvv, (f_yp[0] - f_ym[0]) / dyy),
            ((f_vp[1] - f_vm[1]) / dvv, (f_yp[1] - f_ym[1]) / dyy),
        )

    def eigenvalues_at(self, v: float, y: float):
        (a, b), (c, d) = self.jacobian_scaled(v, y)
        # Un-scale rows: similarity transform at an equilibrium.
        return _eig_2x2(a * self.s_v, b * self.s_v, c * self.s_n, d * self.s_n)

    def transverse_slope(self, y: float) -> float:
        """Raw dV̇_C/dV_C across the v_c = 0 axis, in 1/s."""
        fp = self.eval(self.dv, y)[0]
        fm = self.eval(-self.dv, y)[0]
        return (fp - fm) / (2.0 * self.dv) * self.s_v


def _continuum_entries(ws: _Workspace) -> list[Equilibrium]:
    g = ws.g
    lo_v, hi_v = g.v_c_range
    if not (lo_v <= 0.0 <= hi_v):
        return []
    ys = [float(y) for y in np.asarray(g.n_to_axis(g.n_nodes()))]
    for y in ys:
        f = ws.eval(0.0, y)
        if f[0] != 0.0 or f[1] != 0.0:
            return []  # axis is not a continuum (biased or coupled cell)

    out: list[Equilibrium] = []
    slopes = [ws.transverse_slope(y) for y in ys]
    for y, slope in zip(ys, slopes):
        if abs(slope) <= EIG_ZERO:
            cls = "non-hyperbolic"
        else:
            cls = "stable" if slope < 0.0 else "unstable"
        eigs = tuple(sorted((complex(slope), 0j), key=lambda z: (-z.real, -z.imag)))
        out.append(
            Equilibrium(
                point=CellState(0.0, ws.to_n(y)),
                kind="on-continuum",
                classification=cls,
                eigenvalues=eigs,
                refined=True,
            )
        )

    # Refine transverse-stability flips between adjacent rows.
    for (y1, s1), (y2, s2) in zip(zip(ys, slopes), zip(ys[1:], slopes[1:])):
        if s1 == 0.0 or s2 == 0.0 or (s1 < 0.0) == (s2 < 0.0):
            continue
        scale = ws.s_v  # bisect on the scaled slope for a span-relative tol
        y_star = _bisect(
            lambda y: ws.transverse_slope(y) / scale,
            y1, y2, s1 / scale, s2 / scale, ws.tol,
        )
        out.append(
            Equilibrium(
                point=CellState(0.0, ws.to_n(y_star)),
                kind="on-continuum",
                classification="non-hyperbolic",
                eigenvalues=(complex(ws.transverse_slope(y_star)), 0j),
                refined=True,
            )
        )
    return out


def _boundary_entries(ws: _Workspace, has_continuum: bool) -> list[Equilibrium]:
    p, g = ws.p, ws.g
    lo_b, hi_b = (
        ws.model.bounds()
        if ws.model is not None
        else (p.memristor.n_d_min, p.memristor.n_d_max)
    )
    out: list[Equilibrium] = []
    for bound in (lo_b, hi_b):
        if bound not in g.n_d_range:
            continue  # grid does not touch this device bound
        route = extract_sdr(
            p, bound, g.v_c_range, samples=601, tol=ws.tol, nb=ws.nb,
            model=ws.model,
        )
        y_b = float(g.n_to_axis(bound))
        for v_star, _ in route.zero_crossings:
            if has_continuum and abs(v_star) <= 1e-9 * g.v_span:
                continue
            _, dn = cell_mod.state_derivative(
                p, CellState(v_star, bound), ws.nb, ws.model
            )
            if dn != 0.0:
                continue  # window has not vanished: not a 2-D equilibrium
            eigs = ws.eigenvalues_at(v_star, y_b)
            out.append(
                Equilibrium(
                    point=CellState(float(v_star), float(bound)),
                    kind="boundary",
                    classification=_classify(eigs),
                    eigenvalues=eigs,
                    refined=True,
                )
            )
    return out


def _segment_intersections(lines_a, lines_b):
    """All proper intersection points between two polyline families."""
    hits: list[tuple[float, float]] = []
    for pa in lines_a:
        for qa in range(len(pa) - 1):
            x1, y1 = pa[qa]
            x2, y2 = pa[qa + 1]
            for pb in lines_b:
                for qb in range(len(pb) - 1):
                    x3, y3 = pb[qb]
                    x4, y4 = pb[qb + 1]
                    d = (x2 - x1) * (y4 - y3) - (y2 - y1) * (x4 - x3)
                    if d == 0.0:
                        continue  # parallel or collinear: handled elsewhere
                    t = ((x3 - x1) * (y4 - y3) - (y3 - y1) * (x4 - x3)) / d
                    u = ((x3 - x1) * (y2 - y1) - (y3 - y1) * (x2 - x1)) / d
                    if -1e-9 <= t <= 1.0 + 1e-9 and -1e-9 <= u <= 1.0 + 1e-9:
                        hits.append((x1 + t * (x2 - x1), y1 + t * (y2 - y1)))
    return hits


def _newton(ws: _Workspace, v0: float, y0: float):
    """Damped 2-D Newton on the scaled pair. Returns (v, y, converged)."""
    v, y = v0, y0
    f = ws.eval(v, y)
    best = (v, y, max(abs(f[0]), abs(f[1])))
    for _ in range(MAX_BISECT):
        norm = max(abs(f[0]), abs(f[1]))
        if norm <= ws.tol:
            return v, y, True
        (a, b), (c, d) = ws.jacobian_scaled(v, y)
        det = a * d - b * c
        if det == 0.0 or not math.isfinite(det):
            break
        step_v = -(d * f[0] - b * f[1]) / det
        step_y = -(-c * f[0] + a * f[1]) / det
        lam = 1.0
        moved = False
        while lam >= 1.0 / 64.0:
            vn = v + lam * step_v
            yn = min(max(y + lam * step_y, ws.y_lo), ws.y_hi)
            fn = ws.eval(vn, yn)
            if max(abs(fn[0]), abs(fn[1])) < norm:
                v, y, f = vn, yn, fn
                moved = True
                break
            lam /= 2.0
        if not moved:
            break
        if max(abs(f[0]), abs(f[1])) < best[2]:
            best = (v, y, max(abs(f[0]), abs(f[1])))
    return best[0], best[1], best[2] <= ws.tol


def find_equilibria(
    p: CellParams,
    g: PhaseGrid,
    tol: float = 1e-9,
    nb: NeighborSignals = ISOLATED,
    model: MemristorModel | None = None,
    nullclines: tuple[Nullcline, Nullcline] | None = None,
) -> list[Equilibrium]:
    """Every equilibrium of the sampled window, classified.

    Ordered deterministically by (n_d, v_c, kind).
    """
    ws = _Workspace(p, g, tol, nb, model)

    results = _continuum_entries(ws)
    has_continuum = bool(results)
    results.extend(_boundary_entries(ws, has_continuum))

    if nullclines is None:
        nullclines = extract_nullclines(p, g, tol, nb, model)
    nc_v, nc_n = nullclines

    def to_vy(nc: Nullcline):
        return [
            [(v, float(g.n_to_axis(n))) for v, n in line] for line in nc.polylines
        ]

    candidates = _segment_intersections(to_vy(nc_v), to_vy(nc_n))

    eps_v = 1e-6 * g.v_span
    eps_y = 1e-6 * g.axis_span
    accepted: list[tuple[float, float]] = [
        (e.point.v_c, float(g.n_to_axis(e.point.n_d))) for e in results
    ]

    for v0, y0 in sorted(candidates):
        if has_continuum and abs(v0) <= eps_v:
            continue
        near_boundary = any(
            abs(y0 - float(g.n_to_axis(b))) <= eps_y and b in g.n_d_range
            for b in (
                ws.model.bounds()
                if model is not None
                else (p.memristor.n_d_min, p.memristor.n_d_max)
            )
        )
        if near_boundary:
            continue
        if any(
            abs(v0 - va) <= eps_v and abs(y0 - ya) <= eps_y
            for va, ya in accepted
        ):
            continue
        v_star, y_star, ok = _newton(ws, v0, y0)
        if not ok:
            v_star, y_star = v0, y0
        if any(
            abs(v_star - va) <= eps_v and abs(y_star - ya) <= eps_y
            for va, ya in accepted
        ):
            continue
        accepted.append((v_star, y_star))
        eigs = ws.eigenvalues_at(v_star, y_star)
        results.append(
            Equilibrium(
                point=CellState(float(v_star), ws.to_n(y_star)),
                kind="isolated",
                classification=_classify(eigs),
                eigenvalues=eigs,
                refined=ok,
            )
        )

    results.sort(key=lambda e: (e.point.n_d, e.point.v_c, e.kind))
    return results
