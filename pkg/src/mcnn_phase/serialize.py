"""CSV/JSON serialization of analysis results.

Floats are written as their shortest round-trip decimal (``repr``), so
``parse(export(x)) == x`` exactly; JSON output uses canonical key order
and is the wire format served to the browser UI.
"""

from __future__ import annotations

import csv
import io
import json

from .document import DOCUMENT_VERSION, PortraitDocument
from .equilibria import Equilibrium, SDRCurve
from .field import SignRegionMap, VectorFieldSample
from .nullclines import Nullcline
from .simulate import Trajectory

__all__ = [
    "export_csv",
    "export_json",
    "document_to_dict",
    "trajectory_to_dict",
    "sdr_to_dict",
    "equilibria_to_dicts",
]


def _rows_to_csv(header, rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _num(x):
    return repr(float(x))


def _field_rows(field):
    for s in field:
        yield (
            _num(s.point.v_c),
            _num(s.point.n_d),
            _num(s.dv_dt),
            _num(s.dn_dt),
            "" if s.theta is None else _num(s.theta),
            _num(s.norm_scaled),
            _num(s.color_index),
        )


def _nullcline_rows(ncs):
    for nc in ncs:
        for p_idx, line in enumerate(nc.polylines):
            for v_idx, (v, n) in enumerate(line):
                yield (nc.variable, p_idx, v_idx, _num(v), _num(n))


def export_csv(obj) -> bytes:
    """Headered CSV bytes for any exportable result object."""
    if isinstance(obj, Trajectory):
        return _rows_to_csv(
            ("t", "v_c", "n_d"),
            ((_num(t), _num(s.v_c), _num(s.n_d)) for t, s in obj.points),
        )
    if isinstance(obj, Nullcline):
        return _rows_to_csv(
            ("variable", "polyline", "vertex", "v_c", "n_d"),
            _nullcline_rows([obj]),
        )
    if isinstance(obj, SDRCurve):
        return _rows_to_csv(
            ("v_c", "dv_dt"),
            ((_num(v), _num(d)) for v, d in obj.samples),
        )
    if isinstance(obj, SignRegionMap):
        return _rows_to_csv(
            ("v_c", "n_d", "label"),
            (
                (_num(obj.v_nodes[i]), _num(obj.n_nodes[j]), obj.labels[j][i])
                for j in range(len(obj.n_nodes))
                for i in range(len(obj.v_nodes))
            ),
        )
    if isinstance(obj, tuple) and all(isinstance(x, Nullcline) for x in obj):
        return _rows_to_csv(
            ("variable", "polyline", "vertex", "v_c", "n_d"),
            _nullcline_rows(obj),
        )
    if isinstance(obj, (list, tuple)):
        if all(isinstance(x, VectorFieldSample) for x in obj):
            return _rows_to_csv(
                ("v_c", "n_d", "dv_dt", "dn_dt", "theta", "norm_scaled",
                 "color_index"),
                _field_rows(obj),
            )
        if all(isinstance(x, Equilibrium) for x in obj):
            return _rows_to_csv(
                ("v_c", "n_d", "kind", "classification", "eig1_re", "eig1_im",
                 "eig2_re", "eig2_im", "refined"),
                (
                    (
                        _num(e.point.v_c),
                        _num(e.point.n_d),
                        e.kind,
                        e.classification,
                        _num(e.eigenvalues[0].real),
                        _num(e.eigenvalues[0].imag),
                        _num(e.eigenvalues[1].real),
                        _num(e.eigenvalues[1].imag),
                        str(e.refined).lower(),
                    )
                    for e in obj
                ),
            )
    raise TypeError(f"no CSV export for {type(obj).__name__}")


def _state_dict(s) -> dict:
    return {"v_c": float(s.v_c), "n_d": float(s.n_d)}


def trajectory_to_dict(traj: Trajectory) -> dict:
    return {
        "initial": _state_dict(traj.initial),
        "terminal": _state_dict(traj.terminal),
        "points": [[float(t), float(s.v_c), float(s.n_d)] for t, s in traj.points],
        "status": traj.status,
        "diagnostic": traj.diagnostic,
        "solver_stats": {
            "steps": traj.solver_stats.steps,
            "rejected_steps": traj.solver_stats.rejected_steps,
            "min_step": float(traj.solver_stats.min_step),
        },
    }


def sdr_to_dict(route: SDRCurve) -> dict:
    return {
        "n_d_fixed": float(route.n_d_fixed),
        "samples": [[float(v), float(d)] for v, d in route.samples],
        "zero_crossings": [
            {"v_c": float(v), "stability": s} for v, s in route.zero_crossings
        ],
    }


def equilibria_to_dicts(eqs) -> list[dict]:
    return [
        {
            "point": _state_dict(e.point),
            "kind": e.kind,
            "classification": e.classification,
            "eigenvalues": [
                [z.real, z.imag] for z in e.eigenvalues
            ],
            "refined": e.refined,
        }
        for e in eqs
    ]


def _sample_dict(s: VectorFieldSample) -> dict:
    return {
        "v_c": float(s.point.v_c),
        "n_d": float(s.point.n_d),
        "dv_dt": float(s.dv_dt),
        "dn_dt": float(s.dn_dt),
        "theta": None if s.theta is None else float(s.theta),
        "norm_scaled": float(s.norm_scaled),
        "color_index": float(s.color_index),
    }


def _nullcline_dict(nc: Nullcline) -> list:
    return [[[float(v), float(n)] for v, n in line] for line in nc.polylines]


def document_to_dict(doc: PortraitDocument) -> dict:
    g = doc.grid
    return {
        "version": DOCUMENT_VERSION,
        "config_hash": doc.config_hash,
        "config": doc.config,
        "axes": {
            "v_c_min": g.v_c_range[0],
            "v_c_max": g.v_c_range[1],
            "n_d_min": g.n_d_range[0],
            "n_d_max": g.n_d_range[1],
            "v_c_samples": g.v_c_samples,
            "n_d_samples": g.n_d_samples,
            "n_d_axis_scale": "log" if g.log_axis else "linear",
        },
        "normalization": doc.normalization,
        "field": [_sample_dict(s) for s in doc.field],
        "nullclines": {
            "v_c": _nullcline_dict(doc.nullcline_v),
            "n_d": _nullcline_dict(doc.nullcline_n),
        },
        "equilibria": equilibria_to_dicts(doc.equilibria),
        "trajectories": [trajectory_to_dict(t) for t in doc.trajectories],
    }


def export_json(doc: PortraitDocument) -> bytes:
    """Canonical JSON encoding of a portrait document."""
    return (
        json.dumps(
            document_to_dict(doc),
            sort_keys=True,
            separators=(",", ":"),
            allow_nan=False,
        ).encode("utf-8")
        + b"\n"
    )
