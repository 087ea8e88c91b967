"""Command-line front end.

Every figure-class output has a scriptable reproduction path here; all
artifacts embed the resolved-config hash, diagnostics go to stderr as
single-line JSON records, and exit codes distinguish configuration
faults (2) from numerical failures (3, with partial artifacts plus a
diagnostics file).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from . import config as config_mod
from .config import ConfigError
from .document import build_portrait_document, simulation_failures
from .equilibria import extract_sdr, find_equilibria
from .field import drm2_regions, non_finite_samples, sample_vector_field
from .memristor import DomainError
from .nullclines import extract_nullclines
from .render import render_portrait, render_sdr
from .serialize import (
    document_to_dict,
    equilibria_to_dicts,
    export_csv,
    export_json,
    sdr_to_dict,
    trajectory_to_dict,
)
from .simulate import simulate_trajectory

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _diag(event: str, **payload) -> None:
    record = {"level": "error", "event": event}
    record.update(payload)
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def _load_config(args) -> dict:
    user: dict = {}
    if args.config is not None:
        try:
            user = json.loads(Path(args.config).read_text("utf-8"))
        except OSError as exc:
            raise ConfigError("", f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("", f"config file is not valid JSON: {exc}") from exc
    if args.set:
        user = config_mod.apply_overrides(user, args.set)
    return config_mod.resolve_config(user)


def _out_dir(args, cfg) -> Path:
    directory = args.out if args.out else cfg["output"]["directory"]
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _hash_comment(cfg_hash: str) -> bytes:
    return f"# config_sha256={cfg_hash}\n".encode("utf-8")


def _write(path: Path, data: bytes) -> None:
    path.write_bytes(data)


def _json_artifact(cfg_hash: str, payload: dict) -> bytes:
    body = {"config_hash": cfg_hash}
    body.update(payload)
    return (
        json.dumps(body, sort_keys=True, separators=(",", ":"), allow_nan=False)
        .encode("utf-8")
        + b"\n"
    )


def _cmd_defaults(args) -> int:
    print(json.dumps(config_mod.default_config(), indent=2, sort_keys=True))
    return EXIT_OK


def _field_overflow(out: Path, h: str, bad) -> None:
    nodes = [{"v_c": s.point.v_c, "n_d": s.point.n_d} for s in bad]
    _write(out / "diagnostics.json",
           _json_artifact(h, {"failures": [
               {"kind": "field-overflow", "nodes": nodes}
           ]}))
    _diag("numerical-failure", kind="field-overflow", nodes=len(nodes))


def _cmd_field(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    h = config_mod.config_hash(cfg)
    p = config_mod.build_cell_params(cfg)
    g = config_mod.build_grid(cfg)
    field = sample_vector_field(p, g)
    # CSV is repr-based and tolerates inf; write it before deciding
    _write(out / "field.csv", _hash_comment(h) + export_csv(field))
    bad = non_finite_samples(field)
    if bad:
        _field_overflow(out, h, bad)
        return EXIT_NUMERICAL
    from .serialize import _sample_dict  # stable dict shape shared with documents

    _write(
        out / "field.json",
        _json_artifact(h, {"samples": [_sample_dict(s) for s in field]}),
    )
    return EXIT_OK


def _cmd_nullclines(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    h = config_mod.config_hash(cfg)
    p = config_mod.build_cell_params(cfg)
    g = config_mod.build_grid(cfg)
    nc_v, nc_n = extract_nullclines(p, g)
    _write(out / "nullclines.csv", _hash_comment(h) + export_csv((nc_v, nc_n)))
    _write(
        out / "nullclines.json",
        _json_artifact(
            h,
            {
                "v_c": [[list(pt) for pt in line] for line in nc_v.polylines],
                "n_d": [[list(pt) for pt in line] for line in nc_n.polylines],
            },
        ),
    )
    return EXIT_OK


def _cmd_equilibria(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    h = config_mod.config_hash(cfg)
    p = config_mod.build_cell_params(cfg)
    g = config_mod.build_grid(cfg)
    eqs = find_equilibria(p, g)
    _write(out / "equilibria.csv", _hash_comment(h) + export_csv(eqs))
    _write(
        out / "equilibria.json",
        _json_artifact(h, {"equilibria": equilibria_to_dicts(eqs)}),
    )
    return EXIT_OK


def _cmd_sdr(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    h = config_mod.config_hash(cfg)
    p = config_mod.build_cell_params(cfg)
    g = config_mod.build_grid(cfg)
    raw = args.n_d
    if raw == "min":
        n_d = p.memristor.n_d_min
    elif raw == "max":
        n_d = p.memristor.n_d_max
    else:
        try:
            n_d = float(raw)
        except ValueError:
            raise ConfigError("--n-d", f"expected a number, 'min' or 'max', got {raw!r}")
    route = extract_sdr(p, n_d, g.v_c_range, samples=args.samples)
    _write(out / "sdr.csv", _hash_comment(h) + export_csv(route))
    _write(out / "sdr.json", _json_artifact(h, sdr_to_dict(route)))
    _write(out / "sdr.svg", render_sdr(route, config_hash=h))
    return EXIT_OK


def _cmd_regions(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    h = config_mod.config_hash(cfg)
    p = config_mod.build_cell_params(cfg)
    g = config_mod.build_grid(cfg)
    regions = drm2_regions(sample_vector_field(p, g))
    _write(out / "regions.csv", _hash_comment(h) + export_csv(regions))
    _write(
        out / "regions.json",
        _json_artifact(
            h,
            {
                "v_nodes": list(regions.v_nodes),
                "n_nodes": list(regions.n_nodes),
                "labels": [list(row) for row in regions.labels],
            },
        ),
    )
    return EXIT_OK


def _cmd_trajectory(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    h = config_mod.config_hash(cfg)
    p = config_mod.build_cell_params(cfg)
    solver = config_mod.build_solver(cfg)
    seeds = config_mod.build_seeds(cfg)
    trajectories = [simulate_trajectory(p, s, solver) for s in seeds]
    for idx, traj in enumerate(trajectories):
        _write(out / f"trajectory_{idx:02d}.csv",
               _hash_comment(h) + export_csv(traj))
    _write(
        out / "trajectories.json",
        _json_artifact(
            h, {"trajectories": [trajectory_to_dict(t) for t in trajectories]}
        ),
    )
    failures = [
        {"trajectory": idx, "status": t.status, "diagnostic": t.diagnostic}
        for idx, t in enumerate(trajectories)
        if t.status != "ok"
    ]
    if failures:
        _write(out / "diagnostics.json",
               _json_artifact(h, {"failures": failures}))
        _diag("numerical-failure", failures=failures)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_portrait(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args, cfg)
    doc = build_portrait_document(cfg)
    h = doc.config_hash
    _write(out / "field.csv", _hash_comment(h) + export_csv(list(doc.field)))
    bad = non_finite_samples(doc.field)
    if bad:
        # inf rates cannot be encoded in the canonical JSON document or
        # drawn meaningfully; keep the CSV as the partial artifact
        _field_overflow(out, h, bad)
        return EXIT_NUMERICAL
    _write(out / "portrait.json", export_json(doc))
    _write(out / "portrait.svg", render_portrait(doc))
    failures = simulation_failures(doc)
    if failures:
        _write(out / "diagnostics.json",
               _json_artifact(h, {"failures": failures}))
        _diag("numerical-failure", failures=failures)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = _load_config(args)  # validates before binding the port
    app = create_app(default_user_config=None if args.config is None else cfg)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


_COMMANDS = {
    "defaults": _cmd_defaults,
    "field": _cmd_field,
    "nullclines": _cmd_nullclines,
    "equilibria": _cmd_equilibria,
    "sdr": _cmd_sdr,
    "regions": _cmd_regions,
    "trajectory": _cmd_trajectory,
    "portrait": _cmd_portrait,
    "serve": _cmd_serve,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="JSON configuration file")
    common.add_argument("--set", action="append", default=[],
                        metavar="PATH=VALUE",
                        help="dotted-path config override, repeatable")
    common.add_argument("--out", metavar="DIR",
                        help="artifact output directory")

    parser = argparse.ArgumentParser(
        prog="mcnn-phase",
        description="Phase-plane analysis toolkit for memristive cellular-network cells",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("defaults", parents=[common],
                   help="print the documented default configuration")
    sub.add_parser("field", parents=[common],
                   help="sample the vector field (CSV + JSON)")
    sub.add_parser("nullclines", parents=[common],
                   help="extract both nullclines (CSV + JSON)")
    sub.add_parser("equilibria", parents=[common],
                   help="find and classify equilibria (CSV + JSON)")
    p_sdr = sub.add_parser("sdr", parents=[common],
                           help="frozen-state route at one concentration")
    p_sdr.add_argument("--n-d", required=True,
                       help="concentration in m^-3, or 'min'/'max'")
    p_sdr.add_argument("--samples", type=int, default=601)
    sub.add_parser("regions", parents=[common],
                   help="sign-region map of the phase plane (CSV + JSON)")
    sub.add_parser("trajectory", parents=[common],
                   help="integrate configured initial conditions")
    sub.add_parser("portrait", parents=[common],
                   help="full phase portrait (SVG + JSON + field CSV)")
    p_serve = sub.add_parser("serve", parents=[common],
                             help="start the HTTP analysis service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = _COMMANDS[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        _diag("config-error", path=exc.path, message=str(exc))
        return EXIT_CONFIG
    except DomainError as exc:
        _diag("config-error", path="", message=str(exc))
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
