"""HTTP analysis service.

A thin FastAPI layer over the library: every response that depends on a
configuration carries its sha256 in an ``X-Config-Hash`` header, and the
JSON body of ``/api/analyze`` is byte-identical to the ``portrait.json``
artifact the CLI writes for the same configuration.

Request bodies are validated by the same strict config checker the CLI
uses, so unknown keys and out-of-range values fail with a dotted path
rather than being silently dropped.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from . import __version__
from . import config as config_mod
from .config import ConfigError
from .document import build_portrait_document
from .field import non_finite_samples
from .render import render_portrait
from .serialize import export_json, trajectory_to_dict
from .simulate import simulate_trajectory

GRID_CAP = 201
TRAJECTORY_CAP = 64


def _error(status: int, body: dict, config_hash: str | None = None) -> JSONResponse:
    headers = {}
    if config_hash is not None:
        headers["X-Config-Hash"] = config_hash
    return JSONResponse(body, status_code=status, headers=headers)


def _config_error(exc: ConfigError) -> JSONResponse:
    return _error(400, {"error": "config-error", "path": exc.path,
                        "message": str(exc)})


def _check_caps(cfg: dict) -> JSONResponse | None:
    grid = cfg["grid"]
    if grid["v_c_samples"] > GRID_CAP or grid["n_d_samples"] > GRID_CAP:
        return _error(400, {
            "error": "cap-exceeded",
            "message": f"grid is capped at {GRID_CAP}x{GRID_CAP} samples",
        })
    if len(cfg["trajectories"]) > TRAJECTORY_CAP:
        return _error(400, {
            "error": "cap-exceeded",
            "message": f"at most {TRAJECTORY_CAP} trajectories per request",
        })
    return None


def create_app(default_user_config: dict | None = None,
               allow_origins: tuple[str, ...] = ("*",)) -> FastAPI:
    app = FastAPI(title="mcnn-phase", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(allow_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    base = default_user_config if default_user_config is not None \
        else config_mod.resolve_config({})
    base_hash = config_mod.config_hash(base)

    async def _body_config(request: Request) -> dict | JSONResponse:
        raw = await request.body()
        if not raw:
            return dict(base)
        try:
            payload = json.loads(raw)
        except json.JSONDecodeError:
            return _error(400, {"error": "invalid-json",
                                "message": "request body is not valid JSON"})
        if not isinstance(payload, dict):
            return _error(400, {"error": "invalid-json",
                                "message": "request body must be a JSON object"})
        try:
            return config_mod.resolve_config(payload)
        except ConfigError as exc:
            return _config_error(exc)

    @app.get("/api/health")
    async def health() -> Response:
        body = {"status": "ok", "version": __version__}
        return JSONResponse(body, headers={"X-Config-Hash": base_hash})

    @app.get("/api/defaults")
    async def defaults() -> Response:
        return JSONResponse(config_mod.default_config(),
                            headers={"X-Config-Hash": base_hash})

    def _overflow_error(doc) -> JSONResponse | None:
        bad = non_finite_samples(doc.field)
        if not bad:
            return None
        return _error(
            422,
            {
                "error": "numerical-failure",
                "message": f"vector field overflowed at {len(bad)} grid nodes",
            },
            config_hash=doc.config_hash,
        )

    @app.post("/api/analyze")
    async def analyze(request: Request) -> Response:
        cfg = await _body_config(request)
        if isinstance(cfg, JSONResponse):
            return cfg
        capped = _check_caps(cfg)
        if capped is not None:
            return capped
        doc = build_portrait_document(cfg)
        overflowed = _overflow_error(doc)
        if overflowed is not None:
            return overflowed
        return Response(
            content=export_json(doc),
            media_type="application/json",
            headers={"X-Config-Hash": doc.config_hash},
        )

    @app.post("/api/portrait.svg")
    async def portrait_svg(request: Request) -> Response:
        cfg = await _body_config(request)
        if isinstance(cfg, JSONResponse):
            return cfg
        capped = _check_caps(cfg)
        if capped is not None:
            return capped
        doc = build_portrait_document(cfg)
        overflowed = _overflow_error(doc)
        if overflowed is not None:
            return overflowed
        return Response(
            content=render_portrait(doc),
            media_type="image/svg+xml",
            headers={"X-Config-Hash": doc.config_hash},
        )

    @app.post("/api/trajectory")
    async def trajectory(request: Request) -> Response:
        raw = await request.body()
        try:
            payload = json.loads(raw) if raw else {}
        except json.JSONDecodeError:
            return _error(400, {"error": "invalid-json",
                                "message": "request body is not valid JSON"})
        if not isinstance(payload, dict):
            return _error(400, {"error": "invalid-json",
                                "message": "request body must be a JSON object"})
        user_cfg = payload.get("config", {})
        if not isinstance(user_cfg, dict):
            return _error(400, {"error": "config-error", "path": "config",
                                "message": "config must be a JSON object"})
        try:
            cfg = config_mod.resolve_config(user_cfg)
        except ConfigError as exc:
            return _config_error(exc)
        missing = [k for k in ("v_c0", "n_d0") if k not in payload]
        if missing:
            return _error(400, {"error": "config-error",
                                "path": missing[0],
                                "message": f"missing required field {missing[0]}"})
        try:
            v_c0 = float(payload["v_c0"])
            n_d0 = float(payload["n_d0"])
        except (TypeError, ValueError):
            return _error(400, {"error": "config-error", "path": "v_c0",
                                "message": "v_c0 and n_d0 must be numbers"})
        seed_cfg = dict(cfg)
        seed_cfg["trajectories"] = [{"v_c0": v_c0, "n_d0": n_d0}]
        try:
            cfg = config_mod.resolve_config(seed_cfg)
        except ConfigError as exc:
            return _config_error(exc)
        h = config_mod.config_hash(cfg)
        p = config_mod.build_cell_params(cfg)
        solver = config_mod.build_solver(cfg)
        (state,) = config_mod.build_seeds(cfg)
        traj = simulate_trajectory(p, state, solver)
        body = trajectory_to_dict(traj)
        status = 200 if traj.status == "ok" else 422
        return JSONResponse(body, status_code=status,
                            headers={"X-Config-Hash": h})

    return app


app = create_app()
