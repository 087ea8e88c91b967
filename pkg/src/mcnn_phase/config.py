"""Single JSON configuration shared by the CLI, the service and the tests.

One document, five blocks: ``cell``, ``memristor``, ``grid``, ``solver``,
``trajectories`` (plus ``output`` for artifact placement).  Validation is
strict — unknown keys are rejected with their dotted path so a typo like
``cell.r_ohm`` fails loudly instead of silently running defaults.  The
``grid`` state range may be left null, in which case it inherits the
memristor bounds after merging.

The resolved configuration is hashed (sha256 over a canonical JSON
encoding) and that hash is embedded in every artifact for provenance.
"""

from __future__ import annotations

import copy
import hashlib
import json
from typing import Any

from .cell import CellParams, CellState
from .field import PhaseGrid
from .memristor import VcmParams
from .simulate import SolverConfig

__all__ = [
    "ConfigError",
    "default_config",
    "validate_config",
    "resolve_config",
    "apply_overrides",
    "parse_override",
    "config_hash",
    "build_vcm_params",
    "build_cell_params",
    "build_grid",
    "build_solver",
    "build_seeds",
]

SCHEMA_VERSION = "1"


class ConfigError(ValueError):
    """Invalid configuration; ``path`` is the dotted location of the fault."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


_DEFAULTS: dict[str, Any] = {
    "cell": {
        "r_ohms": 1000.0,
        "c_farads": 1e-9,
        "a_template": [0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0],
        "b_template": [0.0] * 9,
        "z_bias": 0.0,
    },
    "memristor": {
        "n_d_min": 1e25,
        "n_d_max": 2e27,
        "r_m_min": 2000.0,
        "r_m_max": 20000.0,
        "i_s": 2e-12,
        "v_0": 0.25,
        "window_exponent": 2.0,
        "polarity": -1,
        "r_d": 4.5e-8,
        "l_d": 4e-10,
        "z_vo": 2.0,
        "e_charge": 1.602176634e-19,
    },
    "grid": {
        "v_c_min": -3.0,
        "v_c_max": 3.0,
        "n_d_min": None,  # null inherits memristor.n_d_min
        "n_d_max": None,  # null inherits memristor.n_d_max
        "v_c_samples": 21,
        "n_d_samples": 21,
        "n_d_axis_scale": "log",
    },
    "solver": {
        "rel_tol": 1e-6,
        "abs_tol_v": 1e-9,
        "abs_tol_n": 1e-9,
        "max_step": None,
        "horizon": 1e-3,
        "log_state": True,
        "report_points": 200,
    },
    "trajectories": [{"v_c0": 1.25, "n_d0": 1e27}],
    "output": {"directory": "."},
}


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _check_number(path, value, *, nullable=False, minimum=None,
                  exclusive_minimum=None, maximum=None):
    if value is None:
        if nullable:
            return
        raise ConfigError(path, "must be a number")
    if not _is_number(value):
        raise ConfigError(path, f"must be a number, got {type(value).__name__}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    if exclusive_minimum is not None and value <= exclusive_minimum:
        raise ConfigError(path, f"must be > {exclusive_minimum}")
    if maximum is not None and value > maximum:
        raise ConfigError(path, f"must be <= {maximum}")


def _check_template(path, value):
    if not isinstance(value, list) or len(value) != 9:
        raise ConfigError(path, "must be a row-major list of 9 numbers")
    for idx, entry in enumerate(value):
        if not _is_number(entry):
            raise ConfigError(f"{path}[{idx}]", "must be a number")


def _check_block(path, value, known: dict):
    if not isinstance(value, dict):
        raise ConfigError(path, "must be an object")
    for key in value:
        if key not in known:
            raise ConfigError(f"{path}.{key}" if path else key, "unknown key")


def validate_config(user: dict) -> None:
    """Structural validation of a (possibly partial) user configuration."""
    if not isinstance(user, dict):
        raise ConfigError("", "configuration must be a JSON object")
    _check_block("", user, _DEFAULTS)

    cell = user.get("cell", {})
    _check_block("cell", cell, _DEFAULTS["cell"])
    if "r_ohms" in cell:
        _check_number("cell.r_ohms", cell["r_ohms"], exclusive_minimum=0)
    if "c_farads" in cell:
        _check_number("cell.c_farads", cell["c_farads"], exclusive_minimum=0)
    if "z_bias" in cell:
        _check_number("cell.z_bias", cell["z_bias"])
    for key in ("a_template", "b_template"):
        if key in cell:
            _check_template(f"cell.{key}", cell[key])

    mem = user.get("memristor", {})
    _check_block("memristor", mem, _DEFAULTS["memristor"])
    for key in ("n_d_min", "n_d_max", "r_m_min", "r_m_max", "v_0", "r_d", "l_d"):
        if key in mem:
            _check_number(f"memristor.{key}", mem[key], exclusive_minimum=0)
    if "i_s" in mem:
        _check_number("memristor.i_s", mem["i_s"], minimum=0)
    if "window_exponent" in mem:
        _check_number("memristor.window_exponent", mem["window_exponent"], minimum=1)
    if "z_vo" in mem:
        _check_number("memristor.z_vo", mem["z_vo"], minimum=1)
    if "e_charge" in mem:
        _check_number("memristor.e_charge", mem["e_charge"], exclusive_minimum=0)
    if "polarity" in mem and mem["polarity"] not in (-1, 1):
        raise ConfigError("memristor.polarity", "must be -1 or 1")

    grid = user.get("grid", {})
    _check_block("grid", grid, _DEFAULTS["grid"])
    for key in ("v_c_min", "v_c_max"):
        if key in grid:
            _check_number(f"grid.{key}", grid[key])
    for key in ("n_d_min", "n_d_max"):
        if key in grid:
            _check_number(f"grid.{key}", grid[key], nullable=True,
                          exclusive_minimum=0)
    for key in ("v_c_samples", "n_d_samples"):
        if key in grid:
            if not _is_int(grid[key]) or grid[key] < 2:
                raise ConfigError(f"grid.{key}", "must be an integer >= 2")
    if "n_d_axis_scale" in grid and grid["n_d_axis_scale"] not in ("log", "linear"):
        raise ConfigError("grid.n_d_axis_scale", 'must be "log" or "linear"')

    solver = user.get("solver", {})
    _check_block("solver", solver, _DEFAULTS["solver"])
    for key in ("rel_tol", "abs_tol_v", "abs_tol_n", "horizon"):
        if key in solver:
            _check_number(f"solver.{key}", solver[key], exclusive_minimum=0)
    if "max_step" in solver:
        _check_number("solver.max_step", solver["max_step"], nullable=True,
                      exclusive_minimum=0)
    if "log_state" in solver and not isinstance(solver["log_state"], bool):
        raise ConfigError("solver.log_state", "must be a boolean")
    if "report_points" in solver:
        if not _is_int(solver["report_points"]) or solver["report_points"] < 2:
            raise ConfigError("solver.report_points", "must be an integer >= 2")

    if "trajectories" in user:
        if not isinstance(user["trajectories"], list):
            raise ConfigError("trajectories", "must be a list")
        for idx, seed in enumerate(user["trajectories"]):
            path = f"trajectories[{idx}]"
            if not isinstance(seed, dict):
                raise ConfigError(path, "must be an object with v_c0 and n_d0")
            for key in seed:
                if key not in ("v_c0", "n_d0"):
                    raise ConfigError(f"{path}.{key}", "unknown key")
            for key in ("v_c0", "n_d0"):
                if key not in seed:
                    raise ConfigError(f"{path}.{key}", "is required")
            _check_number(f"{path}.v_c0", seed["v_c0"])
            _check_number(f"{path}.n_d0", seed["n_d0"], exclusive_minimum=0)

    output = user.get("output", {})
    _check_block("output", output, _DEFAULTS["output"])
    if "directory" in output and not isinstance(output["directory"], str):
        raise ConfigError("output.directory", "must be a string")


def _merge(base: dict, user: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in user.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def resolve_config(user: dict | None = None) -> dict:
    """Validate ``user``, merge over defaults, and close cross-references.

    Raises :class:`ConfigError` for structural faults and for semantic
    inconsistencies (grid outside device bounds, seeds out of range, ...).
    """
    user = user or {}
    validate_config(user)
    cfg = _merge(_DEFAULTS, user)

    mem = cfg["memristor"]
    if not mem["n_d_min"] < mem["n_d_max"]:
        raise ConfigError("memristor.n_d_min", "must be below n_d_max")
    if not mem["r_m_min"] < mem["r_m_max"]:
        raise ConfigError("memristor.r_m_min", "must be below r_m_max")

    grid = cfg["grid"]
    if grid["n_d_min"] is None:
        grid["n_d_min"] = mem["n_d_min"]
    if grid["n_d_max"] is None:
        grid["n_d_max"] = mem["n_d_max"]
    if not grid["v_c_min"] < grid["v_c_max"]:
        raise ConfigError("grid.v_c_min", "must be below v_c_max")
    if not grid["n_d_min"] < grid["n_d_max"]:
        raise ConfigError("grid.n_d_min", "must be below n_d_max")
    if grid["n_d_min"] < mem["n_d_min"] or grid["n_d_max"] > mem["n_d_max"]:
        raise ConfigError("grid.n_d_min", "grid range exceeds memristor bounds")

    for idx, seed in enumerate(cfg["trajectories"]):
        if not mem["n_d_min"] <= seed["n_d0"] <= mem["n_d_max"]:
            raise ConfigError(
                f"trajectories[{idx}].n_d0", "outside memristor bounds"
            )

    # Construct every parameter object once so their own invariants run
    # against the merged values (e.g. polarity, exponent, tolerances).
    try:
        build_cell_params(cfg)
        build_grid(cfg)
        build_solver(cfg)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("", str(exc)) from exc
    return cfg


def default_config() -> dict:
    return resolve_config({})


def canonical_json(obj) -> bytes:
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), allow_nan=False
    ).encode("utf-8")


def config_hash(resolved: dict) -> str:
    return hashlib.sha256(canonical_json(resolved)).hexdigest()


def parse_override(text: str) -> tuple[list[str], Any]:
    """Parse a ``dotted.path=value`` override; value is JSON when it parses."""
    if "=" not in text:
        raise ConfigError("", f"override {text!r} must look like path=value")
    raw_path, raw_value = text.split("=", 1)
    path = [part for part in raw_path.strip().split(".") if part]
    if not path:
        raise ConfigError("", f"override {text!r} has an empty path")
    try:
        value = json.loads(raw_value)
    except json.JSONDecodeError:
        value = raw_value
    return path, value


def apply_overrides(user: dict, overrides) -> dict:
    """Apply dotted-path overrides onto a user config (returns a copy)."""
    cfg = copy.deepcopy(user)
    for text in overrides:
        path, value = parse_override(text)
        cursor = cfg
        for part in path[:-1]:
            nxt = cursor.setdefault(part, {})
            if not isinstance(nxt, dict):
                raise ConfigError(
                    ".".join(path), f"cannot descend through {part!r}"
                )
            cursor = nxt
        cursor[path[-1]] = value
    return cfg


def build_vcm_params(cfg: dict) -> VcmParams:
    mem = cfg["memristor"]
    try:
        return VcmParams(
            n_d_min=float(mem["n_d_min"]),
            n_d_max=float(mem["n_d_max"]),
            r_m_min=float(mem["r_m_min"]),
            r_m_max=float(mem["r_m_max"]),
            i_s=float(mem["i_s"]),
            v_0=float(mem["v_0"]),
            window_exponent=float(mem["window_exponent"]),
            polarity=int(mem["polarity"]),
            r_d=float(mem["r_d"]),
            l_d=float(mem["l_d"]),
            z_vo=float(mem["z_vo"]),
            e_charge=float(mem["e_charge"]),
        )
    except ValueError as exc:
        raise ConfigError("memristor", str(exc)) from exc


def build_cell_params(cfg: dict) -> CellParams:
    cell = cfg["cell"]
    try:
        return CellParams(
            r=float(cell["r_ohms"]),
            c=float(cell["c_farads"]),
            a_template=CellParams.template_from_row_major(cell["a_template"]),
            b_template=CellParams.template_from_row_major(cell["b_template"]),
            z_bias=float(cell["z_bias"]),
            memristor=build_vcm_params(cfg),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("cell", str(exc)) from exc


def build_grid(cfg: dict) -> PhaseGrid:
    grid = cfg["grid"]
    mem = cfg["memristor"]
    try:
        return PhaseGrid(
            v_c_range=(float(grid["v_c_min"]), float(grid["v_c_max"])),
            n_d_range=(
                float(grid["n_d_min"] if grid["n_d_min"] is not None
                      else mem["n_d_min"]),
                float(grid["n_d_max"] if grid["n_d_max"] is not None
                      else mem["n_d_max"]),
            ),
            v_c_samples=int(grid["v_c_samples"]),
            n_d_samples=int(grid["n_d_samples"]),
            n_d_axis_scale=str(grid["n_d_axis_scale"]),
        )
    except ValueError as exc:
        raise ConfigError("grid", str(exc)) from exc


def build_solver(cfg: dict) -> SolverConfig:
    sol = cfg["solver"]
    try:
        return SolverConfig(
            rel_tol=float(sol["rel_tol"]),
            abs_tol_v=float(sol["abs_tol_v"]),
            abs_tol_n=float(sol["abs_tol_n"]),
            max_step=None if sol["max_step"] is None else float(sol["max_step"]),
            horizon=float(sol["horizon"]),
            log_state=bool(sol["log_state"]),
            report_points=int(sol["report_points"]),
        )
    except ValueError as exc:
        raise ConfigError("solver", str(exc)) from exc


def build_seeds(cfg: dict) -> list[CellState]:
    return [
        CellState(float(seed["v_c0"]), float(seed["n_d0"]))
        for seed in cfg["trajectories"]
    ]
