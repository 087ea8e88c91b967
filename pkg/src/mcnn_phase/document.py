"""Assembly of the full portrait document from a resolved configuration.

The document is the single self-describing result object shared by the
CLI artifacts and the HTTP service: everything the renderer draws
(arrows, nullclines, equilibria, trajectories, colorbar mapping) is
present as raw values, so any plotted quantity can be re-derived from
the document alone.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import config as config_mod
from .cell import CellParams, CellState
from .equilibria import Equilibrium, find_equilibria
from .field import (
    PhaseGrid,
    T_REF,
    VectorFieldSample,
    default_radii,
    field_norm_range,
    field_scales,
    sample_vector_field,
    worker_count,
)
from .nullclines import Nullcline, extract_nullclines
from .render import COLORMAP_STOPS
from .simulate import Trajectory, simulate_trajectory

__all__ = ["PortraitDocument", "build_portrait_document", "simulation_failures"]

DOCUMENT_VERSION = "1"


@dataclass(frozen=True)
class PortraitDocument:
    config: dict
    config_hash: str
    grid: PhaseGrid
    normalization: dict
    field: tuple[VectorFieldSample, ...]
    nullcline_v: Nullcline
    nullcline_n: Nullcline
    equilibria: tuple[Equilibrium, ...]
    trajectories: tuple[Trajectory, ...]


def _normalization_record(g: PhaseGrid, field) -> dict:
    s_v, s_n = field_scales(g)
    radius_v, radius_n = default_radii(g)
    rng = field_norm_range(s.norm_scaled for s in field)
    return {
        "t_ref": T_REF,
        "s_v": s_v,
        "s_n": s_n,
        "radius_v": radius_v,
        "radius_n": radius_n,
        "norm_min": None if rng is None else rng[0],
        "norm_max": None if rng is None else rng[1],
        "colormap": list(COLORMAP_STOPS),
    }


def build_portrait_document(cfg: dict | None = None) -> PortraitDocument:
    """Run the full analysis pipeline for one resolved configuration."""
    resolved = config_mod.resolve_config(cfg or {})
    p: CellParams = config_mod.build_cell_params(resolved)
    g: PhaseGrid = config_mod.build_grid(resolved)
    solver = config_mod.build_solver(resolved)
    seeds: list[CellState] = config_mod.build_seeds(resolved)

    field = sample_vector_field(p, g)
    nc_v, nc_n = extract_nullclines(p, g)
    eqs = find_equilibria(p, g, nullclines=(nc_v, nc_n))

    workers = min(worker_count(), max(1, len(seeds)))
    if workers == 1 or len(seeds) <= 1:
        trajectories = [simulate_trajectory(p, seed, solver) for seed in seeds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trajectories = list(
                pool.map(lambda seed: simulate_trajectory(p, seed, solver), seeds)
            )

    return PortraitDocument(
        config=resolved,
        config_hash=config_mod.config_hash(resolved),
        grid=g,
        normalization=_normalization_record(g, field),
        field=tuple(field),
        nullcline_v=nc_v,
        nullcline_n=nc_n,
        equilibria=tuple(eqs),
        trajectories=tuple(trajectories),
    )


def simulation_failures(doc: PortraitDocument) -> list[dict]:
    """Diagnostics for every trajectory that did not finish cleanly."""
    failures = []
    for idx, traj in enumerate(doc.trajectories):
        if traj.status != "ok":
            failures.append(
                {
                    "trajectory": idx,
                    "status": traj.status,
                    "initial": {"v_c0": traj.initial.v_c, "n_d0": traj.initial.n_d},
                    "diagnostic": traj.diagnostic,
                }
            )
    return failures
