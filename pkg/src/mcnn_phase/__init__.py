"""Phase-plane analysis toolkit for second-order memristive cell dynamics.

The package is organized around a small set of frozen dataclasses:

* :class:`~mcnn_phase.memristor.VcmParams` / :class:`~mcnn_phase.cell.CellParams`
  describe the device and the cell it is embedded in,
* :class:`~mcnn_phase.field.PhaseGrid` fixes the analysis window, and
* :func:`~mcnn_phase.document.build_portrait_document` ties sampling,
  nullcline extraction, equilibrium classification and trajectory
  integration together into one serializable document.
"""

from .cell import (
    ISOLATED,
    V_REF,
    CellParams,
    CellState,
    NeighborSignals,
    extracell_current,
    output_nonlinearity,
    state_derivative,
    voltage_derivative,
)
from .config import (
    ConfigError,
    config_hash,
    default_config,
    resolve_config,
)
from .document import PortraitDocument, build_portrait_document
from .equilibria import Equilibrium, SDRCurve, extract_sdr, find_equilibria
from .field import (
    PhaseGrid,
    SignRegionMap,
    VectorFieldSample,
    drm2_regions,
    sample_vector_field,
)
from .memristor import (
    DomainError,
    MemristorModel,
    VcmParams,
    ionic_current,
    state_coordinate,
    static_resistance,
)
from .nullclines import Nullcline, extract_nullclines
from .render import render_portrait, render_sdr
from .serialize import export_csv, export_json
from .simulate import (
    SolverConfig,
    Trajectory,
    reference_integrate,
    simulate_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "CellParams",
    "CellState",
    "ConfigError",
    "DomainError",
    "Equilibrium",
    "ISOLATED",
    "MemristorModel",
    "NeighborSignals",
    "Nullcline",
    "PhaseGrid",
    "PortraitDocument",
    "SDRCurve",
    "SignRegionMap",
    "SolverConfig",
    "Trajectory",
    "V_REF",
    "VcmParams",
    "VectorFieldSample",
    "build_portrait_document",
    "config_hash",
    "default_config",
    "drm2_regions",
    "export_csv",
    "export_json",
    "extracell_current",
    "extract_nullclines",
    "extract_sdr",
    "find_equilibria",
    "ionic_current",
    "output_nonlinearity",
    "reference_integrate",
    "render_portrait",
    "render_sdr",
    "resolve_config",
    "sample_vector_field",
    "simulate_trajectory",
    "state_coordinate",
    "state_derivative",
    "static_resistance",
    "voltage_derivative",
    "__version__",
]
