"""Valence-change memristor device model.

The device is a metal-oxide filament whose conduction is controlled by the
oxygen-vacancy donor concentration ``n_d`` in the disc region of the
filament.  Two coupled quantities matter for circuit analysis:

* the *static resistance* seen by the rest of the circuit, which
  interpolates between ``r_m_min`` (fully doped disc, ``n_d = n_d_max``)
  and ``r_m_max`` (depleted disc, ``n_d = n_d_min``), and
* the *ionic current* that moves vacancies in and out of the disc and
  therefore drives the slow state dynamics.

State enters through the normalised log-space coordinate

    u = ln(n_d / n_d_min) / ln(n_d_max / n_d_min),   u in [0, 1],

which linearises the decades-wide concentration range.  Conductance is
affine in ``u``; the ionic current is a sinh transport law multiplied by a
polynomial window that vanishes at whichever bound the drive is pushing
the state towards, so the state can saturate but never leave
``[n_d_min, n_d_max]``.  At zero bias the ionic current is exactly zero:
the device is non-volatile and holds its state indefinitely.

The vacancy balance converting ionic charge flow into a concentration
rate is

    dn_d/dt = -I_ion / (z_vo * e * A_d * l_d),     A_d = pi * r_d**2,

with ``z_vo`` the vacancy charge number and ``A_d``, ``l_d`` the disc
cross-section and thickness.

All functions accept scalars or NumPy arrays for the state/voltage
arguments and are pure; parameter objects are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

__all__ = [
    "DomainError",
    "VcmParams",
    "MemristorModel",
    "BundledVcm",
    "static_resistance",
    "ionic_current",
    "state_derivative",
    "state_coordinate",
    "ELEMENTARY_CHARGE",
]

ELEMENTARY_CHARGE = 1.602176634e-19  # C (exact, 2019 SI)


class DomainError(ValueError):
    """State or voltage outside the declared model domain."""


@dataclass(frozen=True)
class VcmParams:
    """Parameters of the bundled valence-change device.

    Kinetic defaults (``i_s``, ``polarity``) are tuned so that, inside the
    default cell, the capacitance sweep of the design workflow actually
    straddles the race between capacitor relaxation and vacancy drift;
    see the trajectory tooling for the workflow itself.
    """

    n_d_min: float = 0.1e26   # m^-3, depleted-disc donor concentration
    n_d_max: float = 20e26    # m^-3, fully doped disc
    r_m_min: float = 2e3      # Ohm, resistance at n_d_max
    r_m_max: float = 20e3     # Ohm, resistance at n_d_min
    i_s: float = 2e-12        # A, sinh transport prefactor
    v_0: float = 0.25         # V, sinh voltage scale
    window_exponent: float = 2.0
    polarity: int = -1        # +1: positive bias pushes n_d up; -1: down
    r_d: float = 45e-9        # m, filament disc radius
    l_d: float = 0.4e-9       # m, disc thickness
    z_vo: float = 2.0         # vacancy charge number
    e_charge: float = ELEMENTARY_CHARGE  # C

    def __post_init__(self) -> None:
        if not (0.0 < self.n_d_min < self.n_d_max):
            raise ValueError("require 0 < n_d_min < n_d_max")
        if not (0.0 < self.r_m_min < self.r_m_max):
            raise ValueError("require 0 < r_m_min < r_m_max")
        if self.i_s < 0.0:
            raise ValueError("i_s must be non-negative")
        if self.v_0 <= 0.0:
            raise ValueError("v_0 must be positive")
        if self.window_exponent < 1.0:
            raise ValueError("window_exponent must be >= 1")
        if self.polarity not in (-1, 1):
            raise ValueError("polarity must be +1 or -1")
        if self.r_d <= 0.0 or self.l_d <= 0.0:
            raise ValueError("disc geometry must be positive")
        if self.z_vo < 1.0:
            raise ValueError("z_vo must be >= 1")
        if self.e_charge <= 0.0:
            raise ValueError("e_charge must be positive")

    @property
    def disc_volume(self) -> float:
        """Disc volume pi * r_d**2 * l_d in m^3."""
        return math.pi * self.r_d**2 * self.l_d

    @property
    def charge_denominator(self) -> float:
        """z_vo * e * A_d * l_d, the charge-to-concentration conversion."""
        return self.z_vo * self.e_charge * self.disc_volume


@runtime_checkable
class MemristorModel(Protocol):
    """Anything that can stand in for the bundled device.

    Implementations must report a finite, strictly positive resistance
    over the whole state range, return a zero ionic current at zero bias
    (non-volatility), and keep ``state_rate`` consistent with
    ``ionic_current`` through their own charge balance.
    """

    def bounds(self) -> tuple[float, float]: ...

    def resistance(self, v_c, n_d): ...

    def ionic_current(self, v_c, n_d): ...

    def state_rate(self, v_c, n_d): ...


def _check_domain(p: VcmParams, n_d) -> None:
    n = np.asarray(n_d, dtype=float)
    if np.any(n < p.n_d_min) or np.any(n > p.n_d_max):
        raise DomainError(
            f"n_d outside [{p.n_d_min:g}, {p.n_d_max:g}] m^-3; "
            "clamp the state before calling device functions"
        )


def state_coordinate(n_d, p: VcmParams):
    """Normalised log-space state u in [0, 1].

    u = 0 at ``n_d_min`` and u = 1 at ``n_d_max``; raises
    :class:`DomainError` outside the closed interval.
    """
    _check_domain(p, n_d)
    u = np.log(np.asarray(n_d, dtype=float) / p.n_d_min) / math.log(
        p.n_d_max / p.n_d_min
    )
    # Guard the exact bounds against log/exp round-trip noise.
    u = np.clip(u, 0.0, 1.0)
    return u if u.ndim else float(u)


def static_resistance(v_c, n_d, p: VcmParams):
    """Resistance of the device at bias ``v_c`` and state ``n_d``.

    The bundled model is bias-independent: conductance is affine in the
    log-space coordinate, ``G = G_min + (G_max - G_min) * u`` with
    ``G_min = 1/r_m_max`` and ``G_max = 1/r_m_min``.  ``v_c`` is accepted
    so that bias-dependent replacements can share the signature.
    """
    u = np.asarray(state_coordinate(n_d, p))
    g_min = 1.0 / p.r_m_max
    g_max = 1.0 / p.r_m_min
    r = 1.0 / (g_min + (g_max - g_min) * u)
    r = np.broadcast_to(r, np.broadcast(np.asarray(v_c, dtype=float), r).shape)
    return r if r.ndim else float(r)


def _window(u, drive, m: float):
    """Joglekar-style bound window, one-sided on the drive direction."""
    up = np.clip(u, 0.0, 1.0)
    toward_max = (1.0 - up) ** m
    toward_min = up**m
    return np.where(drive > 0.0, toward_max, np.where(drive < 0.0, toward_min, 0.0))


def ionic_current(v_c, n_d, p: VcmParams):
    """Vacancy transport current through the disc, in amperes.

    I_ion = -polarity * i_s * sinh(v_c / v_0) * W(u), where the window W
    is evaluated against the *signed drive* ``polarity * v_c``: a drive
    that pushes the concentration up sees ``(1-u)**m`` and one that pushes
    it down sees ``u**m``, so the appropriate factor vanishes as the state
    approaches the bound it is moving towards.  Zero bias gives exactly
    zero current.
    """
    u = np.asarray(state_coordinate(n_d, p))
    v = np.asarray(v_c, dtype=float)
    drive = p.polarity * v
    w = _window(u, drive, p.window_exponent)
    # sinh overflows for |v_c| >> v_0; the resulting inf/nan is the
    # documented out-of-range signal, not an error to warn about
    with np.errstate(over="ignore", invalid="ignore"):
        i = -p.polarity * p.i_s * np.sinh(v / p.v_0) * w
    return i if i.ndim else float(i)


def state_derivative(v_c, n_d, p: VcmParams):
    """dn_d/dt in m^-3 s^-1 from the vacancy charge balance."""
    i = np.asarray(ionic_current(v_c, n_d, p))
    with np.errstate(over="ignore", invalid="ignore"):
        dn = -i / p.charge_denominator
    return dn if dn.ndim else float(dn)


class BundledVcm:
    """Adapter presenting :class:`VcmParams` through the model protocol."""

    def __init__(self, params: VcmParams):
        self.params = params

    def bounds(self) -> tuple[float, float]:
        return (self.params.n_d_min, self.params.n_d_max)

    def resistance(self, v_c, n_d):
        return static_resistance(v_c, n_d, self.params)

    def ionic_current(self, v_c, n_d):
        return ionic_current(v_c, n_d, self.params)

    def state_rate(self, v_c, n_d):
        return state_derivative(v_c, n_d, self.params)
