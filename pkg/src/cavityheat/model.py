"""Physical parameters of the cavity/resistor system and closed-form derived quantities.

Units are SI throughout: metres, farads, henries, ohms, kelvin, rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J/K


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = field(default=HBAR, init=False)
    k_B: float = field(default=K_B, init=False)


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class CavityParams:
    """Distributed-element description of the coplanar waveguide.

    Attributes
    ----------
    length : float
        Cavity length L in m.
    cap_per_len : float
        Capacitance per unit length c in F/m.
    ind_per_len : float
        Inductance per unit length l in H/m.
    loss_per_len : float
        Series resistance per unit length r in ohm/m (intrinsic loss).
    """

    length: float
    cap_per_len: float
    ind_per_len: float
    loss_per_len: float = 0.0

    def __post_init__(self):
        for name in ("length", "cap_per_len", "ind_per_len"):
            if not getattr(self, name) > 0:
                raise ValueError(f"cavity.{name} must be > 0, got {getattr(self, name)!r}")
        if not self.loss_per_len >= 0:
            raise ValueError(f"cavity.loss_per_len must be >= 0, got {self.loss_per_len!r}")

    @classmethod
    def from_impedance(cls, length, cap_per_len, z0, loss_per_len=0.0):
        """Build from Z0 instead of l, using l = Z0**2 * c."""
        if not z0 > 0:
            raise ValueError(f"cavity.z0 must be > 0, got {z0!r}")
        return cls(length, cap_per_len, z0 * z0 * cap_per_len, loss_per_len)


@dataclass(frozen=True)
class ResistorParams:
    """A thin-film resistor embedded in the centre conductor.

    ``coupling_override`` replaces the geometric coupling rate when given.
    """

    resistance: float
    position_fraction: float
    volume: float
    sigma_ep: float
    coupling_override: Optional[float] = None

    def __post_init__(self):
        if not self.resistance > 0:
            raise ValueError(f"resistance must be > 0, got {self.resistance!r}")
        if not 0.0 < self.position_fraction < 1.0:
            raise ValueError(
                f"position_fraction must lie in (0, 1), got {self.position_fraction!r}"
            )
        if not self.volume > 0:
            raise ValueError(f"volume must be > 0, got {self.volume!r}")
        if not self.sigma_ep > 0:
            raise ValueError(f"sigma_ep must be > 0, got {self.sigma_ep!r}")
        if self.coupling_override is not None and not self.coupling_override > 0:
            raise ValueError(
                f"coupling_override must be > 0 when given, got {self.coupling_override!r}"
            )


@dataclass(frozen=True)
class SystemParams:
    cavity: CavityParams
    resistor1: ResistorParams
    resistor2: ResistorParams
    bath_temperature: float
    n_modes: int = 30
    n_photons_max: int = 50

    def __post_init__(self):
        if not self.bath_temperature > 0:
            raise ValueError(f"bath_temperature must be > 0, got {self.bath_temperature!r}")
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise ValueError(f"n_modes must be an integer >= 1, got {self.n_modes!r}")
        if int(self.n_photons_max) != self.n_photons_max or self.n_photons_max < 2:
            raise ValueError(
                f"n_photons_max must be an integer >= 2, got {self.n_photons_max!r}"
            )

    @property
    def resistors(self):
        return (self.resistor1, self.resistor2)

    def with_(self, **changes):
        return replace(self, **changes)


def mode_frequency(cavity: CavityParams, k: int) -> float:
    """Angular frequency of cavity mode ``k`` (k >= 1)."""
    if int(k) != k or k < 1:
        raise ValueError(f"mode index must be a positive integer, got {k!r}")
    return k * math.pi / (cavity.length * math.sqrt(cavity.ind_per_len * cavity.cap_per_len))


def characteristic_impedance(cavity: CavityParams) -> float:
    return math.sqrt(cavity.ind_per_len / cavity.cap_per_len)


def effective_resistance(resistor: ResistorParams, cavity: CavityParams = None, k: int = 1) -> float:
    """R * sin^2(k pi x / L): the share of the resistor seen by mode ``k``."""
    s = math.sin(k * math.pi * resistor.position_fraction)
    return resistor.resistance * s * s


def geometric_coupling_rate(resistor, cavity, k=1):
    """Energy decay rate of mode ``k`` into ``resistor``, 2 R_eff / (L l)."""
    r_eff = effective_resistance(resistor, cavity, k)
    return 2.0 * r_eff / (cavity.length * cavity.ind_per_len)


def coupling_rate(resistor: ResistorParams, cavity: CavityParams) -> float:
    """Fundamental-mode coupling rate, honouring ``coupling_override``."""
    if resistor.coupling_override is not None:
        return float(resistor.coupling_override)
    return geometric_coupling_rate(resistor, cavity, 1)


def mode_coupling_rate(resistor: ResistorParams, cavity: CavityParams, k: int) -> float:
    """Coupling rate of mode ``k``.

    An explicit override is applied unchanged to every mode. In geometric mode
    the rate follows the standing-wave current profile, sin^2(k pi x / L).
    """
    if resistor.coupling_override is not None:
        return float(resistor.coupling_override)
    return geometric_coupling_rate(resistor, cavity, k)


def internal_loss_rate(cavity: CavityParams) -> float:
    return cavity.loss_per_len / cavity.ind_per_len


def bose_occupancy(omega, temperature):
    """Mean thermal photon number 1 / (exp(hbar w / kB T) - 1).

    Works on scalars and arrays; large arguments underflow cleanly to 0.
    """
    t = np.asarray(temperature, dtype=float)
    if np.any(t <= 0) or np.any(~np.isfinite(t)):
        raise ValueError(f"temperature must be > 0, got {temperature!r}")
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise ValueError(f"omega must be > 0, got {omega!r}")
    x = HBAR * w / (K_B * t)
    with np.errstate(over="ignore"):
        n = 1.0 / np.expm1(x)
    if n.ndim == 0:
        return float(n)
    return n


@dataclass(frozen=True)
class DerivedQuantities:
    omega_k: np.ndarray
    z0: float
    r_eff: tuple
    gamma: tuple
    gamma_int: float
    q_eff: float


def derive(params: SystemParams) -> DerivedQuantities:
    cav = params.cavity
    w = np.array([mode_frequency(cav, k) for k in range(1, params.n_modes + 1)])
    gammas = tuple(coupling_rate(r, cav) for r in params.resistors)
    g_int = internal_loss_rate(cav)
    return DerivedQuantities(
        omega_k=w,
        z0=characteristic_impedance(cav),
        r_eff=tuple(effective_resistance(r, cav) for r in params.resistors),
        gamma=gammas,
        gamma_int=g_int,
        q_eff=quality_factor(w[0], gammas, g_int),
    )


def quality_factor(omega_1, gammas, gamma_int=0.0):
    """Loaded Q of the fundamental mode: omega_1 over the total energy decay rate."""
    total = sum(gammas) + gamma_int
    if total <= 0:
        return math.inf
    return omega_1 / total
