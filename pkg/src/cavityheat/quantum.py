"""Master-equation model of the cavity modes coupled to thermal baths.

Each mode is a birth-death chain on the photon number with rates

    n -> n+1 : (n + 1) * sum_i gamma_i * n_B(w_k, T_i)
    n -> n-1 :  n      * sum_i gamma_i * (n_B(w_k, T_i) + 1)

so the stationary law is geometric. Powers are reported as "into the named
bath positive".
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, SolverError
from .model import (
    HBAR,
    K_B,
    SystemParams,
    bose_occupancy,
    internal_loss_rate,
    mode_coupling_rate,
    mode_frequency,
)

log = logging.getLogger(__name__)

RESISTOR1, RESISTOR2, INTERNAL = 0, 1, 2


@dataclass(frozen=True)
class BathSpec:
    rate: float
    temperature: float

    def __post_init__(self):
        if not self.rate >= 0:
            raise ValueError(f"bath rate must be >= 0, got {self.rate!r}")
        if not self.temperature > 0:
            raise ValueError(f"bath temperature must be > 0, got {self.temperature!r}")


@dataclass(frozen=True)
class ModeRates:
    """Rate coefficients of one mode; Gamma(n->n+1) = (n+1) A, Gamma(n->n-1) = n B."""

    mode_index: int
    up_coefficient: float
    down_coefficient: float
    per_bath_up: tuple
    per_bath_down: tuple

    def up_rate(self, n):
        return (n + 1) * self.up_coefficient

    def down_rate(self, n):
        return n * self.down_coefficient

    @property
    def total_rate(self):
        """Sum of the bath couplings, B - A, computed without cancellation."""
        return float(sum(d - u for u, d in zip(self.per_bath_up, self.per_bath_down)))


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    mode_index: int
    probabilities: np.ndarray
    ratio: float
    truncation_tail: float

    @property
    def n_max(self):
        return len(self.probabilities) - 1

    def mean(self):
        return float(np.dot(np.arange(len(self.probabilities)), self.probabilities))


@dataclass(frozen=True, eq=False)
class PowerBreakdown:
    """Net powers in watts; positive means energy flows cavity -> bath."""

    per_resistor_net_power: tuple
    internal_loss_power: float
    per_mode_power: np.ndarray
    electron_phonon_power: float = math.nan

    @property
    def into_resistor2(self):
        return self.per_resistor_net_power[RESISTOR2]


@dataclass(frozen=True, eq=False)
class CavityState:
    """Rates and stationary distributions of all modes for fixed bath temperatures."""

    omegas: np.ndarray
    rates: list
    distributions: list

    def power_into(self, m):
        return net_power_to_resistor(m, self.distributions, self.rates, self.omegas)

    def per_mode_power(self, m):
        return np.array(
            [
                _mode_power(m, d, r, w)
                for d, r, w in zip(self.distributions, self.rates, self.omegas)
            ]
        )

    def breakdown(self, elph=math.nan):
        return PowerBreakdown(
            per_resistor_net_power=(self.power_into(RESISTOR1), self.power_into(RESISTOR2)),
            internal_loss_power=self.power_into(INTERNAL),
            per_mode_power=self.per_mode_power(RESISTOR2),
            electron_phonon_power=elph,
        )

    def effective_temperature(self):
        return effective_temperature(self.rates[0], self.omegas[0])


def transition_rates(k: int, baths: Sequence[BathSpec], omega_k: float) -> ModeRates:
    if len(baths) == 0:
        raise ValueError("at least one bath is required")
    up, down = [], []
    for b in baths:
        n = bose_occupancy(omega_k, b.temperature)
        up.append(b.rate * n)
        down.append(b.rate * (n + 1.0))
    return ModeRates(k, math.fsum(up), math.fsum(down), tuple(up), tuple(down))


def stationary_distribution(rates: ModeRates, n_max: int) -> StationaryDistribution:
    """Normalised geometric law p_n ~ (A/B)^n on n = 0..n_max."""
    a, b = rates.up_coefficient, rates.down_coefficient
    if not b > 0:
        raise SolverError(f"mode {rates.mode_index}: downward rate must be > 0, got {b!r}")
    if a >= b:
        raise SolverError(
            f"mode {rates.mode_index}: no normalisable stationary state (A={a!r} >= B={b!r})"
        )
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max!r}")
    lam = a / b
    p = lam ** np.arange(n_max + 1, dtype=float)
    p /= p.sum()
    return StationaryDistribution(rates.mode_index, p, lam, lam ** (n_max + 1))


def _mode_power(m, dist, rates, omega):
    p = dist.probabilities
    n = np.arange(len(p), dtype=float)
    down = rates.per_bath_down[m] * np.dot(n, p)
    # no n_max -> n_max+1 transition exists in the truncated chain
    up = rates.per_bath_up[m] * np.dot(n[:-1] + 1.0, p[:-1])
    return HBAR * omega * (down - up)


def net_power_to_resistor(m: int, distributions, rates, omegas) -> float:
    """Net photonic power from the cavity into bath ``m``, summed over modes.

    ``m`` indexes the bath lists used to build the rates; with
    :func:`cavity_state` 0 is resistor 1, 1 is resistor 2 and 2 the internal loss.
    """
    if not (len(distributions) == len(rates) == len(omegas)):
        raise ValueError("distributions, rates and omegas must cover the same modes")
    for d, r in zip(distributions, rates):
        if d.mode_index != r.mode_index:
            raise ValueError("distributions and rates refer to different modes")
        if not 0 <= m < len(r.per_bath_up):
            raise IndexError(f"bath index {m} out of range 0..{len(r.per_bath_up) - 1}")
    return math.fsum(_mode_power(m, d, r, w) for d, r, w in zip(distributions, rates, omegas))


def electron_phonon_power(resistor, t_electron, t_bath):
    """Sigma V (Te^5 - Tph^5); positive when electrons lose heat to phonons."""
    if not (t_electron > 0 and t_bath > 0):
        raise ValueError("temperatures must be > 0")
    return resistor.sigma_ep * resistor.volume * (t_electron**5 - t_bath**5)


def effective_temperature(rates_mode1: ModeRates, omega_1: float) -> float:
    """Temperature of a single bath giving the same up/down ratio as mode 1.

    Returns 0.0 when no bath excites the mode (A = 0).
    """
    a = rates_mode1.up_coefficient
    if a == 0.0:
        return 0.0
    gap = rates_mode1.total_rate
    if not gap > 0:
        raise SolverError("effective temperature undefined: B <= A")
    return HBAR * omega_1 / (K_B * math.log1p(gap / a))


def two_level_power(bath1: BathSpec, bath2: BathSpec, omega_1: float, extra_baths=()) -> float:
    """Net power out of resistor 2 when mode 1 holds at most one photon.

    ``extra_baths`` (e.g. intrinsic loss) contribute to the total rates only.
    The numerator G2+ G- - G2- G+ is evaluated as gamma_2 sum_i gamma_i (n_2 - n_i),
    which is algebraically identical and exact at equal temperatures.
    """
    baths = (bath1, bath2) + tuple(extra_baths)
    n = [bose_occupancy(omega_1, b.temperature) for b in baths]
    g_plus = math.fsum(b.rate * ni for b, ni in zip(baths, n))
    g_minus = math.fsum(b.rate * (ni + 1.0) for b, ni in zip(baths, n))
    g_sum = g_plus + g_minus
    if g_sum == 0.0:
        return 0.0
    num = bath2.rate * math.fsum(b.rate * (n[1] - ni) for b, ni in zip(baths, n))
    return HBAR * omega_1 * num / g_sum


def mode_baths(params: SystemParams, k: int, t1: float, t2: float):
    cav = params.cavity
    return [
        BathSpec(mode_coupling_rate(params.resistor1, cav, k), t1),
        BathSpec(mode_coupling_rate(params.resistor2, cav, k), t2),
        BathSpec(internal_loss_rate(cav), params.bath_temperature),
    ]


def cavity_state(params: SystemParams, t1: float, t2: float, n_modes=None,
                 n_photons_max=None, max_tail=1e-10) -> CavityState:
    """Rates and stationary distributions of every retained mode."""
    n_modes = params.n_modes if n_modes is None else n_modes
    n_max = params.n_photons_max if n_photons_max is None else n_photons_max
    omegas = np.array([mode_frequency(params.cavity, k) for k in range(1, n_modes + 1)])
    rates, dists = [], []
    for k, w in enumerate(omegas, start=1):
        r = transition_rates(k, mode_baths(params, k, t1, t2), w)
        d = stationary_distribution(r, n_max)
        if max_tail is not None and d.truncation_tail > max_tail:
            raise SolverError(
                f"mode {k}: truncation tail {d.truncation_tail:.3e} exceeds {max_tail:.1e};"
                " increase n_photons_max"
            )
        rates.append(r)
        dists.append(d)
    return CavityState(omegas, rates, dists)


def quantum_power(params: SystemParams, t1: float, t2: float) -> float:
    """Net photonic power into resistor 2 with both resistor temperatures fixed."""
    return cavity_state(params, t1, t2).power_into(RESISTOR2)


def two_level_power_for(params: SystemParams, t1: float, t2: float) -> float:
    """Two-level power into resistor 2 (sign flipped relative to :func:`two_level_power`)."""
    b1, b2, b_int = mode_baths(params, 1, t1, t2)
    extra = (b_int,) if b_int.rate > 0 else ()
    return -two_level_power(b1, b2, mode_frequency(params.cavity, 1), extra)


@dataclass(frozen=True, eq=False)
class EquilibriumResult:
    t2: float
    powers: PowerBreakdown
    state: CavityState
    iterations: int
    residual: float
    method: str

    @property
    def distributions(self):
        return self.state.distributions

    @property
    def t_eff(self):
        return self.state.effective_temperature()


def solve_equilibrium_t2(params: SystemParams, t1: float, tol=1e-9, max_iterations=1000,
                         damping=0.5) -> EquilibriumResult:
    """Self-consistent electron temperature of resistor 2.

    Iterates T2 <- (1 - a) T2 + a (P_cav(T2) / (Sigma V) + T^5)^(1/5) from T2 = T.
    Falls back to a bracketing root search if the residual keeps growing.
    """
    if not t1 > 0:
        raise ValueError(f"t1 must be > 0, got {t1!r}")
    res2 = params.resistor2
    sv = res2.sigma_ep * res2.volume
    t_bath = params.bath_temperature
    t_floor = 1e-3 * min(t1, t_bath)

    def target(t2):
        p = cavity_state(params, t1, t2).power_into(RESISTOR2)
        return max(p / sv + t_bath**5, t_floor**5) ** 0.2

    t2 = t_bath
    residual = best = math.inf
    stalled = 0
    method = "fixed-point"
    it = 0
    for it in range(1, max_iterations + 1):
        f = target(t2)
        residual = abs(f - t2)
        log.debug("iteration %d: T2=%.12g residual=%.3e", it, t2, residual)
        if residual < tol:
            break
        # oscillating or diverging: no real progress for several steps
        stalled = stalled + 1 if residual >= 0.9 * best else 0
        best = min(best, residual)
        if stalled >= 8:
            method = "bisection"
            hi = max(t1, t_bath) * 1.5
            t2 = brentq(lambda x: target(x) - x, t_floor, hi, xtol=tol / 4, maxiter=max_iterations)
            residual = abs(target(t2) - t2)
            break
        t2 = max((1.0 - damping) * t2 + damping * f, t_floor)
    if not residual < tol:
        raise ConvergenceError(
            f"T2 did not converge for t1={t1!r}: residual {residual:.3e} K after {it} iterations",
            residual=residual,
            iterations=it,
        )
    state = cavity_state(params, t1, t2)
    elph = electron_phonon_power(res2, t2, t_bath)
    return EquilibriumResult(t2, state.breakdown(elph), state, it, residual, method)
