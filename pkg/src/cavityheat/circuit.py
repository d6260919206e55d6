"""Semiclassical lumped-element model of the loaded cavity.

The line is cut into ``N`` cells of length dx = L/N. Each cell has a grounded
capacitor c dx at its centre; neighbouring cells are joined by a series branch
(l dx with loss r dx), giving ``N - 1`` branches with both ends open. Branch
``n`` (1-based) sits at x = n dx. The two resistor branches replace l dx by R.

Branch currents obey Z(w) I = dV with Z tridiagonal and symmetric. The
thermal noise power delivered from resistor 1 to resistor 2 is

    P = (2 R1 R2 / pi) int_0^inf  hbar w |(Z^-1)_21|^2 (n_B(w, T1) - n_B(w, T2)) dw

which is the two-sided Johnson-Nyquist expression folded onto w > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SingularSystemError
from .model import HBAR, K_B, SystemParams, mode_frequency
from .quadrature import QuadResult, integrate


@dataclass(frozen=True, eq=False)
class LumpedNetwork:
    n_nodes: int
    dx: float
    series_resistance: np.ndarray  # ohm, per branch
    series_inductance: np.ndarray  # henry, per branch
    node_capacitance: float
    resistor_branch_indices: tuple  # 1-based branch numbers (i, j)
    resistances: tuple
    omega_1: float  # continuum fundamental, used to scale frequency grids

    @property
    def n_branches(self):
        return self.n_nodes - 1

    @property
    def rows(self):
        """0-based matrix rows of the two resistor branches."""
        i, j = self.resistor_branch_indices
        return i - 1, j - 1

    def branch_impedances(self, omega):
        return self.series_resistance + 1j * omega * self.series_inductance

    def resonances(self):
        """Eigenfrequencies of the lossless uniform ladder, ascending."""
        ell = self.series_inductance.max()
        k = np.arange(1, self.n_nodes)
        return 2.0 / math.sqrt(ell * self.node_capacitance) * np.sin(k * math.pi / (2 * self.n_nodes))


@dataclass(frozen=True, eq=False)
class ImpedanceMatrix:
    frequency: float
    diagonal: np.ndarray
    super_diagonal: np.ndarray
    sub_diagonal: np.ndarray

    @property
    def dimension(self):
        return self.diagonal.shape[0]

    def dense(self):
        return (
            np.diag(self.diagonal)
            + np.diag(self.super_diagonal, 1)
            + np.diag(self.sub_diagonal, -1)
        )


def branch_index(position_fraction, n_nodes):
    """Branch nearest to x = position_fraction * L, clamped to 1..N-1."""
    idx = int(math.floor(position_fraction * n_nodes + 0.5))
    return min(max(idx, 1), n_nodes - 1)


def build_network(params: SystemParams, n_nodes: int = 100) -> LumpedNetwork:
    if int(n_nodes) != n_nodes or n_nodes < 10:
        raise ValueError(f"n_nodes must be an integer >= 10, got {n_nodes!r}")
    cav = params.cavity
    dx = cav.length / n_nodes
    i = branch_index(params.resistor1.position_fraction, n_nodes)
    j = branch_index(params.resistor2.position_fraction, n_nodes)
    if i == j:
        raise ValueError(
            f"both resistors map to branch {i} at n_nodes={n_nodes}; move them apart or refine"
        )
    nb = n_nodes - 1
    r = np.full(nb, cav.loss_per_len * dx)
    ell = np.full(nb, cav.ind_per_len * dx)
    for idx, res in ((i, params.resistor1), (j, params.resistor2)):
        r[idx - 1] = res.resistance
        ell[idx - 1] = 0.0
    r.setflags(write=False)
    ell.setflags(write=False)
    return LumpedNetwork(
        n_nodes=n_nodes,
        dx=dx,
        series_resistance=r,
        series_inductance=ell,
        node_capacitance=cav.cap_per_len * dx,
        resistor_branch_indices=(i, j),
        resistances=(params.resistor1.resistance, params.resistor2.resistance),
        omega_1=mode_frequency(cav, 1),
    )


def build_impedance(network: LumpedNetwork, omega: float) -> ImpedanceMatrix:
    if not omega > 0:
        raise ValueError(f"omega must be > 0, got {omega!r}")
    shunt = 1.0 / (1j * omega * network.node_capacitance)
    diag = network.branch_impedances(omega) + 2.0 * shunt
    off = np.full(network.n_branches - 1, -shunt, dtype=complex)
    return ImpedanceMatrix(omega, diag, off, off.copy())


def trans_impedance_element(matrix: ImpedanceMatrix, row: int, col: int) -> complex:
    """(Z^-1)[row, col] (0-based) from one tridiagonal solve against e_col."""
    n = matrix.dimension
    if not (0 <= row < n and 0 <= col < n):
        raise IndexError(f"indices ({row}, {col}) out of range for dimension {n}")
    rhs = np.zeros(n, dtype=complex)
    rhs[col] = 1.0
    x = _kernels.thomas_solve(matrix.sub_diagonal, matrix.diagonal, matrix.super_diagonal, rhs)
    if x is None or not np.all(np.isfinite(x)):
        raise SingularSystemError(
            f"impedance matrix is singular at omega={matrix.frequency!r}", omega=matrix.frequency
        )
    return complex(x[row])


def transfer(network: LumpedNetwork, omega, row=None, col=None):
    """Vectorised (Z^-1)[row, col] over ``omega``; defaults to resistor 2 <- resistor 1."""
    i, j = network.rows
    row = j if row is None else row
    col = i if col is None else col
    z = _kernels.ladder_element(
        omega, network.series_resistance, network.series_inductance,
        network.node_capacitance, row, col,
    )
    if not np.all(np.isfinite(z)):
        bad = np.atleast_1d(omega)[~np.isfinite(z)][0]
        raise SingularSystemError(f"impedance matrix is singular at omega={bad!r}", omega=bad)
    return z


def _occupation_difference(omega, t1, t2):
    with np.errstate(over="ignore"):
        return 1.0 / np.expm1(HBAR * omega / (K_B * t1)) - 1.0 / np.expm1(HBAR * omega / (K_B * t2))


def power_integrand(network: LumpedNetwork, omega, t1, t2):
    """Integrand of the folded noise-power integral, W per rad/s."""
    omega = np.asarray(omega, dtype=float)
    r1, r2 = network.resistances
    z = transfer(network, omega)
    return (2.0 * r1 * r2 / math.pi) * HBAR * omega * np.abs(z) ** 2 * _occupation_difference(omega, t1, t2)


def frequency_window(network: LumpedNetwork, t1, t2):
    w1 = network.omega_1
    lo = 1e-4 * w1
    hi = max(30.0 * w1, 40.0 * K_B * max(t1, t2) / HBAR)
    return lo, hi


def panel_edges(network: LumpedNetwork, lo, hi):
    """Window ends plus every ladder resonance inside, each fenced by log-spaced edges."""
    res = network.resonances()
    res = res[(res > lo) & (res < hi)]
    offsets = 10.0 ** -np.arange(1.0, 6.5, 0.5)
    fence = np.concatenate([res[:, None] * (1 - offsets), res[:, None] * (1 + offsets)], axis=1)
    edges = np.concatenate([[lo, hi], res, fence.ravel()])
    return np.unique(edges[(edges >= lo) & (edges <= hi)])


def semiclassical_power_estimate(params: SystemParams, t1, t2, n_nodes=100, rtol=1e-6,
                                 network=None) -> QuadResult:
    """Net noise power into resistor 2 with its quadrature error estimate."""
    if not (t1 > 0 and t2 > 0):
        raise ValueError("temperatures must be > 0")
    net = build_network(params, n_nodes) if network is None else network
    lo, hi = frequency_window(net, t1, t2)
    return integrate(lambda w: power_integrand(net, w, t1, t2), panel_edges(net, lo, hi), rtol=rtol)


def semiclassical_power(params: SystemParams, t1, t2, n_nodes=100, rtol=1e-6) -> float:
    return semiclassical_power_estimate(params, t1, t2, n_nodes, rtol).value
