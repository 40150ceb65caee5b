"""Full Lindblad evolution under strong drive: manifold populations, time-maximal
single-excitation probability, laser-parameter sweeps, and configuration search."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._lindblad import LindbladRHS, ground_state_density, integrate, maximize_on_grid, time_maximum
from .core import (AtomicConfiguration, CapacityError, DensityMatrix, IntegrationError,
                   ModelParams, enumerate_basis, sample_configuration)
from .effective import kappa, overlap
from .hamiltonian import build_nonhermitian, lowering_operator, max_resonance
from .weakdrive import field_coefficients

DIM_GUARD = 300
FULL_SPACE_MAX_N = 8


@dataclass
class PopulationTrajectory:
    times: np.ndarray
    populations: np.ndarray  # shape (len(times), m + 1)
    states: np.ndarray | None = None

    def p(self, m: int) -> np.ndarray:
        return self.populations[:, m]


@dataclass
class Surface:
    omegas: np.ndarray
    delta_maxs: np.ndarray
    values: np.ndarray  # shape (len(omegas), len(delta_maxs))
    omega_max: float

    @property
    def argmax(self) -> tuple[int, int]:
        i, j = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return int(i), int(j)

    @property
    def optimum(self) -> tuple[float, float, float]:
        i, j = self.argmax
        return float(self.omegas[i]), float(self.delta_maxs[j]), float(self.values[i, j])


@dataclass(frozen=True)
class SearchResult:
    config: AtomicConfiguration
    distance: float
    overlap: float
    trial: int


def default_truncation(n: int) -> int:
    return n if n <= FULL_SPACE_MAX_N else min(2, n)


def _truncation(config, max_excitations):
    m = default_truncation(config.n) if max_excitations is None else max_excitations
    if m > config.n:
        raise ValueError(f"max_excitations={m} exceeds n={config.n}")
    dim = enumerate_basis(config.n, m).dim
    if dim > DIM_GUARD:
        raise CapacityError(f"basis dimension {dim} exceeds guard {DIM_GUARD}")
    return m


def _individual_gathers(basis, rate):
    masks = basis.masks
    lookup = {int(v): i for i, v in enumerate(masks)}
    out = []
    for j in range(basis.n_atoms):
        bit = 1 << j
        src = np.flatnonzero(masks & bit)
        dst = np.array([lookup[int(masks[s]) ^ bit] for s in src], dtype=np.int64)
        out.append((rate, src, dst))
    return out


def liouvillian(config: AtomicConfiguration, params: ModelParams, max_excitations: int) -> LindbladRHS:
    """Right-hand side equivalent to the coherent part plus jump set of the Lindblad decomposition."""
    H = build_nonhermitian(config, params, max_excitations)
    basis = H.basis
    jumps = []
    if params.gamma_1d > 0:
        amp = math.sqrt(params.gamma_1d / 2)
        phase = np.exp(1j * params.ka_d * config.theta)
        jumps = [lowering_operator(basis, amp * phase.conj()), lowering_operator(basis, amp * phase)]
    gathers = _individual_gathers(basis, params.gamma_prime) if params.gamma_prime > 0 else []
    return LindbladRHS(H.dense(), jumps, gathers)


def _sector_weights(basis, m):
    w = np.zeros(basis.dim)
    w[basis.sector(m)] = 1.0
    return w


def evolve_master(config: AtomicConfiguration, params: ModelParams, t_grid,
                  max_excitations: int | None = None, keep_states: bool = False,
                  trace_tol: float = 1e-6) -> PopulationTrajectory:
    """Manifold populations ``p_m(t)`` from the ground state."""
    m = _truncation(config, max_excitations)
    rhs = liouvillian(config, params, m)
    basis = enumerate_basis(config.n, m)
    states = integrate(rhs, ground_state_density(basis.dim), t_grid)
    diag = np.real(np.einsum("tii->ti", states))
    pops = np.stack([diag[:, basis.sector(k)].sum(axis=1) for k in range(m + 1)], axis=1)
    drift = np.max(np.abs(pops.sum(axis=1) - 1.0))
    if drift > trace_tol:
        raise IntegrationError(f"trace drift {drift:.2e} exceeds {trace_tol:.0e}")
    return PopulationTrajectory(np.asarray(t_grid, dtype=np.float64), pops,
                                states if keep_states else None)


@dataclass(frozen=True)
class RabiPeak:
    time: float
    p1: float
    populations: np.ndarray
    stopped_early: bool


def p1_peak(config: AtomicConfiguration, params: ModelParams,
            max_excitations: int | None = None, horizon: float = 20.0,
            patience: float | None = 2.0) -> RabiPeak:
    """Time-maximum of the single-excitation population starting from the ground state.

    The driven ensemble states oscillate quickly on top of the slow Rabi cycle,
    so the global maximum over the window is taken rather than the first
    local one.
    """
    m = _truncation(config, max_excitations)
    rhs = liouvillian(config, params, m)
    basis = enumerate_basis(config.n, m)
    res = time_maximum(rhs, ground_state_density(basis.dim), _sector_weights(basis, 1),
                       horizon=horizon, patience=patience)
    pops = DensityMatrix(basis, res.rho).populations()
    return RabiPeak(res.time, res.value, pops, res.stopped_early)


def max_p1(config: AtomicConfiguration, params: ModelParams,
           max_excitations: int | None = None, horizon: float = 20.0,
           patience: float | None = 2.0) -> float:
    return p1_peak(config, params, max_excitations, horizon, patience).p1


def sweep_p1(config: AtomicConfiguration, params: ModelParams, omega_grid, delta_max_grid,
             max_excitations: int | None = None, horizon: float = 20.0,
             patience: float | None = 2.0) -> Surface:
    """``max_p1`` over a grid of Rabi frequency and detuning from the maximum resonance."""
    w_max = max_resonance(config, params.V, params.L_over_d).omega
    omegas = np.asarray(omega_grid, dtype=np.float64)
    dmax = np.asarray(delta_max_grid, dtype=np.float64)
    values = np.empty((omegas.size, dmax.size))
    for i, om in enumerate(omegas):
        for j, dm in enumerate(dmax):
            p = params.replace(omega=float(om), delta=w_max + float(dm))
            values[i, j] = max_p1(config, p, max_excitations, horizon, patience)
    return Surface(omegas, dmax, values, w_max)


def optimize_detuning(config: AtomicConfiguration, params: ModelParams, delta_max_grid=None,
                      max_excitations: int | None = None, horizon: float = 20.0,
                      patience: float | None = 2.0) -> tuple[float, float]:
    """Detuning from the maximum resonance that maximizes ``max_p1``; returns ``(delta_max, p1)``."""
    if delta_max_grid is None:
        delta_max_grid = np.arange(-2.0, 4.001, 0.25)
    w_max = max_resonance(config, params.V, params.L_over_d).omega
    return maximize_on_grid(
        lambda dm: max_p1(config, params.replace(delta=w_max + dm), max_excitations, horizon, patience),
        delta_max_grid)


def steady_density(config: AtomicConfiguration, params: ModelParams,
                   max_excitations: int | None = None) -> DensityMatrix:
    """Stationary state from the null space of the Liouvillian superoperator (small dims only)."""
    m = _truncation(config, max_excitations)
    rhs = liouvillian(config, params, m)
    d = rhs.dim
    if d > 40:
        raise CapacityError("superoperator steady state limited to dimension 40")
    S = np.empty((d * d, d * d), dtype=np.complex128)
    eye = np.eye(d * d, dtype=np.complex128)
    for col in range(d * d):
        S[:, col] = rhs.apply(eye[col].reshape(d, d)).ravel()
    S[0] = np.eye(d).ravel()
    b = np.zeros(d * d, dtype=np.complex128)
    b[0] = 1.0
    rho = np.linalg.solve(S, b).reshape(d, d)
    return DensityMatrix(enumerate_basis(config.n, m), 0.5 * (rho + rho.conj().T))


def flux_from_density(rho: DensityMatrix, config: AtomicConfiguration, params: ModelParams,
                      direction: str = "T") -> float:
    c, alpha = field_coefficients(config, params, direction)
    basis = rho.basis
    A = c * np.eye(basis.dim, dtype=np.complex128) + lowering_operator(basis, alpha)
    return float(np.real(np.trace(A @ rho.entries @ A.conj().T)))


def search_configuration(n: int, N: int, target: float | None, trials: int, seed: int,
                         kl_d: float = math.pi / 2) -> SearchResult:
    """Among ``trials`` sampled configurations (seeds ``seed + t``) pick the one whose
    maximum-resonance overlap magnitude is closest to ``target`` (default ``sqrt(kappa_n)``).

    Uses the infinite-range form of the maximum resonance.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if target is None:
        target = math.sqrt(kappa(n, N))
    sites = np.arange(N)
    best, dist, mag = kernels.search_overlap(N, n, seed, trials, np.cos(kl_d * sites),
                                             np.sin(kl_d * sites), float(target))
    config = sample_configuration(N, n, seed + best)
    return SearchResult(config, dist, mag, best)


def overlap_distance(config: AtomicConfiguration, kl_d: float, target: float) -> float:
    return abs(target - abs(overlap(config, kl_d)))
