"""Weak-drive steady states, output fields, transmittance and g2."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import kernels
from .core import (AtomicConfiguration, ModelParams, SingularSystemError, StateVector,
                   UndefinedCorrelationError, enumerate_basis)
from .hamiltonian import build_nonhermitian, drive_coefficients, max_resonance, pair_kernel

WEAK_DRIVE_MAX = 0.05
FLUX_GUARD = 1e-14
DIRECTIONS = ("T", "R")


@dataclass
class Spectrum:
    detunings: np.ndarray
    T: np.ndarray
    R: np.ndarray | None = None
    g2T: np.ndarray | None = None
    g2R: np.ndarray | None = None
    T_std: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def columns(self) -> dict:
        cols = {"delta": self.detunings, "T": self.T}
        for name in ("R", "g2T", "g2R"):
            v = getattr(self, name)
            if v is not None:
                cols[name] = v
        return cols


def _check_weak(params: ModelParams):
    if params.omega > WEAK_DRIVE_MAX:
        raise ValueError(f"weak-drive routines need omega <= {WEAK_DRIVE_MAX}, got {params.omega}")


def _solve(A, b):
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from None
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("non-finite steady-state amplitudes")
    return x


def sector_blocks(config: AtomicConfiguration, params: ModelParams, m: int):
    """Drive-free sector blocks ``[H_1, ..., H_m]`` and unit drive couplings ``[D_10, ..., D_m,m-1]``."""
    n = config.n
    K = pair_kernel(config, params)
    loss = params.delta + 0.5j * params.gamma_prime
    blocks = [K - loss * np.eye(n)]
    couplings = [drive_coefficients(config, params)[:, None]]
    if m >= 2:
        basis = enumerate_basis(n, 2)
        masks = basis.masks
        s1, s2 = basis.sector(1), basis.sector(2)
        H2 = kernels.hopping_matrix(masks[s2], K)
        H2[np.diag_indices_from(H2)] -= 2 * loss
        R = kernels.raising_matrix(masks, drive_coefficients(config, params))
        blocks.append(H2)
        couplings.append(R[s2, s1])
    return blocks, couplings


def steady_state(config: AtomicConfiguration, params: ModelParams, max_excitations: int = 2,
                 method: str = "solve") -> StateVector:
    """Order-by-order weak-drive steady state with ground amplitude fixed to 1.

    ``method="evolve"`` reaches the same state by propagating from the ground
    state without drive back-action, as a cross-check of the linear solves.
    """
    _check_weak(params)
    if max_excitations not in (1, 2):
        raise ValueError("max_excitations must be 1 or 2")
    n = config.n
    m = min(max_excitations, n)
    basis = enumerate_basis(n, m)
    if method == "evolve":
        return _steady_by_evolution(config, params, m)
    if method != "solve":
        raise ValueError(f"unknown method {method!r}")
    amps = [np.ones(1, dtype=np.complex128)]
    if m >= 1 and params.omega:
        blocks, couplings = sector_blocks(config, params, m)
        for H, D in zip(blocks, couplings):
            amps.append(_solve(H, -params.omega * (D @ amps[-1])))
    else:
        amps.extend(np.zeros(basis.sector(k).stop - basis.sector(k).start, dtype=np.complex128)
                    for k in range(1, m + 1))
    return StateVector(basis, np.concatenate(amps))


def _steady_by_evolution(config, params, m, step=1.0, tol=1e-10, max_steps=100000):
    op = build_nonhermitian(config, params.replace(omega=0.0), m)
    basis = op.basis
    H = op.dense()
    if params.omega:
        H = H + kernels.raising_matrix(basis.masks, params.omega * drive_coefficients(config, params))
    U = sla.expm(-1j * step * H)
    c = np.zeros(basis.dim, dtype=np.complex128)
    c[0] = 1.0
    for _ in range(max_steps):
        nxt = U @ c
        if np.linalg.norm(nxt - c) < tol:
            return StateVector(basis, nxt)
        c = nxt
    raise SingularSystemError("time evolution did not converge to a steady state")


def field_coefficients(config: AtomicConfiguration, params: ModelParams, direction: str):
    """``(c, alpha)`` such that the output operator is ``c + sum_j alpha_j sigma_ge^j``.

    The transmitted field is evaluated at site ``N`` with the probe phase there
    factored out; the reflected field drops its overall propagation phase.
    """
    th = config.theta
    pref = 0.5j * params.gamma_1d
    if direction == "T":
        phase = params.ka_d * (config.N - th) - params.kl_d * config.N
        return params.omega, pref * np.exp(1j * phase)
    if direction == "R":
        return 0.0, pref * np.exp(1j * params.ka_d * th)
    raise ValueError(f"direction must be 'T' or 'R', got {direction!r}")


def output_field_flux(state: StateVector, config: AtomicConfiguration, params: ModelParams,
                      direction: str = "T") -> tuple[complex, float]:
    c, alpha = field_coefficients(config, params, direction)
    amp = c * state.amplitudes[0]
    if config.n:
        amp = amp + alpha @ state.sector(1)
    amp = complex(amp)
    return amp, abs(amp) ** 2


def _pair_index(basis):
    pairs = np.array(basis.states[basis.sector(2)], dtype=np.int64).reshape(-1, 2)
    return pairs[:, 0], pairs[:, 1]


def _two_photon_amplitude(state, config, params, direction):
    c, alpha = field_coefficients(config, params, direction)
    amp = c * c * state.amplitudes[0]
    if config.n:
        amp = amp + 2 * c * (alpha @ state.sector(1))
    if state.basis.max_excitations >= 2:
        j, k = _pair_index(state.basis)
        amp = amp + 2 * np.sum(alpha[j] * alpha[k] * state.sector(2))
    return complex(amp)


def _checked_flux(state, config, params, direction):
    _, flux = output_field_flux(state, config, params, direction)
    if flux < FLUX_GUARD * params.omega ** 2 or flux == 0.0:
        raise UndefinedCorrelationError(f"{direction} flux {flux:.3e} too small for g2")
    return flux


def g2_zero(config: AtomicConfiguration, params: ModelParams, direction: str = "R",
            state: StateVector | None = None) -> float:
    _check_weak(params)
    if state is None:
        state = steady_state(config, params, 2)
    flux = _checked_flux(state, config, params, direction)
    return abs(_two_photon_amplitude(state, config, params, direction)) ** 2 / flux ** 2


def g2_tau(config: AtomicConfiguration, params: ModelParams, direction: str,
           tau_grid) -> np.ndarray:
    """Delayed correlation: propagate ``a|psi>`` under the drive-inclusive Hamiltonian."""
    _check_weak(params)
    taus = np.asarray(tau_grid, dtype=np.float64)
    if np.any(taus < 0):
        raise ValueError("tau must be >= 0")
    state = steady_state(config, params, 2)
    flux = _checked_flux(state, config, params, direction)
    basis = state.basis
    c, alpha = field_coefficients(config, params, direction)
    a_op = c * np.eye(basis.dim, dtype=np.complex128)
    if config.n:
        a_op = a_op + kernels.raising_matrix(basis.masks, np.conj(alpha)).conj().T
    phi = a_op @ state.amplitudes
    H = build_nonhermitian(config, params, basis.max_excitations).dense()
    readout = a_op[0]

    order = np.argsort(taus, kind="stable")
    out = np.empty_like(taus)
    cache = {}
    t_prev = 0.0
    for i in order:
        dt = taus[i] - t_prev
        if dt > 0:
            key = round(dt, 12)
            if key not in cache:
                cache[key] = sla.expm(-1j * dt * H)
            phi = cache[key] @ phi
            t_prev = taus[i]
        out[i] = abs(readout @ phi) ** 2 / flux ** 2
    return out


def default_grid(config: AtomicConfiguration, params: ModelParams, points: int = 801) -> np.ndarray:
    top = max_resonance(config, params.V, params.L_over_d).omega if config.n else 0.0
    return np.linspace(-2.0, top + 6.0, points)


def linear_amplitudes(config: AtomicConfiguration, params: ModelParams, deltas) -> np.ndarray:
    """Single-excitation steady amplitudes for each detuning, shape ``(len(deltas), n)``."""
    deltas = np.asarray(deltas, dtype=np.float64)
    n = config.n
    K = pair_kernel(config, params)
    A = K[None, :, :] - (deltas + 0.5j * params.gamma_prime)[:, None, None] * np.eye(n)[None]
    b = -params.omega * drive_coefficients(config, params)
    b = np.broadcast_to(b[None, :, None], (deltas.size, n, 1))
    return _solve(A, b)[..., 0]


def transmission_spectrum(config: AtomicConfiguration, params: ModelParams, delta_grid=None,
                          reflection: bool = True) -> Spectrum:
    """Linear transmittance (and reflectance) on a detuning grid."""
    _check_weak(params)
    if delta_grid is None:
        delta_grid = default_grid(config, params)
    deltas = np.asarray(delta_grid, dtype=np.float64)
    meta = {"sites": list(config.sites), "N": config.N, "params": params.to_dict()}
    if config.n == 0 or params.omega == 0:
        return Spectrum(deltas, np.ones_like(deltas),
                        np.zeros_like(deltas) if reflection else None, metadata=meta)
    c1 = linear_amplitudes(config, params, deltas)
    cT, aT = field_coefficients(config, params, "T")
    T = np.abs(cT + c1 @ aT) ** 2 / params.omega ** 2
    R = None
    if reflection:
        _, aR = field_coefficients(config, params, "R")
        R = np.abs(c1 @ aR) ** 2 / params.omega ** 2
    return Spectrum(deltas, T, R, metadata=meta)
