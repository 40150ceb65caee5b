"""Non-Hermitian atom Hamiltonian, its Lindblad decomposition, and eigenanalysis
of the bandgap interaction in the one- and two-excitation manifolds."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .core import AtomicConfiguration, ExcitationBasis, ModelParams, enumerate_basis

DENSE_LIMIT = 500


@dataclass(frozen=True)
class OperatorMatrix:
    basis: ExcitationBasis
    matrix: object  # ndarray below DENSE_LIMIT, csr_matrix above

    def dense(self) -> np.ndarray:
        m = self.matrix
        return m.toarray() if sp.issparse(m) else np.asarray(m)


@dataclass(frozen=True)
class LindbladSet:
    coherent: OperatorMatrix
    jumps: tuple  # dense jump operators on the same basis
    labels: tuple

    def effective_hamiltonian(self) -> np.ndarray:
        H = self.coherent.dense().astype(np.complex128)
        for L in self.jumps:
            H = H - 0.5j * (L.conj().T @ L)
        return H


@dataclass(frozen=True)
class MaxResonance:
    omega: float
    vector: np.ndarray
    degenerate: bool


def _pair_geometry(config: AtomicConfiguration):
    th = config.theta
    dist = np.abs(th[:, None] - th[None, :])
    parity = 1 - 2 * ((th[:, None] + th[None, :]) & 1)
    return dist, parity


def bandgap_matrix(config: AtomicConfiguration, V: float, L_over_d: float) -> np.ndarray:
    """``M_jk = V (-1)^(theta_j + theta_k) exp(-|theta_j - theta_k| d / L)``, diagonal included."""
    dist, parity = _pair_geometry(config)
    if math.isinf(L_over_d):
        return V * parity.astype(np.float64)
    return V * parity * np.exp(-dist / L_over_d)


def waveguide_kernel(config: AtomicConfiguration, gamma_1d: float, ka_d: float) -> np.ndarray:
    dist, _ = _pair_geometry(config)
    return -0.5j * gamma_1d * np.exp(1j * ka_d * dist)


def pair_kernel(config: AtomicConfiguration, params: ModelParams) -> np.ndarray:
    """Full complex pair coupling multiplying ``sigma_eg^j sigma_ge^k``."""
    return (bandgap_matrix(config, params.V, params.L_over_d)
            + waveguide_kernel(config, params.gamma_1d, params.ka_d))


def _fix_sign(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def resonances(config: AtomicConfiguration, V: float, L_over_d: float) -> np.ndarray:
    """Single-excitation bandgap eigenvalues, highest first."""
    return np.linalg.eigvalsh(bandgap_matrix(config, V, L_over_d))[::-1]


def max_resonance(config: AtomicConfiguration, V: float, L_over_d: float) -> MaxResonance:
    n = config.n
    if n == 0:
        raise ValueError("configuration has no atoms")
    if math.isinf(L_over_d):
        # rank one: V s s^T with s_j = (-1)^theta_j
        s = (1 - 2 * (config.theta & 1)).astype(np.float64)
        vec = _fix_sign(s / math.sqrt(n))
        return MaxResonance(float(n * V), vec, n > 1 and n * V <= 1e-9 * V)
    w, U = np.linalg.eigh(bandgap_matrix(config, V, L_over_d))
    degenerate = n > 1 and (w[-1] - w[-2]) <= 1e-9 * V
    return MaxResonance(float(w[-1]), _fix_sign(U[:, -1]), bool(degenerate))


def sector_masks(n: int, m: int) -> np.ndarray:
    b = enumerate_basis(n, m)
    return b.masks[b.sector(m)]


def two_excitation_block(config: AtomicConfiguration, V: float, L_over_d: float) -> np.ndarray:
    M = bandgap_matrix(config, V, L_over_d)
    return kernels.hopping_matrix(sector_masks(config.n, 2), M).real


def two_excitation_max(config: AtomicConfiguration, V: float, L_over_d: float) -> float:
    if config.n < 2:
        raise ValueError("two-excitation manifold needs at least 2 atoms")
    return float(np.linalg.eigvalsh(two_excitation_block(config, V, L_over_d))[-1])


def anharmonicity(config: AtomicConfiguration, V: float, L_over_d: float) -> float:
    if config.n < 2:
        raise ValueError("anharmonicity needs at least 2 atoms")
    return two_excitation_max(config, V, L_over_d) - 2 * max_resonance(config, V, L_over_d).omega


def drive_coefficients(config: AtomicConfiguration, params: ModelParams) -> np.ndarray:
    """Coefficients of ``sigma_eg^j`` in the drive term, per unit Rabi frequency."""
    return -np.exp(1j * params.kl_d * config.theta)


def _wrap(basis, H):
    if basis.dim >= DENSE_LIMIT:
        return OperatorMatrix(basis, sp.csr_matrix(H))
    return OperatorMatrix(basis, H)


def build_nonhermitian(config: AtomicConfiguration, params: ModelParams,
                       max_excitations: int) -> OperatorMatrix:
    """Matrix of the full non-Hermitian Hamiltonian, drive included, in the truncated basis."""
    n = config.n
    if max_excitations > n:
        raise ValueError(f"max_excitations={max_excitations} exceeds n={n}")
    basis = enumerate_basis(n, max_excitations)
    masks = basis.masks
    H = kernels.hopping_matrix(masks, pair_kernel(config, params))
    H[np.diag_indices(basis.dim)] -= (params.delta + 0.5j * params.gamma_prime) * basis.excitations
    if params.omega:
        R = kernels.raising_matrix(masks, params.omega * drive_coefficients(config, params))
        H += R + R.conj().T
    return _wrap(basis, H)


def lowering_operator(basis: ExcitationBasis, coeffs) -> np.ndarray:
    """Matrix of ``sum_j coeffs[j] sigma_ge^j``."""
    return kernels.raising_matrix(basis.masks, np.conj(coeffs)).conj().T


def lindblad_decomposition(config: AtomicConfiguration, params: ModelParams,
                           max_excitations: int) -> LindbladSet:
    """Hermitian part plus jump operators reproducing the non-Hermitian Hamiltonian.

    Waveguide emission splits into a coherent exchange ``(G/2) sin(k_a|z_j - z_k|)``
    and two collective jumps ``sqrt(G/2) sum_j exp(-/+ i k_a z_j) sigma_ge^j``.
    """
    n = config.n
    if max_excitations > n:
        raise ValueError(f"max_excitations={max_excitations} exceeds n={n}")
    basis = enumerate_basis(n, max_excitations)
    masks = basis.masks
    dist, _ = _pair_geometry(config)
    K = bandgap_matrix(config, params.V, params.L_over_d) \
        + 0.5 * params.gamma_1d * np.sin(params.ka_d * dist)
    H = kernels.hopping_matrix(masks, K.astype(np.complex128))
    H[np.diag_indices(basis.dim)] -= params.delta * basis.excitations
    if params.omega:
        R = kernels.raising_matrix(masks, params.omega * drive_coefficients(config, params))
        H += R + R.conj().T

    jumps, labels = [], []
    if params.gamma_prime > 0:
        amp = math.sqrt(params.gamma_prime)
        for j in range(n):
            e = np.zeros(n, dtype=np.complex128)
            e[j] = amp
            jumps.append(lowering_operator(basis, e))
            labels.append(f"free:{j}")
    if params.gamma_1d > 0:
        amp = math.sqrt(params.gamma_1d / 2)
        phase = np.exp(1j * params.ka_d * config.theta)
        jumps.append(lowering_operator(basis, amp * phase.conj()))
        labels.append("wg:+")
        jumps.append(lowering_operator(basis, amp * phase))
        labels.append("wg:-")
    return LindbladSet(_wrap(basis, H), tuple(jumps), tuple(labels))
