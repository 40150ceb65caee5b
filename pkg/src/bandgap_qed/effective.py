"""Closed-form estimates and the reduced linear / nonlinear effective models."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import norm

from ._lindblad import LindbladRHS, ground_state_density, integrate, maximize_on_grid, time_maximum
from .core import AtomicConfiguration, uniform_stream


def v_eff(V: float, L_over_d: float, N: int, variant: str = "exact_sum") -> float:
    """Mean pair interaction defined by ``mean(omega_max) = V + (n - 1) V_eff``."""
    if N < 2:
        raise ValueError("need N >= 2")
    if math.isinf(L_over_d):
        return float(V)
    x = N / (2.0 * L_over_d)
    if variant == "exact_sum":
        return 2.0 * V / N * (-math.expm1(-x)) / math.expm1(1.0 / L_over_d)
    if variant == "asymptotic":
        return 2.0 * L_over_d * V / N * (-math.expm1(-x))
    raise ValueError(f"unknown variant {variant!r}")


def kappa(n: int, N: int) -> float:
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= n <= N, got n={n}, N={N}")
    return (N - n) / (math.sqrt(2.0) * n * N)


def overlap(config: AtomicConfiguration, kl_d: float, vector=None) -> complex:
    """``<phi_max|psi_in>`` with ``psi_in = n^-1/2 sum_j exp(i k_L z_j)|e_j>``.

    Without ``vector`` the infinite-range eigenvector ``n^-1/2 sum_j (-1)^theta_j |e_j>`` is used.
    """
    th = config.theta
    drive = np.exp(1j * kl_d * th)
    if vector is None:
        sign = 1.0 - 2.0 * (th & 1)
        return complex(np.sum(sign * drive) / config.n)
    vector = np.asarray(vector)
    return complex(np.vdot(vector, drive) / math.sqrt(config.n))


def t_dip_analytic(n: int, N: int, gamma_prime: float = 1.0, gamma_1d: float = 0.3,
                   kappa_value: float | None = None) -> float:
    k = kappa(n, N) if kappa_value is None else kappa_value
    return gamma_prime ** 2 / (gamma_prime + n * k * gamma_1d) ** 2


@dataclass(frozen=True)
class EffectiveLinearParams:
    n: int
    N: int
    V: float
    L_over_d: float = math.inf
    gamma_prime: float = 1.0
    gamma_1d: float = 0.3
    omega: float = 0.01
    delta_max: float = 0.0
    eta_sigma: float = 0.0
    eta: float = 0.0
    kappa_value: float | None = None

    def __post_init__(self):
        if self.eta_sigma < 0:
            raise ValueError("eta_sigma must be >= 0")

    @property
    def kappa(self) -> float:
        return kappa(self.n, self.N) if self.kappa_value is None else self.kappa_value

    @property
    def v_eff(self) -> float:
        return v_eff(self.V, self.L_over_d, self.N)


def _linear_t(p: EffectiveLinearParams, eta):
    n, k = p.n, p.kappa
    h_E = -(p.delta_max + n * p.v_eff + 0.5j * (p.gamma_prime + n * p.gamma_1d))
    h_1 = -(p.delta_max - eta + 0.5j * (p.gamma_prime + n * k * p.gamma_1d))
    c_E = math.sqrt(n) * p.omega / h_E
    c_1 = math.sqrt(n * k) * p.omega / h_1
    a_T = p.omega + 0.5j * p.gamma_1d * (math.sqrt(n) * c_E + math.sqrt(n * k) * c_1)
    return np.abs(a_T) ** 2 / p.omega ** 2


def linear_effective_transmittance(p: EffectiveLinearParams, draws: int = 1000, seed: int = 0) -> float:
    """Weak-drive transmittance of the ensemble + maximum-resonance pair.

    With ``eta_sigma > 0`` the resonance shift is drawn from a Gaussian
    (seeded stream) and the transmittance averaged over ``draws``.
    """
    if p.eta_sigma == 0:
        return float(_linear_t(p, p.eta))
    u = uniform_stream(seed, draws)
    u = np.clip(u, 1e-300, None)
    etas = p.eta_sigma * norm.ppf(u)
    return float(np.mean(_linear_t(p, etas)))


@dataclass(frozen=True)
class EffectiveNonlinearParams:
    n: int
    N: int
    V: float
    L_over_d: float = math.inf
    gamma_prime: float = 1.0
    gamma_1d: float = 0.3
    omega: float = 1.0
    delta_max: float = 0.0
    kappa_value: float | None = None

    @property
    def kappa(self) -> float:
        return kappa(self.n, self.N) if self.kappa_value is None else self.kappa_value

    @property
    def v_eff(self) -> float:
        return v_eff(self.V, self.L_over_d, self.N)

    @property
    def omega_n(self) -> float:
        return math.sqrt(self.n * self.kappa) * self.omega

    @property
    def big_gamma_n(self) -> float:
        return self.gamma_prime + self.n * self.gamma_1d

    @property
    def gamma_n(self) -> float:
        return self.gamma_prime + self.n * self.kappa * self.gamma_1d

    def replace(self, **changes) -> "EffectiveNonlinearParams":
        return replace(self, **changes)


def _nonlinear_model(p: EffectiveNonlinearParams):
    """Levels: 0 = ground, 1..n = ensemble ladder, n+1 = |1>, n+2 = |2>."""
    n = p.n
    dim = n + 3
    one, two = n + 1, n + 2
    H = np.zeros((dim, dim), dtype=np.complex128)
    ve = p.v_eff
    for m in range(1, n + 1):
        H[m, m] = -m * (p.delta_max + n * ve)
        H[m, m - 1] = H[m - 1, m] = math.sqrt(n) * p.omega * math.sqrt(m)
    H[one, one] = p.delta_max
    H[two, two] = 2 * (p.delta_max + ve)
    H[one, 0] = H[0, one] = p.omega_n
    H[two, one] = H[one, two] = math.sqrt(2) * p.omega_n

    jumps = []
    for m in range(1, n + 1):
        J = np.zeros((dim, dim))
        J[m - 1, m] = math.sqrt(m * p.big_gamma_n)
        jumps.append(J)
    J = np.zeros((dim, dim))
    J[0, one] = math.sqrt(p.gamma_n)
    jumps.append(J)
    J = np.zeros((dim, dim))
    J[one, two] = math.sqrt(2 * p.gamma_n)
    jumps.append(J)
    jumps = [J for J in jumps if np.any(J)]
    H_eff = H - 0.5j * sum((J.T @ J for J in jumps), np.zeros((dim, dim)))
    return LindbladRHS(H_eff, jumps), dim


@dataclass
class EffectiveTrajectory:
    times: np.ndarray
    ground: np.ndarray
    ensemble: np.ndarray  # (len(times), n): populations of E_1..E_n
    one: np.ndarray
    two: np.ndarray

    @property
    def p1(self) -> np.ndarray:
        return self.one + self.ensemble[:, 0]

    @property
    def p2(self) -> np.ndarray:
        e2 = self.ensemble[:, 1] if self.ensemble.shape[1] > 1 else 0.0
        return self.two + e2


def nonlinear_effective_evolve(p: EffectiveNonlinearParams, t_grid) -> EffectiveTrajectory:
    rhs, dim = _nonlinear_model(p)
    states = integrate(rhs, ground_state_density(dim), t_grid)
    pops = np.real(np.einsum("tii->ti", states))
    n = p.n
    return EffectiveTrajectory(np.asarray(t_grid, dtype=np.float64), pops[:, 0],
                               pops[:, 1:n + 1], pops[:, n + 1], pops[:, n + 2])


@dataclass(frozen=True)
class EffectivePeak:
    time: float
    p1: float
    p2: float
    one: float
    two: float


def effective_peak(p: EffectiveNonlinearParams, horizon: float = 20.0,
                   patience: float | None = 2.0) -> EffectivePeak:
    """Time-maximum of the single-excitation manifold population (|1> plus E_1)."""
    rhs, dim = _nonlinear_model(p)
    w = np.zeros(dim)
    w[1] = w[p.n + 1] = 1.0
    res = time_maximum(rhs, ground_state_density(dim), w, horizon=horizon, patience=patience)
    d = np.real(np.diag(res.rho))
    p2 = d[p.n + 2] + (d[2] if p.n >= 2 else 0.0)
    return EffectivePeak(res.time, res.value, float(p2), float(d[p.n + 1]), float(d[p.n + 2]))


def effective_max_p1(p: EffectiveNonlinearParams, horizon: float = 20.0,
                     patience: float | None = 2.0) -> float:
    return effective_peak(p, horizon, patience).p1


def effective_optimize_detuning(p: EffectiveNonlinearParams, delta_max_grid=None,
                                horizon: float = 20.0) -> tuple[float, float]:
    """Detuning maximizing ``effective_max_p1``; returns ``(delta_max, p1)``."""
    if delta_max_grid is None:
        delta_max_grid = np.arange(-2.0, 4.001, 0.25)
    return maximize_on_grid(lambda dm: effective_max_p1(p.replace(delta_max=dm), horizon),
                            delta_max_grid)


def two_level_max_inversion(omega_n: float, delta_max: float, gamma_n: float,
                            horizon: float = 20.0) -> float:
    """Largest excited population of a driven, decaying two-level system within ``horizon``."""
    if omega_n < 0 or gamma_n < 0:
        raise ValueError("rates must be >= 0")
    H = np.array([[0.0, omega_n], [omega_n, delta_max]], dtype=np.complex128)
    H[1, 1] -= 0.5j * gamma_n
    jumps = []
    if gamma_n > 0:
        jumps = [np.array([[0.0, math.sqrt(gamma_n)], [0.0, 0.0]])]
    rhs = LindbladRHS(H, jumps)
    return time_maximum(rhs, ground_state_density(2), [0.0, 1.0], horizon=horizon).value


@dataclass(frozen=True)
class ErrorBudget:
    p2_estimate: float
    ensemble_single: float
    ensemble_double: float
    two_level_error: float
    two_level_detuning: float

    @property
    def total(self) -> float:
        return self.two_level_error + self.p2_estimate


def error_budget(p: EffectiveNonlinearParams) -> ErrorBudget:
    """Perturbative error sources for single-excitation preparation near the maximum resonance."""
    ve = p.v_eff
    if p.omega >= math.sqrt(p.n) * ve:
        warnings.warn("error estimates assume omega << sqrt(n) V_eff", RuntimeWarning, stacklevel=2)
    if ve > 0:
        p2 = p.omega_n ** 2 / (4 * ve ** 2)
        e1 = p.omega ** 2 / (p.n * ve ** 2)
        e2 = p.omega ** 4 / (4 * p.n ** 2 * ve ** 4)
    else:
        p2 = e1 = e2 = math.inf
    om, g = p.omega_n, p.gamma_n
    span = 2 * om + g
    if span > 0:
        res = minimize_scalar(lambda d: -two_level_max_inversion(om, d, g), bounds=(0.0, span),
                              method="bounded", options={"xatol": 1e-6})
        best_d, best = float(res.x), -float(res.fun)
        at_zero = two_level_max_inversion(om, 0.0, g)
        if at_zero >= best:
            best_d, best = 0.0, at_zero
    else:
        best_d, best = 0.0, 0.0
    return ErrorBudget(p2, e1, e2, 1.0 - best, best_d)


def min_total_error(p: EffectiveNonlinearParams, omega_bounds=(0.1, 30.0)) -> tuple[float, float]:
    """Minimize the error-budget total over the Rabi frequency; returns ``(omega, total)``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = minimize_scalar(lambda om: error_budget(p.replace(omega=om)).total,
                              bounds=omega_bounds, method="bounded", options={"xatol": 1e-4})
    return float(res.x), float(res.fun)
