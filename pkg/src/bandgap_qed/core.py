"""Unit system, lattice configurations, excitation bases and seeded sampling.

All rates are in units of the free-space decay rate (``gamma_prime``) and all
positions are integer lattice sites, so ``z_j = sites[j] * d``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, asdict
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.stats import poisson

from . import kernels


class SingularSystemError(ArithmeticError):
    """A linear solve hit a singular sector block."""


class UndefinedCorrelationError(ArithmeticError):
    """Output flux too small for a normalized correlation."""


class CapacityError(RuntimeError):
    """Requested Hilbert-space dimension exceeds the configured guard."""


class IntegrationError(RuntimeError):
    """Time integration failed or drifted out of tolerance."""


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters in units of the free-space decay rate.

    ``L_over_d`` may be ``math.inf`` for an infinite-range bandgap interaction.
    """
    V: float = 4.0
    L_over_d: float = math.inf
    gamma_prime: float = 1.0
    gamma_1d: float = 0.3
    ka_d: float = math.pi / 2
    kl_d: float = math.pi / 2
    omega: float = 0.01
    delta: float = 0.0

    def __post_init__(self):
        if not self.V >= 0:
            raise ValueError(f"V must be >= 0, got {self.V}")
        if not self.L_over_d > 0:
            raise ValueError(f"L_over_d must be > 0 or inf, got {self.L_over_d}")
        if not self.gamma_1d >= 0:
            raise ValueError(f"gamma_1d must be >= 0, got {self.gamma_1d}")
        if not self.gamma_prime >= 0:
            raise ValueError(f"gamma_prime must be >= 0, got {self.gamma_prime}")
        if not self.omega >= 0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")

    def replace(self, **changes) -> "ModelParams":
        d = asdict(self)
        d.update(changes)
        return ModelParams(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(d["L_over_d"]):
            d["L_over_d"] = "inf"
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        names = {f.name for f in fields(cls)}
        d = {k: v for k, v in d.items() if k in names}
        if d.get("L_over_d") in ("inf", "infinity", None):
            d["L_over_d"] = math.inf
        return cls(**{k: float(v) for k, v in d.items()})


@dataclass(frozen=True)
class AtomicConfiguration:
    """Sorted, distinct occupied sites on an ``N``-site lattice of period ``d``."""
    sites: tuple
    N: int
    d: float = 1.0

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        object.__setattr__(self, "sites", sites)
        if any(b <= a for a, b in zip(sites, sites[1:])):
            raise ValueError(f"sites must be strictly increasing: {sites}")
        if sites and (sites[0] < 0 or sites[-1] >= self.N):
            raise ValueError(f"sites must lie in [0, {self.N - 1}]")
        if len(sites) > self.N:
            raise ValueError("more atoms than lattice sites")

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def theta(self) -> np.ndarray:
        return np.asarray(self.sites, dtype=np.int64)

    def to_json(self) -> str:
        return json.dumps({"N": self.N, "n": self.n, "sites": list(self.sites)})

    @classmethod
    def from_json(cls, text: str) -> "AtomicConfiguration":
        d = json.loads(text)
        sites = d["sites"]
        if "n" in d and d["n"] != len(sites):
            raise ValueError(f"n={d['n']} does not match {len(sites)} sites")
        return cls(tuple(sites), int(d["N"]))


@dataclass(frozen=True)
class ExcitationBasis:
    """States with at most ``max_excitations`` excited atoms.

    Ordered by excitation number, then lexicographically on the excited-atom
    indices. ``masks`` holds the same states as bit masks (requires n <= 62).
    """
    n_atoms: int
    max_excitations: int
    states: tuple
    index: dict = field(repr=False, compare=False)
    offsets: tuple = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def masks(self) -> np.ndarray:
        return _masks(self.n_atoms, self.max_excitations)

    @property
    def excitations(self) -> np.ndarray:
        return np.fromiter((len(s) for s in self.states), dtype=np.int64, count=self.dim)

    def sector(self, m: int) -> slice:
        return slice(self.offsets[m], self.offsets[m + 1])

    def state_index(self, state) -> int:
        return self.index[tuple(sorted(state))]


@dataclass(frozen=True)
class StateVector:
    basis: ExcitationBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        if len(self.amplitudes) != self.basis.dim:
            raise ValueError("amplitude count does not match basis dimension")

    def sector(self, m: int) -> np.ndarray:
        return self.amplitudes[self.basis.sector(m)]


@dataclass(frozen=True)
class DensityMatrix:
    basis: ExcitationBasis
    entries: np.ndarray

    def check(self, herm_tol=1e-10, trace_tol=1e-8, pos_tol=1e-10):
        """Raise ``ValueError`` if Hermiticity, unit trace or positivity fail."""
        rho = self.entries
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > herm_tol:
            raise ValueError("density matrix not Hermitian")
        if abs(np.trace(rho) - 1) > trace_tol:
            raise ValueError(f"trace {np.trace(rho).real} deviates from 1")
        if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -pos_tol:
            raise ValueError("density matrix has a negative eigenvalue")

    def populations(self) -> np.ndarray:
        diag = np.diag(self.entries).real
        b = self.basis
        return np.array([diag[b.sector(m)].sum() for m in range(b.max_excitations + 1)])


@lru_cache(maxsize=64)
def enumerate_basis(n: int, max_excitations: int) -> ExcitationBasis:
    if not 0 <= max_excitations <= n:
        raise ValueError(f"need 0 <= max_excitations <= n, got {max_excitations}, n={n}")
    states = []
    offsets = [0]
    for m in range(max_excitations + 1):
        states.extend(combinations(range(n), m))
        offsets.append(len(states))
    states = tuple(states)
    index = {s: i for i, s in enumerate(states)}
    return ExcitationBasis(n, max_excitations, states, index, tuple(offsets))


@lru_cache(maxsize=64)
def _masks(n: int, m: int) -> np.ndarray:
    if n > 62:
        raise CapacityError("bit-mask basis supports at most 62 atoms")
    basis = enumerate_basis(n, m)
    out = np.array([sum(1 << i for i in s) for s in basis.states], dtype=np.int64)
    out.setflags(write=False)
    return out


def basis_dimension(n: int, max_excitations: int) -> int:
    return sum(math.comb(n, k) for k in range(max_excitations + 1))


def _seed_array(seeds) -> np.ndarray:
    return np.array([int(s) % (1 << 64) for s in np.atleast_1d(seeds)], dtype=np.uint64)


def uniform_stream(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Draws ``offset .. offset+count-1`` of the counter-based stream for ``seed``."""
    return kernels.uniforms(_seed_array([seed]), offset + count)[0, offset:]


def sample_configuration(N: int, n: int, seed: int) -> AtomicConfiguration:
    """Uniform ``n``-subset of the ``N`` lattice sites (partial Fisher-Yates)."""
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= n <= N, got n={n}, N={N}")
    sites = kernels.sample_sites(N, n, _seed_array([seed]))[0]
    return AtomicConfiguration(tuple(sites.tolist()), N)


def sample_configurations(N: int, n: int, seed: int, count: int) -> list[AtomicConfiguration]:
    """Configurations for seeds ``seed, seed+1, ..., seed+count-1``."""
    if not 1 <= n <= N:
        raise ValueError(f"need 1 <= n <= N, got n={n}, N={N}")
    seeds = _seed_array(np.arange(count, dtype=object) + seed)
    rows = kernels.sample_sites(N, n, seeds)
    return [AtomicConfiguration(tuple(r.tolist()), N) for r in rows]


def sample_poisson(mean: float, seed: int, offset: int = 0) -> int:
    """Poisson variate by CDF inversion of the stream's uniform at position ``offset``."""
    if not mean > 0:
        raise ValueError(f"Poisson mean must be > 0, got {mean}")
    u = uniform_stream(seed, 1, offset)[0]
    # ppf(0) is -1 in scipy's convention
    return max(0, int(poisson.ppf(u, mean)))
