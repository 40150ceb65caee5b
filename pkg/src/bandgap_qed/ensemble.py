"""Monte Carlo averages over random atomic positions.

Sample ``i`` always uses seed ``seed + i``, and results are reduced in sample order,
so statistics do not depend on how many worker processes were used.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .core import ModelParams, sample_configuration, sample_poisson
from .effective import overlap, v_eff
from .hamiltonian import anharmonicity, max_resonance, resonances
from .weakdrive import Spectrum, _check_weak, g2_zero, transmission_spectrum

G2_BIN_EDGES = np.append(np.round(np.arange(0.0, 2.01, 0.1), 10), np.inf)


@dataclass
class SampleStatistics:
    mean: float
    std: float
    count: int
    bin_edges: np.ndarray | None = None
    bin_counts: np.ndarray | None = None
    values: np.ndarray | None = None

    @classmethod
    def from_values(cls, values, bin_edges=None, keep=False) -> "SampleStatistics":
        v = np.asarray(values, dtype=np.float64)
        if v.size == 0:
            raise ValueError("no samples")
        mean = float(np.mean(v))
        std = float(np.sqrt(np.mean((v - mean) ** 2)))
        counts = None
        if bin_edges is not None:
            bin_edges = np.asarray(bin_edges, dtype=np.float64)
            idx = np.searchsorted(bin_edges, v, side="right") - 1
            if np.any(idx < 0) or np.any(idx >= bin_edges.size - 1):
                raise ValueError("value outside histogram range")
            counts = np.bincount(idx, minlength=bin_edges.size - 1)
        return cls(mean, std, int(v.size), bin_edges, counts, v if keep else None)

    def fraction(self, b: int) -> float:
        return float(self.bin_counts[b]) / self.count


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise ValueError("threads must be >= 1")
    return int(threads)


def _map(fn, items, threads):
    items = list(items)
    threads = min(resolve_threads(threads), max(1, len(items)))
    if threads == 1:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def _check_samples(samples):
    if samples < 1:
        raise ValueError("samples must be >= 1")


def default_ensemble_grid(params: ModelParams, n: int, N: int, points: int = 801) -> np.ndarray:
    top = params.V + (n - 1) * v_eff(params.V, params.L_over_d, N) if n >= 1 and N >= 2 else params.V
    return np.linspace(-2.0, top + 6.0, points)


# ---------------------------------------------------------------- spectra

def _spectrum_sample(seed, params, n, N, grid):
    config = sample_configuration(N, n, seed)
    s = transmission_spectrum(config, params, grid)
    return s.T, s.R


def _stack_spectrum(rows, grid, meta):
    T = np.array([r[0] for r in rows])
    R = np.array([r[1] for r in rows])
    return Spectrum(grid, T.mean(axis=0), R.mean(axis=0), T_std=T.std(axis=0), metadata=meta)


def averaged_spectrum(params: ModelParams, n: int, N: int, samples: int, seed: int,
                      delta_grid=None, threads: int | None = 1) -> Spectrum:
    """Transmittance mean and std over ``samples`` random configurations of ``n`` atoms."""
    _check_weak(params)
    _check_samples(samples)
    grid = default_ensemble_grid(params, n, N) if delta_grid is None else np.asarray(delta_grid, float)
    fn = partial(_spectrum_sample, params=params, n=n, N=N, grid=grid)
    rows = _map(fn, range(seed, seed + samples), threads)
    meta = {"n": n, "N": N, "samples": samples, "seed": seed, "params": params.to_dict()}
    return _stack_spectrum(rows, grid, meta)


def _poisson_sample(seed, params, mean_n, N, grid):
    # the atom number comes from stream position N, past any draw the site sampler uses
    m = min(sample_poisson(mean_n, seed, offset=N), N)
    if m == 0:
        return np.ones_like(grid), np.zeros_like(grid)
    return _spectrum_sample(seed, params, m, N, grid)


def poisson_averaged_spectrum(params: ModelParams, mean_n: float, N: int, samples: int, seed: int,
                              delta_grid=None, threads: int | None = 1) -> Spectrum:
    """Average over a Poisson-distributed atom number (empty draws give ``T = 1``)."""
    _check_weak(params)
    _check_samples(samples)
    grid_needed = delta_grid is None
    if grid_needed:
        top_n = max(1, math.ceil(mean_n + 3 * math.sqrt(mean_n)))
        delta_grid = default_ensemble_grid(params, min(top_n, N), N)
    grid = np.asarray(delta_grid, dtype=np.float64)
    fn = partial(_poisson_sample, params=params, mean_n=mean_n, N=N, grid=grid)
    rows = _map(fn, range(seed, seed + samples), threads)
    meta = {"mean_n": mean_n, "N": N, "samples": samples, "seed": seed,
            "params": params.to_dict(), "default_grid": grid_needed}
    return _stack_spectrum(rows, grid, meta)


# ------------------------------------------------------ resonance statistics

def _observable(config, params, observable):
    if observable == "omega_max":
        return max_resonance(config, params.V, params.L_over_d).omega
    if observable == "overlap":
        vec = None
        if not math.isinf(params.L_over_d):
            vec = max_resonance(config, params.V, params.L_over_d).vector
        return abs(overlap(config, params.kl_d, vec))
    if observable == "anharmonicity":
        return anharmonicity(config, params.V, params.L_over_d)
    raise ValueError(f"unknown observable {observable!r}")


OBSERVABLES = ("omega_max", "overlap", "anharmonicity")


def _observable_sample(seed, params, n, N, observable):
    return _observable(sample_configuration(N, n, seed), params, observable)


@dataclass
class ResonanceStats:
    n_values: np.ndarray
    stats: list
    slope: float
    intercept: float
    observable: str = "omega_max"

    @property
    def means(self) -> np.ndarray:
        return np.array([s.mean for s in self.stats])

    @property
    def stds(self) -> np.ndarray:
        return np.array([s.std for s in self.stats])


def resonance_stats(params: ModelParams, n_list, N: int, samples: int, seed: int,
                    observable: str = "omega_max", threads: int | None = 1,
                    keep_values: bool = False) -> ResonanceStats:
    """Per-``n`` statistics of a single-configuration observable.

    ``observable`` is ``"omega_max"`` (top resonance), ``"overlap"`` (magnitude of its
    overlap with the drive-imprinted spin wave) or ``"anharmonicity"``. The
    least-squares slope of the mean against ``n`` is included.
    """
    if observable not in OBSERVABLES:
        raise ValueError(f"unknown observable {observable!r}")
    _check_samples(samples)
    n_values = np.asarray(list(n_list), dtype=np.int64)
    if n_values.size == 0:
        raise ValueError("n_list is empty")
    stats = []
    for n in n_values:
        fn = partial(_observable_sample, params=params, n=int(n), N=N, observable=observable)
        vals = _map(fn, range(seed, seed + samples), threads)
        stats.append(SampleStatistics.from_values(vals, keep=keep_values))
    if n_values.size >= 2:
        slope, intercept = np.polyfit(n_values.astype(float), [s.mean for s in stats], 1)
    else:
        slope, intercept = math.nan, math.nan
    return ResonanceStats(n_values, stats, float(slope), float(intercept), observable)


def omega_max_stats(params: ModelParams, n_list, N: int, samples: int, seed: int,
                    threads: int | None = 1, keep_values: bool = False) -> ResonanceStats:
    """Mean and std of the maximum resonance per ``n`` plus the slope of mean vs ``n``."""
    return resonance_stats(params, n_list, N, samples, seed, "omega_max", threads, keep_values)


def slope_error(params: ModelParams, n_list, N: int, samples: int, seed: int,
                threads: int | None = 1) -> float:
    """Relative deviation ``|V_eff - S| / S`` of the fitted slope ``S`` from ``V_eff``."""
    s = omega_max_stats(params, n_list, N, samples, seed, threads).slope
    return abs(v_eff(params.V, params.L_over_d, N) - s) / s


# ------------------------------------------------------------ correlations

def _g2_sample(seed, params, n, N, m):
    config = sample_configuration(N, n, seed)
    omega_m = resonances(config, params.V, params.L_over_d)[m - 1]
    return g2_zero(config, params.replace(delta=float(omega_m)), "R")


def g2_histogram(params: ModelParams, n: int, N: int, samples: int, seed: int, V_list=None,
                 m: int = 1, threads: int | None = 1, keep_values: bool = False) -> dict:
    """Reflected ``g2(0)`` per configuration when driving its ``m``-th highest resonance.

    Returns ``{V: SampleStatistics}`` with the fixed bin edges ``G2_BIN_EDGES``.
    """
    _check_weak(params)
    _check_samples(samples)
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    V_list = [params.V] if V_list is None else list(V_list)
    out = {}
    for V in V_list:
        fn = partial(_g2_sample, params=params.replace(V=float(V)), n=n, N=N, m=m)
        vals = _map(fn, range(seed, seed + samples), threads)
        out[float(V)] = SampleStatistics.from_values(vals, G2_BIN_EDGES, keep_values)
    return out


# -------------------------------------------------------------- dip depth

def _tdip_sample(seed, params, n, N):
    config = sample_configuration(N, n, seed)
    w = max_resonance(config, params.V, params.L_over_d).omega
    return float(transmission_spectrum(config, params, [w], reflection=False).T[0])


def tdip_curve(params: ModelParams, n_list, N: int, samples: int, seed: int,
               threads: int | None = 1) -> dict:
    """``{n: SampleStatistics}`` of the transmittance at each configuration's own maximum resonance."""
    _check_weak(params)
    _check_samples(samples)
    out = {}
    for n in n_list:
        fn = partial(_tdip_sample, params=params, n=int(n), N=N)
        out[int(n)] = SampleStatistics.from_values(_map(fn, range(seed, seed + samples), threads))
    return out
