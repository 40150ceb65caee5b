"""Command-line front end: ``bandgap-qed run <command> [flags]``.

Every run writes its CSV plus a JSON sidecar ``<out>.json`` holding the full run
specification, the library version and the wall time. Exit status is 0 on success,
2 for usage errors and numerical failures, 3 for I/O failures.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import re
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__, io
from .core import (AtomicConfiguration, CapacityError, IntegrationError, ModelParams,
                   SingularSystemError, UndefinedCorrelationError, sample_configuration)
from .effective import (EffectiveNonlinearParams, effective_max_p1, error_budget,
                        min_total_error, nonlinear_effective_evolve)
from .ensemble import (OBSERVABLES, averaged_spectrum, g2_histogram, poisson_averaged_spectrum,
                       resolve_threads, resonance_stats, tdip_curve)
from .hamiltonian import max_resonance, resonances
from .master import evolve_master, search_configuration, sweep_p1
from .weakdrive import g2_tau, g2_zero, transmission_spectrum

SCHEMA = "1"
COMMANDS = ("spectrum", "avg-spectrum", "poisson-spectrum", "g2", "g2-hist", "omega-stats",
            "tdip", "rabi", "sweep", "effmodel", "error-budget", "search-config")
THREADS_ENV = "BANDGAP_QED_THREADS"

PARAM_FLAGS = {"V": "V", "L": "L_over_d", "gamma_prime": "gamma_prime", "gamma_1d": "gamma_1d",
               "ka_d": "ka_d", "kl_d": "kl_d", "omega": "omega", "delta": "delta"}

PRESETS = {
    "fig1d": dict(command="avg-spectrum", n=10, N=200, V=4.0, L=100.0, omega=0.01,
                  samples=1000, seed=0),
    "fig2a": dict(command="omega-stats", n_list="1:40:1", N=200, V=4.0, L=100.0,
                  samples=1000, seed=0),
    "fig2b": dict(command="omega-stats", n_list="2:40:4", N=200, V=4.0, L=100.0,
                  samples=200, seed=0),
    "fig2c": dict(command="omega-stats", observable="overlap", n_list="1:40:1", N=200, V=4.0,
                  L=1e6, samples=1000, seed=0),
    "fig2d": dict(command="tdip", n_list="1:40:1", N=200, V=4.0, L=1e6, omega=0.01,
                  samples=1000, seed=0),
    "fig4": dict(command="g2-hist", n=20, N=200, L=100.0, omega=0.01, V_list="1:10:1",
                 m_list="1", samples=1000, seed=0),
    "fig5b": dict(command="sweep", n=6, N=50, V=10.0, L=1e6, search=True, trials=1000000, seed=0,
                  omega_grid="4:9:0.25", delta_max_grid="-1.5:2.5:0.25"),
    "figA4": dict(command="poisson-spectrum", mean_n=4.0, N=200, V=4.0, L=200.0, omega=0.01,
                  samples=200, seed=0),
    "figB1": dict(command="g2-hist", n=20, N=200, V=4.0, L=100.0, omega=0.01, m_list="1:20:1",
                  samples=1000, seed=0),
    "figB2": dict(command="omega-stats", observable="anharmonicity", n_list="20", N=200, V=4.0,
                  L_list="10,20,50,100,200,500,1000", samples=1000, seed=0),
}

DEFAULTS = dict(N=200, samples=100, seed=0, m_list="1", observable="omega_max", direction="R",
                trials=100000, t_max=5.0, dt=0.01, tau_max=10.0, tau_step=0.05, horizon=20.0)


class UsageError(ValueError):
    pass


@dataclass
class RunSpec:
    command: str
    params: ModelParams
    out: str
    n: int | None = None
    N: int = 200
    sites: tuple | None = None
    samples: int = 100
    seed: int = 0
    threads: int | None = None
    preset: str | None = None
    delta_grid: str | None = None
    omega_grid: str | None = None
    delta_max_grid: str | None = None
    delta_max: float | None = None
    n_list: str | None = None
    V_list: str | None = None
    L_list: str | None = None
    m_list: str = "1"
    resonance: int | None = None
    observable: str = "omega_max"
    mean_n: float | None = None
    max_excitations: int | None = None
    t_max: float = 5.0
    dt: float = 0.01
    horizon: float = 20.0
    tau_max: float = 10.0
    tau_step: float = 0.05
    direction: str = "R"
    trials: int = 100000
    target: float | None = None
    with_g2: bool = False
    optimize: bool = False
    search: bool = False

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        d["params"] = self.params.to_dict()
        d["sites"] = None if self.sites is None else list(self.sites)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunSpec":
        d = dict(d)
        d["params"] = ModelParams.from_dict(d["params"])
        if d.get("sites") is not None:
            d["sites"] = tuple(d["sites"])
        return cls(**d)


# ------------------------------------------------------------------ parsing

def parse_values(text: str, kind=float) -> np.ndarray:
    """``"a:b:step"`` (inclusive) or ``"x,y,z"``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range {text!r} must look like start:stop:step")
        a, b, s = (float(p) for p in parts)
        if s <= 0 or b < a:
            raise UsageError(f"range {text!r} needs step > 0 and stop >= start")
        k = int(math.floor((b - a) / s + 1e-9))
        vals = a + s * np.arange(k + 1)
        vals = np.round(vals, 12)
    else:
        vals = np.array([float(p) for p in text.split(",") if p.strip()])
    if vals.size == 0:
        raise UsageError(f"empty value list {text!r}")
    if kind is int:
        if np.any(vals != np.round(vals)):
            raise UsageError(f"expected integers in {text!r}")
        return vals.astype(np.int64)
    return vals


def _float_or_inf(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _sites(text):
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"sites must be comma-separated integers: {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"{self.prog}: error: {message}") from None


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="bandgap-qed", description="Atoms coupled to a photonic band edge.")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = sub.add_parser("run", help="run one computation")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--out", help="output CSV path")
    g = p.add_argument_group("model")
    g.add_argument("--V", type=float)
    g.add_argument("--L", type=_float_or_inf, help="interaction range in lattice units (inf allowed)")
    g.add_argument("--gamma-prime", dest="gamma_prime", type=float)
    g.add_argument("--gamma-1d", dest="gamma_1d", type=float)
    g.add_argument("--ka-d", dest="ka_d", type=float)
    g.add_argument("--kl-d", dest="kl_d", type=float)
    g.add_argument("--omega", type=float, help="Rabi frequency")
    g.add_argument("--delta", type=float, help="laser detuning from the bare atomic resonance")
    g.add_argument("--delta-max", dest="delta_max", type=float,
                   help="laser detuning from the configuration's maximum resonance")
    c = p.add_argument_group("configuration")
    c.add_argument("--n", type=int)
    c.add_argument("--N", type=int)
    c.add_argument("--sites", type=_sites, help="comma-separated occupied sites (overrides sampling)")
    c.add_argument("--seed", type=int)
    c.add_argument("--samples", type=int)
    c.add_argument("--trials", type=int, help="configuration-search trials")
    c.add_argument("--target", type=float, help="configuration-search overlap target")
    c.add_argument("--mean-n", dest="mean_n", type=float)
    s = p.add_argument_group("grids")
    s.add_argument("--delta-grid", dest="delta_grid")
    s.add_argument("--omega-grid", dest="omega_grid")
    s.add_argument("--delta-max-grid", dest="delta_max_grid")
    s.add_argument("--n-list", dest="n_list")
    s.add_argument("--V-list", dest="V_list")
    s.add_argument("--L-list", dest="L_list")
    s.add_argument("--m-list", dest="m_list", help="resonance indices (1 = highest)")
    s.add_argument("--resonance", type=int, help="drive at this resonance index (g2)")
    s.add_argument("--observable", choices=OBSERVABLES)
    s.add_argument("--max-excitations", dest="max_excitations", type=int)
    s.add_argument("--t-max", dest="t_max", type=float)
    s.add_argument("--dt", type=float)
    s.add_argument("--horizon", type=float)
    s.add_argument("--tau-max", dest="tau_max", type=float)
    s.add_argument("--tau-step", dest="tau_step", type=float)
    s.add_argument("--direction", choices=("T", "R"))
    s.add_argument("--with-g2", dest="with_g2", action="store_true", default=None)
    s.add_argument("--optimize", action="store_true", default=None)
    c.add_argument("--search", action="store_true", default=None,
                   help="pick the configuration by overlap search (rabi, sweep, g2, spectrum)")
    p.add_argument("--threads", type=int, help=f"worker processes (fallback: ${THREADS_ENV})")
    return top


def _validate(spec: RunSpec):
    cmd = spec.command
    if spec.samples < 1:
        raise UsageError("--samples must be >= 1")
    if spec.N < 1:
        raise UsageError("--N must be >= 1")
    if spec.sites is not None:
        AtomicConfiguration(spec.sites, spec.N)
    needs_atoms = cmd in ("g2", "avg-spectrum", "g2-hist", "rabi", "sweep", "effmodel",
                          "error-budget", "search-config")
    if spec.sites is None and cmd in ("spectrum", "g2", "rabi", "sweep", "avg-spectrum", "g2-hist",
                                      "effmodel", "error-budget", "search-config"):
        if spec.n is None:
            raise UsageError("--n is required (or pass --sites)")
    n = len(spec.sites) if spec.sites is not None else spec.n
    if n is not None:
        if n < 0 or n > spec.N:
            raise UsageError(f"--n must lie in [0, N], got {n}")
        if needs_atoms and n < 1:
            raise UsageError("--n must be >= 1 for this command")
        if cmd == "spectrum" and spec.sites is None and n < 1:
            raise UsageError("--n must be >= 1 when sampling (use --sites '' for an empty lattice)")
    if cmd == "poisson-spectrum" and (spec.mean_n is None or spec.mean_n <= 0):
        raise UsageError("--mean-n > 0 is required")
    if cmd in ("omega-stats", "tdip") and spec.n_list is None:
        raise UsageError("--n-list is required")
    if cmd == "sweep" and (spec.omega_grid is None or spec.delta_max_grid is None):
        raise UsageError("--omega-grid and --delta-max-grid are required")
    if cmd in ("spectrum", "avg-spectrum", "poisson-spectrum", "g2", "g2-hist", "tdip") \
            and spec.params.omega > 0.05:
        raise UsageError("--omega must be <= 0.05 for weak-drive commands")
    for name in ("delta_grid", "omega_grid", "delta_max_grid", "V_list", "L_list"):
        if getattr(spec, name) is not None:
            parse_values(getattr(spec, name))
    for name in ("n_list", "m_list"):
        if getattr(spec, name) is not None:
            parse_values(getattr(spec, name), int)
    if spec.threads is not None and spec.threads < 1:
        raise UsageError("--threads must be >= 1")


_NEGATIVE = re.compile(r"^-(\d|\.\d|inf)")


def _attach_negative_values(argv):
    """Glue ``--flag -1:2:0.5`` into ``--flag=-1:2:0.5`` so ranges may start below zero."""
    out = []
    argv = list(argv)
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEGATIVE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def parse_args(argv) -> RunSpec:
    """Parse ``argv`` (without the program name) into a validated ``RunSpec``.

    Raises ``SystemExit`` with a message naming the offending flag on usage errors.
    """
    parser = build_parser()
    ns = parser.parse_args(_attach_negative_values(argv))
    given = {k: v for k, v in vars(ns).items() if v is not None and k != "action"}
    merged = dict(DEFAULTS)
    if ns.preset:
        preset = dict(PRESETS[ns.preset])
        if preset.pop("command") != ns.command:
            parser.error(f"--preset {ns.preset} belongs to command "
                         f"{PRESETS[ns.preset]['command']!r}, not {ns.command!r}")
        merged.update(preset)
    merged.update(given)
    if "out" not in merged:
        parser.error("--out is required")
    if merged.get("threads") is None and os.environ.get(THREADS_ENV):
        try:
            merged["threads"] = int(os.environ[THREADS_ENV])
        except ValueError:
            parser.error(f"{THREADS_ENV} must be an integer")
    try:
        params = ModelParams(**{PARAM_FLAGS[k]: merged.pop(k) for k in list(merged) if k in PARAM_FLAGS})
    except (TypeError, ValueError) as exc:
        parser.error(str(exc))
    fields = {f.name for f in dataclasses.fields(RunSpec)}
    unknown = set(merged) - fields
    if unknown:
        parser.error(f"unsupported options {sorted(unknown)}")
    merged["with_g2"] = bool(merged.get("with_g2"))
    merged["optimize"] = bool(merged.get("optimize"))
    merged["search"] = bool(merged.get("search"))
    spec = RunSpec(params=params, **merged)
    try:
        _validate(spec)
    except (UsageError, ValueError) as exc:
        parser.error(str(exc))
    return spec


# --------------------------------------------------------------- execution

def _config(spec: RunSpec, results: dict) -> AtomicConfiguration:
    if spec.sites is not None:
        config = AtomicConfiguration(spec.sites, spec.N)
    elif spec.search:
        found = search_configuration(spec.n, spec.N, spec.target, spec.trials, spec.seed,
                                     spec.params.kl_d)
        results["search"] = {"trial": found.trial, "distance": found.distance,
                             "overlap": found.overlap}
        config = found.config
    else:
        config = sample_configuration(spec.N, spec.n, spec.seed)
    results["sites"] = list(config.sites)
    return config


def _detuned(spec, config, params):
    if spec.delta_max is None:
        return params
    w = max_resonance(config, params.V, params.L_over_d).omega
    return params.replace(delta=w + spec.delta_max)


def _grid(text):
    return None if text is None else parse_values(text)


def _suffix(path, tag):
    root, ext = os.path.splitext(path)
    return f"{root}_{tag}{ext or '.csv'}"


def _run_spectrum(spec, results):
    config = _config(spec, results)
    s = transmission_spectrum(config, spec.params, _grid(spec.delta_grid))
    if spec.with_g2 and config.n:
        for direction, name in (("T", "g2T"), ("R", "g2R")):
            vals = []
            for d in s.detunings:
                try:
                    vals.append(g2_zero(config, spec.params.replace(delta=float(d)), direction))
                except UndefinedCorrelationError:
                    vals.append(math.nan)
            setattr(s, name, np.array(vals))
    io.write_spectrum(spec.out, s)


def _run_avg(spec, results):
    s = averaged_spectrum(spec.params, spec.n, spec.N, spec.samples, spec.seed,
                          _grid(spec.delta_grid), spec.threads)
    io.write_spectrum(spec.out, s)


def _run_poisson(spec, results):
    s = poisson_averaged_spectrum(spec.params, spec.mean_n, spec.N, spec.samples, spec.seed,
                                  _grid(spec.delta_grid), spec.threads)
    io.write_spectrum(spec.out, s)


def _run_g2(spec, results):
    config = _config(spec, results)
    params = spec.params
    if spec.resonance is not None:
        if not 1 <= spec.resonance <= config.n:
            raise UsageError("--resonance must lie in [1, n]")
        params = params.replace(delta=float(resonances(config, params.V, params.L_over_d)[spec.resonance - 1]))
    else:
        params = _detuned(spec, config, params)
    taus = parse_values(f"0:{spec.tau_max}:{spec.tau_step}")
    vals = g2_tau(config, params, spec.direction, taus)
    results["delta"] = params.delta
    io.write_csv(spec.out, ["tau", "g2"], [taus, vals])


def _run_g2_hist(spec, results):
    V_list = parse_values(spec.V_list) if spec.V_list else [spec.params.V]
    m_list = parse_values(spec.m_list, int)
    rows = []
    for m in m_list:
        hists = g2_histogram(spec.params, spec.n, spec.N, spec.samples, spec.seed, V_list,
                             int(m), spec.threads)
        for V, st in hists.items():
            rows.append((V, int(m), st))
    results["fraction_below_0.1"] = [{"V": V, "m": m, "fraction": st.fraction(0)} for V, m, st in rows]
    if len(rows) == 1:
        io.write_histogram(spec.out, rows[0][2])
        return
    cols = [[], [], [], [], []]
    for V, m, st in rows:
        k = st.bin_counts.size
        cols[0] += [V] * k
        cols[1] += [m] * k
        cols[2] += list(st.bin_edges[:-1])
        cols[3] += list(st.bin_edges[1:])
        cols[4] += [int(c) for c in st.bin_counts]
    io.write_csv(spec.out, ["V", "m", "bin_lo", "bin_hi", "count"], cols)


def _run_stats(spec, results):
    n_list = parse_values(spec.n_list, int)
    if spec.L_list:
        if n_list.size != 1:
            raise UsageError("--L-list needs a single value in --n-list")
        xs, stats = [], []
        for L in parse_values(spec.L_list):
            r = resonance_stats(spec.params.replace(L_over_d=float(L)), n_list, spec.N,
                                spec.samples, spec.seed, spec.observable, spec.threads)
            xs.append(L)
            stats.append(r.stats[0])
        io.write_stats(spec.out, xs, stats)
        return
    r = resonance_stats(spec.params, n_list, spec.N, spec.samples, spec.seed, spec.observable,
                        spec.threads)
    results["slope"] = r.slope
    results["intercept"] = r.intercept
    io.write_stats(spec.out, r.n_values, r.stats)


def _run_tdip(spec, results):
    n_list = parse_values(spec.n_list, int)
    d = tdip_curve(spec.params, n_list, spec.N, spec.samples, spec.seed, spec.threads)
    io.write_stats(spec.out, list(d), list(d.values()))


def _run_rabi(spec, results):
    config = _config(spec, results)
    params = _detuned(spec, config, spec.params)
    times = parse_values(f"0:{spec.t_max}:{spec.dt}")
    traj = evolve_master(config, params, times, spec.max_excitations)
    results["delta"] = params.delta
    io.write_trajectory(spec.out, traj.times, traj.populations)


def _run_sweep(spec, results):
    config = _config(spec, results)
    surf = sweep_p1(config, spec.params, parse_values(spec.omega_grid),
                    parse_values(spec.delta_max_grid), spec.max_excitations, spec.horizon)
    om, dm, val = surf.optimum
    results.update(omega_max=surf.omega_max, optimum={"omega": om, "delta_max": dm, "max_p1": val})
    io.write_surface(spec.out, surf)


def _effective_params(spec):
    n = len(spec.sites) if spec.sites is not None else spec.n
    p = spec.params
    return EffectiveNonlinearParams(n=n, N=spec.N, V=p.V, L_over_d=p.L_over_d,
                                    gamma_prime=p.gamma_prime, gamma_1d=p.gamma_1d, omega=p.omega,
                                    delta_max=spec.delta_max or 0.0)


def _run_effmodel(spec, results):
    base = _effective_params(spec)
    if spec.omega_grid or spec.delta_max_grid:
        oms = parse_values(spec.omega_grid) if spec.omega_grid else np.array([base.omega])
        dms = parse_values(spec.delta_max_grid) if spec.delta_max_grid else np.array([base.delta_max])
        vals = np.array([[effective_max_p1(base.replace(omega=float(o), delta_max=float(d)),
                                           spec.horizon) for d in dms] for o in oms])
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        results["optimum"] = {"omega": float(oms[i]), "delta_max": float(dms[j]),
                              "max_p1": float(vals[i, j])}
        om, dm = np.meshgrid(oms, dms, indexing="ij")
        io.write_csv(spec.out, ["omega", "delta_max", "max_p1"], [om.ravel(), dm.ravel(), vals.ravel()])
        return
    times = parse_values(f"0:{spec.t_max}:{spec.dt}")
    tr = nonlinear_effective_evolve(base, times)
    io.write_csv(spec.out, ["t", "p0", "p1", "p2"], [tr.times, tr.ground, tr.p1, tr.p2])


def _run_budget(spec, results):
    p = _effective_params(spec)
    if spec.optimize:
        om, _ = min_total_error(p)
        p = p.replace(omega=om)
    b = error_budget(p)
    rows = [("omega", p.omega), ("omega_n", p.omega_n), ("p2_estimate", b.p2_estimate),
            ("ensemble_single", b.ensemble_single), ("ensemble_double", b.ensemble_double),
            ("two_level_error", b.two_level_error), ("two_level_detuning", b.two_level_detuning),
            ("total", b.total)]
    results.update({k: v for k, v in rows})
    with open(spec.out, "w", newline="") as fh:
        fh.write("quantity,value\n")
        for k, v in rows:
            fh.write(f"{k},{io.fmt(v)}\n")


def _run_search(spec, results):
    found = search_configuration(spec.n, spec.N, spec.target, spec.trials, spec.seed,
                                 spec.params.kl_d)
    results.update(sites=list(found.config.sites), trial=found.trial, distance=found.distance,
                   overlap=found.overlap)
    with open(spec.out, "w", newline="") as fh:
        fh.write("trial,distance,overlap,sites\n")
        sites = " ".join(str(s) for s in found.config.sites)
        fh.write(f"{found.trial},{io.fmt(found.distance)},{io.fmt(found.overlap)},{sites}\n")


RUNNERS = {"spectrum": _run_spectrum, "avg-spectrum": _run_avg, "poisson-spectrum": _run_poisson,
           "g2": _run_g2, "g2-hist": _run_g2_hist, "omega-stats": _run_stats, "tdip": _run_tdip,
           "rabi": _run_rabi, "sweep": _run_sweep, "effmodel": _run_effmodel,
           "error-budget": _run_budget, "search-config": _run_search}


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def sidecar_path(out: str) -> str:
    return out + ".json"


def execute(spec: RunSpec) -> int:
    """Run ``spec``, write its CSV and sidecar, and return the exit status."""
    start = time.perf_counter()
    results = {}
    spec = dataclasses.replace(spec, threads=resolve_threads(spec.threads))
    try:
        RUNNERS[spec.command](spec, results)
    except (CapacityError, IntegrationError, SingularSystemError, UndefinedCorrelationError,
            UsageError, ValueError) as exc:
        print(f"bandgap-qed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"bandgap-qed: I/O error: {exc}", file=sys.stderr)
        return 3
    side = {"schema": SCHEMA, "version": __version__, "spec": spec.to_dict(),
            "wall_time": time.perf_counter() - start, "results": results}
    try:
        with open(sidecar_path(spec.out), "w") as fh:
            json.dump(_jsonable(side), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        print(f"bandgap-qed: I/O error: {exc}", file=sys.stderr)
        return 3
    return 0


def load_sidecar(path) -> RunSpec:
    with open(path) as fh:
        data = json.load(fh)
    if data.get("schema") != SCHEMA:
        raise ValueError(f"unsupported sidecar schema {data.get('schema')!r}")
    return RunSpec.from_dict(data["spec"])


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        spec = parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 2
        return exc.code if isinstance(exc.code, int) else 2
    return execute(spec)


if __name__ == "__main__":
    sys.exit(main())
