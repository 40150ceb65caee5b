"""CSV artifacts (12 significant digits, LF line endings) and the debug matrix dump."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

DIGITS = 12


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.{DIGITS}g}"


def write_csv(path, header, columns):
    """Write equal-length ``columns`` under ``header``."""
    columns = [np.asarray(c) for c in columns]
    if len(header) != len(columns):
        raise ValueError("header and columns differ in length")
    rows = len(columns[0]) if columns else 0
    if any(len(c) != rows for c in columns):
        raise ValueError("columns differ in length")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(rows):
            w.writerow([fmt(c[i]) for c in columns])


def read_csv(path):
    """Return ``(header, float array of shape (rows, cols))``."""
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = [[float(v) for v in row] for row in r]
    return header, np.array(data, dtype=np.float64).reshape(-1, len(header))


def write_spectrum(path, spectrum):
    cols = spectrum.columns()
    if spectrum.T_std is not None:
        cols["T_std"] = spectrum.T_std
    write_csv(path, list(cols), list(cols.values()))


def write_surface(path, surface):
    om, dm = np.meshgrid(surface.omegas, surface.delta_maxs, indexing="ij")
    write_csv(path, ["omega", "delta_max", "max_p1"],
              [om.ravel(), dm.ravel(), np.asarray(surface.values).ravel()])


def write_trajectory(path, times, populations):
    pops = np.asarray(populations)
    header = ["t"] + [f"p{m}" for m in range(pops.shape[1])]
    write_csv(path, header, [times] + [pops[:, m] for m in range(pops.shape[1])])


def write_stats(path, xs, stats):
    write_csv(path, ["x", "mean", "std", "count"],
              [list(xs), [s.mean for s in stats], [s.std for s in stats],
               [int(s.count) for s in stats]])


def write_histogram(path, stats):
    edges = stats.bin_edges
    write_csv(path, ["bin_lo", "bin_hi", "count"],
              [edges[:-1], edges[1:], [int(c) for c in stats.bin_counts]])


def dump_matrix(prefix, op) -> tuple[Path, Path]:
    """Write ``prefix.bin`` (column-major complex128) and ``prefix.json`` (header)."""
    prefix = Path(prefix)
    dense = np.asarray(op.dense(), dtype=np.complex128)
    basis = op.basis
    bin_path = prefix.with_suffix(".bin")
    json_path = prefix.with_suffix(".json")
    bin_path.write_bytes(np.asfortranarray(dense).tobytes(order="F"))
    header = {"dim": int(dense.shape[0]), "dtype": "complex128", "order": "column-major",
              "basis": {"n_atoms": basis.n_atoms, "max_excitations": basis.max_excitations,
                        "ordering": "excitation number, then lexicographic"}}
    json_path.write_text(json.dumps(header, indent=2) + "\n")
    return bin_path, json_path


def load_matrix(prefix) -> np.ndarray:
    prefix = Path(prefix)
    header = json.loads(prefix.with_suffix(".json").read_text())
    dim = header["dim"]
    raw = np.frombuffer(prefix.with_suffix(".bin").read_bytes(), dtype=np.complex128)
    return raw.reshape((dim, dim), order="F")
