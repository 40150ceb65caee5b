"""Density-matrix propagation and time-maximum search shared by the full and reduced models.

The default propagator is an integrating-factor (Lawson) fourth-order Runge-Kutta
scheme: the non-Hermitian coherent part ``rho -> U rho U^dag`` is applied exactly
through matrix exponentials and only the recycling (jump) terms go through the
Runge-Kutta stages. Steps are error-controlled by step doubling with local
extrapolation, which keeps the trace within 1e-8 over typical windows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .core import IntegrationError

RTOL = 1e-9
ATOL = 1e-11
MAX_STEP = 0.01
RATE_TOL = 1e-6  # local error per unit time allowed before extrapolation
MAX_HALVINGS = 8
SUPEROP_MAX_DIM = 24  # up to this dimension steps use the exact superoperator exponential


class LindbladRHS:
    """``d rho/dt = -i(H rho - rho H^dag) + sum_k L_k rho L_k^dag`` with ``H`` non-Hermitian.

    Jumps come either as dense matrices or, for single-atom decay, as index maps
    ``(rate, src, dst)`` meaning ``rate * rho[src, src] -> drho[dst, dst]``.
    """

    def __init__(self, H, jumps=(), gathers=()):
        self.H = np.ascontiguousarray(H, dtype=np.complex128)
        self.Hd = self.H.conj().T.copy()
        self.dim = self.H.shape[0]
        self.jumps = [np.ascontiguousarray(J, dtype=np.complex128) for J in jumps]
        self.jumps_d = [J.conj().T.copy() for J in self.jumps]
        self.gathers = list(gathers)
        # sparse forms for the recycle term: jump operators stay matrices, the
        # single-atom maps are folded into one operator on the flattened rho
        self._sparse_jumps = [sp.csr_matrix(J) if np.count_nonzero(J) < 0.25 * J.size else J
                              for J in self.jumps]
        self._gather_op = None
        if self.gathers:
            rows, cols, vals = [], [], []
            d = self.dim
            for rate, src, dst in self.gathers:
                src = np.asarray(src, dtype=np.int64)
                dst = np.asarray(dst, dtype=np.int64)
                rows.append((dst[:, None] * d + dst[None, :]).ravel())
                cols.append((src[:, None] * d + src[None, :]).ravel())
                vals.append(np.full(src.size ** 2, float(rate)))
            self._gather_op = sp.csr_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(d * d, d * d))
        self._props = {}
        self._level = 0
        self._superop = None
        self._exact = {}

    def recycle(self, rho):
        if self._gather_op is not None:
            out = (self._gather_op @ rho.ravel()).reshape(self.dim, self.dim)
        else:
            out = np.zeros_like(rho)
        for J in self._sparse_jumps:
            x = J @ rho
            out += (J @ x.conj().T).conj().T
        return out

    def apply(self, rho):
        return -1j * (self.H @ rho - rho @ self.Hd) + self.recycle(rho)

    def __call__(self, t, y):
        return self.apply(y.reshape(self.dim, self.dim)).ravel()

    def _propagators(self, h):
        key = round(h, 12)
        if key not in self._props:
            full = sla.expm(-1j * h * self.H)
            half = sla.expm(-0.5j * h * self.H)
            self._props[key] = (full, full.conj().T.copy(), half, half.conj().T.copy())
        return self._props[key]

    def step(self, rho, h):
        """One Lawson-RK4 step of size ``h``.

        Only the half-step propagator is applied: ``U X U^dag = V (V X V^dag) V^dag``
        lets the stages share conjugations.
        """
        U, Ud, V, Vd = self._propagators(h)
        if not self.jumps and not self.gathers:
            return U @ rho @ Ud
        k1 = self.recycle(rho)
        a = V @ rho @ Vd
        b = V @ k1 @ Vd
        k2 = self.recycle(a + (0.5 * h) * b)
        k3 = self.recycle(a + (0.5 * h) * k2)
        k4 = self.recycle(V @ (a + h * k3) @ Vd)
        return V @ (a + (h / 6) * b + (h / 3) * (k2 + k3)) @ Vd + (h / 6) * k4

    def superoperator(self) -> np.ndarray:
        """Generator acting on the row-major flattening of ``rho``."""
        if self._superop is None:
            eye = np.eye(self.dim)
            L = -1j * (np.kron(self.H, eye) - np.kron(eye, self.Hd.T))
            for J in self.jumps:
                L += np.kron(J, J.conj())
            if self._gather_op is not None:
                L += self._gather_op.toarray()
            self._superop = L
        return self._superop

    def _exact_step(self, rho, span):
        key = round(span, 12)
        if key not in self._exact:
            self._exact[key] = sla.expm(span * self.superoperator())
        return (self._exact[key] @ rho.ravel()).reshape(self.dim, self.dim)

    def advance(self, rho, span, max_step=MAX_STEP, rate_tol=RATE_TOL):
        """Propagate over ``span`` with error-controlled Lawson steps.

        Each sub-step is taken once with ``h`` and twice with ``h/2``; the difference
        estimates the local error and the Richardson combination of the two is kept.
        Step lengths come from the ladder ``max_step / 2**k``; the level adapts up
        and down and persists between calls. Small systems skip all of this and
        use the exact propagator ``exp(span * L)``.
        """
        if span <= 0:
            return rho
        if self.dim <= SUPEROP_MAX_DIM:
            return self._exact_step(rho, span)
        if not self.jumps and not self.gathers:
            sub = max(1, math.ceil(span / max_step - 1e-9))
            for _ in range(sub):
                rho = self.step(rho, span / sub)
            return rho
        done = 0.0
        while span - done > 1e-12 * span:
            remaining = span - done
            # substeps of span / ceil(span / target), so lengths repeat and propagators are reused
            nominal = span / max(1, math.ceil(span * 2 ** self._level / max_step - 1e-9))
            h = remaining / max(1, round(remaining / nominal))
            coarse = self.step(rho, h)
            fine = self.step(self.step(rho, 0.5 * h), 0.5 * h)
            diff = fine - coarse
            err = float(np.max(np.abs(diff)))
            if err > rate_tol * h and self._level < MAX_HALVINGS:
                self._level += 1
                continue
            rho = fine + diff / 15.0
            done += h
            if err < rate_tol * h / 64 and self._level > 0:
                self._level -= 1
        return rho


def ground_state_density(dim: int) -> np.ndarray:
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[0, 0] = 1.0
    return rho


def _check(rho):
    if not np.all(np.isfinite(rho)):
        raise IntegrationError("non-finite density matrix during propagation")


def integrate(rhs: LindbladRHS, rho0, t_grid, method="lawson", max_step=MAX_STEP,
              rtol=RTOL, atol=ATOL):
    """Density matrices at ``t_grid`` (first entry is the initial time).

    ``method="dop853"`` uses an adaptive explicit integrator instead, mostly as a cross-check.
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a non-empty 1-d array")
    if np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be non-decreasing")
    rho = np.asarray(rho0, dtype=np.complex128).reshape(rhs.dim, rhs.dim).copy()
    if method == "dop853":
        if t_grid[-1] == t_grid[0]:
            return np.repeat(rho[None], t_grid.size, axis=0)
        sol = solve_ivp(rhs, (t_grid[0], t_grid[-1]), rho.ravel(), method="DOP853",
                        t_eval=t_grid, rtol=rtol, atol=atol)
        if not sol.success:
            raise IntegrationError(sol.message)
        return sol.y.T.reshape(-1, rhs.dim, rhs.dim)
    if method != "lawson":
        raise ValueError(f"unknown method {method!r}")
    out = np.empty((t_grid.size, rhs.dim, rhs.dim), dtype=np.complex128)
    out[0] = rho
    for i in range(1, t_grid.size):
        span = t_grid[i] - t_grid[i - 1]
        if span > 0:
            rho = rhs.advance(rho, span, max_step)
            _check(rho)
        out[i] = rho
    return out


@dataclass(frozen=True)
class TimeMaximum:
    time: float
    value: float
    rho: np.ndarray
    stopped_early: bool


def time_maximum(rhs: LindbladRHS, rho0, weights, horizon=20.0, dt=MAX_STEP, patience=2.0,
                 candidates=3, refine=10) -> TimeMaximum:
    """Largest value in time of ``sum(weights * diag(rho))`` on ``[0, horizon]``.

    The observable is sampled every ``dt``. The search stops once the running
    maximum has not improved for ``patience`` time units (``None`` disables
    this). The best ``candidates`` sampled local maxima are then re-propagated
    with ``refine`` sub-steps per sample and the peak read off a parabola
    through the finest samples.
    """
    if horizon < 0 or dt <= 0:
        raise ValueError("need horizon >= 0 and dt > 0")
    w = np.asarray(weights, dtype=np.float64)
    rho = np.asarray(rho0, dtype=np.complex128).reshape(rhs.dim, rhs.dim).copy()

    def obs(r):
        return float(np.real(np.diagonal(r)) @ w)

    steps = int(math.ceil(horizon / dt - 1e-9))
    prev2 = prev1 = None  # (k, value, rho) for samples k-2 and k-1
    cur = (0, obs(rho), rho)
    peaks = []  # (value, k, rho at k-1)
    best_k, best_v = 0, cur[1]
    stopped = False
    for k in range(1, steps + 1):
        prev2, prev1 = prev1, cur
        rho = rhs.advance(rho, dt)
        _check(rho)
        cur = (k, obs(rho), rho)
        if prev2 is not None and prev1[1] >= prev2[1] and prev1[1] > cur[1]:
            peaks.append((prev1[1], prev1[0], prev2[2]))
            peaks.sort(key=lambda p: -p[0])
            del peaks[candidates:]
        if cur[1] > best_v:
            best_k, best_v = k, cur[1]
        if patience is not None and (k - best_k) * dt >= patience:
            stopped = True
            break
    if not peaks or cur[1] >= peaks[0][0]:
        # monotone rise up to the end of the window: the last sample is the maximum
        return TimeMaximum(cur[0] * dt, cur[1], cur[2], stopped)

    best = None
    h = dt / refine
    for _, k, start in peaks:
        r = start
        ts, vs, rs = [], [], []
        for i in range(2 * refine + 1):
            if i:
                r = rhs.advance(r, h)
            ts.append((k - 1) * dt + i * h)
            vs.append(obs(r))
            rs.append(r)
        i = int(np.argmax(vs))
        t_pk, v_pk = ts[i], vs[i]
        if 0 < i < len(vs) - 1:
            y0, y1, y2 = vs[i - 1], vs[i], vs[i + 1]
            den = y0 - 2 * y1 + y2
            if den < 0:
                off = 0.5 * (y0 - y2) / den
                t_pk = ts[i] + off * h
                v_pk = y1 - 0.25 * (y0 - y2) * off
        if best is None or v_pk > best.value:
            best = TimeMaximum(t_pk, v_pk, rs[i], stopped)
    return best


def maximize_on_grid(f, grid, xatol=1e-3):
    """Maximize a scalar function: best grid point, then bounded refinement between its neighbours."""
    grid = np.asarray(grid, dtype=np.float64)
    vals = np.array([f(float(x)) for x in grid])
    k = int(np.argmax(vals))
    best_x, best_v = float(grid[k]), float(vals[k])
    if grid.size >= 2:
        lo = grid[max(k - 1, 0)]
        hi = grid[min(k + 1, grid.size - 1)]
        res = minimize_scalar(lambda x: -f(float(x)), bounds=(lo, hi), method="bounded",
                              options={"xatol": xatol})
        if -res.fun > best_v:
            best_x, best_v = float(res.x), float(-res.fun)
    return best_x, best_v
