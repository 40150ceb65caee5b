"""Pure numpy implementation of the hot kernels.

Every function here has a twin in ``_kernels.pyx`` with identical semantics and
bitwise-identical output; :mod:`bandgap_qed.kernels` picks one at import time.
"""
import numpy as np

_U = np.uint64
GOLDEN = _U(0x9E3779B97F4A7C15)
_M1 = _U(0xBF58476D1CE4E5B9)
_M2 = _U(0x94D049BB133111EB)
_TO_UNIT = 2.0 ** -53

# rows per vectorized chunk in the batched samplers
_CHUNK = 1 << 15


def _mix(z):
    z = (z ^ (z >> _U(30))) * _M1
    z = (z ^ (z >> _U(27))) * _M2
    return z ^ (z >> _U(31))


def uniforms(seeds, count):
    """Counter-based uniforms in [0, 1): row ``b`` holds draws ``0..count-1`` of stream ``seeds[b]``."""
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    key = _mix(seeds.copy())[:, None]
    ctr = np.arange(1, count + 1, dtype=np.uint64)[None, :]
    with np.errstate(over="ignore"):
        z = _mix(key + ctr * GOLDEN)
    return (z >> _U(11)).astype(np.float64) * _TO_UNIT


def sample_sites(N, n, seeds):
    """Partial Fisher-Yates draw of ``n`` distinct sites from ``range(N)`` per seed; rows sorted."""
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    out = np.empty((seeds.size, n), dtype=np.int64)
    span = np.arange(N, 0, -1, dtype=np.float64)[:n]
    for lo in range(0, seeds.size, _CHUNK):
        chunk = seeds[lo:lo + _CHUNK]
        B = chunk.size
        u = uniforms(chunk, n)
        arr = np.broadcast_to(np.arange(N, dtype=np.int64), (B, N)).copy()
        rows = np.arange(B)
        for i in range(n):
            j = i + np.minimum((u[:, i] * span[i]).astype(np.int64), N - i - 1)
            a = arr[rows, i].copy()
            arr[rows, i] = arr[rows, j]
            arr[rows, j] = a
        out[lo:lo + B] = np.sort(arr[:, :n], axis=1)
    return out


def search_overlap(N, n, seed0, trials, cos_table, sin_table, target):
    """Scan ``trials`` streams ``seed0 + t`` for the configuration whose analytic
    maximum-resonance overlap magnitude is closest to ``target``.

    ``cos_table[s]``/``sin_table[s]`` hold the drive phase of site ``s``.
    Returns ``(best_trial, best_distance, best_magnitude)``; ties keep the lowest trial.
    """
    cos_table = np.asarray(cos_table, dtype=np.float64)
    sin_table = np.asarray(sin_table, dtype=np.float64)
    best = (-1, np.inf, np.nan)
    base = _U(seed0 % (1 << 64))
    for lo in range(0, trials, _CHUNK):
        B = min(_CHUNK, trials - lo)
        with np.errstate(over="ignore"):
            seeds = base + np.arange(lo, lo + B, dtype=np.uint64)
        sites = sample_sites(N, n, seeds)
        sign = 1.0 - 2.0 * (sites & 1).astype(np.float64)
        re = np.zeros(B)
        im = np.zeros(B)
        for j in range(n):
            re += cos_table[sites[:, j]] * sign[:, j]
            im += sin_table[sites[:, j]] * sign[:, j]
        mag = np.sqrt(re * re + im * im) / n
        dist = np.abs(target - mag)
        k = int(np.argmin(dist))
        if dist[k] < best[1]:
            best = (lo + k, float(dist[k]), float(mag[k]))
    return best


def _lookup(masks):
    order = np.argsort(masks, kind="stable")
    return masks[order], order


def _find(sorted_masks, order, targets):
    pos = np.searchsorted(sorted_masks, targets)
    pos = np.minimum(pos, sorted_masks.size - 1)
    found = sorted_masks[pos] == targets
    return order[pos], found


def hopping_matrix(masks, K):
    """Matrix of ``sum_jk K[j, k] sigma_eg^j sigma_ge^k`` over the basis states ``masks``."""
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    K = np.asarray(K, dtype=np.complex128)
    n = K.shape[0]
    dim = masks.size
    H = np.zeros((dim, dim), dtype=np.complex128)
    if dim == 0:
        return H
    sm, order = _lookup(masks)
    cols = np.arange(dim)
    for k in range(n):
        bk = np.int64(1) << k
        has_k = (masks & bk) != 0
        H[cols[has_k], cols[has_k]] += K[k, k]
        for j in range(n):
            if j == k:
                continue
            bj = np.int64(1) << j
            sel = has_k & ((masks & bj) == 0)
            if not sel.any():
                continue
            src = cols[sel]
            tgt, found = _find(sm, order, (masks[sel] ^ bk) | bj)
            H[tgt[found], src[found]] += K[j, k]
    return H


def raising_matrix(masks, coeffs):
    """Matrix of ``sum_j coeffs[j] sigma_eg^j`` restricted to the basis ``masks``."""
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    dim = masks.size
    H = np.zeros((dim, dim), dtype=np.complex128)
    if dim == 0:
        return H
    sm, order = _lookup(masks)
    cols = np.arange(dim)
    for j in range(coeffs.size):
        bj = np.int64(1) << j
        sel = (masks & bj) == 0
        if not sel.any():
            continue
        src = cols[sel]
        tgt, found = _find(sm, order, masks[sel] | bj)
        H[tgt[found], src[found]] += coeffs[j]
    return H
