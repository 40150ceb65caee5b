# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Semantics mirror ``_kernels_py`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, INFINITY, NAN
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double TO_UNIT = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t key, uint64_t i) nogil:
    return <double>(_mix(key + (i + 1) * GOLDEN) >> 11) * TO_UNIT


def uniforms(seeds, Py_ssize_t count):
    cdef const uint64_t[::1] s = np.ascontiguousarray(seeds, dtype=np.uint64)
    cdef Py_ssize_t B = s.shape[0], b, i
    out = np.empty((B, count), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef uint64_t key
    with nogil:
        for b in range(B):
            key = _mix(s[b])
            for i in range(count):
                o[b, i] = _uniform(key, i)
    return out


cdef void _insertion_sort(int64_t* a, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, j
    cdef int64_t x
    for i in range(1, n):
        x = a[i]
        j = i - 1
        while j >= 0 and a[j] > x:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = x


cdef void _draw(uint64_t seed, Py_ssize_t N, Py_ssize_t n, int64_t* work, int64_t* dst) nogil:
    cdef uint64_t key = _mix(seed)
    cdef Py_ssize_t i, j, r
    cdef int64_t t
    for i in range(N):
        work[i] = i
    for i in range(n):
        r = <Py_ssize_t>(_uniform(key, i) * <double>(N - i))
        if r > N - i - 1:
            r = N - i - 1
        j = i + r
        t = work[i]
        work[i] = work[j]
        work[j] = t
    for i in range(n):
        dst[i] = work[i]
    _insertion_sort(dst, n)


def sample_sites(Py_ssize_t N, Py_ssize_t n, seeds):
    cdef const uint64_t[::1] s = np.ascontiguousarray(seeds, dtype=np.uint64)
    cdef Py_ssize_t B = s.shape[0], b
    out = np.empty((B, n), dtype=np.int64)
    cdef int64_t[:, ::1] o = out
    cdef int64_t[::1] work = np.empty(max(N, 1), dtype=np.int64)
    if n == 0:
        return out
    with nogil:
        for b in range(B):
            _draw(s[b], N, n, &work[0], &o[b, 0])
    return out


def search_overlap(Py_ssize_t N, Py_ssize_t n, seed0, Py_ssize_t trials,
                   cos_table, sin_table, double target):
    cdef const double[::1] ct = np.ascontiguousarray(cos_table, dtype=np.float64)
    cdef const double[::1] st = np.ascontiguousarray(sin_table, dtype=np.float64)
    cdef uint64_t base = <uint64_t>(int(seed0) % (1 << 64))
    cdef int64_t[::1] work = np.empty(max(N, 1), dtype=np.int64)
    cdef int64_t[::1] sites = np.empty(max(n, 1), dtype=np.int64)
    cdef Py_ssize_t t, j, best_t = -1
    cdef double re, im, sg, mag, dist, best_d = INFINITY, best_m = NAN
    with nogil:
        for t in range(trials):
            _draw(base + <uint64_t>t, N, n, &work[0], &sites[0])
            re = 0.0
            im = 0.0
            for j in range(n):
                sg = 1.0 - 2.0 * <double>(sites[j] & 1)
                re = re + ct[sites[j]] * sg
                im = im + st[sites[j]] * sg
            mag = sqrt(re * re + im * im) / <double>n
            dist = fabs(target - mag)
            if dist < best_d:
                best_d = dist
                best_m = mag
                best_t = t
    return best_t, best_d, best_m


cdef class _Lookup:
    cdef int64_t[::1] sorted_masks
    cdef int64_t[::1] order
    cdef Py_ssize_t size

    def __init__(self, const int64_t[::1] masks):
        order = np.argsort(np.asarray(masks), kind="stable").astype(np.int64)
        self.order = order
        self.sorted_masks = np.asarray(masks)[order]
        self.size = masks.shape[0]

    cdef inline Py_ssize_t find(self, int64_t target) nogil:
        cdef Py_ssize_t lo = 0, hi = self.size, mid
        while lo < hi:
            mid = (lo + hi) >> 1
            if self.sorted_masks[mid] < target:
                lo = mid + 1
            else:
                hi = mid
        if lo < self.size and self.sorted_masks[lo] == target:
            return self.order[lo]
        return -1


def hopping_matrix(masks, K):
    cdef const int64_t[::1] m = np.ascontiguousarray(masks, dtype=np.int64)
    cdef const double complex[:, ::1] k = np.ascontiguousarray(K, dtype=np.complex128)
    cdef Py_ssize_t dim = m.shape[0], n = k.shape[0], s, a, b, t
    out = np.zeros((dim, dim), dtype=np.complex128)
    if dim == 0:
        return out
    cdef double complex[:, ::1] H = out
    cdef _Lookup lk = _Lookup(m)
    cdef int64_t ms, ba, bb
    with nogil:
        for s in range(dim):
            ms = m[s]
            for b in range(n):
                bb = (<int64_t>1) << b
                if not (ms & bb):
                    continue
                H[s, s] = H[s, s] + k[b, b]
                for a in range(n):
                    ba = (<int64_t>1) << a
                    if ms & ba:
                        continue
                    t = lk.find((ms ^ bb) | ba)
                    if t >= 0:
                        H[t, s] = H[t, s] + k[a, b]
    return out


def raising_matrix(masks, coeffs):
    cdef const int64_t[::1] m = np.ascontiguousarray(masks, dtype=np.int64)
    cdef const double complex[::1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef Py_ssize_t dim = m.shape[0], n = c.shape[0], s, a, t
    out = np.zeros((dim, dim), dtype=np.complex128)
    if dim == 0:
        return out
    cdef double complex[:, ::1] H = out
    cdef _Lookup lk = _Lookup(m)
    cdef int64_t ba
    with nogil:
        for s in range(dim):
            for a in range(n):
                ba = (<int64_t>1) << a
                if m[s] & ba:
                    continue
                t = lk.find(m[s] | ba)
                if t >= 0:
                    H[t, s] = H[t, s] + c[a]
    return out
