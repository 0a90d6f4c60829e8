# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled splitting hot loop with an in-place radix-2 FFT.

Same contract as ``_pykernels.run_stages``. Grids whose size is not a power
of two are delegated to the numpy implementation.
"""
import numpy as np

from libc.math cimport cos, sin, M_PI

from . import _pykernels

cdef int FREE = 0
cdef int POTENTIAL = 1


cdef void _fft(double complex* x, Py_ssize_t n, const Py_ssize_t* rev,
               const double complex* tw) noexcept nogil:
    cdef Py_ssize_t i, j, k, half, step, size
    cdef double complex t, w
    for i in range(n):
        j = rev[i]
        if j > i:
            t = x[i]
            x[i] = x[j]
            x[j] = t
    size = 2
    while size <= n:
        half = size >> 1
        step = n // size
        i = 0
        while i < n:
            for k in range(half):
                w = tw[k * step]
                t = w * x[i + k + half]
                x[i + k + half] = x[i + k] - t
                x[i + k] = x[i + k] + t
            i += size
        size <<= 1


cdef void _to_spectral(double complex* a, double complex* b, Py_ssize_t n,
                       const Py_ssize_t* rev, const double complex* tw) noexcept nogil:
    cdef Py_ssize_t i
    cdef double scale = 1.0 / n
    _fft(a, n, rev, tw)
    _fft(b, n, rev, tw)
    for i in range(n):
        a[i] = a[i] * scale
        b[i] = b[i] * scale


cdef void _to_physical(double complex* a, double complex* b, Py_ssize_t n,
                       const Py_ssize_t* rev, const double complex* itw) noexcept nogil:
    _fft(a, n, rev, itw)
    _fft(b, n, rev, itw)


def _is_pow2(Py_ssize_t n):
    return n > 0 and (n & (n - 1)) == 0


def run_stages(u, kinds, tables, n_steps):
    """Apply ``n_steps`` repetitions of a stage sequence to ``u``."""
    cdef Py_ssize_t n = u.shape[1]
    if not _is_pow2(n):
        return _pykernels.run_stages(u, kinds, tables, n_steps)

    cdef double complex[:, ::1] v = np.array(u, dtype=np.complex128, order="C", copy=True)
    cdef long long[::1] kind = np.ascontiguousarray(kinds, dtype=np.int64)
    cdef double complex[:, :, ::1] tab = np.ascontiguousarray(tables, dtype=np.complex128)
    cdef Py_ssize_t n_stages = kind.shape[0]
    cdef long long steps = n_steps

    cdef Py_ssize_t[::1] rev = np.empty(n, dtype=np.intp)
    cdef double complex[::1] tw = np.empty(max(n // 2, 1), dtype=np.complex128)
    cdef double complex[::1] itw = np.empty(max(n // 2, 1), dtype=np.complex128)
    cdef Py_ssize_t i, s, bits = 0, r, m
    cdef long long it
    cdef bint spectral
    cdef double complex a, b, t0, t1, t2

    while (1 << bits) < n:
        bits += 1
    for i in range(n):
        r = 0
        m = i
        for s in range(bits):
            r = (r << 1) | (m & 1)
            m >>= 1
        rev[i] = r
    for i in range(n // 2):
        tw[i] = cos(2.0 * M_PI * i / n) - 1j * sin(2.0 * M_PI * i / n)
        itw[i] = tw[i].conjugate()

    cdef double complex* p0 = &v[0, 0]
    cdef double complex* p1 = &v[1, 0]

    with nogil:
        for it in range(steps):
            spectral = False
            for s in range(n_stages):
                if kind[s] == FREE and not spectral:
                    _to_spectral(p0, p1, n, &rev[0], &tw[0])
                    spectral = True
                elif kind[s] == POTENTIAL and spectral:
                    _to_physical(p0, p1, n, &rev[0], &itw[0])
                    spectral = False
                for i in range(n):
                    t0 = tab[s, 0, i]
                    t1 = tab[s, 1, i]
                    t2 = tab[s, 2, i]
                    a = p0[i]
                    b = p1[i]
                    p0[i] = t0 * a + t1 * b
                    p1[i] = t1 * a + t2 * b
            if spectral:
                _to_physical(p0, p1, n, &rev[0], &itw[0])
    return np.asarray(v)
