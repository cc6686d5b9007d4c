# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  See ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

ctypedef double complex cplx


cdef inline double abs2(cplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline cplx conj(cplx z) noexcept nogil:
    return z.real - 1j * z.imag


def collide_rows(double[:, ::1] pop, cplx[:, ::1] coh, int new_bit, blocks):
    cdef Py_ssize_t k = pop.shape[0]
    cdef Py_ssize_t r
    cdef cplx s11, s12, s21, s22, d11, d12, d21, d22
    s11, s12, s21, s22, d11, d12, d21, d22 = [complex(blk) for blk in blocks]
    pab_arr = np.empty((k, 4))
    pac_arr = np.empty((k, 4))
    cab_arr = np.zeros((k, 4), dtype=complex)
    cac_arr = np.zeros((k, 4), dtype=complex)
    cdef double[:, ::1] pab = pab_arr
    cdef double[:, ::1] pac = pac_arr
    cdef cplx[:, ::1] cab = cab_arr
    cdef cplx[:, ::1] cac = cac_arr
    cdef double a, b, c, d, p1, p2, p3, p4
    cdef cplx z23, z14, z24, z34
    cdef cplx ab23, ab14, ac23, ac14, ab34, ac34
    if new_bit == 0:
        a = abs2(s11); b = abs2(d12); c = abs2(s21); d = abs2(d22)
        ab23 = d22 * conj(s11); ab14 = s21 * conj(d12)
        ac23 = d22 * conj(s21); ac14 = s11 * conj(d12)
        ab34 = s11 * conj(d22); ac34 = s21 * conj(d22)
        with nogil:
            for r in range(k):
                p1 = pop[r, 0]; p2 = pop[r, 1]; p3 = pop[r, 2]; p4 = pop[r, 3]
                z23 = coh[r, 0]; z14 = coh[r, 1]; z24 = coh[r, 2]; z34 = coh[r, 3]
                pab[r, 0] = a * p1 + b * p2
                pab[r, 1] = c * p1 + d * p2
                pab[r, 2] = a * p3 + b * p4
                pab[r, 3] = c * p3 + d * p4
                pac[r, 0] = c * p1 + b * p2
                pac[r, 1] = a * p1 + d * p2
                pac[r, 2] = c * p3 + b * p4
                pac[r, 3] = a * p3 + d * p4
                cab[r, 0] = ab23 * z23 + ab14 * z14
                cab[r, 1] = ab34 * z14 + d12 * conj(s21) * z23
                cab[r, 2] = d * z24
                cab[r, 3] = ab34 * z34 + d12 * conj(s21) * conj(z34)
                cac[r, 0] = ac14 * z14 + ac23 * z23
                cac[r, 1] = ac34 * z14 + d12 * conj(s11) * z23
                cac[r, 2] = d * z24
                cac[r, 3] = ac34 * z34 + d12 * conj(s11) * conj(z34)
    else:
        a = abs2(d11); b = abs2(s12); c = abs2(d21); d = abs2(s22)
        with nogil:
            for r in range(k):
                p1 = pop[r, 0]; p2 = pop[r, 1]; p3 = pop[r, 2]; p4 = pop[r, 3]
                z23 = coh[r, 0]; z14 = coh[r, 1]
                pab[r, 0] = a * p1 + b * p2
                pab[r, 1] = c * p1 + d * p2
                pab[r, 2] = a * p3 + b * p4
                pab[r, 3] = c * p3 + d * p4
                pac[r, 0] = a * p1 + d * p2
                pac[r, 1] = c * p1 + b * p2
                pac[r, 2] = a * p3 + d * p4
                pac[r, 3] = c * p3 + b * p4
                cab[r, 0] = s22 * conj(d11) * z23 + d21 * conj(s12) * z14
                cab[r, 1] = d11 * conj(s22) * z14 + s12 * conj(d21) * z23
                cac[r, 0] = d21 * conj(s22) * z14 + s12 * conj(d11) * z23
                cac[r, 1] = d11 * conj(s12) * z14 + s22 * conj(d21) * z23
    return pab_arr, cab_arr, pac_arr, cac_arr


def wlike_sweep(cplx[::1] amps, const long long[::1] k1, const long long[::1] k2,
                const double[::1] phase):
    cdef Py_ssize_t e, m = k1.shape[0]
    cdef Py_ssize_t n = amps.shape[0]
    cdef Py_ssize_t i, j
    cdef double c, s
    cdef cplx x, y
    for e in range(m):
        if k1[e] < 0 or k1[e] >= n or k2[e] < 0 or k2[e] >= n:
            raise IndexError(f"event {e} references a qubit outside 0..{n - 1}")
    with nogil:
        for e in range(m):
            i = k1[e]
            j = k2[e]
            c = cos(phase[e])
            s = sin(phase[e])
            x = amps[i]
            y = amps[j]
            amps[i] = c * x - 1j * s * y
            amps[j] = c * y - 1j * s * x
