# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled amplitude kernels (hot-path backend).

Mirrors `_kernels_np` function for function; all operations are in place on
C-contiguous complex128 buffers. Masks arrive as bool arrays and are
reinterpreted as uint8 without copying.
"""

from libc.math cimport cos, sin, sqrt

import numpy as np

name = "cython"

cdef double SQRT_HALF = sqrt(0.5)


def phase_flip(double complex[::1] amps, mask):
    cdef const unsigned char[::1] m = mask.view(np.uint8)
    cdef Py_ssize_t i, n = amps.shape[0]
    for i in range(n):
        if m[i]:
            amps[i] = -amps[i]


def invert_about_mean(double complex[::1] amps):
    cdef Py_ssize_t i, n = amps.shape[0]
    cdef double complex s = 0
    for i in range(n):
        s = s + amps[i]
    cdef double complex m2 = 2.0 * s / n
    for i in range(n):
        amps[i] = m2 - amps[i]


def grover_step(double complex[::1] amps, mask):
    # Fused phase oracle + inversion about the mean: one read pass, one
    # write pass.
    cdef const unsigned char[::1] m = mask.view(np.uint8)
    cdef Py_ssize_t i, n = amps.shape[0]
    cdef double complex s = 0
    for i in range(n):
        if m[i]:
            s = s - amps[i]
        else:
            s = s + amps[i]
    cdef double complex m2 = 2.0 * s / n
    for i in range(n):
        if m[i]:
            amps[i] = m2 + amps[i]
        else:
            amps[i] = m2 - amps[i]


def marked_mass(double complex[::1] amps, mask):
    cdef const unsigned char[::1] m = mask.view(np.uint8)
    cdef Py_ssize_t i, n = amps.shape[0]
    cdef double s = 0
    cdef double re, im
    for i in range(n):
        if m[i]:
            re = amps[i].real
            im = amps[i].imag
            s += re * re + im * im
    return s


def hadamard(double complex[::1] amps, int q):
    cdef Py_ssize_t step = (<Py_ssize_t>1) << q
    cdef Py_ssize_t n = amps.shape[0]
    cdef Py_ssize_t base, j
    cdef double complex a, b
    for base in range(0, n, 2 * step):
        for j in range(base, base + step):
            a = amps[j]
            b = amps[j + step]
            amps[j] = (a + b) * SQRT_HALF
            amps[j + step] = (a - b) * SQRT_HALF


def cphase(double complex[::1] amps, int q1, int q2, double angle):
    cdef int lo = q1 if q1 < q2 else q2
    cdef int hi = q2 if q1 < q2 else q1
    cdef Py_ssize_t slo = (<Py_ssize_t>1) << lo
    cdef Py_ssize_t shi = (<Py_ssize_t>1) << hi
    cdef Py_ssize_t n = amps.shape[0]
    cdef double complex ph = cos(angle) + 1j * sin(angle)
    cdef Py_ssize_t a, b, c
    for a in range(shi, n, 2 * shi):
        for b in range(a + slo, a + shi, 2 * slo):
            for c in range(b, b + slo):
                amps[c] = amps[c] * ph


def swap(double complex[::1] amps, int q1, int q2):
    if q1 == q2:
        return
    cdef int lo = q1 if q1 < q2 else q2
    cdef int hi = q2 if q1 < q2 else q1
    cdef Py_ssize_t slo = (<Py_ssize_t>1) << lo
    cdef Py_ssize_t shi = (<Py_ssize_t>1) << hi
    cdef Py_ssize_t n = amps.shape[0]
    cdef Py_ssize_t xm = shi | slo
    cdef Py_ssize_t a, b, c, j
    cdef double complex tmp
    # indices with hi bit 0 and lo bit 1; partner has the bits exchanged
    for a in range(0, n, 2 * shi):
        for b in range(a + slo, a + shi, 2 * slo):
            for c in range(b, b + slo):
                j = c ^ xm
                tmp = amps[c]
                amps[c] = amps[j]
                amps[j] = tmp
