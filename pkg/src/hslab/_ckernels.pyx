# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Riccati kernel; mirrors hslab._kernels_py.riccati_integrate."""

import numpy as np
from libc.math cimport fabs, pow, isfinite

cdef enum:
    OK = 0
    BLOWUP = 1
    UNDERFLOW = 2


cdef inline void _rhs(const double[:, ::1] A, const double[:, ::1] K,
                      double[:, ::1] out, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t i, j, l
    cdef double s
    for i in range(d):
        for j in range(d):
            s = K[i, j]
            for l in range(d):
                s += A[i, l] * A[l, j]
            out[i, j] = s


cdef void _rk4(const double[:, ::1] A, const double[:, ::1] K, double h,
               double[:, ::1] out, double[:, ::1] k1, double[:, ::1] k2,
               double[:, ::1] k3, double[:, ::1] k4, double[:, ::1] B,
               Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t i, j
    _rhs(A, K, k1, d)
    for i in range(d):
        for j in range(d):
            B[i, j] = A[i, j] + 0.5 * h * k1[i, j]
    _rhs(B, K, k2, d)
    for i in range(d):
        for j in range(d):
            B[i, j] = A[i, j] + 0.5 * h * k2[i, j]
    _rhs(B, K, k3, d)
    for i in range(d):
        for j in range(d):
            B[i, j] = A[i, j] + h * k3[i, j]
    _rhs(B, K, k4, d)
    for i in range(d):
        for j in range(d):
            out[i, j] = A[i, j] + (h / 6.0) * (k1[i, j] + 2.0 * k2[i, j]
                                               + 2.0 * k3[i, j] + k4[i, j])


def riccati_integrate(A0, K, double t0, double t1, double h, double rtol,
                      double blowup, double hmin):
    cdef double[:, ::1] A = np.array(A0, dtype=np.float64, order="C")
    cdef double[:, ::1] Kv = np.ascontiguousarray(K, dtype=np.float64)
    cdef Py_ssize_t d = A.shape[0]
    cdef Py_ssize_t i, j
    work = np.empty((8, d, d))
    cdef double[:, ::1] big = work[0]
    cdef double[:, ::1] mid = work[1]
    cdef double[:, ::1] half = work[2]
    cdef double[:, ::1] k1 = work[3]
    cdef double[:, ::1] k2 = work[4]
    cdef double[:, ::1] k3 = work[5]
    cdef double[:, ::1] k4 = work[6]
    cdef double[:, ::1] B = work[7]
    cdef double t = t0, hs, scale, err, diff, grow, amax
    cdef long nsteps = 0
    cdef int status = OK

    with nogil:
        while t < t1:
            hs = h if h < t1 - t else t1 - t
            _rk4(A, Kv, hs, big, k1, k2, k3, k4, B, d)
            _rk4(A, Kv, 0.5 * hs, mid, k1, k2, k3, k4, B, d)
            _rk4(mid, Kv, 0.5 * hs, half, k1, k2, k3, k4, B, d)
            scale = 1.0
            err = 0.0
            for i in range(d):
                for j in range(d):
                    if fabs(half[i, j]) > scale:
                        scale = fabs(half[i, j])
                    diff = fabs(half[i, j] - big[i, j])
                    if diff > err or not isfinite(diff):
                        err = diff
            err = err / scale
            if not isfinite(err) or err > rtol:
                h = 0.5 * hs
                if h < hmin:
                    status = UNDERFLOW
                    break
                continue
            amax = 0.0
            for i in range(d):
                for j in range(d):
                    A[i, j] = 0.5 * (half[i, j] + half[j, i])
                    if fabs(A[i, j]) > amax:
                        amax = fabs(A[i, j])
            if hs == t1 - t:
                t = t1
            else:
                t = t + hs
            nsteps += 1
            if err == 0.0:
                grow = 2.0
            else:
                grow = 0.9 * pow(rtol / err, 0.2)
                if grow > 2.0:
                    grow = 2.0
                if grow < 1.0:
                    grow = 1.0
            if hs == h:
                h = hs * grow
            elif hs > h:
                h = hs
            if amax > blowup:
                status = BLOWUP
                break
    return np.asarray(A), t, h, status, nsteps
