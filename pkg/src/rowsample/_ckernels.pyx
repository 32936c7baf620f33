# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; same signatures and semantics as ``_pykernels``."""
import numpy as np

from libc.math cimport sqrt


def fwht(double[:, ::1] a):
    cdef Py_ssize_t m = a.shape[0], k = a.shape[1]
    cdef Py_ssize_t h = 1, i, j, col
    cdef double x, y
    with nogil:
        while h < m:
            i = 0
            while i < m:
                for j in range(i, i + h):
                    for col in range(k):
                        x = a[j, col]
                        y = a[j + h, col]
                        a[j, col] = x + y
                        a[j + h, col] = x - y
                i += 2 * h
            h *= 2


def householder_qr(a):
    w_arr = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] w = w_arr
    cdef Py_ssize_t m = w.shape[0], n = w.shape[1]
    vs_arr = np.zeros((m, n))
    q_arr = np.zeros((m, n))
    cdef double[:, ::1] vs = vs_arr
    cdef double[:, ::1] q = q_arr
    cdef Py_ssize_t i, j, col
    cdef double normx, alpha, vnorm, dot
    with nogil:
        for j in range(n):
            normx = 0.0
            for i in range(j, m):
                normx += w[i, j] * w[i, j]
            normx = sqrt(normx)
            if normx == 0.0:
                continue
            alpha = -normx if w[j, j] >= 0 else normx
            vnorm = 0.0
            for i in range(j, m):
                vs[i, j] = w[i, j]
            vs[j, j] -= alpha
            for i in range(j, m):
                vnorm += vs[i, j] * vs[i, j]
            vnorm = sqrt(vnorm)
            if vnorm == 0.0:
                for i in range(j, m):
                    vs[i, j] = 0.0
                continue
            for i in range(j, m):
                vs[i, j] /= vnorm
            for col in range(j, n):
                dot = 0.0
                for i in range(j, m):
                    dot += vs[i, j] * w[i, col]
                dot *= 2.0
                for i in range(j, m):
                    w[i, col] -= dot * vs[i, j]
        for j in range(n):
            q[j, j] = 1.0
        for j in range(n - 1, -1, -1):
            for col in range(n):
                dot = 0.0
                for i in range(j, m):
                    dot += vs[i, j] * q[i, col]
                dot *= 2.0
                if dot != 0.0:
                    for i in range(j, m):
                        q[i, col] -= dot * vs[i, j]
    r_arr = np.triu(w_arr[:n, :])
    return q_arr, r_arr


cdef void _rotate_to(double[:, ::1] q, double[::1] d, Py_ssize_t p,
                     Py_ssize_t s, double target) noexcept nogil:
    cdef Py_ssize_t n = q.shape[1], col
    cdef double alpha = d[p], beta = d[s], gamma = 0.0
    cdef double A, C, disc, sg, qq, x, cs, sn, rp, rs, np_, ns_
    for col in range(n):
        gamma += q[p, col] * q[s, col]
    A = beta - target
    C = alpha - target
    disc = gamma * gamma - A * C
    if disc < 0.0:
        disc = 0.0
    sg = 1.0 if gamma >= 0.0 else -1.0
    qq = -(gamma + sg * sqrt(disc))
    if qq != 0.0:
        x = C / qq
        cs = 1.0 / sqrt(1.0 + x * x)
        sn = x * cs
    elif C == 0.0:
        cs = 1.0
        sn = 0.0
    else:
        cs = 0.0
        sn = 1.0
    np_ = 0.0
    ns_ = 0.0
    for col in range(n):
        rp = q[p, col]
        rs = q[s, col]
        q[p, col] = cs * rp + sn * rs
        q[s, col] = cs * rs - sn * rp
        np_ += q[p, col] * q[p, col]
        ns_ += q[s, col] * q[s, col]
    d[p] = np_
    d[s] = ns_


def givens_chase(double[:, ::1] q, const double[::1] target, double tol):
    cdef Py_ssize_t m = q.shape[0]
    cdef Py_ssize_t i, j, k, jprev = q.shape[0] - 1, kstart = 0
    cdef long count = 0
    d_arr = np.einsum("ij,ij->i", np.asarray(q), np.asarray(q))
    cdef double[::1] d = d_arr
    # surplus and deficient sets only shrink, so both scans resume
    while True:
        j = -1
        for i in range(jprev, -1, -1):
            if d[i] - target[i] > tol:
                j = i
                break
        if j < 0:
            break
        if j != jprev or kstart <= j:
            kstart = j + 1
        jprev = j
        k = -1
        for i in range(kstart, m):
            if target[i] - d[i] > tol * target[i]:
                k = i
                break
        if k < 0:
            # leftover surplus is the profile's sum mismatch
            break
        kstart = k
        if target[k] - d[k] <= d[j] - target[j]:
            _rotate_to(q, d, k, j, target[k])
            kstart = k + 1
        else:
            _rotate_to(q, d, j, k, target[j])
        count += 1
        if count > m:
            raise ArithmeticError("rotation budget exceeded")
    return count
