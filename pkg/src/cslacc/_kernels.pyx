# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Jacobi kernels for dense complex matrices.

Both routines work in place on Fortran-ordered ``complex128`` buffers and
return the number of sweeps used, or ``-1`` when the sweep cap was hit.
"""

import numpy as np

from libc.math cimport sqrt, hypot
from libc.float cimport DBL_EPSILON


cdef inline double _sq(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double complex _conj(double complex z) noexcept nogil:
    return z.conjugate()


cdef inline double _abs(double complex z) noexcept nogil:
    return hypot(z.real, z.imag)


cdef inline double _schur_tangent(double x) noexcept nogil:
    # smaller root of t^2 + 2 x t - 1 = 0
    if x >= 0.0:
        return 1.0 / (x + hypot(1.0, x))
    return -1.0 / (-x + hypot(1.0, x))


cdef int _one_sided(double complex[::1, :] a, double complex[::1, :] v,
                    double[::1] norms, double tol, int max_sweeps) noexcept nogil:
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t nv = v.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef bint rotated
    cdef double alpha, beta, g_abs, t, c, s, floor = 0.0
    cdef double complex gamma, ph, phc, x, y

    # rotations below eps * ||a||_F^2 only shuffle roundoff between columns
    for p in range(n):
        for k in range(m):
            floor = floor + _sq(a[k, p])
    floor = floor * DBL_EPSILON

    for sweep in range(max_sweeps):
        for p in range(n):
            alpha = 0.0
            for k in range(m):
                alpha = alpha + _sq(a[k, p])
            norms[p] = alpha
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = norms[p]
                beta = norms[q]
                gamma = 0.0
                for k in range(m):
                    gamma = gamma + _conj(a[k, p]) * a[k, q]
                g_abs = _abs(gamma)
                if g_abs <= floor or g_abs <= tol * sqrt(alpha * beta):
                    continue
                rotated = True
                ph = gamma / g_abs
                phc = _conj(ph)
                t = _schur_tangent((beta - alpha) / (2.0 * g_abs))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                for k in range(m):
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * phc * y
                    a[k, q] = s * ph * x + c * y
                for k in range(nv):
                    x = v[k, p]
                    y = v[k, q]
                    v[k, p] = c * x - s * phc * y
                    v[k, q] = s * ph * x + c * y
                norms[p] = alpha - t * g_abs
                norms[q] = beta + t * g_abs
        if not rotated:
            return sweep + 1
    return -1


cdef int _two_sided(double complex[::1, :] a, double complex[::1, :] v,
                    double tol, int max_sweeps) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double off, total, g_abs, t, c, s
    cdef double complex ph, phc, x, y

    total = 0.0
    for p in range(n):
        for q in range(n):
            total = total + _sq(a[p, q])
    total = sqrt(total)
    for sweep in range(max_sweeps):
        off = 0.0
        for q in range(n):
            for p in range(n):
                if p != q:
                    off = off + _sq(a[p, q])
        if sqrt(off) <= tol * total:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                g_abs = _abs(a[p, q])
                if g_abs == 0.0:
                    continue
                ph = a[p, q] / g_abs
                phc = _conj(ph)
                t = _schur_tangent((a[q, q].real - a[p, p].real) / (2.0 * g_abs))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                # A <- A J with J = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                for k in range(n):
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * phc * y
                    a[k, q] = s * x + c * phc * y
                # A <- J^H A
                for k in range(n):
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * ph * y
                    a[q, k] = s * x + c * ph * y
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    x = v[k, p]
                    y = v[k, q]
                    v[k, p] = c * x - s * phc * y
                    v[k, q] = s * x + c * phc * y
    return -1


def one_sided_jacobi(double complex[::1, :] a, double complex[::1, :] v,
                     double tol, int max_sweeps):
    """Orthogonalise the columns of ``a`` by plane rotations (Hestenes).

    On exit the columns of ``a`` are mutually orthogonal to relative
    tolerance ``tol`` and ``v`` holds the accumulated right rotations, so
    that the input equals ``a @ v.conj().T``.
    """
    cdef double[::1] norms = np.empty(a.shape[1], dtype=np.float64)
    cdef int sweeps
    with nogil:
        sweeps = _one_sided(a, v, norms, tol, max_sweeps)
    return sweeps


def hermitian_jacobi(double complex[::1, :] a, double complex[::1, :] v,
                     double tol, int max_sweeps):
    """Diagonalise Hermitian ``a`` in place by cyclic two-sided rotations.

    Converged when the off-diagonal Frobenius mass falls below
    ``tol * ||a||_F``; ``v`` accumulates the eigenvectors.
    """
    cdef int sweeps
    with nogil:
        sweeps = _two_sided(a, v, tol, max_sweeps)
    return sweeps
