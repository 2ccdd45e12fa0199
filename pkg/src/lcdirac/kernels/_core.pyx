# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: unforced light-cone step and ordered pair sums.

Semantics mirror kernels.pure; see that module for the scheme layout.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


def step_unforced(cnp.ndarray[cnp.complex128_t, ndim=1] u,
                  cnp.ndarray[cnp.complex128_t, ndim=1] v,
                  double h, double m, double alpha, double beta,
                  bint periodic):
    cdef Py_ssize_t n = u.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] uh = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] vh = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] un = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] vn = np.empty(n, dtype=np.complex128)
    cdef double complex ui, vi, n1, n2, uhm, vhi, uhi, vhp, ub, vb
    cdef double au2, av2, s
    cdef double tb = 2.0 * beta
    cdef double hh = 0.5 * h
    cdef Py_ssize_t i, im1, ip1

    for i in range(n):
        ui = u[i]
        vi = v[i]
        au2 = ui.real * ui.real + ui.imag * ui.imag
        av2 = vi.real * vi.real + vi.imag * vi.imag
        s = 2.0 * (ui.real * vi.real + ui.imag * vi.imag)
        n1 = alpha * ui * av2 + tb * s * vi
        n2 = alpha * vi * au2 + tb * s * ui
        uh[i] = ui + hh * (1j * (m * vi - n1))
        vh[i] = vi + hh * (1j * (m * ui - n2))

    for i in range(n):
        if periodic:
            im1 = i - 1 if i > 0 else n - 1
            ip1 = i + 1 if i < n - 1 else 0
            uhm = uh[im1]
            ub = u[im1]
            vhp = vh[ip1]
            vb = v[ip1]
        else:
            if i > 0:
                uhm = uh[i - 1]
                ub = u[i - 1]
            else:
                uhm = 0.0
                ub = 0.0
            if i < n - 1:
                vhp = vh[i + 1]
                vb = v[i + 1]
            else:
                vhp = 0.0
                vb = 0.0
        vhi = vh[i]
        uhi = uh[i]

        av2 = vhi.real * vhi.real + vhi.imag * vhi.imag
        s = 2.0 * (uhm.real * vhi.real + uhm.imag * vhi.imag)
        n1 = alpha * uhm * av2 + tb * s * vhi
        un[i] = ub + h * (1j * (m * vhi - n1))

        au2 = uhi.real * uhi.real + uhi.imag * uhi.imag
        s = 2.0 * (uhi.real * vhp.real + uhi.imag * vhp.imag)
        n2 = alpha * vhp * au2 + tb * s * uhi
        vn[i] = vb + h * (1j * (m * uhi - n2))

    return un, vn


def q_upper(cnp.ndarray[cnp.float64_t, ndim=1] a,
            cnp.ndarray[cnp.float64_t, ndim=1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef double suffix = 0.0
    cdef double total = 0.0
    cdef Py_ssize_t i
    if n < 2:
        return 0.0
    for i in range(n - 2, -1, -1):
        suffix += b[i + 1]
        total += a[i] * suffix
    return total


def q_upper_naive(cnp.ndarray[cnp.float64_t, ndim=1] a,
                  cnp.ndarray[cnp.float64_t, ndim=1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef double total = 0.0
    cdef double row
    cdef Py_ssize_t i, j
    for i in range(n - 1):
        row = 0.0
        for j in range(i + 1, n):
            row += b[j]
        total += a[i] * row
    return total
