# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dilated circular filtering kernels (row-wise on 2-D float64 arrays)."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def conv_dilated(x, f, Py_ssize_t step):
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
    cdef Py_ssize_t R = xv.shape[0], T = xv.shape[1], M = fv.shape[0]
    out = np.zeros((R, T), dtype=np.float64)
    cdef double[:, ::1] yv = out
    cdef Py_ssize_t r, k, m, off, idx
    cdef double fm
    for m in range(M):
        fm = fv[m]
        if fm == 0.0:
            continue
        off = (m * step) % T
        with nogil:
            for r in range(R):
                # k - off wraps once at most since 0 <= off < T
                for k in range(off):
                    yv[r, k] += fm * xv[r, k - off + T]
                for k in range(off, T):
                    yv[r, k] += fm * xv[r, k - off]
    return out


def corr_dilated(x, f, Py_ssize_t step):
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
    cdef Py_ssize_t R = xv.shape[0], T = xv.shape[1], M = fv.shape[0]
    out = np.zeros((R, T), dtype=np.float64)
    cdef double[:, ::1] yv = out
    cdef Py_ssize_t r, k, m, off
    cdef double fm
    for m in range(M):
        fm = fv[m]
        if fm == 0.0:
            continue
        off = (m * step) % T
        with nogil:
            for r in range(R):
                for k in range(T - off):
                    yv[r, k] += fm * xv[r, k + off]
                for k in range(T - off, T):
                    yv[r, k] += fm * xv[r, k + off - T]
    return out
