# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled projected SOR sweep. Mirrors multisurf._pure.psor_sweeps."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def psor_sweeps(cnp.ndarray[cnp.float64_t, ndim=2] M,
                cnp.ndarray[cnp.float64_t, ndim=1] q,
                cnp.ndarray[cnp.float64_t, ndim=1] l,
                cnp.ndarray[cnp.float64_t, ndim=1] u,
                cnp.ndarray[cnp.float64_t, ndim=1] z,
                double omega, int max_iter, double tol):
    """Run projected Gauss-Seidel/SOR sweeps on z in place.

    Returns (sweeps_done, last_delta).
    """
    cdef Py_ssize_t m = z.shape[0]
    cdef Py_ssize_t i, j, sweep
    cdef double acc, zi, d, delta = 0.0
    for sweep in range(max_iter):
        delta = 0.0
        for i in range(m):
            acc = q[i]
            for j in range(m):
                acc += M[i, j] * z[j]
            zi = z[i] - omega * acc / M[i, i]
            if zi < l[i]:
                zi = l[i]
            elif zi > u[i]:
                zi = u[i]
            d = zi - z[i]
            if d < 0:
                d = -d
            if d > delta:
                delta = d
            z[i] = zi
        if delta < tol:
            return sweep + 1, delta
    return max_iter, delta
