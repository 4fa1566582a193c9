# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see pure.py for the contract)."""

import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

ctypedef fused state_t:
    double
    double complex


def popcounts(int n_atoms):
    cdef Py_ssize_t dim = 1 << n_atoms
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(dim, dtype=np.int64)
    cdef long long[::1] o = out
    cdef Py_ssize_t s
    cdef unsigned long long x
    cdef int c
    for s in range(dim):
        x = <unsigned long long> s
        c = 0
        while x:
            x &= x - 1
            c += 1
        o[s] = c
    return out


def interaction_diagonal(double[:, ::1] v, int n_atoms):
    cdef Py_ssize_t dim = 1 << n_atoms
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(dim, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t s
    cdef int i, j, npairs, p
    # flatten the strict upper triangle once; most states test few set bits
    npairs = n_atoms * (n_atoms - 1) // 2
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pi = np.empty(npairs, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pj = np.empty(npairs, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pv = np.empty(npairs, dtype=np.float64)
    cdef long long[::1] piv = pi
    cdef long long[::1] pjv = pj
    cdef double[::1] pvv = pv
    p = 0
    for i in range(n_atoms):
        for j in range(i + 1, n_atoms):
            piv[p] = i
            pjv[p] = j
            pvv[p] = v[i, j]
            p += 1
    cdef double e
    cdef unsigned long long us
    with nogil:
        for s in range(dim):
            us = <unsigned long long> s
            e = 0.0
            for p in range(npairs):
                if (us >> piv[p]) & (us >> pjv[p]) & 1ULL:
                    e += pvv[p]
            o[s] = e
    return out


def hmatvec(state_t[::1] psi, double[::1] diag, double omega_half, state_t[::1] out):
    cdef Py_ssize_t dim = psi.shape[0]
    cdef int n_atoms = 0
    while (1 << n_atoms) < dim:
        n_atoms += 1
    cdef Py_ssize_t s, base, i, step
    cdef int k
    with nogil:
        for s in range(dim):
            out[s] = diag[s] * psi[s]
        if omega_half != 0.0:
            for k in range(n_atoms):
                step = 1 << k
                base = 0
                while base < dim:
                    for i in range(base, base + step):
                        out[i] = out[i] + omega_half * psi[i + step]
                        out[i + step] = out[i + step] + omega_half * psi[i]
                    base += 2 * step
    if state_t is double:
        return np.asarray(out)
    else:
        return np.asarray(out)


def apply_phases(double complex[::1] psi, double complex[::1] phase):
    cdef Py_ssize_t s, dim = psi.shape[0]
    with nogil:
        for s in range(dim):
            psi[s] = psi[s] * phase[s]
    return np.asarray(psi)


def x_rotation_all(double complex[::1] psi, double cos_half, double sin_half, int n_atoms):
    cdef Py_ssize_t dim = psi.shape[0]
    cdef Py_ssize_t base, i, step
    cdef int k
    cdef double complex a, b, mis
    mis = -1j * sin_half
    with nogil:
        for k in range(n_atoms):
            step = 1 << k
            base = 0
            while base < dim:
                for i in range(base, base + step):
                    a = psi[i]
                    b = psi[i + step]
                    psi[i] = cos_half * a + mis * b
                    psi[i + step] = cos_half * b + mis * a
                base += 2 * step
    return np.asarray(psi)
