# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled SMO core: max-violating-pair dual solver for the RBF SVM.

Semantics are kept in lockstep with `_smo_fallback.smo_solve`; the test
suite asserts both backends agree to float precision.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

DEF ETA_FLOOR = 1e-12


def smo_solve(double[:, ::1] K, double[::1] y, double C, double tol, int max_iter):
    """Minimize 0.5*a'Qa - e'a s.t. 0 <= a <= C, y'a = 0 with Q = yy' * K.

    Returns (alpha, bias, n_iter, gap).
    """
    cdef Py_ssize_t n = y.shape[0]
    alpha_arr = np.zeros(n, dtype=np.float64)
    grad_arr = -np.ones(n, dtype=np.float64)
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] G = grad_arr

    cdef Py_ssize_t it, t, i, j
    cdef double gmax, gmin, ng, eta, lam, bound, b
    cdef double gap = 0.0
    cdef int n_iter = 0

    for it in range(max_iter):
        gmax = -np.inf
        gmin = np.inf
        i = -1
        j = -1
        for t in range(n):
            ng = -y[t] * G[t]
            if (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0):
                if ng > gmax:
                    gmax = ng
                    i = t
            if (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < C):
                if ng < gmin:
                    gmin = ng
                    j = t
        if i < 0 or j < 0:
            break
        gap = gmax - gmin
        if gap <= tol:
            break

        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta < ETA_FLOOR:
            eta = ETA_FLOOR
        lam = gap / eta
        bound = (C - alpha[i]) if y[i] > 0 else alpha[i]
        if bound < lam:
            lam = bound
        bound = alpha[j] if y[j] > 0 else (C - alpha[j])
        if bound < lam:
            lam = bound

        alpha[i] = alpha[i] + y[i] * lam
        alpha[j] = alpha[j] - y[j] * lam
        if alpha[i] < 0.0:
            alpha[i] = 0.0
        elif alpha[i] > C:
            alpha[i] = C
        if alpha[j] < 0.0:
            alpha[j] = 0.0
        elif alpha[j] > C:
            alpha[j] = C
        for t in range(n):
            G[t] = G[t] + lam * y[t] * (K[t, i] - K[t, j])
        n_iter += 1

    # Bias from free support vectors, midpoint of the KKT bounds otherwise.
    cdef double acc = 0.0
    cdef Py_ssize_t n_free = 0
    for t in range(n):
        if 0.0 < alpha[t] < C:
            acc += -y[t] * G[t]
            n_free += 1
    if n_free > 0:
        b = acc / n_free
    else:
        gmax = -np.inf
        gmin = np.inf
        for t in range(n):
            ng = -y[t] * G[t]
            if (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0):
                if ng > gmax:
                    gmax = ng
            if (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < C):
                if ng < gmin:
                    gmin = ng
        b = (gmax + gmin) / 2.0

    return alpha_arr, b, n_iter, gap
