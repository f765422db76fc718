# cython: language_level=3
"""Compiled twins of the kernels in ``_fallback.py``.

Same signatures and semantics; inputs must be C-contiguous float64.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from scipy.linalg.cython_blas cimport dgemm, dgemv

cnp.import_array()


cdef inline void _rows_dot(const double[:, ::1] A, const double* x,
                           double* y) noexcept nogil:
    # y = A x for C-contiguous A (rows x cols), via column-major dgemv on A^T
    cdef int m = <int>A.shape[1], n = <int>A.shape[0], one = 1
    cdef double alpha = 1.0, beta = 0.0
    cdef char trans = b'T'
    if n == 0 or m == 0:
        return
    dgemv(&trans, &m, &n, &alpha, <double*>&A[0, 0], &m, <double*>x, &one,
          &beta, y, &one)


def maximin_centroids(const double[:, ::1] Zt, Py_ssize_t K, Py_ssize_t first):
    cdef Py_ssize_t N = Zt.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx_arr = np.empty(K, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] best_arr = np.empty(N, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sim_arr = np.empty(N, dtype=np.float64)
    cdef cnp.int64_t[::1] idx = idx_arr
    cdef double[::1] best = best_arr
    cdef double[::1] sim = sim_arr
    cdef Py_ssize_t n, k, j = first, jmin
    cdef double vmin
    idx[0] = first
    with nogil:
        _rows_dot(Zt, &Zt[j, 0], &best[0])
        for k in range(1, K):
            # argmin of the running max, then fold in the new centroid
            jmin = 0
            vmin = best[0]
            for n in range(1, N):
                if best[n] < vmin:
                    vmin = best[n]
                    jmin = n
            j = jmin
            idx[k] = j
            _rows_dot(Zt, &Zt[j, 0], &sim[0])
            for n in range(N):
                if sim[n] > best[n]:
                    best[n] = sim[n]
    return idx_arr, best_arr


def assign_nearest(const double[:, ::1] Zt, const double[:, ::1] C):
    cdef Py_ssize_t N = Zt.shape[0], K = C.shape[0]
    cdef int F = <int>Zt.shape[1], Ki = <int>K, nb
    cdef Py_ssize_t BLK = 512
    cdef cnp.ndarray[cnp.int64_t, ndim=1] lab_arr = np.zeros(N, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] S_arr = np.empty(K * BLK, dtype=np.float64)
    cdef cnp.int64_t[::1] lab = lab_arr
    cdef double[::1] S = S_arr
    cdef Py_ssize_t start, b, k, kbest
    cdef double sbest, alpha = 1.0, beta = 0.0
    cdef char tA = b'T', tB = b'N'
    if N == 0 or K == 0 or F == 0:
        return lab_arr
    with nogil:
        start = 0
        while start < N:
            nb = <int>(BLK if N - start > BLK else N - start)
            # S (K x nb, column-major) = C Z_block^T
            dgemm(&tA, &tB, &Ki, &nb, &F, &alpha, <double*>&C[0, 0], &F,
                  <double*>&Zt[start, 0], &F, &beta, &S[0], &Ki)
            for b in range(nb):
                kbest = 0
                sbest = S[b * K]
                for k in range(1, K):
                    # strict comparison keeps the lowest index on ties
                    if S[b * K + k] > sbest:
                        sbest = S[b * K + k]
                        kbest = k
                lab[start + b] = kbest
            start += nb
    return lab_arr


def hals_sweep(double[:, ::1] X, const double[:, ::1] G, const double[:, ::1] B):
    # G is symmetric, so its contiguous row k stands in for column k
    cdef Py_ssize_t n = X.shape[0], K = X.shape[1]
    cdef Py_ssize_t i, k
    cdef double gkk, x
    cdef double[::1] t = np.empty(n, dtype=np.float64)
    if n == 0:
        return np.asarray(X)
    with nogil:
        for k in range(K):
            gkk = G[k, k]
            if gkk <= 0:
                continue
            _rows_dot(X, &G[k, 0], &t[0])
            for i in range(n):
                x = X[i, k] + (B[i, k] - t[i]) / gkk
                X[i, k] = x if x > 0 else 0.0
    return np.asarray(X)


def qp_inner(const double[:, ::1] X, const double[::1] mu, double rho,
             u0, double L, Py_ssize_t max_iter, double tol):
    cdef Py_ssize_t M = X.shape[0], F = X.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u_arr = np.maximum(
        np.asarray(u0, dtype=np.float64), 0.0)
    cdef double[::1] u = u_arr
    cdef double[::1] y = u_arr.copy()
    cdef double[::1] p = np.empty(M, dtype=np.float64)
    cdef double[::1] g = np.empty(F, dtype=np.float64)
    cdef double[::1] un = np.empty(F, dtype=np.float64)
    cdef double t = 1.0, t_new, step = 1.0 / L, s, d, dn2, un2, restart, beta
    cdef Py_ssize_t it, m, f, done = max_iter
    with nogil:
        for it in range(1, max_iter + 1):
            _rows_dot(X, &y[0], &p[0])
            for m in range(M):
                s = mu[m] - rho * (p[m] - 1.0)
                p[m] = s if s > 0 else 0.0
            for f in range(F):
                g[f] = y[f]
            for m in range(M):
                if p[m] != 0.0:
                    for f in range(F):
                        g[f] -= X[m, f] * p[m]
            dn2 = 0.0
            un2 = 0.0
            restart = 0.0
            for f in range(F):
                s = y[f] - step * g[f]
                un[f] = s if s > 0 else 0.0
                d = un[f] - u[f]
                dn2 += d * d
                un2 += un[f] * un[f]
                restart += (y[f] - un[f]) * d
            if restart > 0:
                t = 1.0
                for f in range(F):
                    y[f] = un[f]
            else:
                t_new = 0.5 * (1.0 + sqrt(1.0 + 4.0 * t * t))
                beta = (t - 1.0) / t_new
                for f in range(F):
                    y[f] = un[f] + beta * (un[f] - u[f])
                t = t_new
            for f in range(F):
                u[f] = un[f]
            if sqrt(dn2) <= tol * (sqrt(un2) if un2 > 1.0 else 1.0):
                done = it
                break
    return u_arr, done
