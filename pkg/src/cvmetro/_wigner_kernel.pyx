# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Wigner-grid kernel.

Evaluates ``W(x, p)`` for a Hermitian matrix with the Laguerre-type
recurrence over the elements ``W_mn``.  Points are processed in blocks:
the recurrence steps through ``(m, n)`` once per block while the innermost
loop runs over the block's independent points, so it vectorises and is not
held up by the dependency chain inside a single point.  Arithmetic is
written out in real and imaginary parts (C99 complex ``*`` and ``/`` call
NaN-safe library routines).  The GIL is released for the whole block.
"""

import numpy as np

from libc.math cimport exp, sqrt, M_PI
from libc.stdlib cimport malloc, free

cdef enum:
    BLOCK = 64

# The three inner loops as plain C so the pointers can be declared
# restrict; without it the compiler must assume the rows alias and the
# loops stay scalar.
cdef extern from *:
    """
    static inline void cvm_first_row(Py_ssize_t B, double *restrict cur, double *restrict cui,
                                     const double *restrict prev, const double *restrict pvi,
                                     const double *restrict ar, const double *restrict ai,
                                     double *restrict out, double invn, double rr, double ri) {
        for (Py_ssize_t k = 0; k < B; ++k) {
            double u = (ar[k] * prev[k] - ai[k] * pvi[k]) * invn;
            double v = (ar[k] * pvi[k] + ai[k] * prev[k]) * invn;
            cur[k] = u; cui[k] = v;
            out[k] += rr * u - ri * v;
        }
    }
    static inline void cvm_diagonal(Py_ssize_t B, double *restrict cur, double *restrict cui,
                                    const double *restrict prev, const double *restrict pvi,
                                    double *restrict tr, double *restrict ti,
                                    const double *restrict ar, const double *restrict ai,
                                    double *restrict out, double sqm, double invn, double rr) {
        for (Py_ssize_t k = 0; k < B; ++k) {
            double a = cur[k], b = cui[k];
            tr[k] = a; ti[k] = b;
            double u = (ar[k] * a + ai[k] * b - sqm * prev[k]) * invn;
            double v = (ar[k] * b - ai[k] * a - sqm * pvi[k]) * invn;
            cur[k] = u; cui[k] = v;
            out[k] += rr * u;
        }
    }
    static inline void cvm_off_diagonal(Py_ssize_t B, double *restrict cur, double *restrict cui,
                                        const double *restrict prev, const double *restrict pvi,
                                        double *restrict tr, double *restrict ti,
                                        const double *restrict ar, const double *restrict ai,
                                        double *restrict out, double sqm, double invn, double rr, double ri) {
        for (Py_ssize_t k = 0; k < B; ++k) {
            double u = (ar[k] * prev[k] - ai[k] * pvi[k] - sqm * tr[k]) * invn;
            double v = (ar[k] * pvi[k] + ai[k] * prev[k] - sqm * ti[k]) * invn;
            tr[k] = cur[k]; ti[k] = cui[k];
            cur[k] = u; cui[k] = v;
            out[k] += rr * u - ri * v;
        }
    }
    """
    void cvm_first_row(Py_ssize_t B, double* cur, double* cui, const double* prev, const double* pvi,
                       const double* ar, const double* ai, double* out, double invn, double rr, double ri) nogil
    void cvm_diagonal(Py_ssize_t B, double* cur, double* cui, const double* prev, const double* pvi,
                      double* tr, double* ti, const double* ar, const double* ai, double* out,
                      double sqm, double invn, double rr) nogil
    void cvm_off_diagonal(Py_ssize_t B, double* cur, double* cui, const double* prev, const double* pvi,
                          double* tr, double* ti, const double* ar, const double* ai, double* out,
                          double sqm, double invn, double rr, double ri) nogil


cdef void _block(const double complex[:, ::1] rho, Py_ssize_t N, const double* xs, const double* ps,
                 Py_ssize_t B, double* wr, double* wi, double* tr, double* ti, double* ar, double* ai,
                 const double* sq, const double* inv, double* out) noexcept nogil:
    # wr/wi hold the current row of W_mn for all B points, laid out [n * B + k]
    cdef Py_ssize_t k, m, n
    cdef double rr, ri, sqm, invn
    cdef double* cur
    cdef double* prev
    cdef double* cui
    cdef double* pvi
    for k in range(B):
        ar[k] = sqrt(2.0) * xs[k]          # A2 = sqrt(2) (x + i p)
        ai[k] = sqrt(2.0) * ps[k]
        wr[k] = exp(-(xs[k] * xs[k] + ps[k] * ps[k])) / M_PI
        wi[k] = 0.0
        out[k] = rho[0, 0].real * wr[k]
    for n in range(1, N):
        rr = 2.0 * rho[0, n].real
        ri = 2.0 * rho[0, n].imag
        invn = inv[n]
        cur = wr + n * B
        cui = wi + n * B
        prev = wr + (n - 1) * B
        pvi = wi + (n - 1) * B
        cvm_first_row(B, cur, cui, prev, pvi, ar, ai, out, invn, rr, ri)
    for m in range(1, N):
        sqm = sq[m]
        invn = inv[m]
        rr = rho[m, m].real
        cur = wr + m * B
        cui = wi + m * B
        prev = wr + (m - 1) * B
        pvi = wi + (m - 1) * B
        # W_mm = (conj(A2) W_mm_old - sqrt(m) W_{m-1,m}) / sqrt(m)
        cvm_diagonal(B, cur, cui, prev, pvi, tr, ti, ar, ai, out, sqm, invn, rr)
        for n in range(m + 1, N):
            rr = 2.0 * rho[m, n].real
            ri = 2.0 * rho[m, n].imag
            invn = inv[n]
            cur = wr + n * B
            cui = wi + n * B
            prev = wr + (n - 1) * B
            pvi = wi + (n - 1) * B
            cvm_off_diagonal(B, cur, cui, prev, pvi, tr, ti, ar, ai, out, sqm, invn, rr, ri)


cdef int _run(const double complex[:, ::1] rho, const double* xs, const double* ps, Py_ssize_t n_pts,
              double* out) noexcept nogil:
    cdef Py_ssize_t N = rho.shape[0]
    cdef Py_ssize_t size = N if N > 1 else 1
    cdef Py_ssize_t start, B, i
    cdef double* work = <double*> malloc((2 * size * BLOCK + 4 * BLOCK + 2 * size) * sizeof(double))
    if work == NULL:
        return -1
    cdef double* wr = work
    cdef double* wi = wr + size * BLOCK
    cdef double* tr = wi + size * BLOCK
    cdef double* ti = tr + BLOCK
    cdef double* ar = ti + BLOCK
    cdef double* ai = ar + BLOCK
    cdef double* sq = ai + BLOCK
    cdef double* inv = sq + size
    for i in range(size):
        sq[i] = sqrt(<double> i)
        inv[i] = 1.0 / sq[i] if i > 0 else 0.0
    start = 0
    while start < n_pts:
        B = n_pts - start if n_pts - start < BLOCK else BLOCK
        _block(rho, N, xs + start, ps + start, B, wr, wi, tr, ti, ar, ai, sq, inv, out + start)
        start += B
    free(work)
    return 0


def wigner_points(const double complex[:, ::1] rho, const double[::1] xs, const double[::1] ps):
    """Return ``W`` at the paired points ``(xs[k], ps[k])``."""
    cdef Py_ssize_t n_pts = xs.shape[0]
    cdef int status
    if ps.shape[0] != n_pts:
        raise ValueError("xs and ps must have the same length")
    out = np.zeros(n_pts, dtype=np.float64)
    if n_pts == 0 or rho.shape[0] == 0:
        return out
    cdef double[::1] W = out
    with nogil:
        status = _run(rho, &xs[0], &ps[0], n_pts, &W[0])
    if status != 0:
        raise MemoryError("Wigner kernel scratch allocation failed")
    return out


def wigner_grid(const double complex[:, ::1] rho, const double[::1] xs, const double[::1] ps):
    """Return an ``(len(xs), len(ps))`` array of ``W(xs[i], ps[j])``."""
    nx, npp = xs.shape[0], ps.shape[0]
    X = np.ascontiguousarray(np.repeat(np.asarray(xs), npp))
    P = np.ascontiguousarray(np.tile(np.asarray(ps), nx))
    return wigner_points(rho, X, P).reshape(nx, npp)
