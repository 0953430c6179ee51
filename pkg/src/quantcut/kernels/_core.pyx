# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled statevector kernels; same contract as kernels._fallback (results
agree to floating-point rounding)."""

from libc.math cimport sqrt

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define QC_PARITY(x) __builtin_parityll(x)
    #else
    static inline int QC_PARITY(unsigned long long v) {
        v ^= v >> 32; v ^= v >> 16; v ^= v >> 8;
        v ^= v >> 4;  v ^= v >> 2;  v ^= v >> 1;
        return (int)(v & 1ULL);
    }
    #endif
    """
    int QC_PARITY(unsigned long long x) nogil


def apply_1q(double complex[::1] psi, double complex[:, :] u, int q):
    """Apply a 2x2 unitary to qubit ``q`` in place."""
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t step = (<Py_ssize_t>1) << q
    cdef Py_ssize_t nblocks = n >> (q + 1)
    cdef double complex u00 = u[0, 0], u01 = u[0, 1], u10 = u[1, 0], u11 = u[1, 1]
    cdef Py_ssize_t blk, base, off, i
    cdef double complex a, b
    with nogil:
        for blk in range(nblocks):
            base = blk << (q + 1)
            for off in range(step):
                i = base + off
                a = psi[i]
                b = psi[i + step]
                psi[i] = u00 * a + u01 * b
                psi[i + step] = u10 * a + u11 * b


def apply_2q(double complex[::1] psi, double complex[:, :] u, int q1, int q2):
    """Apply a 4x4 unitary in place; ``q1`` is the high bit of its index."""
    cdef Py_ssize_t n = psi.shape[0]
    cdef int lo = q2 if q2 < q1 else q1
    cdef int hi = q1 if q2 < q1 else q2
    cdef Py_ssize_t s1 = (<Py_ssize_t>1) << q1
    cdef Py_ssize_t s2 = (<Py_ssize_t>1) << q2
    cdef Py_ssize_t mlo = ((<Py_ssize_t>1) << lo) - 1
    cdef Py_ssize_t mhi = ((<Py_ssize_t>1) << hi) - 1
    cdef double complex u00 = u[0, 0], u01 = u[0, 1], u02 = u[0, 2], u03 = u[0, 3]
    cdef double complex u10 = u[1, 0], u11 = u[1, 1], u12 = u[1, 2], u13 = u[1, 3]
    cdef double complex u20 = u[2, 0], u21 = u[2, 1], u22 = u[2, 2], u23 = u[2, 3]
    cdef double complex u30 = u[3, 0], u31 = u[3, 1], u32 = u[3, 2], u33 = u[3, 3]
    cdef Py_ssize_t t, i, i01, i10, i11
    cdef double complex a0, a1, a2, a3
    with nogil:
        for t in range(n >> 2):
            i = ((t >> lo) << (lo + 1)) | (t & mlo)
            i = ((i >> hi) << (hi + 1)) | (i & mhi)
            i01 = i | s2
            i10 = i | s1
            i11 = i | s1 | s2
            a0 = psi[i]
            a1 = psi[i01]
            a2 = psi[i10]
            a3 = psi[i11]
            psi[i] = u00 * a0 + u01 * a1 + u02 * a2 + u03 * a3
            psi[i01] = u10 * a0 + u11 * a1 + u12 * a2 + u13 * a3
            psi[i10] = u20 * a0 + u21 * a1 + u22 * a2 + u23 * a3
            psi[i11] = u30 * a0 + u31 * a1 + u32 * a2 + u33 * a3


def pauli_expval(double complex[::1] psi, unsigned long long x_mask,
                 unsigned long long z_mask):
    """Raw overlap sum(s_b * psi[b] * conj(psi[b ^ x_mask]))."""
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t b
    cdef double complex acc = 0
    cdef double sign
    with nogil:
        for b in range(n):
            sign = 1.0 - 2.0 * QC_PARITY((<unsigned long long>b) & z_mask)
            acc = acc + sign * psi[b] * psi[b ^ <Py_ssize_t>x_mask].conjugate()
    return complex(acc)


def prob_one(double complex[::1] psi, int q):
    """Probability that qubit ``q`` reads 1."""
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t step = (<Py_ssize_t>1) << q
    cdef Py_ssize_t nblocks = n >> (q + 1)
    cdef Py_ssize_t blk, base, off
    cdef double p = 0.0
    cdef double complex v
    with nogil:
        for blk in range(nblocks):
            base = (blk << (q + 1)) + step
            for off in range(step):
                v = psi[base + off]
                p += v.real * v.real + v.imag * v.imag
    return p


def collapse(double complex[::1] psi, int q, int outcome, bint renorm=True):
    """Project qubit ``q`` onto ``outcome`` in place; returns the branch weight."""
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t step = (<Py_ssize_t>1) << q
    cdef Py_ssize_t nblocks = n >> (q + 1)
    cdef Py_ssize_t keep_off = step if outcome else 0
    cdef Py_ssize_t kill_off = 0 if outcome else step
    cdef Py_ssize_t blk, base, off, i
    cdef double p = 0.0
    cdef double scale
    cdef double complex v
    with nogil:
        for blk in range(nblocks):
            base = blk << (q + 1)
            for off in range(step):
                v = psi[base + keep_off + off]
                p += v.real * v.real + v.imag * v.imag
                psi[base + kill_off + off] = 0
        if renorm and p > 0.0:
            scale = 1.0 / sqrt(p)
            for i in range(n):
                psi[i] = psi[i] * scale
    return p
