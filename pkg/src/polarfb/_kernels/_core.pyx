# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: GF(2) butterfly and the successive-cancellation sweep.

Semantically identical to polarfb._kernels.pure (bit-exact for the min-sum
and erasure paths); see that module for the contract.
"""

from libc.math cimport copysign, exp, fabs, log1p

IS_COMPILED = True


def butterfly_inplace(unsigned char[::1] bits):
    cdef Py_ssize_t N = bits.shape[0]
    cdef Py_ssize_t step = 1, start, j
    with nogil:
        while step < N:
            start = 0
            while start < N:
                for j in range(step):
                    bits[start + j] ^= bits[start + step + j]
                start += 2 * step
            step *= 2


cdef inline double _sign(double v) noexcept nogil:
    if v > 0:
        return 1.0
    elif v < 0:
        return -1.0
    return 0.0


cdef inline unsigned char _decide(const unsigned char[::1] frozen,
                                  const unsigned char[::1] coins,
                                  const unsigned char* feed,
                                  const unsigned char* flip,
                                  unsigned char[::1] out,
                                  double value, Py_ssize_t i) noexcept nogil:
    """Leaf decision; returns the bit fed forward."""
    cdef int raw
    if frozen[i]:
        raw = 0
    elif value > 0:
        raw = 0
    elif value < 0:
        raw = 1
    else:
        raw = coins[i]
    if feed != NULL:
        out[i] = <unsigned char> raw
        return feed[i]
    if flip != NULL:
        raw ^= flip[i]
    out[i] = <unsigned char> raw
    return <unsigned char> raw


cdef Py_ssize_t _descend(double[:, ::1] L, unsigned char[:, ::1] B,
                         const unsigned char[::1] frozen,
                         const unsigned char[::1] coins,
                         const unsigned char* feed, const unsigned char* flip,
                         bint erasure_mode, bint exact_f,
                         unsigned char[::1] out,
                         Py_ssize_t depth, Py_ssize_t base, Py_ssize_t size) noexcept nogil:
    cdef Py_ssize_t half, k
    cdef double a, b, v, m, g
    cdef unsigned char fed_l, fed_r
    cdef Py_ssize_t updates = 0

    cdef const double* row = &L[depth, base]
    cdef double* child = &L[depth + 1, base]
    cdef unsigned char* brow = &B[depth, base]
    cdef unsigned char* bchild = &B[depth + 1, base]

    if size == 2:
        a = row[0]
        b = row[1]
        m = fabs(a)
        if fabs(b) < m:
            m = fabs(b)
        v = copysign(m, a * b)
        if exact_f:
            v = v + log1p(exp(-fabs(a + b))) - log1p(exp(-fabs(a - b)))
        child[0] = v
        fed_l = _decide(frozen, coins, feed, flip, out, v, base)
        bchild[0] = fed_l
        g = b + (1.0 - 2.0 * fed_l) * a
        if erasure_mode:
            g = _sign(g)
        child[1] = g
        fed_r = _decide(frozen, coins, feed, flip, out, g, base + 1)
        bchild[1] = fed_r
        brow[0] = fed_l ^ fed_r
        brow[1] = fed_r
        return 2

    half = size // 2
    if exact_f:
        for k in range(half):
            a = row[k]
            b = row[half + k]
            m = fabs(a)
            if fabs(b) < m:
                m = fabs(b)
            child[k] = (copysign(m, a * b)
                        + log1p(exp(-fabs(a + b))) - log1p(exp(-fabs(a - b))))
    else:
        for k in range(half):
            a = row[k]
            b = row[half + k]
            m = fabs(a)
            if fabs(b) < m:
                m = fabs(b)
            child[k] = copysign(m, a * b)
    updates += half
    updates += _descend(L, B, frozen, coins, feed, flip, erasure_mode, exact_f,
                        out, depth + 1, base, half)
    if erasure_mode:
        for k in range(half):
            g = row[half + k] + (1.0 - 2.0 * bchild[k]) * row[k]
            child[half + k] = (<double> (g > 0.0)) - (<double> (g < 0.0))
    else:
        for k in range(half):
            child[half + k] = row[half + k] + (1.0 - 2.0 * bchild[k]) * row[k]
    updates += half
    updates += _descend(L, B, frozen, coins, feed, flip, erasure_mode, exact_f,
                        out, depth + 1, base + half, half)
    for k in range(half):
        brow[k] = bchild[k] ^ bchild[half + k]
        brow[half + k] = bchild[half + k]
    return updates


def sc_run(const double[::1] llr_tree,
           const unsigned char[::1] frozen,
           const unsigned char[::1] coins,
           feed, flip,
           bint erasure_mode, bint exact_f,
           double[:, ::1] L, unsigned char[:, ::1] B,
           unsigned char[::1] out):
    cdef Py_ssize_t N = llr_tree.shape[0]
    cdef Py_ssize_t k
    cdef const unsigned char[::1] feed_mv
    cdef const unsigned char[::1] flip_mv
    cdef const unsigned char* feed_p = NULL
    cdef const unsigned char* flip_p = NULL
    if feed is not None:
        feed_mv = feed
        feed_p = &feed_mv[0]
    if flip is not None:
        flip_mv = flip
        flip_p = &flip_mv[0]
    for k in range(N):
        L[0, k] = llr_tree[k]
    if N == 1:
        B[0, 0] = _decide(frozen, coins, feed_p, flip_p, out, L[0, 0], 0)
        return 0
    return _descend(L, B, frozen, coins, feed_p, flip_p, erasure_mode, exact_f,
                    out, 0, 0, N)
