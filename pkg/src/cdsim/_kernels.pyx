# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled revision kernel for the trend-mixed temporal dynamics.

Mirrors ``_kernels_py.trend_step`` draw for draw: both implementations pull
uniforms from the generator's bit stream in the same order and apply the same
floating-point expressions, so trajectories are bit-identical across the two
backends.  See the fallback module for the consumption layout.
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

BACKEND = "cython"

cdef double _TIE_TOL = 1e-12


cdef inline long _uniform_index(double u, long n, long i, bint include_self) noexcept:
    cdef long j
    if include_self:
        j = <long>(u * n)
        if j > n - 1:
            j = n - 1
    else:
        j = <long>(u * (n - 1))
        if j > n - 2:
            j = n - 2
        if j >= i:
            j += 1
    return j


def trend_step(x, committed, long k, double u_t, double u_v, double alpha,
               long c_prev, long c_now, bint include_self, bint with_replacement,
               rng):
    """Advance the trend-mixed dynamics one synchronous step (compiled path)."""
    cdef bitgen_t *bg
    capsule = rng.bit_generator.capsule
    bg = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")

    x_arr = np.asarray(x, dtype=np.int8)
    comm_arr = np.asarray(committed, dtype=np.uint8)
    cdef long n = x_arr.shape[0]
    out = x_arr.copy()

    cdef const signed char[::1] xv = x_arr
    cdef const unsigned char[::1] cv = comm_arr
    cdef signed char[::1] ov = out

    cdef double kt = k * (-alpha / (2.0 + alpha))
    cdef double eps = k * _TIE_TOL
    cdef signed char trend_up = 1 if c_now > c_prev else (-1 if c_now < c_prev else 0)

    cdef long na = 0
    cdef long i
    for i in range(n):
        if xv[i] == 1:
            na += 1
    cdef double p_a = 0.0
    if u_v > 0.0 and 0 < na < n:
        p_a = (na * (1.0 + u_v)) / (n + u_v * na)

    seen_buf = np.empty(k, dtype=np.int64)
    cdef long[::1] seen = seen_buf
    adopters_buf = np.empty(n, dtype=np.int64)
    others_buf = np.empty(n, dtype=np.int64)
    cdef long[::1] adopters = adopters_buf
    cdef long[::1] others = others_buf

    cdef double u, d
    cdef double q = 0.0
    cdef long s, j, dr, nseen, t
    cdef long na_i = 0, nd_i = 0
    cdef bint fast = include_self and with_replacement
    cdef bint dup

    for i in range(n):
        if fast:
            u = bg.next_double(bg.state)
            if u < u_t:
                # trend branch; contact draws still consumed to keep the
                # block layout fixed
                for dr in range(k):
                    bg.next_double(bg.state)
                if not cv[i]:
                    ov[i] = trend_up if trend_up != 0 else xv[i]
                continue
            s = 0
            if u_v == 0.0:
                for dr in range(k):
                    u = bg.next_double(bg.state)
                    s += xv[_uniform_index(u, n, i, True)]
            elif na == n:
                for dr in range(k):
                    bg.next_double(bg.state)
                s = k
            elif na == 0:
                for dr in range(k):
                    bg.next_double(bg.state)
                s = -k
            else:
                for dr in range(k):
                    u = bg.next_double(bg.state)
                    s += 1 if u < p_a else -1
            if cv[i]:
                continue
            d = s - kt
            if d > eps:
                ov[i] = 1
            elif d < -eps:
                ov[i] = -1
            continue

        # sequential path: committed agents consume nothing, trend followers
        # only their coin
        if cv[i]:
            continue
        u = bg.next_double(bg.state)
        if u < u_t:
            ov[i] = trend_up if trend_up != 0 else xv[i]
            continue
        if u_v > 0.0:
            na_i = 0
            nd_i = 0
            for t in range(n):
                if t == i and not include_self:
                    continue
                if xv[t] == 1:
                    adopters[na_i] = t
                    na_i += 1
                else:
                    others[nd_i] = t
                    nd_i += 1
            q = na_i * (1.0 + u_v) / (na_i * (1.0 + u_v) + nd_i)
        s = 0
        nseen = 0
        for dr in range(k):
            while True:
                u = bg.next_double(bg.state)
                if u_v == 0.0:
                    j = _uniform_index(u, n, i, include_self)
                elif nd_i == 0:
                    j = adopters[min(<long>(u * na_i), na_i - 1)]
                elif na_i == 0:
                    j = others[min(<long>(u * nd_i), nd_i - 1)]
                elif u < q:
                    j = adopters[min(<long>(u / q * na_i), na_i - 1)]
                else:
                    j = others[min(<long>((u - q) / (1.0 - q) * nd_i), nd_i - 1)]
                if with_replacement:
                    break
                dup = False
                for t in range(nseen):
                    if seen[t] == j:
                        dup = True
                        break
                if not dup:
                    break
            seen[nseen] = j
            nseen += 1
            s += xv[j]
        d = s - kt
        if d > eps:
            ov[i] = 1
        elif d < -eps:
            ov[i] = -1

    cdef long c_new = 0
    for i in range(n):
        if ov[i] == 1:
            c_new += 1
    return out, c_new
