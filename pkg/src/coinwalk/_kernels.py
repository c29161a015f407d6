"""Streaming kernels for the hot density-operator updates.

A density operator over coin (x) position is a (2X, 2X) complex matrix whose
four X-by-X blocks couple the coin indices.  Every per-step update is linear
and local, so each kernel reads the matrix once and writes the result once;
on large windows these run at memory bandwidth, which is what bounds a
200-1000 step evolution.  All kernels expect C-contiguous complex128 input
and a preallocated output of the same shape (input and output must not
alias).

``coin_stage`` implements the combined coin superoperator

    out = p_coh * U (g .* rho) U^dag  +  r * 1 (x) tr_coin(rho)

where ``g`` scales the coin-off-diagonal blocks by ``g01`` (1 = untouched)
and ``.*`` is blockwise.  The parameter triple covers every coin stage used
here: a plain unitary (1, 1, 0), depolarizing (p, 1, (1-p)/2), dephasing
(1, 2p'-1, 0), and their flag-gated combination (p, 2p'-1, (1-p)/2).
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def coin_stage(mat, out, u, g01, p_coh, r):
    x = mat.shape[0] // 2
    u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    c00, c01 = np.conj(u00), np.conj(u01)
    c10, c11 = np.conj(u10), np.conj(u11)
    for i in range(x):
        for j in range(x):
            m00 = mat[i, j]
            m11 = mat[x + i, x + j]
            m01 = g01 * mat[i, x + j]
            m10 = g01 * mat[x + i, j]
            s = r * (m00 + m11)
            y00 = u00 * m00 + u01 * m10
            y01 = u00 * m01 + u01 * m11
            y10 = u10 * m00 + u11 * m10
            y11 = u10 * m01 + u11 * m11
            out[i, j] = p_coh * (y00 * c00 + y01 * c01) + s
            out[i, x + j] = p_coh * (y00 * c10 + y01 * c11)
            out[x + i, j] = p_coh * (y10 * c00 + y11 * c01)
            out[x + i, x + j] = p_coh * (y10 * c10 + y11 * c11) + s


@numba.njit(cache=True)
def shift_line(mat, out, s0, s1):
    # Coin-c amplitudes move s_c sites (s in {-1, +1}); mass may not cross the
    # window edge (callers check edge occupancy beforehand).  Vacated rows and
    # columns are zeroed explicitly instead of clearing the whole output.
    x = mat.shape[0] // 2
    s = (s0, s1)
    for c in range(2):
        rb = c * x
        sc = s[c]
        for d in range(2):
            cb = d * x
            sd = s[d]
            for i in range(x - 1):
                src = rb + (i + 1 if sc < 0 else i)
                dst = rb + (i if sc < 0 else i + 1)
                if sd < 0:
                    out[dst, cb : cb + x - 1] = mat[src, cb + 1 : cb + x]
                    out[dst, cb + x - 1] = 0.0
                else:
                    out[dst, cb + 1 : cb + x] = mat[src, cb : cb + x - 1]
                    out[dst, cb] = 0.0
            vac = rb + (x - 1 if sc < 0 else 0)
            out[vac, cb : cb + x] = 0.0


@numba.njit(cache=True)
def shift_circle(mat, out, s0, s1):
    x = mat.shape[0] // 2
    s = (s0, s1)
    for c in range(2):
        rb = c * x
        sc = s[c]
        for d in range(2):
            cb = d * x
            sd = s[d]
            for i in range(x):
                di = i + sc
                if di >= x:
                    di -= x
                elif di < 0:
                    di += x
                src = rb + i
                dst = rb + di
                if sd > 0:
                    out[dst, cb + 1 : cb + x] = mat[src, cb : cb + x - 1]
                    out[dst, cb] = mat[src, cb + x - 1]
                else:
                    out[dst, cb : cb + x - 1] = mat[src, cb + 1 : cb + x]
                    out[dst, cb + x - 1] = mat[src, cb]


@numba.njit(cache=True)
def tunnel_line(mat, out, q):
    # out = q*rho + h*(rho shifted +1 on both axes) + h*(shifted -1 on both),
    # no wrap; callers guarantee one empty site of margin at each edge.
    x = mat.shape[0] // 2
    h = 0.5 * (1.0 - q)
    for c in range(2):
        rb = c * x
        for d in range(2):
            cb = d * x
            for i in range(x):
                up = rb + i - 1    # source row for the rightward hop
                dn = rb + i + 1    # source row for the leftward hop
                has_up = i >= 1
                has_dn = i < x - 1
                row = rb + i
                o0 = q * mat[row, cb]
                if has_dn:
                    o0 += h * mat[dn, cb + 1]
                out[row, cb] = o0
                for j in range(1, x - 1):
                    v = q * mat[row, cb + j]
                    if has_up:
                        v += h * mat[up, cb + j - 1]
                    if has_dn:
                        v += h * mat[dn, cb + j + 1]
                    out[row, cb + j] = v
                if x > 1:
                    ol = q * mat[row, cb + x - 1]
                    if has_up:
                        ol += h * mat[up, cb + x - 2]
                    out[row, cb + x - 1] = ol


@numba.njit(cache=True)
def tunnel_circle(mat, out, q):
    x = mat.shape[0] // 2
    h = 0.5 * (1.0 - q)
    for c in range(2):
        rb = c * x
        for d in range(2):
            cb = d * x
            for i in range(x):
                row = rb + i
                up = rb + (i - 1 if i >= 1 else x - 1)
                dn = rb + (i + 1 if i < x - 1 else 0)
                out[row, cb] = q * mat[row, cb] + h * (mat[up, cb + x - 1] + mat[dn, cb + 1])
                for j in range(1, x - 1):
                    out[row, cb + j] = q * mat[row, cb + j] + h * (
                        mat[up, cb + j - 1] + mat[dn, cb + j + 1]
                    )
                if x > 1:
                    out[row, cb + x - 1] = q * mat[row, cb + x - 1] + h * (
                        mat[up, cb + x - 2] + mat[dn, cb]
                    )
