# cython: language_level=3
"""Compiled scan kernels; algorithmic twin of ``_scan_py``.

Integer numerators keep the per-level statistics exact, so this
extension produces bit-identical results to the pure-Python fallback
(no fast-math; plain IEEE double arithmetic).
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc

cnp.import_array()

BACKEND = "cython"


def scan_level(cnp.int64_t[::1] codes, Py_ssize_t n_cells, Py_ssize_t n,
               Py_ssize_t m, Py_ssize_t t_lo, Py_ssize_t t_hi,
               double weight, double[::1] out):
    """Accumulate one level's weighted prefix/suffix L1 statistic into ``out``.

    See ``_scan_py.scan_level`` for the algorithm; state layout and
    update order are identical.
    """
    cdef Py_ssize_t nw = n - m + 1
    if nw <= 0:
        return
    cdef cnp.int64_t *p_cnt = <cnp.int64_t *> malloc(n_cells * sizeof(cnp.int64_t))
    cdef cnp.int64_t *s_cnt = <cnp.int64_t *> malloc(n_cells * sizeof(cnp.int64_t))
    cdef cnp.int64_t *shared = <cnp.int64_t *> malloc(n_cells * sizeof(cnp.int64_t))
    cdef cnp.int64_t *pos = <cnp.int64_t *> malloc(n_cells * sizeof(cnp.int64_t))
    if p_cnt == NULL or s_cnt == NULL or shared == NULL or pos == NULL:
        free(p_cnt); free(s_cnt); free(shared); free(pos)
        raise MemoryError()
    cdef Py_ssize_t n_shared = 0
    cdef Py_ssize_t i, t, idx
    cdef cnp.int64_t c, last
    cdef cnp.int64_t agg_p = 0, agg_s = 0, num, term
    cdef cnp.int64_t df, dg
    cdef Py_ssize_t p_init = t_lo - m + 1
    cdef double stat

    try:
        for i in range(n_cells):
            p_cnt[i] = 0
            s_cnt[i] = 0
            pos[i] = -1
        if p_init > 0:
            for i in range(p_init):
                p_cnt[codes[i]] += 1
        if t_lo <= nw - 1:
            for i in range(t_lo, nw):
                s_cnt[codes[i]] += 1
        for i in range(n_cells):
            if s_cnt[i] == 0:
                agg_p += p_cnt[i]
            elif p_cnt[i] == 0:
                agg_s += s_cnt[i]
            else:
                pos[i] = n_shared
                shared[n_shared] = i
                n_shared += 1

        for t in range(t_lo, t_hi + 1):
            df = t - m + 1 if t >= m else 0
            dg = n - t - m + 1 if n - t >= m else 0
            if df <= 0 and dg <= 0:
                stat = 0.0
            elif df <= 0 or dg <= 0:
                stat = 1.0
            else:
                num = dg * agg_p + df * agg_s
                for i in range(n_shared):
                    c = shared[i]
                    term = p_cnt[c] * dg - s_cnt[c] * df
                    num += term if term >= 0 else -term
                stat = (<double> num) / (<double> (df * dg))
            out[t - t_lo] += weight * stat

            if t == t_hi:
                break
            if t + 1 - m >= 0:
                c = codes[t + 1 - m]
                if s_cnt[c] == 0:
                    agg_p += 1
                elif p_cnt[c] == 0:
                    agg_s -= s_cnt[c]
                    pos[c] = n_shared
                    shared[n_shared] = c
                    n_shared += 1
                p_cnt[c] += 1
            if t <= nw - 1:
                c = codes[t]
                if p_cnt[c] == 0:
                    agg_s -= 1
                elif s_cnt[c] == 1:
                    idx = pos[c]
                    n_shared -= 1
                    last = shared[n_shared]
                    if last != c:
                        shared[idx] = last
                        pos[last] = idx
                    pos[c] = -1
                    agg_p += p_cnt[c]
                s_cnt[c] -= 1
    finally:
        free(p_cnt)
        free(s_cnt)
        free(shared)
        free(pos)


def markov_path(double[:, ::1] cum_rows, cnp.int64_t init_state,
                double[::1] uniforms):
    """Finite-chain state path; twin of ``_scan_py.markov_path``."""
    cdef Py_ssize_t n = uniforms.shape[0] + 1
    states_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] states = states_arr
    cdef Py_ssize_t i
    cdef cnp.int64_t cur = init_state, j
    cdef double u
    states[0] = init_state
    for i in range(1, n):
        u = uniforms[i - 1]
        j = 0
        while cum_rows[cur, j] <= u:
            j += 1
        cur = j
        states[i] = j
    return states_arr
