"""Pure-Python scan kernels.

Fallback twin of the compiled extension ``_scan_cy``; identical
algorithm and, because each per-level statistic is an exact integer
numerator divided once, bit-identical output.  Selected automatically
when the extension is not built (see :mod:`ergostat.kernels`).
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def scan_level(codes, n_cells, n, m, t_lo, t_hi, weight, out):
    """Accumulate one level's weighted statistic into the scan profile.

    For every split point ``t`` in ``[t_lo, t_hi]`` the level statistic
    is the L1 distance between the window-cell frequencies of the
    prefix ``z[:t]`` and the suffix ``z[t:]``; ``out[t - t_lo]`` gains
    ``weight`` times that statistic.

    ``codes`` holds the dense cell code of each of the ``n - m + 1``
    windows of the full series.  Prefix and suffix counts are updated
    incrementally: one window enters the prefix and one leaves the
    suffix per step.  The numerator ``sum_c |P_c * DG - S_c * DF|``
    is re-derived per step from three pieces of state: the count mass
    of prefix-only cells, the count mass of suffix-only cells, and an
    explicit list of cells occupied on both sides (only those need a
    per-cell term).  All three update in O(1) per window move.
    """
    nw = n - m + 1
    if nw <= 0:
        return
    p_cnt = np.zeros(n_cells, dtype=np.int64)
    s_cnt = np.zeros(n_cells, dtype=np.int64)
    p_init = t_lo - m + 1
    if p_init > 0:
        np.add.at(p_cnt, codes[:p_init], 1)
    if t_lo <= nw - 1:
        np.add.at(s_cnt, codes[t_lo:], 1)

    agg_p = 0  # sum of prefix counts over cells with no suffix mass
    agg_s = 0  # sum of suffix counts over cells with no prefix mass
    shared = []  # cells occupied on both sides
    pos = np.full(n_cells, -1, dtype=np.int64)
    for c in range(n_cells):
        pc, sc = int(p_cnt[c]), int(s_cnt[c])
        if sc == 0:
            agg_p += pc
        elif pc == 0:
            agg_s += sc
        else:
            pos[c] = len(shared)
            shared.append(c)

    p_cnt = p_cnt.tolist()
    s_cnt = s_cnt.tolist()
    pos = pos.tolist()
    codes = codes.tolist()

    for t in range(t_lo, t_hi + 1):
        df = t - m + 1 if t >= m else 0
        dg = n - t - m + 1 if n - t >= m else 0
        if df <= 0 and dg <= 0:
            stat = 0.0
        elif df <= 0 or dg <= 0:
            stat = 1.0
        else:
            num = dg * agg_p + df * agg_s
            for c in shared:
                num += abs(p_cnt[c] * dg - s_cnt[c] * df)
            stat = num / (df * dg)
        out[t - t_lo] += weight * stat

        if t == t_hi:
            break
        # advance the split: window ending at position t joins the
        # prefix, window starting at position t leaves the suffix
        new_p = t + 1 - m
        if new_p >= 0:
            c = codes[new_p]
            if s_cnt[c] == 0:
                agg_p += 1
            elif p_cnt[c] == 0:
                agg_s -= s_cnt[c]
                pos[c] = len(shared)
                shared.append(c)
            p_cnt[c] += 1
        if t <= nw - 1:
            c = codes[t]
            if p_cnt[c] == 0:
                agg_s -= 1
            elif s_cnt[c] == 1:
                i = pos[c]
                last = shared.pop()
                if last != c:
                    shared[i] = last
                    pos[last] = i
                pos[c] = -1
                agg_p += p_cnt[c]
            s_cnt[c] -= 1


def markov_path(cum_rows, init_state, uniforms):
    """Finite-chain state path from an initial state and iid uniforms.

    ``cum_rows`` is the row-wise cumulative transition matrix; each
    step picks the smallest next state whose cumulative probability
    exceeds the uniform draw.
    """
    n = uniforms.shape[0] + 1
    states = np.empty(n, dtype=np.int64)
    states[0] = init_state
    cur = init_state
    rows = cum_rows.tolist()
    us = uniforms.tolist()
    out = states
    for i in range(1, n):
        u = us[i - 1]
        row = rows[cur]
        j = 0
        while row[j] <= u:
            j += 1
        cur = j
        out[i] = j
    return states
