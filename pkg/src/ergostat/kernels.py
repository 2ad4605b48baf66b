"""Kernel backend selection and the level-coding scan driver.

At import time the compiled extension is preferred; the pure-Python
twin is used when the extension is missing.  ``ERGOSTAT_BACKEND``
(``cython`` or ``python``) forces a choice, which the benchmark and
the parity tests use to compare both implementations.
"""

from __future__ import annotations

import os

import numpy as np

from . import _scan_py
from .cylinder import scaled_coords
from .distance import MAX_WINDOWS, WeightScheme
from .errors import ConfigError

try:
    from . import _scan_cy
except ImportError:  # extension not built
    _scan_cy = None


def _pick(name: str | None):
    if name is None:
        name = os.environ.get("ERGOSTAT_BACKEND")
    if name is None:
        return _scan_cy if _scan_cy is not None else _scan_py
    if name == "python":
        return _scan_py
    if name == "cython":
        if _scan_cy is None:
            raise ConfigError("cython backend requested but the extension is not built")
        return _scan_cy
    raise ConfigError(f"unknown backend {name!r}")


def backend_name(backend: str | None = None) -> str:
    return _pick(backend).BACKEND


def available_backends() -> tuple:
    return ("python",) if _scan_cy is None else ("python", "cython")


def window_codes(values: np.ndarray, m: int, l: int):
    """Dense cell codes of all length-``m`` windows at resolution ``l``.

    Returns ``(codes, n_cells)`` where codes are in ``[0, n_cells)``
    and equal codes mean equal cell coordinate tuples.
    """
    n = values.size
    nw = n - m + 1
    if nw <= 0:
        return np.empty(0, dtype=np.int64), 0
    a = scaled_coords(values, l)
    uniq, inv = np.unique(a, return_inverse=True)
    inv = inv.reshape(-1).astype(np.int64, copy=False)
    k = int(uniq.size)
    if m == 1:
        return inv, k
    if k > 1 and m * np.log2(k) < 62:
        codes = inv[:nw].copy()
        for j in range(1, m):
            codes *= k
            codes += inv[j : j + nw]
        wuniq, winv = np.unique(codes, return_inverse=True)
        return winv.reshape(-1).astype(np.int64, copy=False), int(wuniq.size)
    if k == 1:
        return np.zeros(nw, dtype=np.int64), 1
    windows = np.lib.stride_tricks.sliding_window_view(a, m)
    wuniq, winv = np.unique(windows, axis=0, return_inverse=True)
    return winv.reshape(-1).astype(np.int64, copy=False), int(wuniq.shape[0])


def scan_dhat(values: np.ndarray, scheme: WeightScheme, t_lo: int, t_hi: int,
              backend: str | None = None) -> np.ndarray:
    """Distance profile ``t -> dhat(z[:t], z[t:])`` for ``t`` in ``[t_lo, t_hi]``.

    Bit-identical to recomputing the truncated distance from scratch at
    every split point.
    """
    impl = _pick(backend)
    n = int(values.size)
    if n >= MAX_WINDOWS:
        raise ConfigError(
            f"series of length {n} exceeds the exact-arithmetic scan cap {MAX_WINDOWS}"
        )
    if t_lo > t_hi:
        raise ValueError("empty scan range")
    if not (0 <= t_lo and t_hi <= n):
        raise ValueError("scan range outside the series")
    out = np.zeros(t_hi - t_lo + 1)
    for m, l, w in scheme.levels():
        codes, n_cells = window_codes(values, m, l)
        impl.scan_level(codes, n_cells, n, m, t_lo, t_hi, w, out)
    return out


def markov_path(cum_rows: np.ndarray, init_state: int, uniforms: np.ndarray,
                backend: str | None = None) -> np.ndarray:
    """State path of a finite chain driven by iid uniforms."""
    impl = _pick(backend)
    cum_rows = np.ascontiguousarray(cum_rows, dtype=np.float64)
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    return np.asarray(impl.markov_path(cum_rows, int(init_state), uniforms))
