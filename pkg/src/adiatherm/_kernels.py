"""Hot numeric kernels: numba-jitted versions with pure-numpy fallbacks.

Backend selection via the ADIATHERM_KERNELS environment variable:

* ``auto``  (default) use numba when importable, else numpy
* ``numba`` require numba, fail loudly if missing
* ``numpy`` force the pure-numpy path

Both backends use a fixed summation / scan order, so results are
deterministic and agree to rounding.
"""

from __future__ import annotations

import os

import numpy as np

_REQUESTED = os.environ.get("ADIATHERM_KERNELS", "auto").strip().lower()
if _REQUESTED not in ("auto", "numba", "numpy"):
    raise ValueError(f"ADIATHERM_KERNELS must be auto|numba|numpy, got {_REQUESTED!r}")

_ROW_BLOCK = 256


def _numpy_chi_pair_sum(energies, weights, v2, tol):
    """sum_{m != n, |E_m - E_n| > tol} (w_m - w_n)^2 V2[m, n] / (E_m - E_n)^2.

    Row-blocked to bound temporaries at 2**12 dimensions.
    """
    n = energies.shape[0]
    total = 0.0
    for start in range(0, n, _ROW_BLOCK):
        rows = slice(start, min(start + _ROW_BLOCK, n))
        de = energies[rows, None] - energies[None, :]
        dw = weights[rows, None] - weights[None, :]
        keep = np.abs(de) > tol
        contrib = np.zeros_like(de)
        np.divide(dw * dw * v2[rows, :], de * de, out=contrib, where=keep)
        total += float(contrib.sum())
    return total


def _numpy_pair_weight_sum(weights, v2):
    """sum_{m, n} (w_m - w_n)^2 V2[m, n], row-blocked."""
    n = weights.shape[0]
    total = 0.0
    for start in range(0, n, _ROW_BLOCK):
        rows = slice(start, min(start + _ROW_BLOCK, n))
        dw = weights[rows, None] - weights[None, :]
        total += float(np.sum(dw * dw * v2[rows, :]))
    return total


def _numpy_greedy_sweep(order_rows, order_cols, d):
    """Assign entries in descending-overlap order, skipping used rows/columns.

    Equivalent to repeatedly taking the global argmax of the remaining
    overlap matrix, at O(d^2 log d) instead of O(d^3).
    """
    perm = np.full(d, -1, dtype=np.int64)
    row_used = np.zeros(d, dtype=bool)
    col_used = np.zeros(d, dtype=bool)
    assigned = 0
    for i, j in zip(order_rows, order_cols):
        if not row_used[i] and not col_used[j]:
            perm[j] = i
            row_used[i] = True
            col_used[j] = True
            assigned += 1
            if assigned == d:
                break
    return perm


_BACKEND = "numpy"
_chi_pair_sum_impl = _numpy_chi_pair_sum
_pair_weight_sum_impl = _numpy_pair_weight_sum
_greedy_sweep_impl = _numpy_greedy_sweep

if _REQUESTED in ("auto", "numba"):
    try:
        from numba import njit

        @njit(cache=True)
        def _numba_chi_pair_sum(energies, weights, v2, tol):
            n = energies.shape[0]
            total = 0.0
            for m in range(n):
                for k in range(n):
                    de = energies[m] - energies[k]
                    if abs(de) > tol:
                        dw = weights[m] - weights[k]
                        total += dw * dw * v2[m, k] / (de * de)
            return total

        @njit(cache=True)
        def _numba_pair_weight_sum(weights, v2):
            n = weights.shape[0]
            total = 0.0
            for m in range(n):
                for k in range(n):
                    dw = weights[m] - weights[k]
                    total += dw * dw * v2[m, k]
            return total

        @njit(cache=True)
        def _numba_greedy_sweep(order_rows, order_cols, d):
            perm = np.full(d, -1, dtype=np.int64)
            row_used = np.zeros(d, dtype=np.bool_)
            col_used = np.zeros(d, dtype=np.bool_)
            assigned = 0
            for k in range(order_rows.shape[0]):
                i = order_rows[k]
                j = order_cols[k]
                if not row_used[i] and not col_used[j]:
                    perm[j] = i
                    row_used[i] = True
                    col_used[j] = True
                    assigned += 1
                    if assigned == d:
                        break
            return perm

        _chi_pair_sum_impl = _numba_chi_pair_sum
        _pair_weight_sum_impl = _numba_pair_weight_sum
        _greedy_sweep_impl = _numba_greedy_sweep
        _BACKEND = "numba"
    except ImportError:
        if _REQUESTED == "numba":
            raise


def backend_name():
    """Active kernel backend: 'numba' or 'numpy'."""
    return _BACKEND


def chi_pair_sum(energies, weights, v2, tol):
    """Degeneracy-excluded spectral pair sum behind the fidelity susceptibility."""
    energies = np.ascontiguousarray(energies, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    v2 = np.ascontiguousarray(v2, dtype=np.float64)
    return float(_chi_pair_sum_impl(energies, weights, v2, float(tol)))


def pair_weight_sum(weights, v2):
    """Plain weighted pair sum sum_{m,n} (w_m - w_n)^2 V2[m, n]."""
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    v2 = np.ascontiguousarray(v2, dtype=np.float64)
    return float(_pair_weight_sum_impl(weights, v2))


def greedy_match(absolute_overlap):
    """Greedy maximal-overlap assignment on |<new_i|old_j>|.

    Processes entries in descending order, skipping used rows and columns
    (identical to repeated global argmax); ties broken by flat index, so the
    result is deterministic.  Returns perm with perm[j] = new-column index
    assigned to old label j.
    """
    a = np.ascontiguousarray(absolute_overlap, dtype=np.float64)
    d = a.shape[0]
    # stable descending order; secondary key = flat index keeps determinism
    order = np.argsort(-a, axis=None, kind="stable")
    rows = (order // d).astype(np.int64)
    cols = (order % d).astype(np.int64)
    return np.asarray(_greedy_sweep_impl(rows, cols, d))


def count_ambiguous_labels(absolute_overlap, ambiguity_tol=1e-6):
    """Number of old labels whose top two overlap candidates sit within tol."""
    a = np.asarray(absolute_overlap, dtype=np.float64)
    d = a.shape[0]
    if d < 2:
        return 0
    top2 = np.partition(a, d - 2, axis=0)[d - 2 :, :]
    return int(np.sum(top2[1, :] - top2[0, :] < ambiguity_tol))


def match_columns(absolute_overlap, ambiguity_tol=1e-6):
    """Assign new eigenvector columns to old labels by maximal overlap.

    Returns (perm, n_ambiguous).  Fast path: when every old label has a
    clear best new column (margin > ambiguity_tol) and those choices are all
    distinct, the column-argmax assignment coincides with the greedy one and
    is returned directly; otherwise the full greedy sweep runs.
    """
    a = np.asarray(absolute_overlap, dtype=np.float64)
    d = a.shape[0]
    n_ambiguous = count_ambiguous_labels(a, ambiguity_tol)
    best_rows = np.argmax(a, axis=0)
    if n_ambiguous == 0 and np.unique(best_rows).size == d:
        return best_rows.astype(np.int64), 0
    return greedy_match(a), n_ambiguous
