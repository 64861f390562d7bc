"""Hot counting kernels for the alert store.

Two interchangeable backends: numba-compiled loops (default when numba is
importable) and pure numpy. Select explicitly with ALERTSCOPE_KERNELS=numpy
or ALERTSCOPE_KERNELS=numba; `benchmarks/bench_kernels.py` compares them.

All kernels are pure functions over int/uint arrays. Masks are uint8 (1 =
selected) so both backends share dtypes exactly.
"""

from __future__ import annotations

import os

import numpy as np

_REQUESTED = os.environ.get("ALERTSCOPE_KERNELS", "").strip().lower()


def _numpy_selection_mask(times, t0, t1, excluded, user_code, user_lut, policy_code, policy_lut, row_flag):
    mask = (times >= t0) & (times < t1)
    mask &= excluded == 0
    mask &= user_lut[user_code] != 0
    mask &= policy_lut[policy_code] != 0
    mask &= row_flag != 0
    return mask.astype(np.uint8)


def _numpy_count_masked(codes, mask, offset, n_bins):
    shifted = codes[mask != 0].astype(np.int64) - offset
    shifted = shifted[(shifted >= 0) & (shifted < n_bins)]
    return np.bincount(shifted, minlength=n_bins).astype(np.int64)


def _numpy_count_pairs_dense(a, off_a, n_a, b, off_b, n_b, mask):
    keep = mask != 0
    ka = a[keep].astype(np.int64) - off_a
    kb = b[keep].astype(np.int64) - off_b
    inside = (ka >= 0) & (ka < n_a) & (kb >= 0) & (kb < n_b)
    keys = ka[inside] * n_b + kb[inside]
    return np.bincount(keys, minlength=n_a * n_b).astype(np.int64)


def _numpy_pair_keys_masked(a, off_a, b, off_b, n_b, mask):
    keep = mask != 0
    return (a[keep].astype(np.int64) - off_a) * n_b + (b[keep].astype(np.int64) - off_b)


def _numpy_flag_rows_with_any(member_rows, member_codes, code_lut, n_rows):
    out = np.zeros(n_rows, dtype=np.uint8)
    hits = code_lut[member_codes] != 0
    out[member_rows[hits]] = 1
    return out


def _build_numba():
    from numba import njit

    jit = njit(cache=True, nogil=True)

    @jit
    def selection_mask(times, t0, t1, excluded, user_code, user_lut, policy_code, policy_lut, row_flag):
        n = times.shape[0]
        out = np.zeros(n, dtype=np.uint8)
        for i in range(n):
            if times[i] < t0 or times[i] >= t1:
                continue
            if excluded[i] != 0 or row_flag[i] == 0:
                continue
            if user_lut[user_code[i]] == 0 or policy_lut[policy_code[i]] == 0:
                continue
            out[i] = 1
        return out

    @jit
    def count_masked(codes, mask, offset, n_bins):
        out = np.zeros(n_bins, dtype=np.int64)
        for i in range(codes.shape[0]):
            if mask[i] != 0:
                shifted = codes[i] - offset
                if 0 <= shifted < n_bins:
                    out[shifted] += 1
        return out

    @jit
    def count_pairs_dense(a, off_a, n_a, b, off_b, n_b, mask):
        out = np.zeros(n_a * n_b, dtype=np.int64)
        for i in range(a.shape[0]):
            if mask[i] != 0:
                ka = a[i] - off_a
                kb = b[i] - off_b
                if 0 <= ka < n_a and 0 <= kb < n_b:
                    out[ka * n_b + kb] += 1
        return out

    @jit
    def pair_keys_masked(a, off_a, b, off_b, n_b, mask):
        total = 0
        for i in range(mask.shape[0]):
            if mask[i] != 0:
                total += 1
        out = np.empty(total, dtype=np.int64)
        j = 0
        for i in range(a.shape[0]):
            if mask[i] != 0:
                out[j] = (a[i] - off_a) * n_b + (b[i] - off_b)
                j += 1
        return out

    @jit
    def flag_rows_with_any(member_rows, member_codes, code_lut, n_rows):
        out = np.zeros(n_rows, dtype=np.uint8)
        for i in range(member_rows.shape[0]):
            if code_lut[member_codes[i]] != 0:
                out[member_rows[i]] = 1
        return out

    return {
        "selection_mask": selection_mask,
        "count_masked": count_masked,
        "count_pairs_dense": count_pairs_dense,
        "pair_keys_masked": pair_keys_masked,
        "flag_rows_with_any": flag_rows_with_any,
    }


_NUMPY_KERNELS = {
    "selection_mask": _numpy_selection_mask,
    "count_masked": _numpy_count_masked,
    "count_pairs_dense": _numpy_count_pairs_dense,
    "pair_keys_masked": _numpy_pair_keys_masked,
    "flag_rows_with_any": _numpy_flag_rows_with_any,
}


def load_backend(name: str) -> dict:
    """Return the kernel table for an explicit backend name."""
    if name == "numpy":
        return dict(_NUMPY_KERNELS)
    if name == "numba":
        return _build_numba()
    raise ValueError(f"unknown kernel backend {name!r}")


if _REQUESTED in ("numpy", "numba"):
    BACKEND = _REQUESTED
    _KERNELS = load_backend(_REQUESTED)
elif _REQUESTED:
    raise RuntimeError(f"ALERTSCOPE_KERNELS must be 'numpy' or 'numba', not {_REQUESTED!r}")
else:
    try:
        _KERNELS = load_backend("numba")
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - depends on environment
        _KERNELS = load_backend("numpy")
        BACKEND = "numpy"

selection_mask = _KERNELS["selection_mask"]
count_masked = _KERNELS["count_masked"]
count_pairs_dense = _KERNELS["count_pairs_dense"]
pair_keys_masked = _KERNELS["pair_keys_masked"]
flag_rows_with_any = _KERNELS["flag_rows_with_any"]
