"""Open-addressing int64 -> int64 table for numba kernels.

Keys are packed lattice sites.  There is no delete; callers validate values
against their own arrays and rebuild when the load factor gets high.
"""
import numpy as np
from numba import njit

EMPTY = np.int64(-(2**63))
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@njit(cache=True)
def pack(x, y):
    return (np.int64(x) << np.int64(32)) + np.int64(y)


@njit(cache=True)
def new_table(min_capacity):
    cap = 16
    while cap < 2 * min_capacity:
        cap *= 2
    keys = np.full(cap, EMPTY, dtype=np.int64)
    vals = np.zeros(cap, dtype=np.int64)
    return keys, vals


@njit(cache=True)
def _slot(keys, key):
    mask = np.uint64(keys.shape[0] - 1)
    h = np.uint64(key) * _GOLDEN
    i = (h ^ (h >> np.uint64(32))) & mask
    while True:
        k = keys[i]
        if k == key or k == EMPTY:
            return i
        i = (i + np.uint64(1)) & mask


@njit(cache=True)
def get(keys, vals, key, default):
    i = _slot(keys, key)
    if keys[i] == key:
        return vals[i]
    return default


@njit(cache=True)
def put(keys, vals, key, val):
    """Insert or overwrite; returns 1 if a new slot was used."""
    i = _slot(keys, key)
    fresh = 1 if keys[i] == EMPTY else 0
    keys[i] = key
    vals[i] = val
    return fresh


@njit(cache=True)
def clear(keys):
    keys[:] = EMPTY
