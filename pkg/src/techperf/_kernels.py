"""Compiled inner loops for the idea pool (masks that fit in one uint64)."""
from __future__ import annotations

import numba
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@numba.njit(cache=True, inline="always")
def _slot(key, bits):
    return (key * _GOLDEN) >> np.uint64(64 - bits)


@numba.njit(cache=True)
def hash_insert(table, bits, key):
    """Insert ``key`` (non-zero) into an open-addressing table; 0 marks empty."""
    mask = np.uint64(table.size - 1)
    i = _slot(key, bits)
    while table[i] != 0:
        if table[i] == key:
            return
        i = (i + np.uint64(1)) & mask
    table[i] = key


@numba.njit(cache=True)
def hash_contains(table, bits, key):
    mask = np.uint64(table.size - 1)
    i = _slot(key, bits)
    while table[i] != 0:
        if table[i] == key:
            return True
        i = (i + np.uint64(1)) & mask
    return False


@numba.njit(cache=True)
def hash_build(keys, bits):
    table = np.zeros(1 << bits, dtype=np.uint64)
    for k in keys:
        hash_insert(table, bits, k)
    return table


@numba.njit(cache=True)
def feasible_step(masks, n, hits, dead, table, bits, rng):
    """Run ``hits`` successful attempts over the first ``n`` ideas.

    The initiator is drawn uniformly among ideas not flagged in ``dead``;
    one found to have no legal partner is flagged and another is drawn. The
    partner is uniform among legal partners (disjoint ancestors, union not in
    ``table``). New masks are written from index ``n`` on; ``masks``,
    ``dead`` and ``table`` must have room. Returns the new pool size.
    """
    alive = np.empty(n, dtype=np.int64)
    m = 0
    for i in range(n):
        if not dead[i]:
            alive[m] = i
            m += 1
    buf = np.empty(n, dtype=np.int64)
    size = n
    for _ in range(hits):
        found = False
        while m > 0:
            r = rng.integers(0, m)
            a = alive[r]
            ma = masks[a]
            c = 0
            for j in range(n):
                if masks[j] & ma == 0:
                    buf[c] = j
                    c += 1
            while c > 0:
                q = rng.integers(0, c)
                u = ma | masks[buf[q]]
                if not hash_contains(table, bits, u):
                    masks[size] = u
                    dead[size] = False
                    hash_insert(table, bits, u)
                    size += 1
                    found = True
                    break
                c -= 1
                buf[q] = buf[c]
            if found:
                break
            dead[a] = True
            m -= 1
            alive[r] = alive[m]
        if m == 0:
            break
    # an exhausted idea may pair with an idea created this step
    if size > n:
        for i in range(n):
            if dead[i]:
                mi = masks[i]
                for k in range(n, size):
                    if masks[k] & mi == 0:
                        dead[i] = False
                        break
    return size
