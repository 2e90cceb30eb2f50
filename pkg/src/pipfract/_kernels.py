"""Compiled inner loops for the segmented sieve.

Flags arrays cover odd numbers only: bit j of a block starting at
``first_odd`` stands for the integer ``first_odd + 2*j``.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def block_offsets(primes, first_odd):
    """First marking index per prime for a block starting at ``first_odd``.

    Marking for prime p begins at max(p*p, smallest odd multiple of p
    that is >= first_odd); the returned index may lie beyond the block.
    """
    off = np.empty(primes.shape[0], dtype=np.int64)
    for j in range(primes.shape[0]):
        p = primes[j]
        start = ((first_odd + p - 1) // p) * p
        if start < p * p:
            start = p * p
        if start % 2 == 0:
            start += p
        off[j] = (start - first_odd) // 2
    return off


@njit(cache=True, nogil=True)
def mark_block(flags, offsets, primes):
    """Clear composite flags in one block, rolling offsets to the next.

    ``offsets`` is updated in place so consecutive blocks can be sieved
    without recomputing start positions.
    """
    n = flags.shape[0]
    for j in range(primes.shape[0]):
        idx = offsets[j]
        if idx >= n:
            offsets[j] = idx - n
            continue
        p = primes[j]
        while idx < n:
            flags[idx] = False
            idx += p
        offsets[j] = idx - n
