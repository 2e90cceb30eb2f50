"""Segmented prime sieve with checkpointed random access.

The engine generates primes up to a configurable universe bound (default
3.2e10) in fixed-size segments, answers count and index queries by
streaming segments forward, and can persist evenly spaced index
checkpoints to disk so later queries only sieve a short stretch.
"""

from __future__ import annotations

import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels

DEFAULT_UNIVERSE_BOUND = 32_000_000_000
DEFAULT_SEGMENT_SPAN = 1 << 26
DEFAULT_CHECKPOINT_STRIDE = 10_000_000

# Working block for internal streaming, in odd-flag count. 1 MiB of bool
# flags keeps the marking loop inside L2 cache.
_BLOCK_ODDS = 1 << 20

_CACHE_MAGIC = b"PIPC"
_CACHE_VERSION = 1


class UniverseBoundError(ValueError):
    """A requested prime lies beyond the configured universe bound.

    ``position`` is the offset of the first offending query within the
    index list that triggered the error, when known.
    """

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class SieveSegment:
    """Primality flags for one interval, packed one bit per odd number.

    Bit j of ``bits`` stands for the odd number ``odd_base + 2*j``; it is
    set iff that number is prime. The prime 2 is not representable in the
    packed form and is reported by :meth:`primes` when ``lo <= 2 < hi``.
    """

    lo: int
    hi: int
    bits: np.ndarray

    @property
    def odd_base(self) -> int:
        return self.lo | 1

    @property
    def n_odd(self) -> int:
        return max(0, (self.hi - self.odd_base + 1) // 2)

    def flags(self) -> np.ndarray:
        """Unpacked bool array over the odd numbers in [lo, hi)."""
        return np.unpackbits(self.bits, count=self.n_odd).astype(bool)

    def primes(self) -> np.ndarray:
        vals = self.odd_base + 2 * np.flatnonzero(self.flags()).astype(np.int64)
        if self.lo <= 2 < self.hi:
            vals = np.concatenate(([np.int64(2)], vals))
        return vals

    def count(self) -> int:
        n = int(np.count_nonzero(self.flags()))
        if self.lo <= 2 < self.hi:
            n += 1
        return n


@dataclass(frozen=True)
class CacheSummary:
    """Result of building a checkpoint cache."""

    count: int
    max_prime: int
    checkpoints: int
    stride: int
    path: str


def _pn_lower_bound(n: int) -> float:
    # Dusart-style lower bound for the n-th prime, valid for n >= 2.
    if n < 6:
        return 0.0
    ln = math.log(n)
    return n * (ln + math.log(ln) - 1.0)


class PrimeEngine:
    """Prime generation, counting, and random access over one universe.

    Query methods are read-only after construction and safe to call from
    several threads once any cache has been loaded.
    """

    def __init__(
        self,
        universe_bound: int = DEFAULT_UNIVERSE_BOUND,
        segment_span: int = DEFAULT_SEGMENT_SPAN,
        checkpoint_stride: int = DEFAULT_CHECKPOINT_STRIDE,
        cache_path: str | os.PathLike | None = None,
        threads: int = 1,
    ):
        if universe_bound < 2:
            raise ValueError("universe_bound must be at least 2")
        if universe_bound >= 1 << 63:
            raise ValueError("universe_bound overflows 64-bit")
        if segment_span < 4:
            raise ValueError("segment_span must be at least 4")
        if checkpoint_stride < 1:
            raise ValueError("checkpoint_stride must be positive")
        if threads < 1:
            raise ValueError("threads must be at least 1")
        self.universe_bound = int(universe_bound)
        self.segment_span = int(segment_span)
        self.checkpoint_stride = int(checkpoint_stride)
        self.threads = int(threads)
        self._checkpoints = np.empty(0, dtype=np.int64)
        self._base: np.ndarray | None = None
        if cache_path is not None:
            self.load_cache(cache_path)

    # ------------------------------------------------------------------
    # base primes

    def _odd_base_primes(self) -> np.ndarray:
        """Odd primes up to sqrt(universe_bound), computed once."""
        if self._base is None:
            limit = math.isqrt(self.universe_bound) + 1
            is_p = np.ones(limit + 1, dtype=bool)
            is_p[:2] = False
            for p in range(2, math.isqrt(limit) + 1):
                if is_p[p]:
                    is_p[p * p :: p] = False
            primes = np.flatnonzero(is_p).astype(np.int64)
            self._base = primes[1:]  # drop 2; flags cover odds only
        return self._base

    def _base_upto(self, hi: int) -> np.ndarray:
        base = self._odd_base_primes()
        root = math.isqrt(max(hi - 1, 0))
        return base[: int(np.searchsorted(base, root, side="right"))]

    # ------------------------------------------------------------------
    # public sieving

    def sieve_range(self, lo: int, hi: int) -> SieveSegment:
        """Sieve [lo, hi) into a bit-packed segment.

        Requires 0 <= lo < hi, hi - lo <= segment_span, and
        hi <= universe_bound (base primes are held to sqrt of the bound).
        """
        if not 0 <= lo < hi:
            raise ValueError(f"need 0 <= lo < hi, got [{lo}, {hi})")
        if hi - lo > self.segment_span:
            raise ValueError(
                f"span {hi - lo} exceeds segment span {self.segment_span}"
            )
        if hi >= 1 << 63:
            raise ValueError("hi overflows 64-bit")
        if hi > self.universe_bound:
            raise UniverseBoundError(
                f"hi {hi} beyond universe bound {self.universe_bound}"
            )
        first_odd = lo | 1
        n_odd = (hi - first_odd + 1) // 2
        flags = np.ones(n_odd, dtype=bool)
        base = self._base_upto(hi)
        if n_odd:
            off = _kernels.block_offsets(base, first_odd)
            _kernels.mark_block(flags, off, base)
            if first_odd == 1:
                flags[0] = False
        return SieveSegment(lo=lo, hi=hi, bits=np.packbits(flags))

    # ------------------------------------------------------------------
    # streaming

    def _blocks(self, start_value: int, hi: int):
        """Yield (first_odd, flags) blocks covering odd values in [start, hi)."""
        base = self._base_upto(hi)
        first_odd = max(3, start_value)
        if first_odd % 2 == 0:
            first_odd += 1
        if first_odd >= hi:
            return
        off = _kernels.block_offsets(base, first_odd)
        while first_odd < hi:
            n = min(_BLOCK_ODDS, (hi - first_odd + 1) // 2)
            flags = np.ones(n, dtype=bool)
            _kernels.mark_block(flags, off, base)
            yield first_odd, flags
            first_odd += 2 * n

    def _jump(self, n: int) -> tuple[int, int]:
        """Best cached start for reaching prime index n.

        Returns (count_so_far, first_value_to_sieve): counting state as if
        all primes up to some checkpoint were already enumerated.
        """
        stride = self.checkpoint_stride
        j = min(n // stride, len(self._checkpoints))
        if j >= 1:
            return j * stride, int(self._checkpoints[j - 1]) + 2
        return 1, 3  # prime 2 pre-counted

    # ------------------------------------------------------------------
    # queries

    def prime_count(self, x: int) -> int:
        """pi(x): number of primes <= x, for x within the universe bound."""
        if x < 0:
            raise ValueError("x must be nonnegative")
        if x > self.universe_bound:
            raise UniverseBoundError(
                f"x {x} beyond universe bound {self.universe_bound}"
            )
        if x < 2:
            return 0
        count = 1
        start = 3
        if len(self._checkpoints):
            j = int(np.searchsorted(self._checkpoints, x, side="right"))
            if j >= 1:
                count = j * self.checkpoint_stride
                start = int(self._checkpoints[j - 1]) + 2
        for first_odd, flags in self._blocks(start, x + 1):
            count += int(np.count_nonzero(flags))
        return count

    def nth_prime(self, n: int) -> int:
        """The n-th prime, 1-based."""
        return int(self.resolve_indices([n])[0])

    def resolve_indices(self, indices) -> np.ndarray:
        """Primes at the given strictly ascending 1-based indices.

        One forward pass over sieve segments serves every query; with a
        checkpoint cache loaded, stretches holding no query are skipped.
        """
        idx = np.asarray(indices, dtype=np.int64)
        if idx.ndim != 1:
            raise ValueError("indices must be one-dimensional")
        if idx.size == 0:
            return np.empty(0, dtype=np.int64)
        if idx[0] < 1:
            raise ValueError("indices must be >= 1")
        if idx.size > 1 and not (np.diff(idx) > 0).all():
            raise ValueError("indices must be strictly ascending")
        if _pn_lower_bound(int(idx[-1])) > self.universe_bound:
            pos = next(
                i for i, n in enumerate(idx)
                if _pn_lower_bound(int(n)) > self.universe_bound
            )
            raise UniverseBoundError(
                f"prime index {int(idx[pos])} lies beyond universe bound "
                f"{self.universe_bound}",
                position=pos,
            )

        out = np.empty(idx.size, dtype=np.int64)
        q = 0
        if idx[0] == 1:
            out[0] = 2
            q = 1

        count = None
        start = 0
        blocks = None
        first_odd = flags = positions = None
        block_count = 0

        while q < idx.size:
            n = int(idx[q])
            jump_count, jump_start = self._jump(n)
            if count is None or jump_count > count + block_count:
                count, start = jump_count, jump_start
                blocks = self._blocks(start, self.universe_bound + 1)
                first_odd = flags = positions = None
                block_count = 0
            if n == count:
                # exact checkpoint hit; its value is the last prime counted
                out[q] = start - 2
                q += 1
                continue
            while count + block_count < n:
                count += block_count
                try:
                    first_odd, flags = next(blocks)
                except StopIteration:
                    raise UniverseBoundError(
                        f"prime index {n} lies beyond universe bound "
                        f"{self.universe_bound}",
                        position=q,
                    ) from None
                block_count = int(np.count_nonzero(flags))
                positions = None
            if positions is None:
                positions = np.flatnonzero(flags)
            # answer every remaining query that lands in this block at once
            q_end = int(np.searchsorted(idx, count + block_count, side="right"))
            out[q:q_end] = first_odd + 2 * positions[idx[q:q_end] - count - 1]
            q = q_end
        return out

    # ------------------------------------------------------------------
    # checkpoint cache

    def build_cache(self, limit: int, path: str | os.PathLike) -> CacheSummary:
        """Sieve up to ``limit`` and write every stride-th prime to ``path``.

        The written checkpoints are loaded into this engine as a side
        effect. With ``threads`` > 1 blocks are sieved by a worker pool
        and consumed in order, so the file bytes never depend on thread
        count.
        """
        if limit < 2:
            raise ValueError("limit must be at least 2")
        if limit >= 1 << 63:
            raise ValueError("limit overflows 64-bit")
        if limit > self.universe_bound:
            raise UniverseBoundError(
                f"limit {limit} beyond universe bound {self.universe_bound}"
            )
        stride = self.checkpoint_stride
        count = 1  # the prime 2
        max_prime = 2
        ckpts: list[int] = []
        if stride == 1:
            ckpts.append(2)
        for first_odd, flags in self._stream_blocks(3, limit + 1):
            c = int(np.count_nonzero(flags))
            if c == 0:
                continue
            lo_rank = count // stride + 1
            hi_rank = (count + c) // stride
            if hi_rank >= lo_rank:
                positions = np.flatnonzero(flags)
                ranks = np.arange(lo_rank, hi_rank + 1, dtype=np.int64) * stride
                vals = first_odd + 2 * positions[ranks - count - 1]
                ckpts.extend(int(v) for v in vals)
            count += c
        # locate the largest prime <= limit by re-sieving the tail
        tail_lo = max(3, limit - 2 * _BLOCK_ODDS)
        for first_odd, flags in self._blocks(tail_lo, limit + 1):
            pos = np.flatnonzero(flags)
            if pos.size:
                max_prime = int(first_odd + 2 * pos[-1])

        arr = np.asarray(ckpts, dtype="<u8")
        with open(path, "wb") as fh:
            fh.write(_CACHE_MAGIC)
            fh.write(bytes([_CACHE_VERSION]))
            fh.write(struct.pack("<Q", stride))
            fh.write(struct.pack("<Q", arr.size))
            fh.write(arr.tobytes())
        self._checkpoints = arr.astype(np.int64)
        return CacheSummary(
            count=count,
            max_prime=max_prime,
            checkpoints=int(arr.size),
            stride=stride,
            path=os.fspath(path),
        )

    def _stream_blocks(self, start_value: int, hi: int):
        """Like ``_blocks`` but may fan marking out to a thread pool."""
        if self.threads <= 1:
            yield from self._blocks(start_value, hi)
            return
        base = self._base_upto(hi)
        first_odd = max(3, start_value)
        if first_odd % 2 == 0:
            first_odd += 1
        if first_odd >= hi:
            return

        def job(fo: int):
            n = min(_BLOCK_ODDS, (hi - fo + 1) // 2)
            flags = np.ones(n, dtype=bool)
            off = _kernels.block_offsets(base, fo)
            _kernels.mark_block(flags, off, base)
            return fo, flags

        starts = []
        fo = first_odd
        while fo < hi:
            starts.append(fo)
            fo += 2 * _BLOCK_ODDS
        depth = self.threads * 2
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            pending = [pool.submit(job, s) for s in starts[:depth]]
            nxt = len(pending)
            while pending:
                fut = pending.pop(0)
                if nxt < len(starts):
                    pending.append(pool.submit(job, starts[nxt]))
                    nxt += 1
                yield fut.result()

    def load_cache(self, path: str | os.PathLike) -> None:
        """Load checkpoints written by :meth:`build_cache`."""
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != _CACHE_MAGIC:
                raise ValueError(f"{path}: not a checkpoint cache (bad magic)")
            version = fh.read(1)
            if version != bytes([_CACHE_VERSION]):
                raise ValueError(f"{path}: unsupported cache version")
            stride, size = struct.unpack("<QQ", fh.read(16))
            data = fh.read(8 * size)
            if len(data) != 8 * size:
                raise ValueError(f"{path}: truncated checkpoint cache")
        arr = np.frombuffer(data, dtype="<u8").astype(np.int64)
        if arr.size and (np.diff(arr) <= 0).any():
            raise ValueError(f"{path}: checkpoints not strictly increasing")
        self.checkpoint_stride = int(stride)
        self._checkpoints = arr
