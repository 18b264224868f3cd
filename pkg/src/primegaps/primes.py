"""Prime generation, primality, primorials and exact prime-gap records.

Conventions: gaps are measured between consecutive primes p < q with both
strictly below the limit X.  Sieving is segmented so large limits stay
within a bounded memory footprint (cap configurable via PRIMEGAP_MEM_MB).
"""

import math
import os
from dataclasses import dataclass, field

import numpy as np

DEFAULT_SEGMENT = 1 << 22

# Deterministic Miller-Rabin witness set, exact for all n < 3.3 * 10**24
# (covers every 64-bit integer).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class RangeTooLarge(ValueError):
    """Requested sieve range exceeds the configured memory budget."""


def _mem_budget_bytes() -> int | None:
    raw = os.environ.get("PRIMEGAP_MEM_MB")
    return int(raw) * (1 << 20) if raw else None


@dataclass
class GapRecord:
    start: int  # prime opening the gap
    gap: int    # distance to the next prime

    def as_tuple(self) -> tuple[int, int]:
        return (self.start, self.gap)


@dataclass
class PrimeTable:
    """Primality over [lo, hi] (inclusive): bit mask plus sorted prime list."""

    lo: int
    hi: int
    bits: bytearray = field(repr=False)
    primes: list[int] = field(repr=False)

    def is_prime(self, n: int) -> bool:
        if not (self.lo <= n <= self.hi):
            raise ValueError(f"{n} outside table range [{self.lo}, {self.hi}]")
        off = n - self.lo
        return bool(self.bits[off >> 3] & (1 << (off & 7)))

    def count(self) -> int:
        return len(self.primes)

    def __contains__(self, n: int) -> bool:
        return self.lo <= n <= self.hi and self.is_prime(n)


def _small_primes(limit: int) -> np.ndarray:
    """Primes <= limit by a plain sieve (used for segment seeding)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def _segment_mask(seg_lo: int, seg_hi: int, base: np.ndarray) -> np.ndarray:
    """Boolean primality mask over [seg_lo, seg_hi]."""
    seg = np.ones(seg_hi - seg_lo + 1, dtype=bool)
    for n in (0, 1):
        if seg_lo <= n <= seg_hi:
            seg[n - seg_lo] = False
    for p in base:
        p = int(p)
        start = max(p * p, ((seg_lo + p - 1) // p) * p)
        if start <= seg_hi:
            seg[start - seg_lo :: p] = False
    return seg


def sieve_range(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT) -> PrimeTable:
    """Segmented sieve of [lo, hi] (inclusive)."""
    if not (0 <= lo <= hi):
        raise ValueError("need 0 <= lo <= hi")
    budget = _mem_budget_bytes()
    span = hi - lo + 1
    # steady-state footprint: packed mask + one live boolean segment
    if budget is not None and (span + 7) // 8 + segment_size > budget:
        raise RangeTooLarge(
            f"range of {span} values exceeds PRIMEGAP_MEM_MB={budget >> 20}"
        )
    base = _small_primes(math.isqrt(hi))
    bits = bytearray((span + 7) // 8)
    primes: list[int] = []
    for seg_lo in range(lo, hi + 1, segment_size):
        seg_hi = min(seg_lo + segment_size - 1, hi)
        seg = _segment_mask(seg_lo, seg_hi, base)
        primes.extend(int(v) for v in np.nonzero(seg)[0] + seg_lo)
        packed = np.packbits(seg, bitorder="little")
        off = seg_lo - lo
        assert off % 8 == 0 or seg_lo == lo
        # segments start at multiples of segment_size from lo; segment_size
        # is a multiple of 8 so packed bytes align
        bits[off >> 3 : (off >> 3) + len(packed)] = packed.tobytes()
    return PrimeTable(lo, hi, bits, primes)


def is_prime(n: int) -> bool:
    """Deterministic primality: Miller-Rabin witnesses below 2**64-ish,
    trial division by sieved primes above (certificate checking only)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    if n < 2**64 or n < 3_317_044_064_679_887_385_961_981:
        return _miller_rabin(n)
    root = math.isqrt(n)
    for p in sieve_range(2, root).primes:
        if n % p == 0:
            return False
    return True


def _miller_rabin(n: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        if a % n == 0:
            continue
        v = pow(a, d, n)
        if v in (1, n - 1):
            continue
        for _ in range(s - 1):
            v = v * v % n
            if v == n - 1:
                break
        else:
            return False
    return True


def primorial(x: int) -> int:
    """Product of all primes <= x, exact."""
    if x < 2:
        return 1
    return math.prod(sieve_range(2, x).primes)


def _iter_primes_below(X: int, segment_size: int = DEFAULT_SEGMENT):
    base = _small_primes(math.isqrt(X - 1))
    for seg_lo in range(0, X, segment_size):
        seg_hi = min(seg_lo + segment_size - 1, X - 1)
        seg = _segment_mask(seg_lo, seg_hi, base)
        for v in np.nonzero(seg)[0]:
            yield int(v) + seg_lo


def gap_records(X: int) -> list[GapRecord]:
    """All record gaps between consecutive primes both < X, in increasing
    start order; each record strictly beats all earlier gaps."""
    if X < 3:
        raise ValueError("need X >= 3 (no two primes below X otherwise)")
    records: list[GapRecord] = []
    best = 0
    prev = None
    for p in _iter_primes_below(X):
        if prev is not None:
            g = p - prev
            if g > best:
                best = g
                records.append(GapRecord(prev, g))
        prev = p
    return records


def max_gap(X: int) -> GapRecord:
    """Largest gap between consecutive primes both < X (ties: smallest start)."""
    return gap_records(X)[-1]


def merit_report(X: int) -> list[dict]:
    """Normalized-gap statistics for every record gap below X.

    merit = gap / log(start); merit2 = gap / log(start)**2.  Descriptive
    only; no asymptotic assertion is made.
    """
    rows = []
    for rec in gap_records(X):
        lg = math.log(rec.start)
        rows.append(
            {
                "start": rec.start,
                "gap": rec.gap,
                "merit": rec.gap / lg,
                "merit2": rec.gap / lg**2,
            }
        )
    return rows
