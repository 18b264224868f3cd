"""Residue-class covering engine.

Covers intervals [1, y] with one residue class a_p (mod p) per prime,
computes the largest coverable y exactly (branch and bound) or greedily,
evaluates the Jacobsthal function, and assembles certified runs of
consecutive composites via the Chinese remainder theorem.
"""

import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import primes as primes_mod

DEFAULT_NODE_BUDGET = 10**9
DEFAULT_SCAN_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    """Search budget exhausted; carries the best lower bound found."""

    def __init__(self, best_y: int, witness: "ResidueAssignment"):
        super().__init__(f"search budget exceeded; best lower bound y={best_y}")
        self.best_y = best_y
        self.witness = witness


@dataclass
class ResidueAssignment:
    """Map p -> a_p of chosen residue classes (partial maps allowed)."""

    x: int
    classes: dict[int, int] = field(default_factory=dict)

    def validate(self) -> None:
        for p, a in self.classes.items():
            if p > self.x or not primes_mod.is_prime(p):
                raise ValueError(f"key {p} is not a prime <= {self.x}")
            if not (0 <= a < p):
                raise ValueError(f"residue {a} out of range for modulus {p}")

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "classes": [{"p": p, "a": a} for p, a in sorted(self.classes.items())],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ResidueAssignment":
        ra = cls(int(obj["x"]), {int(c["p"]): int(c["a"]) for c in obj["classes"]})
        ra.validate()
        return ra


@dataclass
class SieveInterval:
    """Coverage state of [1, y] under an assignment."""

    y: int
    covered: np.ndarray = field(repr=False)  # bool, index t-1 for position t
    survivors: list[int] = field(repr=False)

    @property
    def is_covered(self) -> bool:
        return not self.survivors


@dataclass
class CompositeRunCertificate:
    """Witnessed run of composites m+1, ..., m+y: one (t, p) witness per t."""

    m: int
    y: int
    witnesses: list[tuple[int, int]]

    def to_json(self) -> dict:
        return {
            "m": str(self.m),
            "y": self.y,
            "witnesses": [[t, p] for t, p in self.witnesses],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CompositeRunCertificate":
        return cls(
            int(obj["m"]), int(obj["y"]), [(int(t), int(p)) for t, p in obj["witnesses"]]
        )


def apply_classes(y: int, assignment: ResidueAssignment) -> SieveInterval:
    """Exact coverage of [1, y]: position t is covered iff t = a_p (mod p)
    for some assigned class."""
    if y < 1:
        raise ValueError("need y >= 1")
    covered = np.zeros(y, dtype=bool)
    for p, a in assignment.classes.items():
        first = a if a >= 1 else p
        if first <= y:
            covered[first - 1 :: p] = True
    survivors = [int(t) + 1 for t in np.nonzero(~covered)[0]]
    return SieveInterval(y, covered, survivors)


def verify_cover(y: int, assignment: ResidueAssignment) -> bool:
    """True iff the assignment covers every position of [1, y] (vacuous y=0)."""
    if y == 0:
        return True
    return apply_classes(y, assignment).is_covered


def _max_class_hits(survivors: tuple[int, ...], p: int) -> int:
    if not survivors:
        return 0
    return max(Counter(t % p for t in survivors).values())


def _cover_dfs(
    survivors: tuple[int, ...],
    ps: tuple[int, ...],
    chosen: dict[int, int],
    budget: list[int],
) -> dict[int, int] | None:
    """DFS over residue choices, primes in decreasing order.

    Prunes when the remaining primes cannot absorb the current survivors
    even if each takes its best class.  Returns a completed class map or
    None.  budget is a single-element mutable node counter.
    """
    if not survivors:
        for p in ps:
            chosen[p] = 0
        return chosen
    if not ps:
        return None
    cap = sum(_max_class_hits(survivors, p) for p in ps)
    if cap < len(survivors):
        return None
    p, rest = ps[0], ps[1:]
    by_class: dict[int, list[int]] = {}
    for t in survivors:
        by_class.setdefault(t % p, []).append(t)
    # try the most-covering classes first
    for a, _hits in sorted(by_class.items(), key=lambda kv: (-len(kv[1]), kv[0])):
        budget[0] -= 1
        if budget[0] < 0:
            raise _DfsBudget()
        remaining = tuple(t for t in survivors if t % p != a)
        chosen[p] = a
        out = _cover_dfs(remaining, rest, chosen, budget)
        if out is not None:
            return out
        del chosen[p]
    return None


class _DfsBudget(Exception):
    pass


def _can_cover(y: int, ps: list[int], budget: list[int]) -> dict[int, int] | None:
    survivors = tuple(range(1, y + 1))
    order = tuple(sorted(ps, reverse=True))
    return _cover_dfs(survivors, order, {}, budget)


def max_coverable(ps: list[int], node_budget: int = DEFAULT_NODE_BUDGET) -> tuple[int, dict[int, int]]:
    """Largest y such that one class per prime in ps covers [1, y], plus a
    witnessing class map.  Covering is monotone in y, so scan upward."""
    if not ps:
        return 0, {}
    budget = [node_budget]
    best_y, best_map = 0, {p: 0 for p in ps}
    y = 1
    try:
        while True:
            out = _can_cover(y, ps, budget)
            if out is None:
                return best_y, best_map
            best_y, best_map = y, dict(out)
            y += 1
    except _DfsBudget:
        raise BudgetExceeded(best_y, ResidueAssignment(max(ps), best_map))


def exact_Y(x: int, node_budget: int = DEFAULT_NODE_BUDGET) -> tuple[int, ResidueAssignment]:
    """Maximum y coverable with one class per prime <= x, with witness.

    Exhaustive (branch-and-bound); feasible for small x only.  Raises
    BudgetExceeded (carrying the best lower bound) past the node budget.
    """
    if x < 2:
        raise ValueError("need x >= 2")
    ps = primes_mod.sieve_range(2, x).primes
    y, class_map = max_coverable(ps, node_budget)
    witness = ResidueAssignment(x, class_map)
    assert verify_cover(y, witness)
    return y, witness


def greedy_cover(y: int, ps: list[int], increasing: bool = True) -> ResidueAssignment:
    """One greedy pass: each prime takes the class covering the most current
    survivors (ties: smallest residue)."""
    order = sorted(ps) if increasing else sorted(ps, reverse=True)
    survivors = list(range(1, y + 1))
    classes: dict[int, int] = {}
    for p in order:
        if survivors:
            counts = Counter(t % p for t in survivors)
            best = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))
            a = min(a for a, c in counts.items() if c == best[1])
        else:
            a = 0
        classes[p] = a
        survivors = [t for t in survivors if t % p != a]
    return ResidueAssignment(max(ps), classes)


def greedy_Y(x: int, increasing: bool = True) -> tuple[int, ResidueAssignment]:
    """Largest y the greedy heuristic covers, located by doubling plus
    binary search, with a verified witness."""
    if x < 2:
        raise ValueError("need x >= 2")
    ps = primes_mod.sieve_range(2, x).primes

    def covers(y: int) -> ResidueAssignment | None:
        w = greedy_cover(y, ps, increasing)
        return w if verify_cover(y, w) else None

    lo = 1
    assert covers(1) is not None
    hi = 2
    while covers(hi) is not None:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if covers(mid) is not None:
            lo = mid
        else:
            hi = mid
    return lo, covers(lo)


def _distinct_prime_factors(n: int) -> list[int]:
    out = []
    m = n
    for p in range(2, min(10**6, math.isqrt(n)) + 1):
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        if m == 1:
            break
    if m > 1:
        if not primes_mod.is_prime(m):
            raise ValueError(f"cannot factor {n}: residual {m} is composite")
        out.append(m)
    return out


def jacobsthal(
    n: int,
    factors: list[int] | None = None,
    scan_budget: int = DEFAULT_SCAN_BUDGET,
) -> int:
    """j(n): maximal gap between consecutive integers coprime to n.

    j(1) = 1.  Computed by scanning one period of the coprime indicator of
    rad(n); when the radical exceeds the scan budget, falls back to the
    exact covering search over the distinct prime factors (j = Y + 1).
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if n == 1:
        return 1
    ps = sorted(factors) if factors else _distinct_prime_factors(n)
    rad = math.prod(ps)
    if rad <= scan_budget:
        return _jacobsthal_scan(ps, rad)
    y, _ = max_coverable(ps)
    return y + 1


def _jacobsthal_scan(ps: list[int], rad: int, segment: int = 1 << 22) -> int:
    """Max gap between coprime positions over one full period [1, rad + 1].

    1 and rad + 1 are always coprime to rad, so the cyclic maximum is
    realized inside this window.
    """
    best = 0
    prev = None
    for seg_lo in range(1, rad + 2, segment):
        seg_hi = min(seg_lo + segment - 1, rad + 1)
        mask = np.ones(seg_hi - seg_lo + 1, dtype=bool)
        for p in ps:
            first = ((seg_lo + p - 1) // p) * p
            if first <= seg_hi:
                mask[first - seg_lo :: p] = False
        for off in np.nonzero(mask)[0]:
            t = int(off) + seg_lo
            if prev is not None:
                best = max(best, t - prev)
            prev = t
    return best


def crt_assemble(assignment: ResidueAssignment, y: int) -> CompositeRunCertificate:
    """Minimal m in (x, x + P(x)] with m = -a_p (mod p) for every prime
    p <= x, plus one divisibility witness per position of [1, y].

    Requires the assignment to cover [1, y] and to be total on primes <= x.
    """
    ps = primes_mod.sieve_range(2, assignment.x).primes
    if sorted(assignment.classes) != ps:
        raise ValueError("assignment must be total on primes <= x")
    if not verify_cover(y, assignment):
        raise ValueError(f"assignment does not cover [1, {y}]")
    m, mod = 0, 1
    for p in ps:
        target = (-assignment.classes[p]) % p
        # lift m to also satisfy m = target (mod p)
        step = pow(mod, -1, p) * ((target - m) % p) % p
        m += mod * step
        mod *= p
    x = assignment.x
    if m <= x:
        m += mod * ((x - m) // mod + 1)
    assert x < m <= x + mod
    witnesses = []
    for t in range(1, y + 1):
        p = next(p for p in ps if (t - assignment.classes[p]) % p == 0)
        witnesses.append((t, p))
    return CompositeRunCertificate(m, y, witnesses)


def check_certificate(cert: CompositeRunCertificate) -> bool:
    """Independent check: every t in [1, y] has a witness (t, p) with p
    prime, p | m + t and m + t > p (hence m + t composite)."""
    seen = {}
    for t, p in cert.witnesses:
        seen.setdefault(t, p)
    for t in range(1, cert.y + 1):
        p = seen.get(t)
        if p is None or p < 2 or not primes_mod.is_prime(p):
            return False
        if (cert.m + t) % p != 0 or cert.m + t <= p:
            return False
    return True


def load_assignment(path: str) -> ResidueAssignment:
    with open(path, encoding="utf-8") as fh:
        return ResidueAssignment.from_json(json.load(fh))


def load_certificate(path: str) -> CompositeRunCertificate:
    with open(path, encoding="utf-8") as fh:
        return CompositeRunCertificate.from_json(json.load(fh))
