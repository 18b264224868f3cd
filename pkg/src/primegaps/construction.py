"""Four-stage randomized residue-class sieve.

Stage 1 zeroes out small and mid-range primes, stage 2 draws random
classes for the remaining small primes, stage 3 covers r-term prime
progressions with common difference r!p for large primes p, and stage 4
matches leftover survivors to the remaining primes one-to-one.

All randomness is keyed on (seed, stage, prime); see rng.draw.
"""

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import covering, rng
from . import primes as primes_mod


def _log_k(x: float, k: int) -> float:
    """k-fold iterated natural log."""
    v = float(x)
    for _ in range(k):
        v = math.log(v)
    return v


def default_y(r: int, x: int) -> int:
    return int((r / (6 * math.log(r))) * x * math.log(x) * _log_k(x, 3) / _log_k(x, 2) ** 2)


def default_z(x: int) -> int:
    return int(x ** (_log_k(x, 3) / (3 * _log_k(x, 2))))


@dataclass
class ConstructionParams:
    r: int
    x: int
    y: int
    z: int
    epsilon: float = 0.1
    seed: int = 0

    @classmethod
    def create(
        cls,
        r: int,
        x: int,
        y: int | None = None,
        z: int | None = None,
        epsilon: float = 0.1,
        seed: int = 0,
    ) -> "ConstructionParams":
        """Fill y and z from the asymptotic defaults when not overridden.

        The defaults are degenerate at desk scale (z < 2 for every feasible
        x); the floor is applied with a warning so the run stays legal.
        """
        if r < 2:
            raise ValueError("need r >= 2")
        if x < 16:
            raise ValueError("x too small for the default formulas; pass y and z explicitly")
        if y is None:
            y = default_y(r, x)
        if z is None:
            z = default_z(x)
            if z < 2:
                warnings.warn(
                    f"default smoothness cutoff z={z} is degenerate at x={x}; flooring to 2",
                    stacklevel=2,
                )
                z = 2
        params = cls(r, x, y, z, epsilon, seed)
        params.validate()
        return params

    def validate(self) -> None:
        if self.r < 2:
            raise ValueError("need r >= 2")
        if not (2 <= self.z < self.x / 4):
            raise ValueError(f"need 2 <= z < x/4 (got z={self.z}, x={self.x})")
        if not (self.y > self.x / 4):
            raise ValueError(f"need y > x/4 (got y={self.y}, x={self.x})")
        if not (0 < self.epsilon < 1):
            raise ValueError("epsilon must lie in (0, 1)")
        if self.y >= (self.x / 4) * math.log(self.x):
            warnings.warn(
                "y >= (x/4) log x: stage-1 survivors above x/4 may fail to be prime",
                stacklevel=2,
            )

    @property
    def r_factorial(self) -> int:
        return math.factorial(self.r)


@dataclass
class PrimePartition:
    S1: list[int]
    S2: list[int]
    S3: list[int]
    S4: list[int]

    def all_primes(self) -> list[int]:
        return sorted(self.S1 + self.S2 + self.S3 + self.S4)


def partition_primes(params: ConstructionParams, table: primes_mod.PrimeTable | None = None) -> PrimePartition:
    """Split primes <= x into the four sieving classes.

    S1: p <= log x or z < p <= x/4; S2: log x < p <= z;
    S3: x/2 < p <= x; S4: x/4 < p <= x/2.
    """
    x, z = params.x, params.z
    logx = math.log(x)
    if table is None:
        table = primes_mod.sieve_range(2, x)
    s1, s2, s3, s4 = [], [], [], []
    for p in table.primes:
        if p > x:
            break
        if p <= logx or z < p <= x / 4:
            s1.append(p)
        elif logx < p <= z:
            s2.append(p)
        elif x / 2 < p:
            s3.append(p)
        else:
            s4.append(p)
    return PrimePartition(s1, s2, s3, s4)


def gamma(S2: list[int]) -> Fraction:
    """Exact survival probability of a fixed integer under the random
    second sieve: product of (1 - 1/s) over s in S2."""
    g = Fraction(1)
    for s in S2:
        g *= Fraction(s - 1, s)
    return g


def gamma_factors(S2: list[int], i_max: int) -> list[Fraction]:
    """Exact products gamma_i = prod (1 - i/s) for i = 1..i_max."""
    if S2 and i_max >= min(S2):
        raise ValueError(f"i_max={i_max} >= min(S2)={min(S2)}: factor would be <= 0")
    out = []
    for i in range(1, i_max + 1):
        g = Fraction(1)
        for s in S2:
            g *= Fraction(s - i, s)
        out.append(g)
    return out


def gamma_ratio_report(S2: list[int], i_max: int) -> dict:
    """How tightly gamma_i tracks gamma**i (concentration diagnostic)."""
    g = gamma(S2)
    gs = gamma_factors(S2, i_max)
    ratios = [float(gi / g**i) for i, gi in enumerate(gs, start=1)]
    return {
        "gamma": float(g),
        "gamma_i": [float(gi) for gi in gs],
        "max_rel_dev": max((abs(rho - 1.0) for rho in ratios), default=0.0),
    }


@dataclass
class RelationGraph:
    """Edge sets of the progression relations between P = (x/2, x] primes
    and Q = (x/4, y] primes.

    edges[p] holds the bases q with the whole progression
    q, q + r!p, ..., q + (r-1) r!p inside Q; edges_strict[p] additionally
    requires q + r * r!p to fall outside Q.
    """

    r: int
    x: int
    y: int
    P: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)
    edges: dict[int, np.ndarray] = field(repr=False)
    edges_strict: dict[int, np.ndarray] = field(repr=False)

    @property
    def step_unit(self) -> int:
        return math.factorial(self.r)

    def degree_p(self, strict: bool = True) -> dict[int, int]:
        src = self.edges_strict if strict else self.edges
        return {p: len(src[p]) for p in src}

    def degree_q(self, i: int, strict: bool = True) -> np.ndarray:
        """deg_i(q) = #{p : p rel q - i r! p}, aligned with self.Q."""
        if not (0 <= i < self.r):
            raise ValueError("shift i out of range")
        src = self.edges_strict if strict else self.edges
        deg = np.zeros(len(self.Q), dtype=np.int64)
        for p, bases in src.items():
            if len(bases) == 0:
                continue
            shifted = bases.astype(np.int64) + i * self.step_unit * p
            idx = np.searchsorted(self.Q, shifted)
            ok = (idx < len(self.Q)) & (self.Q[np.minimum(idx, len(self.Q) - 1)] == shifted)
            np.add.at(deg, idx[ok], 1)
        return deg

    def check_disjointness(self) -> None:
        """Shift uniqueness: for each (p, q) at most one shift i has
        p rel' q - i r! p.  Raises on violation."""
        step = self.step_unit
        for p, bases in self.edges_strict.items():
            if len(bases) == 0:
                continue
            qs = np.concatenate(
                [bases.astype(np.int64) + i * step * p for i in range(self.r)]
            )
            if len(np.unique(qs)) != len(qs):
                raise AssertionError(f"shift-uniqueness violated at p={p}")

    def check_strict_subset(self) -> None:
        for p in self.edges:
            if not np.isin(self.edges_strict[p], self.edges[p]).all():
                raise AssertionError(f"strict relation not a subrelation at p={p}")


def build_relation(params: ConstructionParams, table: primes_mod.PrimeTable | None = None) -> RelationGraph:
    """Exact edge sets by scanning Q against a primality bitmask."""
    r, x, y = params.r, params.x, params.y
    if table is None or table.hi < y:
        table = primes_mod.sieve_range(0, max(x, y))
    pr = np.array(table.primes, dtype=np.int64)
    P = pr[(pr > x // 2) & (pr <= x)]
    Q = pr[(pr > x // 4) & (pr <= y)]
    in_q = np.zeros(y + 1, dtype=bool)
    in_q[Q] = True
    fact = math.factorial(r)
    edges, edges_strict = {}, {}
    for p in P:
        p = int(p)
        step = fact * p
        ok = np.ones(len(Q), dtype=bool)
        for i in range(1, r):
            t = Q + i * step
            inside = t <= y
            ok &= inside
            ok[inside] &= in_q[t[inside]]
        t = Q + r * step
        nxt = np.zeros(len(Q), dtype=bool)
        inside = t <= y
        nxt[inside] = in_q[t[inside]]
        edges[p] = Q[ok].astype(np.int32)
        edges_strict[p] = Q[ok & ~nxt].astype(np.int32)
    return RelationGraph(r, x, y, P, Q, edges, edges_strict)


def refine_relation(graph: RelationGraph, survivor_mask: np.ndarray) -> dict[int, np.ndarray]:
    """Keep strict edges whose whole progression survived the second sieve.

    survivor_mask is boolean over values 0..y (True = still uncovered).
    """
    step_unit = graph.step_unit
    refined = {}
    for p, bases in graph.edges_strict.items():
        if len(bases) == 0:
            refined[p] = bases
            continue
        b = bases.astype(np.int64)
        keep = np.ones(len(b), dtype=bool)
        for i in range(graph.r):
            keep &= survivor_mask[b + i * step_unit * p]
        refined[p] = bases[keep]
    return refined


def _is_z_smooth(n: int, z: int) -> bool:
    if n == 1:
        return True
    m = n
    for p in range(2, z + 1):
        while m % p == 0:
            m //= p
        if m == 1:
            return True
        if p * p > m:
            break
    return m <= z


def stage1(
    params: ConstructionParams,
    partition: PrimePartition,
    table: primes_mod.PrimeTable,
) -> tuple[dict[int, int], np.ndarray, dict]:
    """First sieve: a_s = 0 for all s in S1.

    Returns the assignment fragment, the survivor positions of [1, y], and
    a report splitting survivors into Q-primes and z-smooth leftovers (the
    split is verified to be exhaustive).
    """
    y = params.y
    covered = np.zeros(y + 1, dtype=bool)  # index = position, 0 unused
    for s in partition.S1:
        covered[s::s] = True
    survivors = np.nonzero(~covered[1:])[0] + 1
    is_q = np.array(
        [v > params.x / 4 and table.is_prime(int(v)) for v in survivors], dtype=bool
    )
    smooth_left = survivors[~is_q]
    for v in smooth_left:
        if not _is_z_smooth(int(v), params.z):
            raise AssertionError(
                f"stage-1 survivor {v} is neither a Q-prime nor z-smooth"
            )
    report = {
        "sieved_primes": len(partition.S1),
        "survivors": int(len(survivors)),
        "q_primes": int(is_q.sum()),
        "smooth_leftovers": int(len(smooth_left)),
    }
    return {s: 0 for s in partition.S1}, survivors, report


def stage2(
    params: ConstructionParams,
    partition: PrimePartition,
    survivors: np.ndarray,
    q_mask: np.ndarray,
) -> tuple[dict[int, int], np.ndarray, dict]:
    """Random second sieve: a_s uniform in [0, s) for s in S2, seeded.

    q_mask flags which survivors are Q-primes (for the gamma comparison).
    Reports actual vs expected (gamma * #Q) surviving Q count.
    """
    frag = {s: rng.draw(params.seed, "stage2", s, s) for s in partition.S2}
    keep = np.ones(len(survivors), dtype=bool)
    for s, a in frag.items():
        keep &= (survivors % s) != a
    g = gamma(partition.S2)
    q_before = int(q_mask.sum())
    q_after = int((q_mask & keep).sum())
    report = {
        "sieved_primes": len(partition.S2),
        "gamma": float(g),
        "q_before": q_before,
        "q_after": q_after,
        "expected_q_after": float(g) * q_before,
        "survivors": int(keep.sum()),
    }
    return frag, survivors[keep], report


def stage3(
    params: ConstructionParams,
    refined: dict[int, np.ndarray],
    survivors: np.ndarray,
) -> tuple[dict[int, int], np.ndarray, list[int], dict]:
    """Third sieve: for each p with a nonempty refined edge set, pick q_p
    uniformly (seeded) and take a_p = q_p mod p, which removes the whole
    progression from the survivor set.  Primes with no candidates are
    deferred to the stage-4 pool."""
    step_unit = params.r_factorial
    frag: dict[int, int] = {}
    deferred: list[int] = []
    removed: set[int] = set()
    surv_set = set(int(v) for v in survivors)
    n_before = len(survivors)
    for p in sorted(refined):
        cands = refined[p]
        if len(cands) == 0:
            deferred.append(p)
            continue
        q_p = int(cands[rng.draw(params.seed, "stage3", p, len(cands))])
        frag[p] = q_p % p
        for i in range(params.r):
            v = q_p + i * step_unit * p
            if v in surv_set:
                removed.add(v)
    remaining = np.array(sorted(surv_set - removed), dtype=np.int64)
    rate = len(remaining) / n_before if n_before else 0.0
    report = {
        "chosen": len(frag),
        "deferred": len(deferred),
        "removed": len(removed),
        "survivors": int(len(remaining)),
        "survival_rate": rate,
        "rate_bound": (1 + params.epsilon) / params.r,
    }
    return frag, remaining, deferred, report


def stage4(
    survivors: np.ndarray, S4: list[int], unused: list[int]
) -> tuple[dict[int, int], list[int], dict]:
    """Match each survivor to a distinct pool prime (a_s = v mod s); pool
    primes left over get a_s = 0.  Overflow is returned as the uncovered
    remainder, not an error."""
    pool = sorted(set(S4) | set(unused))
    frag: dict[int, int] = {}
    surv = [int(v) for v in survivors]
    matched = list(zip(surv, pool))
    for v, s in matched:
        frag[s] = v % s
    for s in pool[len(matched):]:
        frag[s] = 0
    remainder = surv[len(pool):]
    report = {
        "pool": len(pool),
        "matched": len(matched),
        "deficit": len(remainder),
    }
    return frag, remainder, report


@dataclass
class StageReport:
    params: ConstructionParams
    stage1: dict
    stage2: dict
    stage3: dict
    stage4: dict
    final: dict

    def to_json(self) -> dict:
        p = self.params
        return {
            "params": {
                "r": p.r,
                "x": p.x,
                "y": p.y,
                "z": p.z,
                "epsilon": p.epsilon,
                "seed": p.seed,
            },
            "stage1": self.stage1,
            "stage2": self.stage2,
            "stage3": self.stage3,
            "stage4": self.stage4,
            "final": self.final,
        }


def run_construction(params: ConstructionParams) -> tuple[covering.ResidueAssignment, StageReport]:
    """Chain stages 1-4 into a total assignment on primes <= x.

    The returned assignment is re-verified through the covering module
    (never trusted from pipeline bookkeeping); the report carries the
    realized fully-covered prefix y'.
    """
    params.validate()
    table = primes_mod.sieve_range(0, max(params.x, params.y))
    partition = partition_primes(params, table)

    frag1, survivors, rep1 = stage1(params, partition, table)

    q_mask = np.array(
        [v > params.x / 4 and table.is_prime(int(v)) for v in survivors], dtype=bool
    )
    frag2, survivors, rep2 = stage2(params, partition, survivors, q_mask)

    graph = build_relation(params, table)
    surv_mask = np.zeros(params.y + 1, dtype=bool)
    surv_mask[survivors] = True
    # Q(a) membership: survived stage 2 *and* in Q
    qa_mask = np.zeros(params.y + 1, dtype=bool)
    qa_mask[graph.Q[surv_mask[graph.Q]]] = True
    refined = refine_relation(graph, qa_mask)
    frag3, survivors, deferred, rep3 = stage3(params, refined, survivors)

    frag4, remainder, rep4 = stage4(survivors, partition.S4, deferred)

    classes = {**frag1, **frag2, **frag3, **frag4}
    assignment = covering.ResidueAssignment(params.x, classes)
    interval = covering.apply_classes(params.y, assignment)
    y_prime = (interval.survivors[0] - 1) if interval.survivors else params.y
    final = {
        "remainder": len(remainder),
        "covered": interval.is_covered,
        "y_prime": y_prime,
        "verified_survivors": len(interval.survivors),
    }
    report = StageReport(params, rep1, rep2, rep3, rep4, final)
    return assignment, report
