"""Arithmetic constants and empirical verification.

Singular series alpha_r, exact local factors beta_p over (Z/pZ)^d and
their closed forms, affine-linear form systems and their norms, prime-AP
degree statistics, exhaustive/Monte-Carlo checks of the second-sieve
survival laws, and smooth-number counts.
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import construction, rng
from . import primes as primes_mod

SINGULAR_SERIES_DPS = 50


@dataclass
class SingularSeriesApprox:
    r: int
    cutoff: int
    value: float
    tail_bound: float
    low_precision: bool = False  # second product empty (cutoff <= r)


def singular_series(r: int, cutoff: int) -> SingularSeriesApprox:
    """Partial product of the Hardy-Littlewood constant

        alpha_r = prod_{p <= r} (p/(p-1))^(r-1)
                  * prod_{p > r} (p-r) p^(r-1) / (p-1)^r

    over p <= cutoff, in high precision, with a bound on the omitted tail
    (|log factor| <= r^2 / p^2 for p > max(r, cutoff))."""
    if r < 1 or cutoff < 2:
        raise ValueError("need r >= 1 and cutoff >= 2")
    ps = primes_mod.sieve_range(2, cutoff).primes
    with mpmath.workdps(SINGULAR_SERIES_DPS):
        acc = mpmath.mpf(1)
        for p in ps:
            if p <= r:
                acc *= (mpmath.mpf(p) / (p - 1)) ** (r - 1)
            else:
                acc *= mpmath.mpf((p - r) * p ** (r - 1)) / mpmath.mpf((p - 1) ** r)
        value = float(acc)
    tail = r * r / cutoff  # sum_{n > cutoff} r^2/n^2 <= r^2/cutoff
    return SingularSeriesApprox(r, cutoff, value, tail, low_precision=cutoff <= r)


def local_von_mangoldt(p: int, b: int) -> Fraction:
    """Local von Mangoldt value: p/(p-1) when p does not divide b, else 0."""
    if not primes_mod.is_prime(p):
        raise ValueError(f"{p} is not prime")
    return Fraction(p, p - 1) if b % p else Fraction(0)


@dataclass
class AffineLinearSystem:
    """t integer affine-linear forms in d variables: (coeffs, constant)."""

    forms: list[tuple[tuple[int, ...], int]]

    @property
    def d(self) -> int:
        return len(self.forms[0][0])

    @property
    def t(self) -> int:
        return len(self.forms)

    @property
    def finite_complexity(self) -> bool:
        """True iff no homogeneous part is a rational multiple of another."""
        homs = [f[0] for f in self.forms]
        for i, u in enumerate(homs):
            for v in homs[i + 1 :]:
                # u parallel to v <=> all 2x2 minors vanish (and neither is 0)
                if all(u[a] * v[b] == u[b] * v[a] for a in range(len(u)) for b in range(len(u))):
                    return False
        return True


def make_form_system(
    kind: str, r: int, m: int = 0, x: int = 0, i: int = 0
) -> AffineLinearSystem:
    """The four progression form systems used in the local-factor checks.

    progression_pair_d3: (n1, (n_l + j r! n1 + m x) for 0<=j<r, l=2,3), t=2r+1
    progression_d2:      (n1, (n2 + j r! n1 + m x) for 0<=j<r),        t=r+1
    shifted_d3: (n1+mx, n2, n3, (n1 + j r! n_l + mx) for -i<=j<r-i, j!=0, l=2,3)
    shifted_d2: (n2, (n1 + j r! n2 + mx) for -i<=j<r-i),               t=r+1
    """
    if r < 1:
        raise ValueError("need r >= 1")
    fact = math.factorial(r)
    forms: list[tuple[tuple[int, ...], int]] = []
    if kind == "progression_pair_d3":
        forms.append(((1, 0, 0), 0))
        for ell in (1, 2):  # variable index of n2 / n3
            for j in range(r):
                coeffs = [j * fact, 0, 0]
                coeffs[ell] = 1
                forms.append((tuple(coeffs), m * x))
    elif kind == "progression_d2":
        forms.append(((1, 0), 0))
        for j in range(r):
            forms.append(((j * fact, 1), m * x))
    elif kind == "shifted_d3":
        if not (0 <= i < r):
            raise ValueError("shift i out of range")
        forms.append(((1, 0, 0), m * x))
        forms.append(((0, 1, 0), 0))
        forms.append(((0, 0, 1), 0))
        for ell in (1, 2):
            for j in range(-i, r - i):
                if j == 0:
                    continue
                coeffs = [1, 0, 0]
                coeffs[ell] = j * fact
                forms.append((tuple(coeffs), m * x))
    elif kind == "shifted_d2":
        if not (0 <= i < r):
            raise ValueError("shift i out of range")
        forms.append(((0, 1), 0))
        for j in range(-i, r - i):
            forms.append(((1, j * fact), m * x))
    else:
        raise ValueError(f"unknown system kind {kind!r}")
    return AffineLinearSystem(forms)


def local_factor(system: AffineLinearSystem, p: int, limit: int = 10**8) -> Fraction:
    """Exact beta_p = E_{n in (Z/pZ)^d} prod_i local_von_mangoldt(psi_i(n)).

    The product is (p/(p-1))^t on points where every form is nonzero mod p
    and 0 elsewhere, so beta_p = (p/(p-1))^t * N / p^d with N the count of
    all-nonzero points, enumerated in full."""
    d, t = system.d, system.t
    if p**d > limit:
        raise ValueError(f"enumeration of p^d = {p**d} exceeds limit {limit}")
    # reduced coefficients keep every intermediate below t * p^2 < 2^31
    axes = np.meshgrid(*([np.arange(p, dtype=np.int32)] * d), indexing="ij")
    ok = np.ones(axes[0].shape, dtype=bool)
    for coeffs, const in system.forms:
        val = np.full(axes[0].shape, const % p, dtype=np.int32)
        for c, ax in zip(coeffs, axes):
            val += (c % p) * ax
        ok &= (val % p) != 0
    n_good = int(ok.sum())
    return Fraction(p, p - 1) ** t * Fraction(n_good, p**d)


def beta_closed_form(r: int, p: int, squared: bool) -> Fraction:
    """Closed form of beta_p for the progression systems: for p <= r it is
    (p/(p-1))^(r-1), for p > r it is (p-r) p^(r-1) / (p-1)^r; the d=3 pair
    systems take the square."""
    if p <= r:
        base = Fraction(p, p - 1) ** (r - 1)
    else:
        base = Fraction((p - r) * p ** (r - 1), (p - 1) ** r)
    return base * base if squared else base


def psi_norm(system: AffineLinearSystem, N: int, B: float = 0.0) -> float:
    """Size norm of a form system: sum of |homogeneous coefficients| plus
    sum of |constant| / (N log^B N).  B = 0 gives the plain norm."""
    if N < 3:
        raise ValueError("need N >= 3")
    hom = sum(abs(c) for coeffs, _ in system.forms for c in coeffs)
    scale = N * math.log(N) ** B
    const = sum(abs(c0) / scale for _, c0 in system.forms)
    return hom + const


@dataclass
class DegreeStats:
    r: int
    x: int
    y: int
    side: str
    i: int
    counts: np.ndarray = field(repr=False)
    predicted: float
    quantiles: dict
    max_ratio: float


def degree_stats(
    params: construction.ConstructionParams,
    graph: construction.RelationGraph,
    side: str,
    i: int,
) -> DegreeStats:
    """Exact per-vertex strict-relation degrees against the Hardy-Littlewood
    prediction: alpha_r y / log^r x on the P side, alpha_r x / (2 log^r x)
    on the Q side.  Predictions carry o(1) errors; only loose bands are
    ever asserted downstream."""
    if (params.r, params.x, params.y) != (graph.r, graph.x, graph.y):
        raise ValueError("params and graph disagree on (r, x, y)")
    alpha = singular_series(params.r, 10**5).value
    logx = math.log(params.x)
    if side == "P":
        counts = np.array([len(graph.edges_strict[int(p)]) for p in graph.P])
        predicted = alpha * params.y / logx**params.r
    elif side == "Q":
        counts = graph.degree_q(i)
        predicted = alpha * params.x / (2 * logx**params.r)
    else:
        raise ValueError("side must be 'P' or 'Q'")
    ratios = counts / predicted if predicted else counts.astype(float)
    qs = {
        f"q{int(q * 100)}": float(np.quantile(ratios, q))
        for q in (0.1, 0.25, 0.5, 0.75, 0.9)
    }
    return DegreeStats(
        params.r,
        params.x,
        params.y,
        side,
        i,
        counts,
        predicted,
        qs,
        float(ratios.max()) if len(ratios) else 0.0,
    )


def exhaustive_survival(S2: list[int], points: list[int]) -> Fraction:
    """Exact fraction of second-sieve assignments under which every point
    avoids every class a_s (mod s); feasible when prod(S2) is small."""
    total = math.prod(S2)
    if total > 10**7:
        raise ValueError("S2 assignment space too large to enumerate")
    good = 0
    for assign in itertools.product(*(range(s) for s in S2)):
        if all(
            all(pt % s != a for s, a in zip(S2, assign)) for pt in points
        ):
            good += 1
    return Fraction(good, total)


def montecarlo_stage2(
    params: construction.ConstructionParams,
    target: str,
    trials: int,
    seed: int | None = None,
) -> dict:
    """Seeded Monte Carlo over second-sieve assignments.

    target 'survivor_count': mean #Q(a) vs gamma * #Q (an exact expectation).
    target 'pair_survival': survival of a fixed pair q1, q2 with no s in S2
    dividing q2 - q1, vs gamma_2.
    target 'ap_survival': survival of a fixed r-term progression with common
    difference r! p, p coprime to S2, vs gamma_r.
    The z-score uses the binomial variance of the target indicator.
    """
    if trials < 1:
        raise ValueError("need trials >= 1")
    seed = params.seed if seed is None else seed
    table = primes_mod.sieve_range(0, max(params.x, params.y))
    partition = construction.partition_primes(params, table)
    S2 = partition.S2
    pr = np.array(table.primes, dtype=np.int64)
    Q = pr[(pr > params.x // 4) & (pr <= params.y)]
    g = construction.gamma(S2)

    if target == "survivor_count":
        predicted = float(g) * len(Q)
        # int32 halves the footprint; residues are < s <= z so they fit
        residues = np.array([Q % s for s in S2], dtype=np.int32)
        totals = np.empty(trials)
        for t in range(trials):
            draws = np.array(
                [rng.draw(seed, "mc2", f"{t}:{s}", s) for s in S2]
            ).reshape(-1, 1)
            hit = (residues == draws).any(axis=0)
            totals[t] = len(Q) - int(hit.sum())
        empirical = float(totals.mean())
        var = len(Q) * float(g) * (1 - float(g))
    elif target in ("pair_survival", "ap_survival"):
        if target == "pair_survival":
            points = _coprime_difference_pair(Q, S2)
            predicted_frac = construction.gamma_factors(S2, 2)[-1] if S2 else Fraction(1)
        else:
            points = _ap_points(params, Q, S2)
            predicted_frac = (
                construction.gamma_factors(S2, params.r)[-1] if S2 else Fraction(1)
            )
        predicted = float(predicted_frac)
        hits = 0
        for t in range(trials):
            draws = {s: rng.draw(seed, "mc2", f"{t}:{s}", s) for s in S2}
            if all(pt % s != a for s, a in draws.items() for pt in points):
                hits += 1
        empirical = hits / trials
        var = predicted * (1 - predicted)
    else:
        raise ValueError(f"unknown target {target!r}")

    se = math.sqrt(var / trials) if var > 0 else 0.0
    z = (empirical - predicted) / se if se else 0.0
    return {
        "target": target,
        "trials": trials,
        "empirical": empirical,
        "predicted": predicted,
        "z_score": z,
    }


def _coprime_difference_pair(Q: np.ndarray, S2: list[int]) -> list[int]:
    q1 = int(Q[0])
    for q2 in Q[1:]:
        if all((int(q2) - q1) % s != 0 for s in S2):
            return [q1, int(q2)]
    raise ValueError("no pair with difference coprime to all of S2")


def _ap_points(params: construction.ConstructionParams, Q: np.ndarray, S2: list[int]) -> list[int]:
    s2_set = set(S2)
    p = next(p for p in primes_mod.sieve_range(2, params.x).primes[::-1] if p not in s2_set)
    q = int(Q[0])
    return [q + i * params.r_factorial * p for i in range(params.r)]


def smooth_count(y: int, z: int) -> tuple[int, float]:
    """Exact count of z-smooth integers in [1, y] (1 counts as smooth) plus
    the de Bruijn-style prediction y * exp(-u log u), u = log y / log z.

    The prediction is reported, never asserted."""
    if y < 1 or z < 2:
        raise ValueError("need y >= 1 and z >= 2")
    u = math.log(y) / math.log(z)
    prediction = y * math.exp(-u * math.log(u)) if u > 1 else float(y)
    if z >= y:
        return y, prediction
    vals = np.arange(y + 1, dtype=np.int64)
    for p in primes_mod.sieve_range(2, z).primes:
        pk = p
        while pk <= y:
            vals[pk::pk] //= p
            pk *= p
    count = int((vals[1:] == 1).sum())
    return count, prediction
