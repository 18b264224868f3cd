import itertools
import math
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primegaps import construction, primes, stats


def test_alpha_one_is_exactly_one():
    assert stats.singular_series(1, 100).value == 1.0


def test_alpha_two_value():
    a = stats.singular_series(2, 10**5)
    assert a.value == pytest.approx(1.32032, abs=5e-6)
    assert a.tail_bound > 0


def test_alpha_monotone_cutoff_convergence():
    a, b = stats.singular_series(3, 10**3), stats.singular_series(3, 10**4)
    assert abs(a.value - b.value) < a.tail_bound


def test_local_von_mangoldt():
    assert stats.local_von_mangoldt(5, 3) == Fraction(5, 4)
    assert stats.local_von_mangoldt(5, 10) == 0
    assert stats.local_von_mangoldt(2, 1) == Fraction(2, 1)


def test_beta_oracles():
    d3 = stats.make_form_system("progression_pair_d3", 2)
    assert stats.local_factor(d3, 2) == Fraction(4)
    assert stats.local_factor(d3, 3) == Fraction(9, 16)
    d2 = stats.make_form_system("progression_d2", 2)
    assert stats.local_factor(d2, 5) == Fraction(15, 16)


def test_beta_closed_forms_match_brute_force_spot():
    for r, p, kind in [(3, 5, "progression_d2"), (2, 7, "shifted_d3"), (4, 3, "progression_pair_d3")]:
        system = stats.make_form_system(kind, r)
        squared = kind.endswith("d3")
        assert stats.local_factor(system, p) == stats.beta_closed_form(r, p, squared)


def test_beta_shift_invariance():
    # the refined relation shifts the progression start; beta must not move
    for i in range(2):
        system = stats.make_form_system("shifted_d2", 2, i=i)
        assert stats.local_factor(system, 7) == stats.beta_closed_form(2, 7, False)


def test_finite_complexity():
    assert stats.make_form_system("progression_d2", 3).finite_complexity
    degenerate = stats.AffineLinearSystem([((1, 0), 0), ((2, 0), 5)])
    assert not degenerate.finite_complexity


def test_psi_norm_oracle():
    system = stats.AffineLinearSystem([((1,), 5)])
    assert stats.psi_norm(system, 10, 0.0) == pytest.approx(1.5)


def test_psi_norm_B_discounts_constants():
    system = stats.AffineLinearSystem([((1,), 100)])
    plain = stats.psi_norm(system, 10, 0.0)
    damped = stats.psi_norm(system, 10, 2.0)
    assert damped < plain


def test_exhaustive_survival_single_point_is_gamma():
    for S2 in ([5, 7], [5, 7, 11]):
        assert stats.exhaustive_survival(S2, [0]) == construction.gamma(S2)


def test_exhaustive_survival_pair_is_gamma2():
    for S2 in ([5, 7], [5, 7, 11]):
        g2 = construction.gamma_factors(S2, 2)[1]
        # difference 1 is coprime to every s
        assert stats.exhaustive_survival(S2, [0, 1]) == g2


def test_exhaustive_survival_ap_is_gamma_r():
    S2 = [5, 7]
    for r in (2, 3):
        gr = construction.gamma_factors(S2, r)[r - 1]
        step = math.factorial(r) * 13  # 13 coprime to 5 and 7
        points = [11 + i * step for i in range(r)]
        assert stats.exhaustive_survival(S2, points) == gr


def test_exhaustive_survival_collapses_on_shared_residue():
    # both points in the same class mod 5: pair survival exceeds gamma_2
    S2 = [5, 7]
    g2 = construction.gamma_factors(S2, 2)[1]
    assert stats.exhaustive_survival(S2, [0, 5]) > g2


def test_exhaustive_survival_guards_blowup():
    with pytest.raises(ValueError):
        stats.exhaustive_survival([101, 103, 107, 109], [0])


@given(st.integers(min_value=0, max_value=34))
@settings(max_examples=20)
def test_exhaustive_survival_translation_invariant(shift):
    S2 = [5, 7]
    base = stats.exhaustive_survival(S2, [0, 1])
    assert stats.exhaustive_survival(S2, [shift, shift + 1]) == base


def small_params(**kw):
    defaults = dict(r=2, x=200, y=1000, z=12, seed=0)
    defaults.update(kw)
    params = construction.ConstructionParams(**defaults)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        params.validate()
    return params


def test_montecarlo_survivor_count_tracks_gamma():
    out = stats.montecarlo_stage2(small_params(), "survivor_count", 100)
    assert 0.9 < out["empirical"] / out["predicted"] < 1.1


def test_montecarlo_is_reproducible():
    a = stats.montecarlo_stage2(small_params(), "pair_survival", 50)
    b = stats.montecarlo_stage2(small_params(), "pair_survival", 50)
    assert a == b


def test_montecarlo_seed_changes_draws():
    a = stats.montecarlo_stage2(small_params(seed=0), "survivor_count", 10)
    b = stats.montecarlo_stage2(small_params(seed=1), "survivor_count", 10)
    assert a["empirical"] != b["empirical"]


def test_smooth_count_oracles():
    assert stats.smooth_count(10, 2)[0] == 4
    assert stats.smooth_count(100, 5)[0] == 34


def test_smooth_count_against_direct_factorization():
    def z_smooth(n, z):
        for p in primes.sieve_range(2, z).primes:
            while n % p == 0:
                n //= p
        return n == 1

    for y, z in [(500, 7), (300, 13)]:
        direct = sum(1 for n in range(1, y + 1) if z_smooth(n, z))
        assert stats.smooth_count(y, z)[0] == direct


def test_degree_stats_band_at_small_scale():
    params = small_params(y=2000)
    graph = construction.build_relation(params)
    ds = stats.degree_stats(params, graph, "P", 0)
    assert ds.quantiles["q50"] > 0
