import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primegaps import covering, primes

EXACT_Y_TABLE = {2: 1, 3: 3, 5: 5, 7: 9, 11: 13, 13: 21}


def test_apply_classes_marks_expected_positions():
    a = covering.ResidueAssignment(5, {2: 0, 3: 1, 5: 4})
    interval = covering.apply_classes(10, a)
    covered = {t for t in range(1, 11) if interval.covered[t - 1]}
    assert covered == {2, 4, 6, 8, 10, 1, 7, 9}
    assert interval.survivors == [3, 5]


def test_verify_cover_vacuous_at_zero():
    assert covering.verify_cover(0, covering.ResidueAssignment(2, {}))


@pytest.mark.parametrize("x,y", sorted(EXACT_Y_TABLE.items()))
def test_exact_y_table(x, y):
    got, witness = covering.exact_Y(x)
    assert got == y
    assert covering.verify_cover(y, witness)
    # optimality: no assignment covers y+1 (exact search says so)
    assert not covering.verify_cover(y + 1, witness)


def test_greedy_never_beats_exact():
    for x in (5, 7, 11, 13):
        gy, witness = covering.greedy_Y(x)
        assert covering.verify_cover(gy, witness)
        assert gy <= EXACT_Y_TABLE[x]


def test_jacobsthal_small():
    assert covering.jacobsthal(30) == 6
    assert covering.jacobsthal(210) == 10
    assert covering.jacobsthal(2) == 2
    assert covering.jacobsthal(1) == 1


def test_jacobsthal_squarefull_matches_radical():
    assert covering.jacobsthal(8) == covering.jacobsthal(2)
    assert covering.jacobsthal(900) == covering.jacobsthal(30)


@pytest.mark.parametrize("x", [2, 3, 5, 7, 11])
def test_jacobsthal_primorial_duality(x):
    assert covering.jacobsthal(primes.primorial(x)) == EXACT_Y_TABLE[x] + 1


def test_crt_assemble_oracle():
    a = covering.ResidueAssignment(3, {2: 1, 3: 2})
    cert = covering.crt_assemble(a, 3)
    assert cert.m == 7
    assert cert.witnesses == [(1, 2), (2, 3), (3, 2)]
    assert covering.check_certificate(cert)


def test_crt_assemble_minimality_and_window():
    a = covering.ResidueAssignment(5, {2: 1, 3: 2, 5: 4})
    cert = covering.crt_assemble(a, 5)
    P = primes.primorial(5)
    assert 5 < cert.m <= 5 + P
    for p, r in {2: 1, 3: 2, 5: 4}.items():
        assert cert.m % p == (-r) % p


def test_check_certificate_rejects_bad_witness():
    cert = covering.CompositeRunCertificate(7, 3, [(1, 2), (2, 5), (3, 2)])
    assert not covering.check_certificate(cert)  # 5 does not divide 9


def test_check_certificate_rejects_prime_in_run():
    # m+2 = 13 is prime; a fake witness (2, 13) fails m+t > p
    cert = covering.CompositeRunCertificate(11, 2, [(1, 2), (2, 13)])
    assert not covering.check_certificate(cert)


@given(
    st.dictionaries(
        st.sampled_from([2, 3, 5, 7]), st.integers(min_value=0, max_value=6), min_size=1
    ),
    st.integers(min_value=1, max_value=12),
)
@settings(max_examples=60)
def test_assemble_roundtrip_property(raw, y):
    classes = {p: a % p for p, a in raw.items()}
    x = max(classes)
    for p in primes.sieve_range(2, x).primes:
        classes.setdefault(p, 0)  # assembly wants a class for every p <= x
    a = covering.ResidueAssignment(x, classes)
    if not covering.verify_cover(y, a):
        return
    cert = covering.crt_assemble(a, y)
    assert covering.check_certificate(cert)
    for t in range(1, y + 1):
        assert not primes.is_prime(cert.m + t)


def test_assignment_json_roundtrip(tmp_path):
    a = covering.ResidueAssignment(5, {2: 1, 5: 3})
    path = tmp_path / "a.json"
    path.write_text(json.dumps(a.to_json()))
    b = covering.load_assignment(str(path))
    assert b.x == a.x and b.classes == a.classes


def test_certificate_json_uses_decimal_strings(tmp_path):
    cert = covering.CompositeRunCertificate(2**70, 1, [(1, 2)])
    blob = cert.to_json()
    assert blob["m"] == str(2**70)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(blob))
    back = covering.load_certificate(str(path))
    assert back.m == 2**70 and back.witnesses == [(1, 2)]


def test_validation_rejects_bad_assignment():
    with pytest.raises(ValueError):
        covering.ResidueAssignment(5, {4: 1}).validate()  # 4 not prime
    with pytest.raises(ValueError):
        covering.ResidueAssignment(5, {7: 1}).validate()  # p > x
    with pytest.raises(ValueError):
        covering.ResidueAssignment(5, {3: 5}).validate()  # residue out of range


def test_budget_exceeded_carries_partial_result():
    with pytest.raises(covering.BudgetExceeded) as exc:
        covering.max_coverable([2, 3, 5, 7, 11, 13], node_budget=50)
    assert exc.value.best_y >= 1
    assert covering.verify_cover(exc.value.best_y, exc.value.witness)
