import math
from functools import partial

import pytest

from borwein.errors import ContractError, UnsupportedCaseError
from borwein.qseries import TruncatedSeries, borwein_poly, general_product, modk_spec, residue_decompose
from borwein.signcheck import (Sign, SignRule, borwein_family, borwein_rule, cubic_rule,
                               first_sign_change, iks_family, iks_rule, mod4_limits, mod4_rule,
                               mod7_rule, modk_family, power_rule, rule_from_pattern, scan_family,
                               scan_report, verify_pattern)


def test_rule_needs_every_residue():
    with pytest.raises(ContractError):
        SignRule(3, {0: Sign.NONNEG, 1: Sign.NONPOS})


def test_borwein_rules():
    assert borwein_rule(3).expected == {0: Sign.NONNEG, 1: Sign.NONPOS, 2: Sign.NONPOS}
    r5 = borwein_rule(5)
    assert r5.expected[0] is Sign.NONNEG and all(r5.expected[k] is Sign.NONPOS for k in range(1, 5))
    assert r5.m_range is None
    with pytest.raises(UnsupportedCaseError):
        borwein_rule(4)


def test_p7_pattern_holds():
    assert verify_pattern(borwein_poly(7), borwein_rule(3)) == []


def test_zero_never_violates_signs():
    zero = TruncatedSeries.series([0] * 20)
    assert verify_pattern(zero, rule_from_pattern("+--")) == []
    assert verify_pattern(zero, rule_from_pattern("+-0")) == []


def test_zero_rule_flags_nonzero():
    s = TruncatedSeries.series([1, 0, 5, 0])
    v = verify_pattern(s, rule_from_pattern("++0"))
    assert [x.m for x in v] == [2]


def test_violations_sorted_and_detailed():
    s = TruncatedSeries.series([1, 2, 3, -4, 5])
    v = verify_pattern(s, rule_from_pattern("+--"))
    assert [x.m for x in v] == [1, 2, 3, 4]
    assert v[2].residue == 0 and v[2].coefficient == -4 and v[2].expected is Sign.NONNEG


def test_range_beyond_truncation():
    s = TruncatedSeries.series([1, -1, -1])
    with pytest.raises(ContractError):
        verify_pattern(s, rule_from_pattern("+--", (0, 10)))


def test_monotone_in_range():
    s = general_product(modk_spec(4, 5))
    full = verify_pattern(s, mod4_rule(5, 1))
    part = verify_pattern(s, mod4_rule(5, 1).restricted(0, 72))
    assert {x.m for x in part} <= {x.m for x in full}


def test_mod4_n5_exceptions():
    s = general_product(modk_spec(4, 5))
    v = verify_pattern(s, mod4_rule(5, 1))
    assert [(x.m, x.coefficient) for x in v] == [(71, -1), (79, 1)]


def test_mod4_cutoff_even_n():
    one, three = mod4_limits(4, 1)
    assert one == 11 and three == 11
    rule = mod4_rule(4, 1)
    assert rule.sign_at(4 * 11 + 1) is Sign.NONPOS
    assert rule.sign_at(4 * 12 + 1) is Sign.NONNEG


def test_mod7_rule_residues():
    s = general_product(modk_spec(7, 6))
    assert verify_pattern(s, mod7_rule(6)) == []


def test_palindromic_mirror_violations():
    # an artificially broken palindrome: violations come in mirrored pairs
    p = list(borwein_poly(4).coeffs)
    deg = len(p) - 1
    p[6] = -p[6]
    p[deg - 6] = -p[deg - 6]
    v = verify_pattern(TruncatedSeries.polynomial(p), borwein_rule(3))
    assert sorted(x.m for x in v) == sorted(deg - x.m for x in v)


def test_abc_nonnegativity_equivalence():
    for n in range(1, 31):
        p = borwein_poly(n)
        A, B, C = residue_decompose(p, 3)
        abc_ok = min(A.coeffs) >= 0 and max(B.coeffs) <= 0 and max(C.coeffs) <= 0
        assert abc_ok == (verify_pattern(p, borwein_rule(3)) == [])


def test_scan_borwein_100():
    rows = scan_family(borwein_family(1), partial(power_rule, delta=1), range(1, 101), workers=1)
    assert len(rows) == 100 and all(not r.violations for r in rows)
    assert [r.n for r in rows] == list(range(1, 101))


def test_scan_cube_half_range():
    rows = scan_family(borwein_family(3), cubic_rule, range(1, 41), workers=1)
    assert all(not r.violations for r in rows)
    assert rows[-1].checked_range == (0, (9 * 40 * 40) // 2)


def test_scan_matches_direct_and_truncation():
    fam = modk_family(4, 1)
    rows = scan_family(fam, lambda n: mod4_rule(n, 1), [5], workers=1)
    assert [v.m for v in rows[0].violations] == [71, 79]
    cut = scan_family(fam, lambda n: mod4_rule(n, 1), [5], m_limit=75, workers=1)
    assert [v.m for v in cut[0].violations] == [71]
    assert cut[0].checked_range == (0, 75)


def test_scan_parallel_matches_serial():
    rule = partial(power_rule, delta=2)
    a = scan_family(borwein_family(2), rule, range(1, 31), workers=1)
    b = scan_family(borwein_family(2), rule, range(1, 31), workers=2)
    assert scan_report(borwein_family(2), a) == scan_report(borwein_family(2), b)


def test_mod7_residue5_sign_change():
    for n in (8, 10, 12):
        s = general_product(modk_spec(7, n))
        m = first_sign_change(s, 7, 5, start=7 * n)
        assert abs(m / (21 * n * n) - 0.302) < 0.01


def test_iks_rule_shape():
    assert iks_rule(3, 1).expected == borwein_rule(3).expected
    r = iks_rule(11, 3)
    neg = {k for k, v in r.expected.items() if v is Sign.NONPOS}
    assert neg == {2, 3, 4, 7, 8, 9}
    with pytest.raises(UnsupportedCaseError):
        iks_rule(6, 1)
    with pytest.raises(UnsupportedCaseError):
        iks_rule(9, 3)


@pytest.mark.parametrize("K", [5, 7, 9, 11, 13])
def test_iks_scan_clean(K):
    for a in range(1, K // 2 + 1):
        if math.gcd(a, K) != 1:
            continue
        rows = scan_family(iks_family(K, a), lambda n: iks_rule(K, a), range(1, 11), workers=1)
        assert all(not row.violations for row in rows), (K, a)


def test_iks_wider_reading_fails():
    # taking every 2l+1 < K flips residue +-3 for K = 5, which the data contradict
    s = general_product(iks_family(5, 1).spec(6))
    wide = SignRule(5, {0: Sign.NONNEG, 1: Sign.NONPOS, 2: Sign.NONPOS, 3: Sign.NONPOS, 4: Sign.NONPOS})
    assert verify_pattern(s, wide)
