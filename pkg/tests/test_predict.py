import math

import numpy as np
import pytest

from borwein.bounds import arg_approx
from borwein.errors import DomainError, InvalidSpecError, SingularityError
from borwein.predict import (AmbiguousRoots, default_peaks, dominant_peaks, fraction_at_root,
                             general_target, mod7_fraction, pair_weights, peak_argument,
                             peak_argument_contribution, scan_modulus, scan_residues,
                             sign_change_root)
from borwein.qseries import INFINITE, Factor, ProductSpec, general_product, modk_spec, paired_spec
from borwein.signcheck import first_sign_change

K7 = modk_spec(7, 50)


# --- peaks -------------------------------------------------------------------

def test_borwein_single_pair():
    peaks = default_peaks(modk_spec(3, 50))
    assert [p.index for p in peaks.dominant] == [1]
    assert peaks.dominant[0].theta == pytest.approx(2 * math.pi / 3)


def test_mod7_three_pairs():
    peaks = default_peaks(K7)
    assert [p.index for p in peaks.dominant] == [1, 2, 3]
    assert default_peaks(paired_spec(7, (1, 2, 3), 50)).dominant == peaks.dominant


def test_k2_peak_at_pi():
    spec = ProductSpec(2, (Factor(1, 1, 40),))
    peaks = default_peaks(spec)
    assert len(peaks.peaks) == 1 and peaks.dominant[0].theta == pytest.approx(math.pi)


def test_dominance_rate_zero_keeps_only_max():
    n = 50
    r = 0.5 ** (1 / (7 * n))
    peaks = dominant_peaks(K7, n, r, rate=0.0)
    assert len(peaks.dominant) == 1
    top = max(p.log_magnitude for p in peaks.peaks)
    assert peaks.dominant[0].log_magnitude == top


def test_peaks_domain():
    with pytest.raises(DomainError):
        dominant_peaks(K7, 50, 1.0)
    with pytest.raises(InvalidSpecError):
        default_peaks(modk_spec(3, INFINITE))


def test_peak_dict():
    d = default_peaks(K7).as_dict()
    assert d["modulus"] == 7 and d["dominant"] == [1, 2, 3]


# --- argument ------------------------------------------------------------------

def test_contribution_vanishes_at_s_one(rng):
    for _ in range(20):
        K = int(rng.integers(3, 12))
        alpha = int(rng.integers(1, K // 2 + 1))
        theta = float(rng.uniform(0.1, 3.0))
        if abs(math.sin(alpha * theta / 2)) < 1e-6:
            continue
        assert peak_argument_contribution(alpha, K, theta, 1.0) == 0.0


def test_k3_constant():
    assert peak_argument_contribution(1, 3, 2 * math.pi / 3, 0.0) == pytest.approx(-math.pi / 18)


def test_k3_matches_bounds_module():
    spec = modk_spec(3, 40)
    for s in np.linspace(0, 1, 41):
        n = 40
        r = float(s) ** (1 / (3 * n)) if s > 0 else 0.0
        expected = -math.pi / 18 + math.atan(math.sqrt(3) * s / (2 + s)) / 3
        got = peak_argument(spec, 2 * math.pi / 3, float(s))
        assert got == pytest.approx(expected, abs=1e-10)
        if r > 0:
            assert got == pytest.approx(arg_approx(n, r), abs=1e-10)


def test_contribution_errors():
    with pytest.raises(DomainError):
        peak_argument_contribution(1, 3, 1.0, 1.5)
    with pytest.raises(SingularityError):
        peak_argument_contribution(1, 3, 2 * math.pi, 0.5)


def test_pair_weights():
    assert pair_weights(modk_spec(7, 5)) == {1: 1.0, 2: 1.0, 3: 1.0}
    assert pair_weights(modk_spec(4, 5)) == {1: 1.0}
    assert pair_weights(ProductSpec(5, (Factor(5, 1, 3),))) == {}


# --- target and roots -------------------------------------------------------------

def test_mod7_endpoints():
    assert general_target(K7, 5, 0.0) == pytest.approx(2 * math.sqrt(7) * math.cos(3 * math.pi / 7), abs=1e-12)
    assert general_target(K7, 5, 1.0) == pytest.approx(-1.0, abs=1e-12)


def test_target_real_and_residue_periodic():
    for s in (0.0, 0.3, 0.9):
        val = general_target(K7, 3, s)
        assert isinstance(val, float) and math.isfinite(val)
        assert general_target(K7, 3 + 7, s) == pytest.approx(val, abs=1e-12)


def test_borwein_residue0_positive():
    spec = modk_spec(3, 30)
    assert all(general_target(spec, 0, s) > 0 for s in np.linspace(0, 1, 200))


def test_roots():
    s0 = sign_change_root(K7, 5)
    assert abs(s0 - 0.6089) < 5e-4
    assert general_target(K7, 5, s0) == pytest.approx(0.0, abs=1e-7)
    assert sign_change_root(modk_spec(3, 30), 0) is None
    assert sign_change_root(K7, 0) is None


def test_ambiguous_root_type():
    roots = AmbiguousRoots([0.2, 0.7])
    assert roots.ambiguous and list(roots) == [0.2, 0.7]


# --- fractions -------------------------------------------------------------------

def test_mod7_fraction_anchor():
    s0 = sign_change_root(K7, 5)
    assert abs(fraction_at_root(K7, s0) - 0.30214) < 5e-4
    assert abs(mod7_fraction(0.6089) - 0.30214) < 5e-4


def test_general_matches_anchor():
    for s in (0.1, 0.4, 0.6089, 0.95):
        assert fraction_at_root(K7, s) == pytest.approx(mod7_fraction(s), rel=1e-8)


def test_fraction_limits():
    assert fraction_at_root(K7, 1.0) == pytest.approx(0.5)
    assert fraction_at_root(K7, 1 - 1e-9) == pytest.approx(0.5, abs=1e-6)
    assert fraction_at_root(modk_spec(5, 20), 1 - 1e-9) == pytest.approx(0.5, abs=1e-6)
    with pytest.raises(DomainError):
        fraction_at_root(K7, 0.0)
    with pytest.raises(DomainError):
        mod7_fraction(1.0)


def test_fraction_increasing_in_s():
    vals = [fraction_at_root(K7, s) for s in np.linspace(0.05, 0.99, 20)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_prediction_vs_exact_n12():
    n = 12
    coeffs = general_product(modk_spec(7, n))
    m = first_sign_change(coeffs, 7, 5, start=7 * n)
    predicted = fraction_at_root(K7, sign_change_root(K7, 5))
    assert abs(m / coeffs.exact_degree - predicted) / predicted < 0.10


# --- scan ---------------------------------------------------------------------------

def test_scan_mod7():
    rows = {e.residue: e for e in scan_modulus(7)}
    assert len(rows[5].roots) == 1 and rows[5].fractions[0] == pytest.approx(0.30214, abs=5e-4)
    assert rows[0].roots == () and rows[0].pattern == "+"
    assert rows[5].as_dict()["pattern"] == "+-"


@pytest.mark.parametrize("K", [3, 4, 5, 6, 7])
def test_scan_consistent_with_exact(K):
    n = 12
    coeffs = general_product(modk_spec(K, n)).coeffs
    deg = len(coeffs) - 1
    for row in scan_residues(modk_spec(K, n)):
        if row.roots or row.ambiguous:
            continue
        sign = 1 if row.at_zero > 0 else -1
        for m in range(K * n, deg // 2 + 1):
            if m % K == row.residue:
                assert sign * coeffs[m] >= 0, (K, row.residue, m)
