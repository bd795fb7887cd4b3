import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from putlab import (Prior, PrivacyNotion, ProductSpace, SourceSet, adp_known_prior, adp_source_set_class2,
                    class1_pd, dp_known_prior, ml_distortion_from_leakage, ml_known_prior)
from putlab.local import cumulative_tail
from putlab.oracle import oracle_pd_lp

from conftest import random_sorted_prior

P4 = Prior.of([0.4, 0.3, 0.2, 0.1])
P4_STEEP = Prior.of([0.55, 0.25, 0.15, 0.05])


def simplex(m):
    return SourceSet.full_simplex(ProductSpace(m, 1))


# Known prior, approximate DP

@pytest.mark.parametrize("D, expected", [(0.2, math.log(10.5)), (0.05, math.log(51.0)), (0.54, 0.0)])
def test_adp_known_prior_values(D, expected):
    assert adp_known_prior(P4, D, 0.1) == pytest.approx(expected, abs=1e-12)


def test_adp_zero_region_starts_at_scaled_breakpoint():
    assert adp_known_prior(P4, 0.54 - 1e-6, 0.1) > 0
    assert adp_known_prior(P4, 0.54, 0.1) == 0.0
    assert adp_known_prior(P4, 0.8, 0.1) == 0.0


@given(st.integers(0, 10_000), st.floats(0.005, 1.0))
def test_adp_at_zero_slack_is_dp(seed, D):
    P = random_sorted_prior(np.random.default_rng(seed), 4)
    assert adp_known_prior(P, D, 0.0) == dp_known_prior(P, D)


def test_adp_rejects_unsorted_prior():
    with pytest.raises(ValueError, match="sorted"):
        adp_known_prior(Prior.of([0.1, 0.2, 0.3, 0.4]), 0.2, 0.1)


def test_adp_rejects_bad_slack():
    with pytest.raises(ValueError):
        adp_known_prior(P4, 0.2, 1.0)


# Known prior, DP

@pytest.mark.parametrize("D, expected", [
    (0.05, math.log(57.0)),
    (0.2, math.log(12.0)),
    (0.45, math.log(1.1 / 0.35)),
    (0.6, 0.0),
])
def test_dp_known_prior_values(D, expected):
    assert dp_known_prior(P4, D) == pytest.approx(expected, abs=1e-12)


def test_dp_just_below_breakpoint_is_positive():
    assert dp_known_prior(P4, 0.6 - 1e-9) > 0


# Known prior, maximal leakage

@pytest.mark.parametrize("D, expected", [(0.1, math.log(3.0)), (0.2, math.log(2.5)), (0.6, 0.0)])
def test_ml_known_prior_values(D, expected):
    assert ml_known_prior(P4, D) == pytest.approx(expected, abs=1e-12)


def test_ml_flat_prior_plateau_gives_same_value():
    # Ties make the bracket index ambiguous; the value must not depend on it.
    P = Prior.of([0.4, 0.2, 0.2, 0.2])
    tail = cumulative_tail(P)
    for D in tail[1:3]:
        left = ml_known_prior(P, D - 1e-12)
        assert ml_known_prior(P, D) == pytest.approx(left, abs=1e-9)


@pytest.mark.parametrize("D", [0.05, 0.1, 0.2, 0.35, 0.5, 0.59])
def test_known_prior_forms_match_oracle(D):
    for notion, closed in [
        (PrivacyNotion.dp(), dp_known_prior(P4, D)),
        (PrivacyNotion.approx_dp(0.1), adp_known_prior(P4, D, 0.1)),
        (PrivacyNotion.max_leakage(), ml_known_prior(P4, D)),
    ]:
        assert oracle_pd_lp(notion, P4, D, tol=1e-8).value == pytest.approx(closed, abs=1e-6)


@pytest.mark.parametrize("seed", range(3))
def test_known_prior_curves_monotone_and_continuous(seed):
    P = random_sorted_prior(np.random.default_rng(seed), 5)
    tail = cumulative_tail(P)
    grid = np.linspace(1e-3, 1.0, 1000)
    curves = [
        (ml_known_prior, 1.0),
        (dp_known_prior, tail[-2]),
        (lambda P, D: adp_known_prior(P, D, 0.1), 0.9 * tail[-2]),
    ]
    for f, drop in curves:
        values = np.array([f(P, float(D)) for D in grid])
        assert np.all(np.diff(values) <= 1e-12)
        # Away from the log singularity at 0 the steps stay small, except for the
        # DP-type drop to zero at the last breakpoint.
        inner = (grid > 0.05) & (grid < drop - 1e-3)
        assert np.max(np.abs(np.diff(values[inner]))) < 0.05
        assert np.all(values[grid >= drop] == 0.0)


def test_dp_curves_drop_to_zero_but_ml_does_not():
    below = 0.6 - 1e-9
    assert dp_known_prior(P4, below) == pytest.approx(math.log(0.4 / 0.3), abs=1e-6)
    assert adp_known_prior(P4, 0.54 - 1e-9, 0.1) == pytest.approx(math.log(0.36 / 0.27), abs=1e-6)
    assert ml_known_prior(P4, below) < 1e-6


@pytest.mark.parametrize("m", [2, 3, 5])
def test_uniform_prior_matches_class1(m):
    U = Prior.uniform(ProductSpace(m, 1))
    S = simplex(m)
    for D in np.linspace(0.01, 1.0, 40):
        D = float(D)
        assert dp_known_prior(U, D) == pytest.approx(class1_pd(PrivacyNotion.dp(), m, D, S).value, abs=1e-12)
        assert ml_known_prior(U, D) == pytest.approx(
            class1_pd(PrivacyNotion.max_leakage(), m, D, S).value, abs=1e-12)
        assert adp_known_prior(U, D, 0.1) == pytest.approx(
            class1_pd(PrivacyNotion.approx_dp(0.1), m, D, S).value, abs=1e-12)


# Distortion from leakage

@pytest.mark.parametrize("eps, expected", [(math.log(2.0), 0.3), (0.0, 0.6), (math.log(1.5), 0.45)])
def test_distortion_from_leakage_values(eps, expected):
    assert ml_distortion_from_leakage(SourceSet.singleton(P4), eps) == pytest.approx(expected, abs=1e-12)
    assert ml_known_prior(P4, expected) == pytest.approx(eps, abs=1e-12)


def test_distortion_from_leakage_at_full_budget_is_zero():
    assert ml_distortion_from_leakage(SourceSet.singleton(P4), math.log(4.0)) == 0.0


def test_distortion_from_leakage_family_takes_worst_member():
    eps = math.log(1.5)
    fam = SourceSet.family([P4, P4_STEEP])
    each = [ml_distortion_from_leakage(SourceSet.singleton(P), eps) for P in (P4, P4_STEEP)]
    assert ml_distortion_from_leakage(fam, eps) == max(each)


@given(st.integers(0, 10_000), st.floats(0.0, 1.0))
def test_leakage_round_trip(seed, frac):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 6))
    P = random_sorted_prior(rng, m)
    eps = frac * (math.log(m) - 1e-3)
    D = ml_distortion_from_leakage(SourceSet.singleton(P), eps)
    assert ml_known_prior(P, D) == pytest.approx(eps, abs=1e-9)


# Class I closed forms

@pytest.mark.parametrize("notion, expected", [
    (PrivacyNotion.dp(), math.log(3.0)),
    (PrivacyNotion.max_leakage(), math.log(1.5)),
    (PrivacyNotion.mutual_info(), 0.130812),
])
def test_class1_binary_quarter(notion, expected):
    bp = class1_pd(notion, 2, 0.25, simplex(2))
    assert bp.exact
    assert bp.value == pytest.approx(expected, abs=1e-6)


def test_class1_adp_binary():
    assert class1_pd(PrivacyNotion.approx_dp(0.1), 2, 0.3, simplex(2)).value == pytest.approx(math.log(2.0))


@pytest.mark.parametrize("notion", [
    PrivacyNotion.dp(), PrivacyNotion.approx_dp(0.1), PrivacyNotion.max_info(), PrivacyNotion.max_leakage(),
    PrivacyNotion.renyi(2), PrivacyNotion.sibson(2), PrivacyNotion.mutual_info(),
])
def test_class1_zero_region(notion):
    bp = class1_pd(notion, 2, 0.5, simplex(2))
    assert (bp.lower, bp.upper, bp.exact) == (0.0, 0.0, True)


@pytest.mark.parametrize("notion", [PrivacyNotion.max_info(), PrivacyNotion.renyi(2), PrivacyNotion.sibson(3)])
def test_class1_brackets_are_ordered(notion):
    for m in (2, 3, 4):
        for D in np.linspace(0.02, (m - 1) / m - 0.01, 25):
            bp = class1_pd(notion, m, float(D), simplex(m))
            assert bp.lower <= bp.upper + 1e-12


def test_class1_rejects_class2_set():
    with pytest.raises(ValueError, match="uniform"):
        class1_pd(PrivacyNotion.dp(), 4, 0.2, SourceSet.singleton(P4))


# Class II families

def test_class2_singleton_reduces_to_known_prior():
    fam = SourceSet.family([P4])
    assert adp_source_set_class2(fam, 0.2, 0.1) == pytest.approx(math.log(10.5), abs=1e-9)
    assert adp_source_set_class2(fam, 0.2, 0.0) == pytest.approx(math.log(12.0), abs=1e-9)


def test_class2_family_dominates_members():
    fam = SourceSet.family([P4, P4_STEEP])
    value = adp_source_set_class2(fam, 0.2, 0.1)
    # Frozen from the two-prior bisection LP oracle.
    assert value == pytest.approx(2.351375, abs=1e-6)
    assert value >= max(adp_known_prior(P, 0.2, 0.1) for P in (P4, P4_STEEP)) - 1e-9


@pytest.mark.parametrize("seed", range(6))
def test_class2_family_matches_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    m = int(rng.integers(3, 5))
    members = [random_sorted_prior(rng, m, floor=0.05) for _ in range(2)]
    fam = SourceSet.family(members)
    if fam.common_ordering() is None:
        pytest.skip("random pair does not share an ordering")
    D = float(rng.uniform(0.05, 0.5))
    for delta in (0.0, 0.1):
        notion = PrivacyNotion.approx_dp(delta) if delta else PrivacyNotion.dp()
        oracle = oracle_pd_lp(notion, members, D, tol=1e-8).value
        assert adp_source_set_class2(fam, D, delta) == pytest.approx(oracle, abs=1e-6)
