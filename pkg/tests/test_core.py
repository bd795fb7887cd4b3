import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from putlab import (Mechanism, Prior, PrivacyNotion, ProductSpace, SourceClass, SourceSet, classify_source_set,
                    expected_distortion, identity_mechanism, is_valid, randomized_response, theta_star,
                    uniform_mechanism)
from putlab.core import ContractError, SizingError, dump_json, load_json, sort_with_permutation

from conftest import random_mechanism


def test_point_indexing_is_little_endian():
    space = ProductSpace(3, 2)
    np.testing.assert_array_equal(space.digits[5], [2, 1])
    assert space.hamming(0, 4) == 2
    assert space.hamming(0, 3) == 1


def test_neighbor_maps_cover_each_neighbour_pair_once():
    space = ProductSpace(3, 2)
    pairs = {(x, int(nb[x])) for nb in space.neighbor_maps() for x in range(space.size)}
    expected = {(x, y) for x in range(9) for y in range(9) if space.hamming(x, y) == 1}
    assert pairs == expected
    assert len(pairs) == 9 * 4


@given(st.integers(2, 6), st.integers(1, 4))
def test_neighbor_counts_sum_to_space_size(m, n):
    space = ProductSpace(m, n)
    assert sum(space.neighbor_count(l) for l in range(n + 1)) == m ** n


def test_enumeration_cap(monkeypatch):
    with pytest.raises(SizingError):
        ProductSpace(2, 17)
    monkeypatch.setenv("PUTLAB_CAP", "8")
    ProductSpace(2, 3)
    with pytest.raises(SizingError):
        ProductSpace(3, 2)


def test_prior_validation():
    with pytest.raises(ValueError):
        Prior.of([0.5, 0.5, 0.0])
    with pytest.raises(ValueError):
        Prior.of([0.6, 0.6])
    with pytest.raises(ContractError):
        Prior.of([0.2] * 5, n=2)
    P = Prior.of([0.5, 0.3, 0.2])
    assert P.is_sorted() and not P.is_uniform()
    assert Prior.from_json(P.to_json()) == P


def test_product_prior():
    P = Prior.product(Prior.of([0.75, 0.25]), 2)
    np.testing.assert_allclose(P.probs, [0.5625, 0.1875, 0.1875, 0.0625])


def test_sort_with_permutation():
    probs, perm = sort_with_permutation([0.25, 0.25, 0.2, 0.3])
    np.testing.assert_allclose(probs, [0.3, 0.25, 0.25, 0.2])
    np.testing.assert_array_equal(perm, [3, 0, 1, 2])


def test_mechanism_validation_and_json(tmp_path):
    with pytest.raises(ValueError):
        Mechanism.of([[0.5, 0.6], [0.5, 0.5]])
    with pytest.raises(ValueError):
        Mechanism.of([[1.5, -0.5], [0.5, 0.5]])
    with pytest.raises(ContractError):
        Mechanism(ProductSpace(2), np.ones((3, 1)))
    Q = randomized_response(3, 0.6)
    path = tmp_path / "q.json"
    dump_json(Q, path)
    assert Mechanism.from_json(load_json(path)) == Q


def test_expected_distortion_examples():
    P = Prior.of([0.2, 0.5, 0.3])
    assert expected_distortion(identity_mechanism(P.space), P) == 0.0
    assert expected_distortion(uniform_mechanism(P.space), P) == pytest.approx(2 / 3)
    assert expected_distortion(randomized_response(2, 0.75), Prior.of([0.9, 0.1])) == pytest.approx(0.25)
    with pytest.raises(ContractError):
        expected_distortion(identity_mechanism(ProductSpace(2)), P)


@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(1, 2))
def test_distortion_range(seed, m, n):
    rng = np.random.default_rng(seed)
    Q = random_mechanism(rng, m, n)
    w = rng.dirichlet(np.ones(Q.space.size)) + 1e-3
    P = Prior(Q.space, w / w.sum())
    assert 0.0 <= expected_distortion(Q, P) <= n


def test_is_valid_examples():
    simplex = SourceSet.full_simplex(ProductSpace(2))
    assert is_valid(uniform_mechanism(ProductSpace(2)), simplex, 0.5)
    assert not is_valid(uniform_mechanism(ProductSpace(2)), simplex, 0.4)
    assert is_valid(identity_mechanism(ProductSpace(2)), simplex, 0.0)


@given(st.integers(0, 10_000), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_is_valid_monotone_in_distortion(seed, a, b):
    rng = np.random.default_rng(seed)
    Q = random_mechanism(rng, 3)
    S = SourceSet.family([Prior.of(0.97 * rng.dirichlet(np.ones(3)) + 0.01) for _ in range(2)])
    lo, hi = sorted((a, b))
    if is_valid(Q, S, lo):
        assert is_valid(Q, S, hi)


def test_classification_examples():
    assert classify_source_set(SourceSet.full_simplex(ProductSpace(3))) is SourceClass.CLASS_I
    assert classify_source_set(SourceSet.singleton(Prior.of([0.4, 0.3, 0.2, 0.1]))) is SourceClass.CLASS_II
    fam = SourceSet.family([Prior.of([0.7, 0.3]), Prior.of([0.3, 0.7])])
    assert classify_source_set(fam) is SourceClass.CLASS_I
    crossing = SourceSet.family([Prior.of([0.5, 0.3, 0.2]), Prior.of([0.3, 0.5, 0.2])])
    # the hull holds (0.4, 0.4, 0.2), not the uniform prior; the members disagree on order
    assert classify_source_set(crossing) is SourceClass.CLASS_III
    ordered = SourceSet.family([Prior.of([0.5, 0.3, 0.2]), Prior.of([0.6, 0.3, 0.1])])
    assert classify_source_set(ordered) is SourceClass.CLASS_II


@pytest.mark.parametrize("m,n", [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3)])
def test_uniform_singleton_is_class_one(m, n):
    assert SourceSet.singleton(Prior.uniform(ProductSpace(m, n))).source_class is SourceClass.CLASS_I


def test_theta_star_examples():
    assert theta_star(SourceSet.full_simplex(ProductSpace(3, 2))) == (1.0, 1 / 9)
    theta, eta = theta_star(SourceSet.singleton(Prior.of([0.4, 0.3, 0.2, 0.1])))
    assert theta == pytest.approx(0.4) and eta == pytest.approx(0.4)
    theta, eta = theta_star(SourceSet.singleton(Prior.uniform(ProductSpace(2, 2))))
    assert theta == pytest.approx(1.0) and eta == pytest.approx(0.25)


def test_theta_star_uses_the_hull():
    # Neither member has minimum above 0.2, but their midpoint is uniform.
    fam = SourceSet.family([Prior.of([0.6, 0.2, 0.2]), Prior.of([0.2, 0.4, 0.4])])
    theta, _ = theta_star(fam)
    assert theta > 3 * 0.2


def test_notion_labels_and_parameters():
    assert PrivacyNotion.approx_dp(0.1).label == "adp(0.1)"
    assert PrivacyNotion.renyi(2).label == "rdp(2)"
    assert PrivacyNotion.sibson(1.5).label == "sibson(1.5)"
    assert PrivacyNotion.mutual_info().prior_required
    assert not PrivacyNotion.max_leakage().prior_required
    for bad in (lambda: PrivacyNotion.approx_dp(0), lambda: PrivacyNotion.approx_dp(1),
                lambda: PrivacyNotion.renyi(1.0), lambda: PrivacyNotion.sibson(math.inf)):
        with pytest.raises(ValueError):
            bad()
