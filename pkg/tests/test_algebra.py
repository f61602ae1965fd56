import numpy as np
import pytest

from gowers.algebra import (
    AdDecomposition,
    AdTerm,
    ad_certificate_value,
    ad_pairing_bound_check,
    ad_product,
    character_decomposition,
    real_character_decomposition,
)
from gowers.dual import dual_norm
from gowers.errors import DimensionError, InvalidInputError, ResourceError
from gowers.group import GroupFunction, cyclic
from gowers.spectral import a2_norm

from conftest import point_mass, random_function


def ones_term(n, d):
    return AdDecomposition.single([np.ones(n)] * (2**d - 1))


def random_single(rng, n, d):
    return AdDecomposition.single([rng.standard_normal(n) for _ in range(2**d - 1)], rng.standard_normal())


def test_all_ones_value_is_one():
    assert ad_certificate_value(ones_term(5, 2)) == pytest.approx(1.0, abs=1e-15)


def test_point_mass_character_certificate():
    dec = character_decomposition(point_mass(), 2)
    assert dec.value == pytest.approx(1.0, abs=1e-12)
    assert dec.materialize().allclose(point_mass(), atol=1e-12)


def test_duplicated_term_doubles(rng):
    a = random_single(rng, 6, 2)
    b = a + a
    assert b.value == pytest.approx(2 * a.value, rel=1e-14)
    assert np.allclose(b.materialize().values, 2 * a.materialize().values, atol=1e-14)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("n", [5, 8])
def test_character_certificate_attains_a2(rng, d, n):
    g = random_function(rng, (n,))
    dec = character_decomposition(g, d)
    assert dec.value == pytest.approx(a2_norm(g), abs=1e-10)
    assert dec.materialize().allclose(g, atol=1e-10)


def test_character_decomposition_on_product_group(rng):
    g = random_function(rng, (2, 3))
    dec = character_decomposition(g, 2)
    assert dec.value == pytest.approx(a2_norm(g), abs=1e-10)
    assert dec.materialize().allclose(g, atol=1e-10)


def test_real_character_certificate_is_valid_but_looser(rng):
    g = random_function(rng, (7,))
    dec = real_character_decomposition(g)
    assert dec.materialize().allclose(g, atol=1e-10)
    assert dec.value >= a2_norm(g) - 1e-12
    assert all(not np.iscomplexobj(t.atoms) for t in dec.terms)


def test_product_of_ones_level_one():
    p = ad_product(ones_term(2, 1), ones_term(2, 1))
    assert np.allclose(p.materialize().values, 1.0, atol=1e-14)
    assert p.value <= 1.0 + 1e-8


def test_product_of_point_masses():
    c = character_decomposition(point_mass(), 2)
    p = ad_product(c, c)
    assert p.materialize().allclose(point_mass(), atol=1e-10)
    assert p.value <= 1.0 + 1e-8


@pytest.mark.parametrize("d", [1, 2, 3])
def test_product_materializes_pointwise_product(rng, d):
    a, b = random_single(rng, 4, d), random_single(rng, 4, d)
    p = ad_product(a, b)
    expected = a.materialize().values * b.materialize().values
    assert np.max(np.abs(p.materialize().values - expected)) <= 1e-10
    assert p.value <= a.value * b.value + 1e-8


def test_product_associativity(rng):
    a, b, c = (random_single(rng, 3, 2) for _ in range(3))
    left = ad_product(ad_product(a, b), c).materialize().values
    right = ad_product(a, ad_product(b, c)).materialize().values
    assert np.max(np.abs(left - right)) <= 1e-9


def test_product_term_cap(rng):
    a = random_single(rng, 4, 2)
    with pytest.raises(ResourceError):
        ad_product(a, a, max_terms=10)


def test_product_mismatch(rng):
    with pytest.raises(DimensionError):
        ad_product(random_single(rng, 4, 2), random_single(rng, 4, 1))


def test_sup_and_dual_norm_below_certificate(rng):
    for d in (2, 3):
        dec = random_single(rng, 6, d) + random_single(rng, 6, d)
        g = dec.materialize()
        assert np.max(np.abs(g.values)) <= dec.value + 1e-10
        assert dual_norm(g, d).value <= dec.value + 1e-6


def test_pairing_bound_examples(rng):
    r = ad_pairing_bound_check(ones_term(4, 2), GroupFunction.constant(cyclic(4), 1.0))
    assert r["lhs"] == pytest.approx(1.0) and r["rhs"] == pytest.approx(1.0) and r["ok"]
    r = ad_pairing_bound_check(random_single(rng, 8, 2), GroupFunction.zeros(cyclic(8)))
    assert r["lhs"] == 0.0
    for _ in range(20):
        r = ad_pairing_bound_check(random_single(rng, 8, 2), random_function(rng, (8,)))
        assert r["ok"]


def test_json_round_trip(rng):
    dec = character_decomposition(random_function(rng, (5,)), 2) + random_single(rng, 5, 2)
    back = AdDecomposition.from_json(dec.to_json())
    assert back.value == pytest.approx(dec.value, rel=1e-15)
    assert np.allclose(back.materialize().values, dec.materialize().values, atol=1e-15)


def test_malformed_json():
    with pytest.raises(InvalidInputError):
        AdDecomposition.from_json('{"orders": [4], "d": 2, "terms": [{"atoms": {"01": [1,1,1,1]}}]}')
    with pytest.raises(InvalidInputError):
        AdDecomposition.from_json("{not json")


def test_complex_decomposition_of_non_real_function_refuses_materialize():
    chi = np.exp(2j * np.pi * np.arange(4) / 4)
    dec = AdDecomposition(cyclic(4), 2, [AdTerm(1.0, np.array([chi, chi, chi.conj()]))])
    with pytest.raises(InvalidInputError):
        dec.materialize()
