import math

import numpy as np
import pytest

from gowers.dual import (
    DualNormOptions,
    convex_hull_probe,
    dual_norm,
    nnorm,
    thborne_decompose,
    thk_decompose,
)
from gowers.errors import InvalidParameterError
from gowers.group import GroupFunction, cyclic, inner, lp_norm
from gowers.norms import dual_function, gowers_norm
from gowers.spectral import u2_dual_norm_spectral

from conftest import point_mass, random_function


def unit_dual(rng, n, d=2):
    g = random_function(rng, (n,))
    return g / u2_dual_norm_spectral(g) if d == 2 else g / dual_norm(g, d).value


# -- dual norm ---------------------------------------------------------------

@pytest.mark.parametrize("d", [1, 2, 3])
def test_dual_norm_of_constant(d):
    r = dual_norm(GroupFunction.constant(cyclic(6), -1.5), d)
    assert r.value == pytest.approx(1.5, rel=1e-12)
    assert np.allclose(r.witness.values, -1.0)


def test_dual_norm_level_one_unbounded_for_nonconstant():
    r = dual_norm(GroupFunction.on_cyclic([1.0, 0.0, 0.0]), 1)
    assert math.isinf(r.value) and r.witness is None


def test_dual_norm_zero():
    r = dual_norm(GroupFunction.zeros(cyclic(4)), 3)
    assert r.value == 0.0


def test_dual_norm_matches_spectral_at_level_two(rng):
    for n in (4, 8, 16):
        for _ in range(5):
            g = random_function(rng, (n,))
            r = dual_norm(g, 2)
            assert r.value == pytest.approx(u2_dual_norm_spectral(g), abs=1e-6)
            assert r.value == pytest.approx(inner(g, r.witness), abs=1e-12)
            assert gowers_norm(r.witness, 2) == pytest.approx(1.0, abs=1e-12)
            assert r.value <= r.certificate_upper + 1e-12


def test_dual_norm_of_dual_function_point_mass():
    g = dual_function(point_mass(), 2)
    assert dual_norm(g, 2).value == pytest.approx(2**-4.5, abs=1e-12)
    assert u2_dual_norm_spectral(g) == pytest.approx(2**-4.5, abs=1e-15)


def test_dual_norm_of_dual_function_level_three(rng):
    for n in (4, 6, 8):
        f = random_function(rng, (n,))
        r = dual_norm(dual_function(f, 3), 3)
        assert r.is_lower_bound
        assert r.value >= gowers_norm(f, 3) ** 7 - 1e-4
        assert r.value <= r.certificate_upper + 1e-12


def test_dual_norm_lower_bound_and_ordering(rng):
    for _ in range(5):
        g = random_function(rng, (6,))
        prev = None
        for d in (2, 3, 4):
            r = dual_norm(g, d)
            q = 2 ** (d - 1) / (2 ** (d - 1) - 1)
            assert r.value >= lp_norm(g, q) - 1e-10
            if prev is not None:
                assert r.value <= prev + 1e-6
            prev = r.value


def test_dual_norm_is_deterministic(rng):
    g = random_function(rng, (8,))
    a = dual_norm(g, 3, DualNormOptions(seed=4))
    b = dual_norm(g, 3, DualNormOptions(seed=4))
    assert a.value == b.value and np.array_equal(a.witness.values, b.witness.values)


# -- regularised norm --------------------------------------------------------

def test_nnorm_examples(rng):
    one = GroupFunction.constant(cyclic(4))
    assert nnorm(one, 2, 2, 1.0) == pytest.approx(2**0.25, rel=1e-14)
    assert nnorm(point_mass(), 2, 2, 1.0) == pytest.approx((1 / 64 + 1 / 4) ** 0.25, rel=1e-14)
    f = random_function(rng, (8,))
    assert nnorm(f, 2, 2, 1e-8) == pytest.approx(gowers_norm(f, 2), abs=1e-7)
    with pytest.raises(InvalidParameterError):
        nnorm(f, 3, 1, 0.5)


def test_nnorm_low_k_variant(rng):
    f = random_function(rng, (6,))
    expected = (gowers_norm(f, 3) ** 8 + 0.5**8 * lp_norm(f, 4) ** 8) ** (1 / 8)
    assert nnorm(f, 3, 2, 0.5) == pytest.approx(expected, rel=1e-13)


def test_nnorm_is_a_norm(rng):
    for _ in range(10):
        f, g = random_function(rng, (6,)), random_function(rng, (6,))
        for d, k in ((2, 2), (2, 3), (3, 2)):
            assert nnorm(-2.5 * f, d, k, 0.3) == pytest.approx(2.5 * nnorm(f, d, k, 0.3), rel=1e-14)
            assert nnorm(f + g, d, k, 0.3) <= nnorm(f, d, k, 0.3) + nnorm(g, d, k, 0.3) + 1e-12


# -- decompositions ----------------------------------------------------------

def test_thk_zero():
    r = thk_decompose(GroupFunction.zeros(cyclic(4)), 2, 2, 0.5)
    assert not np.any(r.f.values) and not np.any(r.h.values) and r.residual == 0.0


def test_thk_constant_closed_form():
    delta = 0.5
    r = thk_decompose(GroupFunction.constant(cyclic(5)), 2, 2, delta)
    a = (1 + delta**4) ** -0.25
    c = a  # <1; f_prime> on the unit sphere
    assert np.allclose(r.f_prime.values, a, atol=1e-12)
    assert r.c == pytest.approx(c, rel=1e-12)
    assert np.allclose(r.f.values, c ** (1 / 3) * a, atol=1e-12)
    assert np.allclose(r.h.values, c * delta**4 * a**3, atol=1e-12)
    assert r.residual <= 1e-12


@pytest.mark.parametrize("d,k", [(2, 2), (2, 3), (2, 1), (3, 3)])
def test_thk_bounds(rng, d, k):
    for _ in range(3):
        g = unit_dual(rng, 8, d)
        for delta in (0.1, 0.3):
            r = thk_decompose(g, d, k, delta)
            b = r.bounds()
            assert b["f_u"] <= 1 + 1e-6
            assert b["f_lp"] <= 1 / delta + 1e-6
            assert b["h_lq"] <= delta + 1e-6
            assert b["residual"] <= 1e-5


def test_thk_reported_residual_is_stationarity_defect(rng):
    g = unit_dual(rng, 8)
    r = thk_decompose(g, 2, 2, 0.3)
    fp = r.f_prime
    u = gowers_norm(fp, 2)
    recon = r.c * (u ** 0 * dual_function(fp, 2).values + 0.3**4 * fp.values**3)
    assert math.sqrt(np.mean((recon - g.values) ** 2)) == pytest.approx(r.residual, abs=1e-12)


def test_thk_rejects_bad_parameters():
    g = GroupFunction.constant(cyclic(4))
    with pytest.raises(InvalidParameterError):
        thk_decompose(g, 2, 2, 0.0)
    with pytest.raises(InvalidParameterError):
        thk_decompose(g, 1, 0, 0.5)


def test_thborne_constant():
    r = thborne_decompose(GroupFunction.constant(cyclic(4)), 2, 0.5)
    b = r.bounds()
    assert b["f_sup"] <= 2 + 1e-6 and b["h_l1"] <= 0.5 + 1e-6 and b["f_u"] <= 1 + 1e-6
    assert r.residual <= 1e-12
    z = thborne_decompose(GroupFunction.zeros(cyclic(4)), 2, 0.5)
    assert not np.any(z.f.values)


def test_thborne_bounds(rng):
    for n in (8, 16):
        g = unit_dual(rng, n)
        r = thborne_decompose(g, 2, 0.25)
        b = r.bounds()
        assert b["f_u"] <= 1 + 1e-5
        assert b["f_sup"] <= 4 + 1e-5
        assert b["h_l1"] <= 0.25 + 1e-5
        assert b["residual"] <= 1e-5
        assert r.history[-1]["k"] == "limit"


# -- convex hull ---------------------------------------------------------------

def test_convex_hull_probe(rng):
    f = random_function(rng, (8,))
    f = f / gowers_norm(f, 2)
    report = convex_hull_probe(dual_function(f, 2), 2)
    assert report["errors"][0] <= 1e-10
    assert convex_hull_probe(GroupFunction.constant(cyclic(4)), 2)["errors"][0] <= 1e-12
    g = unit_dual(rng, 8)
    errs = convex_hull_probe(g, 2, samples=50)["errors"]
    assert all(b <= a + 1e-15 for a, b in zip(errs, errs[1:]))
