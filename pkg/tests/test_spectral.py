import numpy as np
import pytest

import oracles
from gowers.group import GroupFunction, GroupSpec, cyclic
from gowers.norms import gowers_norm
from gowers.spectral import (
    Spectrum,
    a2_norm,
    character,
    dft,
    idft,
    spectral_cubic_bound_check,
    u2_dual_norm_spectral,
    u2_norm_spectral,
)

from conftest import point_mass, random_function

COS4 = GroupFunction.on_cyclic([1, 0, -1, 0])


def test_dft_examples():
    assert np.allclose(dft(point_mass()).coefficients, 0.25)
    c = dft(GroupFunction.constant(cyclic(5), 3.0)).coefficients
    assert c[0] == pytest.approx(3.0) and np.allclose(c[1:], 0)
    assert np.allclose(dft(COS4).coefficients, [0, 0.5, 0, 0.5])


@pytest.mark.parametrize("orders", [(6,), (2, 3), (2, 2, 2)])
def test_dft_matches_direct_sum(rng, orders):
    f = random_function(rng, orders)
    assert np.allclose(dft(f).coefficients, oracles.dft(list(f.values), orders), atol=1e-14)


def test_inverse_parseval_and_symmetry(rng):
    f = random_function(rng, (3, 4))
    s = dft(f)
    assert np.allclose(idft(s).values, f.values, atol=1e-14)
    assert np.sum(np.abs(s.coefficients) ** 2) == pytest.approx(f.norm(2) ** 2, rel=1e-12)
    g = f.group
    for xi in range(g.order):
        assert s.coefficients[g.neg(xi)] == pytest.approx(np.conj(s.coefficients[xi]), abs=1e-14)
    assert Spectrum.from_dict(s.to_dict()).coefficients.tolist() == s.coefficients.tolist()


def test_character_is_a_homomorphism():
    g = GroupSpec((2, 3))
    chi = character(g, (1, 2))
    for a in range(6):
        for b in range(6):
            assert chi[g.add(a, b)] == pytest.approx(chi[a] * chi[b])


def test_u2_examples():
    assert u2_norm_spectral(point_mass()) == pytest.approx(2**-1.5, abs=1e-15)
    assert u2_norm_spectral(GroupFunction.constant(cyclic(4), -2)) == pytest.approx(2)
    assert u2_norm_spectral(COS4) == pytest.approx(8**-0.25, abs=1e-15)


def test_u2_dual_examples():
    assert u2_dual_norm_spectral(point_mass()) == pytest.approx(2**-0.5, abs=1e-15)
    assert u2_dual_norm_spectral(GroupFunction.constant(cyclic(3), 1.5)) == pytest.approx(1.5)
    assert u2_dual_norm_spectral(2 * point_mass()) == pytest.approx(2**0.5, abs=1e-15)


def test_a2_examples():
    assert a2_norm(GroupFunction.constant(cyclic(4), -1)) == pytest.approx(1)
    assert a2_norm(point_mass()) == pytest.approx(1, abs=1e-15)
    assert a2_norm(COS4) == pytest.approx(1, abs=1e-15)


@pytest.mark.parametrize("n", [4, 8, 16, 32, 64])
def test_parseval_for_u2(rng, n):
    for _ in range(10):
        f = random_function(rng, (n,))
        assert abs(gowers_norm(f, 2) - u2_norm_spectral(f)) <= 1e-10


def test_spectral_cubic_bound(rng):
    ones = GroupFunction.constant(cyclic(4))
    r = spectral_cubic_bound_check(ones, ones, ones)
    assert r["lhs"] == pytest.approx(1) and r["rhs"] == pytest.approx(1)
    pm = point_mass()
    r = spectral_cubic_bound_check(pm, pm, pm)
    assert r["lhs"] == pytest.approx(4 * (1 / 64) ** (2 / 3), abs=1e-14)
    assert r["rhs"] == pytest.approx(0.25, abs=1e-15)
    assert r["lhs"] == pytest.approx(r["rhs"], abs=1e-14)
    for _ in range(20):
        r = spectral_cubic_bound_check(*(random_function(rng, (8,)) for _ in range(3)))
        assert r["bound_ok"] and r["coefficients_ok"]


def test_a2_submultiplicative(rng):
    for _ in range(50):
        f, g = random_function(rng, (8,)), random_function(rng, (8,))
        assert a2_norm(f * g) <= a2_norm(f) * a2_norm(g) + 1e-10
