import math
from fractions import Fraction

import numpy as np
import pytest

from gowers.errors import InvalidInputError, InvalidParameterError
from gowers.group import GroupSpec, cyclic
from gowers.norms import gowers_norm
from gowers.signals import (
    TorusFunctionSpec,
    gen_indicator,
    gen_polynomial_phase,
    gen_random,
    gen_torus_sequence,
)
from gowers.spectral import dft, u2_dual_norm_spectral


def test_indicators():
    g = cyclic(4)
    assert gen_indicator(g, [0]).values.tolist() == [1, 0, 0, 0]
    assert gen_indicator(g, []).values.tolist() == [0] * 4
    assert gen_indicator(g, range(4)).values.tolist() == [1] * 4
    assert gen_indicator(GroupSpec((2, 3)), [(1, 2)]).values[5] == 1.0
    with pytest.raises(InvalidInputError):
        gen_indicator(g, [7])


def test_polynomial_phase_examples():
    assert np.allclose(gen_polynomial_phase(cyclic(5), [0]).values, 1.0)
    assert np.allclose(gen_polynomial_phase(cyclic(4), [0, 1]).values, [1, 0, -1, 0], atol=1e-15)
    f = gen_polynomial_phase(cyclic(8), [0, 0, 1])
    assert gowers_norm(f, 3) >= gowers_norm(f, 2) - 1e-12
    with pytest.raises(InvalidParameterError):
        gen_polynomial_phase(GroupSpec((2, 2)), [1])


def test_polynomial_reduction_is_exact():
    big = 10**30 + 3
    f = gen_polynomial_phase(cyclic(7), [0, big])
    assert np.allclose(f.values, gen_polynomial_phase(cyclic(7), [0, big % 7]).values, atol=0)


def test_torus_constant():
    h, bound = gen_torus_sequence(TorusFunctionSpec(cos=(-0.7,)), 0.3, 9)
    assert np.allclose(h.values, -0.7)
    assert bound == pytest.approx(0.7)
    assert u2_dual_norm_spectral(h) == pytest.approx(0.7, rel=1e-12)


def test_torus_cosine_embedding():
    n = 12
    h, bound = gen_torus_sequence(TorusFunctionSpec(cos=(0.0, 1.0)), 1 / n, n)
    assert np.allclose(h.values, np.cos(2 * np.pi * np.arange(n) / n), atol=1e-14)
    # two frequencies of weight 1/2
    assert u2_dual_norm_spectral(h) == pytest.approx(2 ** (-1 / 4), rel=1e-12)
    assert bound == 1.0


@pytest.mark.parametrize("p", [1, 3, 5, 7])
def test_embedding_bound_with_aliasing(p):
    spec = TorusFunctionSpec(cos=(0.2, 0.5, -0.3, 0.0, 0.9), sin=(0.0, 0.4, 0.0, 0.8))
    h, bound = gen_torus_sequence(spec, Fraction(p, 8), 8)
    assert u2_dual_norm_spectral(h) <= bound + 1e-10
    # the values are exactly periodic samples of F
    assert np.allclose(h.values, spec((p * np.arange(8) % 8) / 8), atol=1e-15)


def test_torus_irrational_generation_only():
    alpha = 1 / math.sqrt(2)
    h, bound = gen_torus_sequence(TorusFunctionSpec(cos=(0.0, 1.0)), alpha, 16)
    assert np.allclose(h.values, np.cos(2 * np.pi * np.mod(np.arange(16) * alpha, 1.0)))
    assert bound == 1.0


def test_random_is_reproducible_and_bounded():
    g = GroupSpec((3, 4))
    a, b = gen_random(g, 5, 2.0), gen_random(g, 5, 2.0)
    assert np.array_equal(a.values, b.values)
    assert np.max(np.abs(a.values)) <= 2.0
    assert not np.array_equal(a.values, gen_random(g, 6, 2.0).values)
    assert np.all(gen_random(g, 5, 0.0).values == 0)


def test_random_low_pass_single_frequency():
    f = gen_random(cyclic(16), 3, 1.0, smoothness=1)
    support = np.flatnonzero(np.abs(dft(f).coefficients) > 1e-12)
    assert support.tolist() == [1, 15]
    assert np.max(np.abs(f.values)) == pytest.approx(1.0)
