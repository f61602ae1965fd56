import math

import numpy as np
import pytest

from gowers.cube import CubeFunction
from gowers.decomposable import diagonal_project, diagonal_translate, proj_conditional
from gowers.errors import InvalidInputError, RegularityFailure
from gowers.group import GroupFunction, cyclic, lp_norm
from gowers.norms import cubic_convolution
from gowers.regularity import Partition, RegularityOptions, average_over_rectangles, weak_to_strong_constants
from gowers.structured import (
    StructuredOptions,
    assemble_decomposition,
    choose_theta,
    structured_decompose,
    verify_main,
)


def unit_family(rng, n, d, shrink=True):
    """``2^(d+1) - 1`` random rows with ``||f||_{2^d} <= 1``."""
    p = 2**d
    rows = []
    for _ in range(2 ** (d + 1) - 1):
        v = rng.standard_normal(n)
        v /= np.mean(np.abs(v) ** p) ** (1 / p)
        rows.append(v * (rng.uniform(0.5, 1.0) if shrink else 1.0))
    return rows


def indicator_family(rng, n, d):
    return [(rng.random(n) < 0.5).astype(float) for _ in range(2 ** (d + 1) - 1)]


def cube_parts(fs, d):
    """``G`` with a constant zero vertex, and ``F``, built from vertex products."""
    f0 = [fs[2 * e - 1] for e in range(1, 2**d)]
    f1 = [fs[2 * e] for e in range(2**d)]
    G = CubeFunction.from_vertex_functions([np.ones(len(fs[0]))] + f0)
    F = diagonal_project(CubeFunction.from_vertex_functions(f1))
    return G, F


@pytest.mark.parametrize("d,delta", [(1, 0.3), (2, 0.5), (1, 0.05)])
def test_theta_choice(d, delta):
    theta = choose_theta(d, delta)
    C, c = weak_to_strong_constants(d)
    assert math.sqrt(C * theta**c + theta) < delta
    assert math.sqrt(C * (2 * theta) ** c + 2 * theta) >= delta or 2 * theta > delta**2 / 4


def test_all_ones():
    fs = [np.ones(8)] * 3
    M = structured_decompose(fs, 0.3)
    assert M.m == 1 and np.all(M.rho.values == 0)
    assert np.allclose(M.piece_values(), 1.0)
    r = verify_main(M, fs, 0.3)
    assert r["ok"]
    assert r["items"]["rho_norm"]["value"] == 0.0
    assert r["items"]["pointwise"]["value"] <= 1e-15


def test_random_level_one(rng):
    fs = unit_family(rng, 8, 1)
    M = structured_decompose(fs, 0.3)
    r = verify_main(M, fs, 0.3)
    assert r["ok"], r
    assert M.partition.is_almost_uniform()


def test_indicator_level_two(rng):
    fs = indicator_family(rng, 8, 2)
    M = structured_decompose(fs, 0.5)
    r = verify_main(M, fs, 0.5)
    assert r["ok"], r
    assert M.m <= 8
    assert r["items"]["piece_certificate"]["value"] <= M.m**3 + 1e-8


def test_corrupted_piece_is_detected(rng):
    fs = unit_family(rng, 8, 1)
    M = structured_decompose(fs, 0.3)
    x = M.partition.cells[0][0]
    r = verify_main(M.with_perturbation(0, 3, x, 1.0), fs, 0.3)
    assert not r["ok"] and not r["items"]["pointwise"]["ok"]
    assert r["items"]["pointwise"]["worst_x"] == x and r["items"]["pointwise"]["worst_t"] == 3


def test_rejects_large_inputs():
    with pytest.raises(InvalidInputError):
        structured_decompose([np.full(4, 2.0)] * 3, 0.3)


def test_cell_cap_propagates(rng):
    fs = unit_family(rng, 8, 1, shrink=False)
    with pytest.raises(RegularityFailure):
        structured_decompose(fs, 0.3, StructuredOptions(RegularityOptions(cell_cap=2)))


def test_dense_and_certificate_pieces_agree(rng):
    fs = unit_family(rng, 6, 2)
    M = assemble_decomposition(fs, Partition(cyclic(6), [0, 1, 2, 0, 1, 2]))
    dense = M.piece_values()
    certs = M.certificates()
    for i in range(M.m):
        for t in range(6):
            piece = M.piece(i, t)
            assert len(piece) <= M.m**3
            assert np.allclose(piece.materialize().values, dense[i, t], atol=1e-12)
            assert piece.value == pytest.approx(certs[i, t], abs=1e-12)
            for term in piece.terms:
                assert abs(term.coefficient) <= 1 + 1e-12
                assert all(lp_norm(GroupFunction(cyclic(6), row), 2) <= 1 + 1e-12 for row in term.atoms)


@pytest.mark.parametrize("d", [1, 2])
def test_coarse_partition_properties(rng, d):
    """Envelope, identity and norm chain with a deliberately coarse partition."""
    n = 6
    fs = unit_family(rng, n, d)
    P = Partition(cyclic(n), [0, 0, 1, 1, 0, 1])
    M = assemble_decomposition(fs, P)
    G, F = cube_parts(fs, d)
    F_P, _ = average_over_rectangles(F, P)
    rho = M.rho.values
    assert np.any(rho > 1e-3)
    assert M.rho.norm(2) <= (F - F_P).norm(2) + 1e-10
    phi = cubic_convolution(fs).values
    dense = M.piece_values()
    for t in range(n):
        Gt = diagonal_translate(G, t)
        err = proj_conditional(Gt * (F - F_P)).values
        env = np.sqrt(proj_conditional(Gt * Gt).values)
        assert np.all(np.abs(err) <= env * rho + 1e-12)
        assert np.all(env <= 1 + 1e-12)
        main = proj_conditional(Gt * F_P).values
        assert np.allclose(main, dense[P.labels, t, np.arange(n)], atol=1e-10)
        assert np.allclose(phi[(np.arange(n) + t) % n], main + err, atol=1e-12)
    r = verify_main(M, fs, math.inf)
    assert r["items"]["pointwise"]["ok"] and r["items"]["piece_sup"]["ok"]
