import numpy as np
import pytest

import oracles
from gowers.cube import (
    CubeFunction,
    CubeIsometry,
    CubePoint,
    all_isometries,
    cube_integral,
    cube_symmetry_orbit,
    csg_check,
    face_lift,
    permute_family,
    shift_table,
    vertex_coordinate,
)
from gowers.errors import InvalidInputError, InvalidParameterError, ResourceError
from gowers.group import GroupFunction, GroupSpec, cyclic
from gowers.norms import dual_function

from conftest import point_mass, random_function

Z4 = cyclic(4)


def test_vertex_coordinate_examples():
    assert vertex_coordinate(Z4, CubePoint(0, (1, 2)), "11") == 3
    assert vertex_coordinate(Z4, CubePoint(2, (1, 3)), "00") == 2
    assert vertex_coordinate(Z4, CubePoint(1, (3,)), "1") == 0


def test_shift_table_matches_enumeration():
    g = GroupSpec((2, 3))
    table = shift_table(g, 2)
    for T, (t1, t2) in enumerate(np.ndindex(6, 6)):
        p = CubePoint(0, (t1, t2))
        for e in range(4):
            assert table[e, T] == vertex_coordinate(g, p, e)


def test_cube_integral_examples():
    ones = GroupFunction.constant(Z4)
    assert cube_integral([ones] * 8) == 1.0
    assert cube_integral({v: point_mass() for v in ("00", "01", "10", "11")}) == 1 / 64
    alt = GroupFunction.on_cyclic([1, -1])
    assert cube_integral({"0": alt, "1": alt}) == 0.0


def test_cube_integral_missing_vertex():
    with pytest.raises(InvalidInputError):
        cube_integral({"00": point_mass(), "01": point_mass(), "10": point_mass()})


@pytest.mark.parametrize("orders,d", [((4,), 1), ((3,), 2), ((2, 2), 2), ((2,), 3), ((5,), 2)])
def test_cube_integral_matches_oracle(rng, orders, d):
    fam = [random_function(rng, orders) for _ in range(2**d)]
    expected = oracles.cube_integral([list(f.values) for f in fam], orders, d)
    assert cube_integral(fam) == pytest.approx(expected, abs=1e-14)


def test_csg_examples(rng):
    lhs, rhs = csg_check([point_mass()] * 4)
    assert lhs == pytest.approx(1 / 64, abs=1e-15)
    assert rhs == pytest.approx(1 / 64, abs=1e-15)
    lhs, rhs = csg_check([point_mass(), GroupFunction.zeros(Z4), point_mass(), point_mass()])
    assert lhs == 0.0 and rhs == 0.0
    for _ in range(20):
        lhs, rhs = csg_check([random_function(rng, (8,)) for _ in range(4)])
        assert lhs <= rhs + 1e-10


def test_csg_on_product_group(rng):
    fam = [random_function(rng, (2, 3)) for _ in range(4)]
    lhs, rhs = csg_check(fam)
    expected = oracles.cube_integral([list(f.values) for f in fam], (2, 3), 2)
    assert lhs == pytest.approx(abs(expected), abs=1e-14)
    assert lhs <= rhs + 1e-10


def test_symmetry_orbit_examples():
    p = CubePoint(1, (3,))
    assert cube_symmetry_orbit(Z4, p, CubeIsometry.identity(1)) == p
    assert cube_symmetry_orbit(Z4, p, [1, 0]) == CubePoint(0, (1,))
    with pytest.raises(InvalidParameterError):
        cube_symmetry_orbit(Z4, CubePoint(0, (1, 2)), [0, 1, 3, 2])


@pytest.mark.parametrize("d", [1, 2, 3])
def test_symmetry_orbit_permutes_coordinates(d):
    g = GroupSpec((5,))
    p = CubePoint(2, tuple(range(1, d + 1)))
    coords = p.coordinates(g)
    for iso in all_isometries(d):
        q = cube_symmetry_orbit(g, p, iso)
        assert q.coordinates(g) == [coords[iso.apply(e)] for e in range(2**d)]


@pytest.mark.parametrize("d", [1, 2, 3])
def test_integral_invariant_under_isometries(rng, d):
    fam = [random_function(rng, (5,)) for _ in range(2**d)]
    base = cube_integral(fam)
    for iso in all_isometries(d):
        assert cube_integral(permute_family(fam, iso)) == pytest.approx(base, abs=1e-12)


def test_face_projections_preserve_integral(rng):
    fam = [random_function(rng, (4,)) for _ in range(4)]
    F = CubeFunction.from_vertex_functions(fam)
    for alpha in (0, 1):
        assert face_lift(F, alpha).integral() == pytest.approx(F.integral(), abs=1e-14)
        assert face_lift(F, alpha).d == 3


def test_face_lift_coordinates():
    g = cyclic(3)
    F = CubeFunction(g, 1, np.arange(9.0))
    lifted = face_lift(F, 1)
    for x, t, u in np.ndindex(3, 3, 3):
        assert lifted.values[x, t, u] == F.values[(x + u) % 3, t]


@pytest.mark.parametrize("d", [2, 3])
def test_unit_zero_vertex_gives_mean_of_convolution(rng, d):
    f = random_function(rng, (6,))
    fam = [GroupFunction.constant(f.group)] + [f] * (2**d - 1)
    assert cube_integral(fam) == pytest.approx(dual_function(f, d).mean(), abs=1e-14)


def test_tensor_product_integral_matches_cube_integral(rng):
    fam = [random_function(rng, (2, 2)) for _ in range(8)]
    F = CubeFunction.from_vertex_functions(fam)
    assert F.integral() == pytest.approx(cube_integral(fam), abs=1e-14)


def test_cube_function_json_round_trip(rng):
    F = CubeFunction(GroupSpec((2, 3)), 1, rng.standard_normal(36))
    G = CubeFunction.from_json(F.to_json())
    assert np.array_equal(F.values, G.values) and G.d == 1


def test_resource_guard():
    with pytest.raises(ResourceError):
        shift_table(cyclic(4), 5)
    with pytest.raises(ResourceError):
        shift_table(cyclic(1024), 3)
