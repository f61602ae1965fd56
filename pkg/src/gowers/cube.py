"""The cube group ``Z_d`` through its parametrisation by ``(x, t_1..t_d)``.

A vertex ``eps = eps_1 ... eps_d`` of ``V_d = {0,1}^d`` is coded by the
integer whose binary expansion is the bit string read left to right, so for
``d = 2`` the codes of ``00, 01, 10, 11`` are ``0, 1, 2, 3``.  Appending a
bit (``eps 0`` / ``eps 1`` in ``V_{d+1}``) maps code ``e`` to ``2e`` / ``2e+1``.

Shift tuples ``t = (t_1..t_d)`` are flattened row-major with ``t_1`` most
significant; ``shift_table(group, d)[e, T]`` is the element ``eps . t``.
"""

from __future__ import annotations

import itertools
import json
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _backend
from ._summation import fmean, fsum
from .errors import (
    DimensionError,
    InvalidInputError,
    InvalidParameterError,
    ResourceError,
)
from .group import GroupFunction, GroupSpec

MAX_D = 4
MAX_PARAMETERS = 2**26
MAX_TABLE_ORDER = 4096

__all__ = [
    "MAX_D",
    "MAX_PARAMETERS",
    "vertices",
    "nonzero_vertices",
    "vertex_code",
    "vertex_bits",
    "vertex_label",
    "check_resources",
    "shift_table",
    "CubePoint",
    "vertex_coordinate",
    "CubeFunction",
    "family_array",
    "cube_integral",
    "csg_check",
    "CubeIsometry",
    "cube_symmetry_orbit",
    "permute_family",
    "face_lift",
]


# -- vertices ---------------------------------------------------------------

def vertices(d: int) -> list[str]:
    return [vertex_label(e, d) for e in range(2**d)]


def nonzero_vertices(d: int) -> list[str]:
    return vertices(d)[1:]


def vertex_label(code: int, d: int) -> str:
    return format(code, f"0{d}b") if d else ""


def vertex_bits(code: int, d: int) -> tuple[int, ...]:
    return tuple((code >> (d - 1 - i)) & 1 for i in range(d))


def vertex_code(eps, d: int | None = None) -> int:
    """Integer code of a vertex given as ``"011"``, ``(0, 1, 1)`` or an int."""
    if isinstance(eps, (int, np.integer)):
        code = int(eps)
        if d is not None and not 0 <= code < 2**d:
            raise DimensionError(f"vertex code {code} outside V_{d}")
        return code
    bits = tuple(int(ch) for ch in eps)
    if any(b not in (0, 1) for b in bits):
        raise InvalidInputError(f"vertex {eps!r} is not a 0/1 word")
    if d is not None and len(bits) != d:
        raise DimensionError(f"vertex {eps!r} does not belong to V_{d}")
    return int("".join(map(str, bits)) or "0", 2)


def _dimension_from_count(count: int, nonzero: bool) -> int:
    total = count + 1 if nonzero else count
    d = total.bit_length() - 1
    if d < 1 or 2**d != total:
        kind = "2^d - 1" if nonzero else "2^d"
        raise InvalidInputError(f"a vertex family needs {kind} functions, got {count}")
    return d


# -- resources --------------------------------------------------------------

def check_resources(group: GroupSpec, d: int):
    if d < 1:
        raise InvalidParameterError(f"cube dimension must be >= 1, got {d}")
    if d > MAX_D:
        raise ResourceError(f"cube dimension {d} exceeds the cap {MAX_D}")
    n = group.order
    if n**(d + 1) > MAX_PARAMETERS:
        raise ResourceError(f"N^(d+1) = {n}^{d + 1} exceeds the cap 2^26")
    if n > MAX_TABLE_ORDER:
        raise ResourceError(f"group order {n} exceeds the addition-table cap {MAX_TABLE_ORDER}")


@lru_cache(maxsize=32)
def _shift_table(orders, d):
    group = GroupSpec(orders)
    n = group.order
    add = group.add_table
    nt = n**d
    tt = np.arange(nt)
    t_digits = [(tt // n**(d - 1 - i)) % n for i in range(d)]
    table = np.zeros((2**d, nt), dtype=np.int32)
    for e in range(2**d):
        s = np.zeros(nt, dtype=np.int32)
        for i, bit in enumerate(vertex_bits(e, d)):
            if bit:
                s = add[s, t_digits[i]]
        table[e] = s
    table.setflags(write=False)
    return table


def shift_table(group: GroupSpec, d: int) -> np.ndarray:
    check_resources(group, d)
    return _shift_table(group.orders, d)


@lru_cache(maxsize=16)
def _parameter_index(orders, d):
    group = GroupSpec(orders)
    shifts = _shift_table(orders, d)
    idx = group.add_table[np.arange(group.order)[None, :, None], shifts[:, None, :]]
    idx.setflags(write=False)
    return idx


def parameter_index(group: GroupSpec, d: int) -> np.ndarray:
    """``idx[e, x, T]`` = vertex-``e`` coordinate ``x + eps_e . t_T`` of each cube."""
    check_resources(group, d)
    return _parameter_index(group.orders, d)


# -- points -----------------------------------------------------------------

@dataclass(frozen=True)
class CubePoint:
    """A point of ``Z_d`` given by its parameters ``(x, t)``."""

    x: int
    t: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", int(self.x))
        object.__setattr__(self, "t", tuple(int(v) for v in self.t))

    @property
    def d(self) -> int:
        return len(self.t)

    def coordinates(self, group: GroupSpec) -> list[int]:
        return [vertex_coordinate(group, self, e) for e in range(2**self.d)]


def vertex_coordinate(group: GroupSpec, p: CubePoint, eps) -> int:
    """The ``eps`` coordinate ``x + eps . t`` of the cube point ``p``."""
    code = vertex_code(eps, p.d)
    out = group.index(p.x)
    for bit, ti in zip(vertex_bits(code, p.d), p.t):
        if bit:
            out = group.add(out, ti)
    return out


# -- vertex families --------------------------------------------------------

def family_array(fs, nonzero: bool = False, d: int | None = None):
    """Normalise a vertex family to ``(group, d, array)``.

    ``fs`` is a mapping from vertices to functions, or a sequence in code
    order.  With ``nonzero=True`` the family is indexed by ``V_d`` minus the
    zero vertex and the array rows are codes ``1 .. 2^d - 1``.
    """
    if isinstance(fs, Mapping):
        items = list(fs.items())
        if not items:
            raise InvalidInputError("empty vertex family")
        if d is None:
            key = items[0][0]
            if isinstance(key, (int, np.integer)):
                d = _dimension_from_count(len(items), nonzero)
            else:
                d = len(key) if isinstance(key, (str, tuple)) else len(tuple(key))
        expected = range(1 if nonzero else 0, 2**d)
        by_code = {}
        for key, fn in items:
            code = vertex_code(key, d)
            if code in by_code:
                raise InvalidInputError(f"vertex {key!r} given twice")
            by_code[code] = fn
        missing = [vertex_label(e, d) for e in expected if e not in by_code]
        if missing:
            raise InvalidInputError(f"missing vertices: {', '.join(missing)}")
        if nonzero and 0 in by_code:
            raise InvalidInputError("the zero vertex is not part of a cubic convolution")
        ordered = [by_code[e] for e in expected]
    else:
        ordered = list(fs)
        found = _dimension_from_count(len(ordered), nonzero)
        if d is not None and found != d:
            raise DimensionError(f"family has dimension {found}, expected {d}")
        d = found
    group = None
    rows = []
    for fn in ordered:
        if isinstance(fn, GroupFunction):
            if group is None:
                group = fn.group
            elif fn.group != group:
                raise DimensionError("vertex functions live on different groups")
            rows.append(fn.values)
        else:
            rows.append(np.asarray(fn))
    if group is None:
        group = GroupSpec((len(rows[0]),))
    if any(len(r) != group.order for r in rows):
        raise DimensionError("vertex functions have inconsistent lengths")
    dtype = complex if any(np.iscomplexobj(r) for r in rows) else float
    return group, d, np.array(rows, dtype=dtype)


def convolve_rows(group: GroupSpec, d: int, rows, backend=None) -> np.ndarray:
    """Cubic convolution of the ``2^d - 1`` rows (codes ``1..2^d-1``)."""
    shifts = shift_table(group, d)
    return _backend.cubic_convolution(rows, group.add_table, shifts[1:], backend=backend)


def cube_integral(fs) -> float:
    """``E_{x,t} prod_eps f_eps(x + eps . t)`` over all ``N^(d+1)`` parameters."""
    group, d, arr = family_array(fs)
    return _integral(group, d, arr)


def _integral(group, d, arr) -> float:
    conv = convolve_rows(group, d, arr[1:])
    return fmean(arr[0] * conv)


def csg_check(fs) -> tuple[float, float]:
    """Both sides of the Cauchy-Schwarz-Gowers inequality for a family."""
    from .norms import gowers_norm

    group, d, arr = family_array(fs)
    lhs = abs(_integral(group, d, arr))
    rhs = math.prod(gowers_norm(GroupFunction(group, row), d) for row in arr)
    return lhs, rhs


# -- functions on the cube --------------------------------------------------

@dataclass(frozen=True, eq=False)
class CubeFunction:
    """A function on ``Z_d`` stored over the parameter grid ``(x, t_1..t_d)``."""

    group: GroupSpec
    d: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not isinstance(self.group, GroupSpec):
            object.__setattr__(self, "group", GroupSpec(self.group))
        check_resources(self.group, self.d)
        n = self.group.order
        vals = np.array(self.values, dtype=float)
        if vals.size != n**(self.d + 1):
            raise DimensionError(f"expected {n}^{self.d + 1} values, got {vals.size}")
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("cube function values must be finite")
        vals = vals.reshape((n,) * (self.d + 1))
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, group, d, c=1.0):
        group = group if isinstance(group, GroupSpec) else GroupSpec(group)
        return cls(group, d, np.full((group.order,) * (d + 1), float(c)))

    @classmethod
    def from_vertex_functions(cls, fs) -> "CubeFunction":
        """The tensor product ``x -> prod_eps f_eps(x_eps)`` restricted to ``Z_d``."""
        group, d, arr = family_array(fs)
        if np.iscomplexobj(arr):
            raise InvalidInputError("cube functions are real valued")
        idx = parameter_index(group, d)
        prod = arr[0][idx[0]]
        for e in range(1, 2**d):
            prod = prod * arr[e][idx[e]]
        return cls(group, d, prod)

    @property
    def flat(self) -> np.ndarray:
        """Values as an ``(N, N^d)`` array indexed by ``(x, T)``."""
        n = self.group.order
        return self.values.reshape(n, n**self.d)

    def integral(self) -> float:
        return fmean(self.values)

    def norm(self, p=2.0) -> float:
        return GroupFunction(GroupSpec((self.values.size,)), self.values.ravel()).norm(p)

    def vertex_coordinates(self) -> np.ndarray:
        """``(2^d, N, N^d)`` array of the cube coordinates of each parameter."""
        return parameter_index(self.group, self.d)

    def same_cube(self, other):
        if not isinstance(other, CubeFunction) or other.group != self.group or other.d != self.d:
            raise DimensionError("cube functions live on different cubes")

    def allclose(self, other, atol=1e-12) -> bool:
        self.same_cube(other)
        return bool(np.allclose(self.values, other.values, rtol=0.0, atol=atol))

    def _binary(self, other, op):
        if isinstance(other, CubeFunction):
            self.same_cube(other)
            other = other.values
        elif not np.isscalar(other):
            return NotImplemented
        return CubeFunction(self.group, self.d, op(self.values, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return CubeFunction(self.group, self.d, -self.values)

    def map(self, fn) -> "CubeFunction":
        return CubeFunction(self.group, self.d, fn(self.values))

    def to_dict(self) -> dict:
        return {"orders": list(self.group.orders), "d": self.d, "values": self.values.ravel().tolist()}

    @classmethod
    def from_dict(cls, data) -> "CubeFunction":
        try:
            return cls(GroupSpec(tuple(data["orders"])), int(data["d"]), np.asarray(data["values"], dtype=float))
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"not a CubeFunction object: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "CubeFunction":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"invalid JSON: {exc}") from exc


def face_lift(F: CubeFunction, alpha: int = 0) -> CubeFunction:
    """Pull ``F`` back to ``Z_{d+1}`` along the projection onto the ``eps alpha`` face."""
    n = F.group.order
    vals = F.values
    if alpha == 0:
        lifted = np.broadcast_to(vals[..., None], vals.shape + (n,))
    elif alpha == 1:
        add = F.group.add_table
        # lifted[x, t, u] = F(x + u, t)
        moved = vals[add]  # axes (x, u, t...)
        lifted = np.moveaxis(moved, 1, -1)
    else:
        raise InvalidParameterError("alpha must be 0 or 1")
    return CubeFunction(F.group, F.d + 1, np.ascontiguousarray(lifted))


# -- symmetries -------------------------------------------------------------

@dataclass(frozen=True)
class CubeIsometry:
    """A signed coordinate permutation of the Euclidean cube ``{0,1}^d``.

    It acts on vertices by ``sigma(eps)_j = eps_{perm[j]} xor flips[j]``.
    """

    perm: tuple[int, ...]
    flips: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        flips = tuple(int(f) for f in self.flips)
        if sorted(perm) != list(range(len(perm))):
            raise InvalidParameterError(f"{perm!r} is not a permutation")
        if len(flips) != len(perm) or any(f not in (0, 1) for f in flips):
            raise InvalidParameterError(f"flips {flips!r} must be {len(perm)} bits")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "flips", flips)

    @property
    def d(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, d: int) -> "CubeIsometry":
        return cls(tuple(range(d)), (0,) * d)

    def apply(self, eps) -> int:
        bits = vertex_bits(vertex_code(eps, self.d), self.d)
        out = tuple(bits[self.perm[j]] ^ self.flips[j] for j in range(self.d))
        return vertex_code(out, self.d)

    def vertex_permutation(self) -> list[int]:
        return [self.apply(e) for e in range(2**self.d)]

    @classmethod
    def from_vertex_permutation(cls, mapping) -> "CubeIsometry":
        """Recover the isometry inducing ``mapping`` (code -> code)."""
        mapping = [int(m) for m in mapping]
        d = _dimension_from_count(len(mapping), nonzero=False)
        for iso in all_isometries(d):
            if iso.vertex_permutation() == mapping:
                return iso
        raise InvalidParameterError(f"{mapping!r} is not induced by an isometry of the cube")


def all_isometries(d: int) -> list[CubeIsometry]:
    return [
        CubeIsometry(perm, flips)
        for perm in itertools.permutations(range(d))
        for flips in itertools.product((0, 1), repeat=d)
    ]


def _as_isometry(sigma, d) -> CubeIsometry:
    if isinstance(sigma, CubeIsometry):
        if sigma.d != d:
            raise DimensionError("isometry and cube point have different dimensions")
        return sigma
    iso = CubeIsometry.from_vertex_permutation(sigma)
    if iso.d != d:
        raise DimensionError("isometry and cube point have different dimensions")
    return iso


def cube_symmetry_orbit(group: GroupSpec, p: CubePoint, sigma) -> CubePoint:
    """The cube point ``q`` with ``q_eps = p_{sigma(eps)}`` for every vertex."""
    iso = _as_isometry(sigma, p.d)
    x_new = vertex_coordinate(group, p, iso.flips)
    t_new = []
    inv = {j: i for i, j in enumerate(iso.perm)}
    for i in range(p.d):
        j = inv[i]
        t = group.index(p.t[j])
        # sigma(e_i) is flips with bit j toggled; the edge runs forward iff flips[j] == 0
        t_new.append(t if iso.flips[j] == 0 else group.neg(t))
    return CubePoint(x_new, tuple(int(v) for v in t_new))


def permute_family(fs, sigma):
    """The family ``g_eps = f_{sigma(eps)}`` as a list in code order."""
    group, d, arr = family_array(fs)
    iso = _as_isometry(sigma, d)
    return [GroupFunction(group, arr[iso.apply(e)]) for e in range(2**d)]


def integral_of_products(rows, group, d) -> float:
    """Direct ``N^(d+1)`` enumeration of a full vertex family (reference path)."""
    idx = parameter_index(group, d)
    prod = rows[0][idx[0]]
    for e in range(1, 2**d):
        prod = prod * rows[e][idx[e]]
    return fsum(prod) / prod.size
