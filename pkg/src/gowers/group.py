"""Finite abelian groups ``Z_{N1} x ... x Z_{Nk}`` and real functions on them.

Elements are indexed by the row-major (C order) flattening of their digit
tuples, so ``index = ravel_multi_index(digits, orders)``.  Integration is
always against the uniform probability measure.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from ._summation import fmean
from .errors import DimensionError, InvalidInputError, InvalidParameterError

__all__ = [
    "GroupSpec",
    "GroupFunction",
    "cyclic",
    "lp_norm",
    "translate",
    "inner",
]


@dataclass(frozen=True)
class GroupSpec:
    """A product of cyclic groups, given by the orders of its factors."""

    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(n) for n in np.atleast_1d(self.orders))
        if not orders or any(n < 1 for n in orders):
            raise InvalidParameterError(f"group orders must be positive integers, got {self.orders!r}")
        object.__setattr__(self, "orders", orders)

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Build from a CLI-style string such as ``"8"`` or ``"2,2,3"``."""
        try:
            return cls(tuple(int(tok) for tok in str(text).split(",") if tok.strip()))
        except ValueError as exc:
            raise InvalidInputError(f"cannot parse group {text!r}") from exc

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    def __len__(self):
        return self.order

    def digits(self, index: int) -> tuple[int, ...]:
        self._check_index(index)
        return tuple(int(v) for v in np.unravel_index(int(index), self.orders))

    def index(self, element) -> int:
        """Index of ``element`` (an int index or a digit tuple)."""
        if isinstance(element, (int, np.integer)):
            self._check_index(element)
            return int(element)
        digits = tuple(int(v) for v in element)
        if len(digits) != len(self.orders):
            raise DimensionError(f"element {element!r} does not match group {self.orders}")
        return int(np.ravel_multi_index(tuple(v % n for v, n in zip(digits, self.orders)), self.orders))

    def add(self, a, b) -> int:
        da, db = self.digits(self.index(a)), self.digits(self.index(b))
        return self.index(tuple((x + y) % n for x, y, n in zip(da, db, self.orders)))

    def neg(self, a) -> int:
        return self.index(tuple((-x) % n for x, n in zip(self.digits(self.index(a)), self.orders)))

    @cached_property
    def add_table(self) -> np.ndarray:
        """``add_table[a, b]`` is the index of ``a + b``; int32, read-only."""
        return _add_table(self.orders)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return _neg_table(self.orders)

    def _check_index(self, index):
        if not 0 <= int(index) < self.order:
            raise InvalidParameterError(f"element index {index} out of range for order {self.order}")


def cyclic(n: int) -> GroupSpec:
    return GroupSpec((n,))


@lru_cache(maxsize=32)
def _digit_matrix(orders):
    n = math.prod(orders)
    return np.stack(np.unravel_index(np.arange(n), orders), axis=1)


@lru_cache(maxsize=16)
def _add_table(orders):
    dig = _digit_matrix(orders)
    summed = (dig[:, None, :] + dig[None, :, :]) % np.asarray(orders)
    table = np.ravel_multi_index(tuple(np.moveaxis(summed, -1, 0)), orders).astype(np.int32)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=16)
def _neg_table(orders):
    dig = _digit_matrix(orders)
    table = np.ravel_multi_index(tuple(((-dig) % np.asarray(orders)).T), orders).astype(np.int32)
    table.setflags(write=False)
    return table


@dataclass(frozen=True, eq=False)
class GroupFunction:
    """A real-valued function on a finite abelian group.

    ``values`` is stored as an immutable float64 vector indexed by element
    index.  Arithmetic operators act pointwise; scalars broadcast.
    """

    group: GroupSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not isinstance(self.group, GroupSpec):
            object.__setattr__(self, "group", GroupSpec(self.group))
        vals = np.array(self.values, dtype=float).ravel()
        if vals.size != self.group.order:
            raise DimensionError(f"expected {self.group.order} values, got {vals.size}")
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("function values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, group, c=1.0) -> "GroupFunction":
        group = group if isinstance(group, GroupSpec) else GroupSpec(group)
        return cls(group, np.full(group.order, float(c)))

    @classmethod
    def zeros(cls, group) -> "GroupFunction":
        return cls.constant(group, 0.0)

    @classmethod
    def on_cyclic(cls, values) -> "GroupFunction":
        vals = np.asarray(values, dtype=float).ravel()
        return cls(cyclic(vals.size), vals)

    # -- container protocol -------------------------------------------
    def __len__(self):
        return self.values.size

    def __getitem__(self, item):
        return self.values[item]

    def __iter__(self):
        return iter(self.values.tolist())

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __repr__(self):
        return f"GroupFunction(orders={self.group.orders}, values={np.array2string(self.values, precision=6)})"

    def same_group(self, other: "GroupFunction"):
        if not isinstance(other, GroupFunction) or other.group != self.group:
            raise DimensionError("functions live on different groups")

    def allclose(self, other, atol=1e-12) -> bool:
        self.same_group(other)
        return bool(np.allclose(self.values, other.values, rtol=0.0, atol=atol))

    def __eq__(self, other):
        return (
            isinstance(other, GroupFunction)
            and other.group == self.group
            and np.array_equal(other.values, self.values)
        )

    __hash__ = None

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, GroupFunction):
            self.same_group(other)
            return other.values
        if np.isscalar(other):
            return float(other)
        return NotImplemented

    def _binary(self, other, op):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return GroupFunction(self.group, op(self.values, v))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not np.isscalar(other):
            return NotImplemented
        return GroupFunction(self.group, self.values / float(other))

    def __neg__(self):
        return GroupFunction(self.group, -self.values)

    def __abs__(self):
        return GroupFunction(self.group, np.abs(self.values))

    def map(self, fn) -> "GroupFunction":
        return GroupFunction(self.group, fn(self.values))

    # -- measure theory -----------------------------------------------
    def mean(self) -> float:
        return fmean(self.values)

    def norm(self, p=2.0) -> float:
        return lp_norm(self, p)

    def translate(self, t) -> "GroupFunction":
        return translate(self, t)

    def as_grid(self) -> np.ndarray:
        """Values reshaped to the group's factor grid."""
        return self.values.reshape(self.group.orders)

    # -- serialisation ------------------------------------------------
    def to_dict(self) -> dict:
        return {"orders": list(self.group.orders), "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data) -> "GroupFunction":
        try:
            return cls(GroupSpec(tuple(data["orders"])), np.asarray(data["values"], dtype=float))
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"not a GroupFunction object: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "GroupFunction":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "value"])
        for i, v in enumerate(self.values.tolist()):
            writer.writerow([i, repr(v)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, group=None) -> "GroupFunction":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if rows and rows[0][0].strip().lower() == "index":
            rows = rows[1:]
        try:
            pairs = sorted((int(i), float(v)) for i, v in rows)
        except ValueError as exc:
            raise InvalidInputError(f"malformed CSV row: {exc}") from exc
        if [i for i, _ in pairs] != list(range(len(pairs))):
            raise InvalidInputError("CSV indices must cover 0..N-1 exactly once")
        group = group if group is not None else cyclic(len(pairs))
        group = group if isinstance(group, GroupSpec) else GroupSpec(group)
        return cls(group, [v for _, v in pairs])


def lp_norm(f: GroupFunction, p=2.0) -> float:
    """``(E|f|^p)^(1/p)`` against the uniform measure; ``max|f|`` for p = inf.

    Values are rescaled by ``max|f|`` first so exponents as large as
    ``2**20`` neither overflow nor underflow.
    """
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise InvalidParameterError(f"p must be >= 1, got {p}")
    a = np.abs(f.values)
    peak = float(a.max(initial=0.0))
    if math.isinf(p) or peak == 0.0:
        return peak
    if p == 1.0:
        return fmean(a)
    if p == 2.0 and 1e-150 < peak < 1e150:
        return math.sqrt(fmean(a * a))
    return peak * fmean((a / peak) ** p) ** (1.0 / p)


def translate(f: GroupFunction, t) -> GroupFunction:
    """The translate ``f_t(x) = f(x + t)``."""
    digits = f.group.digits(f.group.index(t))
    grid = np.roll(f.as_grid(), shift=tuple(-s for s in digits), axis=tuple(range(len(digits))))
    return GroupFunction(f.group, grid.ravel())


def inner(f: GroupFunction, g: GroupFunction) -> float:
    """The pairing ``<f; g> = E_x f(x) g(x)``."""
    f.same_group(g)
    return fmean(f.values * g.values)
