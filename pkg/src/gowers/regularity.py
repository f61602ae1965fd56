"""Partitions of ``Z``, rectangle averages on ``Z_d`` and an energy-increment regularizer.

A partition is stored as a label vector ``labels[z]`` in ``0..m-1``.  The
rectangle of a cube point is the tuple of labels of its ``D = 2^d``
coordinates, coded mixed-radix with the zero vertex most significant.  All
integrals are against ``mu_d`` through the parameter grid.

For ``H = F - F_P`` and a partition ``Q``, the largest ``|int U H|`` over
``Q``-functions with ``|U| <= 1`` is ``sum_R |int_R H|`` (take ``U`` to be the
sign of each rectangle integral); this quantity is called the defect of ``Q``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._summation import fmean
from .cube import CubeFunction, parameter_index
from .decomposable import DecomposableFunction
from .errors import InvalidInputError, InvalidParameterError, NumericalConsistencyError, RegularityFailure
from .group import GroupSpec

__all__ = [
    "Partition",
    "AlmostUniformPartition",
    "RectangleAverage",
    "RegularityOptions",
    "RegularityResult",
    "average_over_rectangles",
    "partition_defect",
    "adversarial_defect",
    "uniformize",
    "regularize",
    "weak_to_strong_constants",
    "weak_to_strong_check",
]

ENERGY_SLACK = 1e-9
_MAX_BINS = 2**22


# -- partitions ----------------------------------------------------------------

def _canonical(labels) -> np.ndarray:
    """Relabel so cells are numbered by first occurrence."""
    labels = np.asarray(labels, dtype=np.int64)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    return order[inverse].astype(np.int64)


@dataclass(frozen=True, eq=False)
class Partition:
    """A partition of the elements of ``group`` into ``m`` nonempty cells."""

    group: GroupSpec
    labels: np.ndarray = field(repr=False)

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.shape != (self.group.order,):
            raise InvalidInputError(f"expected {self.group.order} labels, got shape {labels.shape}")
        if labels.size and labels.min() < 0:
            raise InvalidInputError("labels must be nonnegative")
        labels = _canonical(labels)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def trivial(cls, group: GroupSpec) -> "Partition":
        return cls(group, np.zeros(group.order, dtype=np.int64))

    @classmethod
    def singletons(cls, group: GroupSpec) -> "Partition":
        return cls(group, np.arange(group.order))

    @classmethod
    def from_cells(cls, group: GroupSpec, cells) -> "Partition":
        labels = np.full(group.order, -1, dtype=np.int64)
        for i, cell in enumerate(cells):
            for z in cell:
                z = group.index(z)
                if labels[z] != -1:
                    raise InvalidInputError(f"element {z} appears in two cells")
                labels[z] = i
        if (labels == -1).any():
            raise InvalidInputError("cells do not cover the group")
        return cls(group, labels)

    @property
    def m(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @property
    def cells(self) -> list[list[int]]:
        return [np.flatnonzero(self.labels == i).tolist() for i in range(self.m)]

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.m)

    def is_almost_uniform(self) -> bool:
        lo, hi = self.group.order // self.m, -(-self.group.order // self.m)
        return bool(np.all((self.sizes == lo) | (self.sizes == hi)))

    def meet(self, other: "Partition") -> "Partition":
        """Common refinement."""
        if other.group != self.group:
            raise InvalidInputError("partitions of different groups")
        return Partition(self.group, self.labels * other.m + other.labels)

    def refines(self, other: "Partition") -> bool:
        return self.meet(other).m == self.m

    def __eq__(self, other):
        return isinstance(other, Partition) and other.group == self.group and np.array_equal(other.labels, self.labels)

    def to_dict(self) -> dict:
        return {"orders": list(self.group.orders), "cells": self.cells}

    @classmethod
    def from_dict(cls, data) -> "Partition":
        try:
            group = GroupSpec(tuple(data["orders"])) if "orders" in data else None
            cells = data["cells"]
            if group is None:
                group = GroupSpec((sum(len(c) for c in cells),))
            return cls.from_cells(group, cells)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"not a partition object: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


class AlmostUniformPartition(Partition):
    """Cells have ``floor(N/m)`` or ``ceil(N/m)`` elements."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_almost_uniform():
            raise InvalidInputError(f"cell sizes {self.sizes.tolist()} are not almost uniform")

    @classmethod
    def from_partition(cls, p: Partition) -> "AlmostUniformPartition":
        return cls(p.group, p.labels)


# -- rectangle averages ----------------------------------------------------------

def _rectangle_codes(coords: np.ndarray, labels: np.ndarray, m: int) -> np.ndarray:
    """Rectangle code of every parameter; ``coords`` is ``(D, P)``, ``labels`` is ``(..., N)``."""
    codes = np.zeros(labels.shape[:-1] + coords.shape[1:], dtype=np.int64)
    for row in coords:
        codes = codes * m + labels[..., row]
    return codes


def _coords(group: GroupSpec, d: int) -> np.ndarray:
    return parameter_index(group, d).reshape(2**d, -1)


def _rectangle_sums(codes, weights, m, D):
    """Per-rectangle sums and counts over the occupied rectangles only."""
    if m**D <= _MAX_BINS:
        counts = np.bincount(codes, minlength=m**D)
        occupied = np.flatnonzero(counts)
        sums = np.bincount(codes, weights=weights, minlength=m**D)
        return occupied, sums[occupied], counts[occupied], np.searchsorted(occupied, codes)
    occupied, index = np.unique(codes, return_inverse=True)
    return occupied, np.bincount(index, weights=weights), np.bincount(index), index


@dataclass(frozen=True, eq=False)
class RectangleAverage:
    """Averages and ``mu_d`` masses of the rectangles with positive mass."""

    partition: Partition
    D: int
    averages: dict = field(repr=False)
    mass: dict = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "partition": self.partition.to_dict(),
            "D": self.D,
            "rectangles": [
                {"cells": list(key), "average": self.averages[key], "mass": self.mass[key]}
                for key in sorted(self.averages)
            ],
        }


def _decode(code: int, m: int, D: int) -> tuple[int, ...]:
    out = []
    for _ in range(D):
        code, r = divmod(code, m)
        out.append(r)
    return tuple(reversed(out))


def average_over_rectangles(F: CubeFunction, P: Partition) -> tuple[CubeFunction, RectangleAverage]:
    """``F_P``: the ``mu_d``-average of ``F`` over the rectangle of each point."""
    if P.group != F.group:
        raise InvalidInputError("partition and function live on different groups")
    D = 2**F.d
    m = P.m
    codes = _rectangle_codes(_coords(F.group, F.d), P.labels, m)
    vals = F.values.ravel()
    occupied, sums, counts, where = _rectangle_sums(codes, vals, m, D)
    means = sums / counts
    averaged = CubeFunction(F.group, F.d, means[where])
    total = vals.size
    keys = [_decode(int(c), m, D) for c in occupied]
    rect = RectangleAverage(
        P, D,
        {k: float(v) for k, v in zip(keys, means)},
        {k: int(c) / total for k, c in zip(keys, counts)},
    )
    return averaged, rect


def _energy(F: CubeFunction) -> float:
    return fmean(F.values.ravel() ** 2)


# -- adversarial search ------------------------------------------------------------

def _tensor_defects(H, coords, labels, m, n):
    """Contract the dense coordinate tensor of ``H`` with one-hot labelings, one axis at a time.

    The order in which axes end up is irrelevant because only the sum of
    absolute values of the rectangle integrals is needed.
    """
    D, npar = coords.shape
    code = np.zeros(npar, dtype=np.int64)
    for row in coords:
        code = code * n + row
    dense = np.bincount(code, weights=H, minlength=n**D).reshape(1, -1, n)
    onehot = np.eye(m)
    out = np.empty(len(labels))
    step = max(1, _MAX_BINS // (m * n ** (D - 1)))
    for lo in range(0, len(labels), step):
        L = onehot[labels[lo:lo + step]]  # (B, n, m)
        B = len(L)
        cur = dense @ L
        for k in range(1, D):
            cur = cur.reshape(B, n ** (D - 1 - k), n, m**k).transpose(0, 1, 3, 2) @ L[:, None]
        out[lo:lo + step] = np.abs(cur.reshape(B, -1)).sum(axis=1) / npar
    return out


def _batch_defects(H, coords, labels, m):
    """Defects of a batch of labelings ``(B, N)`` against ``H`` on ``P`` parameters."""
    D, npar = coords.shape
    n = labels.shape[-1]
    if n**D <= _MAX_BINS and m * n**D <= 16 * D * npar:
        return _tensor_defects(H, coords, labels, m, n)
    bins = m**D
    out = np.empty(len(labels))
    step = max(1, min(_MAX_BINS // bins, _MAX_BINS // npar)) if bins <= _MAX_BINS else 1
    for lo in range(0, len(labels), step):
        chunk = labels[lo:lo + step]
        codes = _rectangle_codes(coords, chunk, m)
        if bins <= _MAX_BINS:
            codes = codes + (np.arange(len(chunk)) * bins)[:, None]
            sums = np.bincount(codes.ravel(), weights=np.tile(H, len(chunk)), minlength=len(chunk) * bins)
            out[lo:lo + step] = np.abs(sums.reshape(len(chunk), bins)).sum(axis=1) / npar
        else:
            for i, row in enumerate(codes):
                _, inv = np.unique(row, return_inverse=True)
                out[lo + i] = np.abs(np.bincount(inv, weights=H)).sum() / npar
    return out


def partition_defect(F: CubeFunction, F_P: CubeFunction, Q: Partition) -> float:
    """``sum_R |int_R (F - F_P) dmu_d|`` over the rectangles of ``Q``."""
    H = (F.values - F_P.values).ravel()
    return float(_batch_defects(H, _coords(F.group, F.d), Q.labels[None, :], Q.m)[0])


def _partition_count(n: int, m: int) -> int:
    """Number of partitions of ``n`` elements into at most ``m`` cells."""
    row = [1] + [0] * m  # Stirling numbers S(i, k) for the current i
    for _ in range(n):
        row = [0] + [k * row[k] + row[k - 1] for k in range(1, m + 1)]
    return sum(row)


def _all_labelings(n: int, m: int) -> np.ndarray:
    """Every restricted growth string of length ``n`` with at most ``m`` values."""
    rows = np.zeros((1, 1), dtype=np.int64)
    tops = np.zeros(1, dtype=np.int64)
    for _ in range(1, n):
        new_rows, new_tops = [], []
        for v in range(m):
            keep = tops + 1 >= v
            if not keep.any():
                continue
            r = rows[keep]
            new_rows.append(np.hstack([r, np.full((len(r), 1), v)]))
            new_tops.append(np.maximum(tops[keep], v))
        rows = np.vstack(new_rows)
        tops = np.concatenate(new_tops)
    return rows


def _hill_climb(H, coords, labels, m, rng, budget):
    """First-improvement single-element moves; returns ``(defect, labels, evaluations)``."""
    n = len(labels)
    best = _batch_defects(H, coords, labels[None, :], m)[0]
    used = 1
    improved = True
    while improved and used < budget:
        improved = False
        for z in rng.permutation(n):
            others = [c for c in range(m) if c != labels[z]]
            if not others or used >= budget:
                continue
            others = others[: budget - used]
            trial = np.repeat(labels[None, :], len(others), axis=0)
            trial[:, z] = others
            vals = _batch_defects(H, coords, trial, m)
            used += len(others)
            j = int(np.argmax(vals))
            if vals[j] > best * (1 + 1e-12) + 1e-15:
                best, labels = float(vals[j]), trial[j]
                improved = True
    return best, labels, used


def adversarial_defect(F: CubeFunction, F_P: CubeFunction, m: int, budget: int = 10_000,
                       seed=0, exhaustive_limit: int = 10**6) -> tuple[float, Partition]:
    """Search for a partition into at most ``m`` cells with the largest defect.

    With ``m >= N`` singletons are optimal and the defect is
    ``||F - F_P||_{L^1(mu_d)}``.  When the number of partitions with at most
    ``m`` cells is at most ``exhaustive_limit`` they are all evaluated, so
    the result is the exact supremum.  Otherwise seeded random restarts are
    improved by moving single elements between cells until ``budget``
    evaluations are spent.
    """
    if m < 1:
        raise InvalidParameterError("m must be at least 1")
    group = F.group
    n = group.order
    H = (F.values - F_P.values).ravel()
    coords = _coords(group, F.d)
    if m >= n:
        Q = Partition.singletons(group)
        return partition_defect(F, F_P, Q), Q
    if _partition_count(n, m) <= exhaustive_limit:
        labelings = _all_labelings(n, m)
        vals = _batch_defects(H, coords, labelings, m)
        j = int(np.argmax(vals))
        return float(vals[j]), Partition(group, labelings[j])
    best, best_labels = -1.0, None
    used = 0
    for rs in np.random.SeedSequence(seed).spawn(max(1, budget // (n * m) + 1)):
        if used >= budget:
            break
        rng = np.random.default_rng(rs)
        start = rng.integers(0, m, size=n)
        val, labels, spent = _hill_climb(H, coords, start, m, rng, budget - used)
        used += spent
        if val > best:
            best, best_labels = val, labels
    return float(best), Partition(group, best_labels)


# -- regularization ----------------------------------------------------------------

def uniformize(S: Partition, m: int) -> AlmostUniformPartition:
    """An almost uniform partition into ``m`` cells, as many of them inside cells of ``S`` as possible.

    Each cell of ``S`` is cut into pieces of the target sizes; the leftovers
    are pooled and cut into the remaining pieces.
    """
    n = S.group.order
    if not 1 <= m <= n:
        raise InvalidParameterError(f"cell count must be in 1..{n}")
    q, r = divmod(n, m)
    big, small = r, m - r
    labels = np.empty(n, dtype=np.int64)
    nxt = 0
    pool = []
    for cell in S.cells:
        rest = cell
        while True:
            if big and len(rest) >= q + 1:
                size, big = q + 1, big - 1
            elif small and len(rest) >= q:
                size, small = q, small - 1
            else:
                break
            labels[rest[:size]] = nxt
            rest = rest[size:]
            nxt += 1
        pool.extend(rest)
    for size in [q + 1] * big + [q] * small:
        labels[pool[:size]] = nxt
        pool = pool[size:]
        nxt += 1
    return AlmostUniformPartition(S.group, labels)


@dataclass
class RegularityOptions:
    budget: int = 10_000
    seed: int = 0
    cell_cap: int | None = None
    exhaustive_limit: int = 10**6


@dataclass
class RegularityResult:
    partition: AlmostUniformPartition
    averaged: CubeFunction = field(repr=False)
    rectangles: RectangleAverage = field(repr=False)
    history: list
    defect: float

    @property
    def rounds(self) -> int:
        return sum(1 for h in self.history if h["accepted"])

    def to_dict(self) -> dict:
        return {"partition": self.partition.to_dict(), "defect": self.defect, "history": self.history}


def regularize(F: CubeFunction, delta: float, opts: RegularityOptions | None = None) -> RegularityResult:
    """Energy-increment search for an almost uniform partition regular to within ``delta``.

    Each round runs :func:`adversarial_defect` with ``max(m, 2)`` cells (a
    one-cell test partition can never detect anything).  A defect above
    ``delta`` refines the current partition by the offending one, which
    raises the energy ``||F_P||^2`` by at least the squared defect, and the
    refinement is then made almost uniform with ``min(m^2, cap)`` cells.
    """
    opts = opts or RegularityOptions()
    if delta <= 0:
        raise InvalidParameterError("delta must be positive")
    if np.max(np.abs(F.values)) > 1 + 1e-12:
        raise InvalidInputError("regularize expects |F| <= 1; scale the function first")
    group = F.group
    cap = opts.cell_cap or group.order
    P = AlmostUniformPartition.trivial(group)
    F_P, rect = average_over_rectangles(F, P)
    energy = _energy(F_P)
    history = []
    for rnd in range(group.order + 1):
        defect, Q = adversarial_defect(
            F, F_P, max(P.m, 2), opts.budget, [opts.seed, rnd], opts.exhaustive_limit
        )
        entry = {"round": rnd, "cells": P.m, "defect": defect, "energy": energy, "accepted": defect > delta}
        history.append(entry)
        if defect <= delta:
            return RegularityResult(P, F_P, rect, history, defect)
        S = P.meet(Q)
        F_S, _ = average_over_rectangles(F, S)
        refined = _energy(F_S)
        entry["energy_refined"] = refined
        entry["increment"] = refined - energy
        if refined - energy < defect**2 - ENERGY_SLACK:
            raise NumericalConsistencyError(
                f"energy rose by {refined - energy:.3e}, less than the squared defect {defect**2:.3e}"
            )
        target = min(S.m**2, cap)
        if target <= P.m:
            raise RegularityFailure(f"cell cap {cap} reached with defect {defect:.3e}", history=history)
        P = uniformize(S, target)
        F_P, rect = average_over_rectangles(F, P)
        energy = _energy(F_P)
    raise RegularityFailure("no regular partition found", history=history)


# -- from weak to strong approximation ----------------------------------------------

def weak_to_strong_constants(d: int) -> tuple[float, float]:
    """``(C, c)`` with ``C = 2^(d+1) - 1`` and ``c = (2^d - 1) / (2^(d+1) - 1)``."""
    C = 2 ** (d + 1) - 1
    return float(C), (2**d - 1) / C


def weak_to_strong_check(F: DecomposableFunction, theta: float, opts: RegularityOptions | None = None,
                         samples: int = 20, seed=0) -> dict:
    """Regularize a bounded decomposable function and compare ``||F - F_P||_2`` with its bound.

    Also evaluates ``|E (F - F_P) prod f_eps|`` for ``samples`` random
    families with ``||f_eps||_{2^d} = 1`` against ``C theta^c``.
    """
    if F.value > 1 + 1e-12:
        raise InvalidInputError(f"certificate value {F.value} exceeds 1")
    Fm = F.materialize()
    if np.max(np.abs(Fm.values)) > 1 + 1e-12:
        raise InvalidInputError("decomposable function is not bounded by 1")
    d = F.d
    res = regularize(Fm, theta, opts)
    H = Fm.values - res.averaged.values
    lhs = math.sqrt(fmean(H.ravel() ** 2))
    C, c = weak_to_strong_constants(d)
    bound = math.sqrt(C * theta**c + theta)
    rng = np.random.default_rng(seed)
    idx = _coords(Fm.group, d)
    p = 2**d
    worst = 0.0
    for _ in range(samples):
        fs = rng.standard_normal((p, Fm.group.order))
        fs /= (np.mean(np.abs(fs) ** p, axis=1) ** (1 / p))[:, None]
        prod = np.prod([fs[e][idx[e]] for e in range(p)], axis=0)
        worst = max(worst, abs(fmean(H.ravel() * prod)))
    pairing_bound = C * theta**c
    return {
        "d": d,
        "theta": theta,
        "cells": res.partition.m,
        "rounds": res.rounds,
        "defect": res.defect,
        "lhs": lhs,
        "bound": bound,
        "ok": lhs <= bound,
        "pairing_worst": worst,
        "pairing_bound": pairing_bound,
        "pairing_ok": worst <= pairing_bound,
        "partition": res.partition.to_dict(),
    }
