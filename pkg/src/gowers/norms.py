"""Uniformity norms ``U(d)``, dual functions and cubic convolution products."""

from __future__ import annotations

import math

import numpy as np

from ._summation import fmean
from .cube import check_resources, convolve_rows, family_array
from .errors import InvalidParameterError, NumericalConsistencyError
from .group import GroupFunction, lp_norm

__all__ = [
    "gowers_norm",
    "gowers_power",
    "dual_function",
    "cubic_convolution",
    "convolution_sup_bound",
    "cube_integral_bound",
    "elementary_bounds_report",
]

CLAMP = 1e-12
METHODS = ("closed_formula", "inductive")
_CHUNK = 1 << 20


def _method(method: str) -> str:
    aliases = {"closed": "closed_formula", "closed-formula": "closed_formula", "induction": "inductive"}
    method = aliases.get(method, method)
    if method not in METHODS:
        raise InvalidParameterError(f"unknown method {method!r}; expected one of {METHODS}")
    return method


def gowers_power(f: GroupFunction, d: int, method: str = "closed_formula") -> float:
    """The raw ``2^d``-th power ``||f||_{U(d)}^{2^d}`` before clamping."""
    method = _method(method)
    check_resources(f.group, d)
    if method == "closed_formula":
        return fmean(f.values * dual_function(f, d).values)
    return float(_inductive_power(f.values[None, :], f.group.add_table, d)[0])


def _inductive_power(rows: np.ndarray, add: np.ndarray, d: int) -> np.ndarray:
    """``||F_b||_{U(d)}^{2^d}`` for every row ``F_b`` via ``E_t ||F F_t||^{2^(d-1)}``."""
    if d == 1:
        return rows.mean(axis=1) ** 2
    b, n = rows.shape
    out = np.empty(b)
    step = max(1, _CHUNK // (n * n))
    for lo in range(0, b, step):
        chunk = rows[lo:lo + step]
        # products[r, t, x] = F_r(x) F_r(x + t)
        products = chunk[:, None, :] * chunk[:, add]
        sub = _inductive_power(products.reshape(-1, n), add, d - 1)
        out[lo:lo + step] = sub.reshape(len(chunk), n).mean(axis=1)
    return out


def gowers_norm(f: GroupFunction, d: int, method: str = "closed_formula") -> float:
    """``||f||_{U(d)}``.

    The ``2^d``-th power is formed first. Values within ``1e-12`` below zero
    are rounding noise and clamp to 0; anything more negative raises
    :class:`NumericalConsistencyError`.
    """
    power = gowers_power(f, d, method)
    return _root(power, d)


def _root(power: float, d: int) -> float:
    if power < -CLAMP:
        raise NumericalConsistencyError(f"U({d}) power {power!r} is negative")
    return max(power, 0.0) ** (1.0 / 2**d)


def dual_function(f: GroupFunction, d: int) -> GroupFunction:
    """``D_d f(x) = E_t prod_{eps != 0} f(x + eps . t)``."""
    check_resources(f.group, d)
    rows = np.broadcast_to(f.values, (2**d - 1, f.group.order))
    return GroupFunction(f.group, convolve_rows(f.group, d, rows))


def cubic_convolution(fs) -> GroupFunction:
    """Cubic convolution product of a family indexed by the nonzero vertices."""
    group, d, arr = family_array(fs, nonzero=True)
    if np.iscomplexobj(arr):
        raise InvalidParameterError("cubic_convolution takes real functions")
    return GroupFunction(group, convolve_rows(group, d, arr))


def convolution_sup_bound(fs) -> float:
    """``prod ||f_eps||_{2^(d-1)}``, which bounds the sup of the convolution."""
    group, d, arr = family_array(fs, nonzero=True)
    p = 2 ** (d - 1)
    return math.prod(lp_norm(GroupFunction(group, row), p) for row in arr)


def cube_integral_bound(fs, alpha=0) -> float:
    """``||f_alpha||_1 prod_{eps != alpha} ||f_eps||_{2^(d-1)}``."""
    from .cube import vertex_code

    group, d, arr = family_array(fs)
    a = vertex_code(alpha, d)
    p = 2 ** (d - 1)
    out = 1.0
    for e, row in enumerate(arr):
        out *= lp_norm(GroupFunction(group, row), 1 if e == a else p)
    return out


def elementary_bounds_report(f: GroupFunction, d_max: int, slack: float = 1e-10) -> list[dict]:
    """Norm comparisons for ``1 <= d <= d_max``, one record per ``d``.

    The flags ``sharp_norm_ok`` and ``sharp_sup_ok`` test bounds that are
    only observed empirically; a failure there is a finding, not a bug.
    """
    if d_max < 1:
        raise InvalidParameterError("d_max must be >= 1")
    records = []
    prev = None
    for d in range(1, d_max + 1):
        u = gowers_norm(f, d)
        dual = dual_function(f, d)
        sup = lp_norm(dual, math.inf)
        l_half = lp_norm(f, 2 ** (d - 1))
        l_sharp = lp_norm(f, 2**d / (d + 1))
        sup_sharp = lp_norm(f, (2**d - 1) / d) ** (2**d - 1)
        rec = {
            "d": d,
            "u_norm": u,
            "lp_half": l_half,
            "lp_sharp": l_sharp,
            "dual_sup": sup,
            "sup_sharp": sup_sharp,
            "norm_bound_ok": u <= l_half + slack,
            "sup_bound_ok": sup <= l_half ** (2**d - 1) + slack,
            "sharp_norm_ok": u <= l_sharp + slack,
            "sharp_sup_ok": sup <= sup_sharp + slack,
            "monotone_ok": prev is None or u >= prev - slack,
        }
        records.append(rec)
        prev = u
    return records
