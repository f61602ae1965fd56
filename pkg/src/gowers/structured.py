"""Structured decomposition of translates of an order ``d + 1`` dual-type function.

For ``phi = D_{d+1}(f_eps : eps != 0)`` write ``eps = eta alpha`` with
``eta in V_d``.  With ``G(x, s) = prod_{eta != 0} f_{eta 0}(x + eta . s)`` and
``F = pi(prod_eta f_{eta 1})`` one has ``phi(x + t) = Proj(G_t F)(x)``.
Regularizing ``F`` into ``F_P`` splits this into

* ``Proj(G_t (F - F_P))``, bounded pointwise by
  ``rho = (Proj (F - F_P)^2)^(1/2)``, and
* ``Proj(G_t F_P)(x) = phi_i^(t)(x)`` for ``x`` in cell ``i``, where
  ``phi_i^(t)(x) = sum_{j : j_0 = i} c_j D_d(1_{A_{j_eta}} f_{eta 0}(. + t))``
  is an ``A(d)`` certificate with at most ``m^(2^d - 1)`` terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .algebra import AdDecomposition, AdTerm
from .cube import CubeFunction, check_resources, family_array, parameter_index
from .decomposable import diagonal_project, proj_conditional
from .errors import InvalidInputError, InvalidParameterError, NumericalConsistencyError, ResourceError
from .group import GroupFunction, GroupSpec, lp_norm
from .regularity import (
    Partition,
    RegularityOptions,
    average_over_rectangles,
    regularize,
    weak_to_strong_constants,
)

__all__ = [
    "MainDecomposition",
    "StructuredOptions",
    "assemble_decomposition",
    "choose_theta",
    "structured_decompose",
    "verify_main",
]

MAX_PIECE_TERMS = 10**6


def choose_theta(d: int, delta: float, max_halvings: int = 200) -> float:
    """Largest ``theta = delta^2/4 * 2^-j`` with ``(C theta^c + theta)^(1/2) < delta``."""
    if delta <= 0:
        raise InvalidParameterError("delta must be positive")
    C, c = weak_to_strong_constants(d)
    theta = delta**2 / 4
    for _ in range(max_halvings):
        if math.sqrt(C * theta**c + theta) < delta:
            return theta
        theta /= 2
    raise InvalidParameterError(f"no admissible theta found for delta={delta}")


@dataclass
class StructuredOptions:
    regularity: RegularityOptions = field(default_factory=RegularityOptions)
    tol: float = 1e-8


@dataclass(frozen=True, eq=False)
class MainDecomposition:
    """Partition, error envelope and symbolic pieces.

    ``constants`` has shape ``(m,) * 2^d`` and holds the rectangle averages of
    ``F``; ``f0`` holds the rows ``f_{eta 0}`` for ``eta = 1 .. 2^d - 1``.
    ``perturbations`` maps ``(i, t)`` to an additive vector and exists only so
    the verifier can be exercised on deliberately broken pieces.
    """

    group: GroupSpec
    d: int
    delta: float
    theta: float
    partition: Partition
    rho: GroupFunction = field(repr=False)
    constants: np.ndarray = field(repr=False)
    f0: np.ndarray = field(repr=False)
    approximation_error: float = 0.0
    cell_cap: int = 0
    history: list = field(default_factory=list, repr=False)
    perturbations: dict = field(default_factory=dict, repr=False)

    @property
    def m(self) -> int:
        return self.partition.m

    @property
    def C_bound(self) -> float:
        return float(self.m ** (2**self.d - 1))

    def _cell_rows(self) -> np.ndarray:
        labels = self.partition.labels
        return (labels[None, :] == np.arange(self.m)[:, None]).astype(float)

    def piece(self, i: int, t) -> AdDecomposition:
        """``phi_i^(t)`` as an ``A(d)`` certificate; zero constants are skipped."""
        t = self.group.index(t)
        n = self.group.order
        D = 2**self.d
        shifted = self.f0[:, self.group.add_table[:, t]]  # f_{eta 0}(y + t)
        cells = self._cell_rows()
        sub = self.constants[i].reshape(-1)
        terms = []
        for code in np.flatnonzero(sub):
            js = np.unravel_index(code, (self.m,) * (D - 1))
            atoms = np.array([cells[j] * shifted[e] for e, j in enumerate(js)])
            terms.append(AdTerm(float(sub[code]), atoms.reshape(D - 1, n)))
        return AdDecomposition(self.group, self.d, terms)

    def piece_values(self) -> np.ndarray:
        """Dense ``values[i, t, x] = phi_i^(t)(x)``, evaluated directly from the constants."""
        n = self.group.order
        D = 2**self.d
        coords = parameter_index(self.group, self.d).reshape(D, n, -1)
        labels = self.partition.labels
        code = np.zeros(coords.shape[1:], dtype=np.int64)
        for e in range(1, D):
            code = code * self.m + labels[coords[e]]
        consts = self.constants.reshape(self.m, -1)[:, code]  # (m, x, S)
        add = self.group.add_table
        prod = np.ones((n,) + coords.shape[1:])
        for e in range(1, D):
            prod = prod * self.f0[e - 1][add[coords[e]]].transpose(2, 0, 1)  # (t, x, S)
        vals = np.einsum("ixs,txs->itx", consts, prod) / coords.shape[2]
        for (i, t), extra in self.perturbations.items():
            vals[i, t] += extra
        return vals

    def piece_function(self, i: int, t) -> GroupFunction:
        """Materialised piece through its certificate, including any perturbation."""
        t = self.group.index(t)
        vals = self.piece(i, t).materialize().values
        extra = self.perturbations.get((i, t))
        return GroupFunction(self.group, vals if extra is None else vals + extra)

    def certificates(self) -> np.ndarray:
        """``cert[i, t]``, the value of the certificate of ``phi_i^(t)``."""
        n = self.group.order
        D = 2**self.d
        p = 2 ** (self.d - 1)
        cells = self._cell_rows()
        add = self.group.add_table
        # norms[e, a, t] = || 1_{A_a} f_{eta 0}(. + t) ||_p
        norms = np.empty((D - 1, self.m, n))
        for e in range(D - 1):
            shifted = np.abs(self.f0[e][add]) ** p  # (y, t)
            norms[e] = (cells @ shifted / n) ** (1 / p)
        out = np.abs(self.constants).reshape(self.m, -1)[:, :, None]
        weight = np.ones((1, n))
        for e in range(D - 1):
            weight = (weight[:, None, :] * norms[e][None, :, :]).reshape(-1, n)
        return np.einsum("ijt,jt->it", out, weight)

    def with_perturbation(self, i: int, t, x, amount: float = 1.0) -> "MainDecomposition":
        """A copy whose piece ``(i, t)`` is shifted by ``amount`` at ``x``."""
        t, x = self.group.index(t), self.group.index(x)
        extra = np.zeros(self.group.order)
        extra[x] = amount
        pert = dict(self.perturbations)
        pert[(i, t)] = pert.get((i, t), 0.0) + extra
        return replace(self, perturbations=pert)

    def to_dict(self) -> dict:
        certs = self.certificates()
        return {
            "orders": list(self.group.orders),
            "d": self.d,
            "delta": self.delta,
            "theta": self.theta,
            "cells": self.m,
            "cell_cap": self.cell_cap,
            "C_bound": self.C_bound,
            "partition": self.partition.to_dict(),
            "rho": self.rho.values.tolist(),
            "approximation_error": self.approximation_error,
            "certificates": certs.tolist(),
            "max_certificate": float(certs.max(initial=0.0)),
            "history": self.history,
        }


def _split_family(fs):
    group, dd, arr = family_array(fs, nonzero=True)
    if dd < 2:
        raise InvalidParameterError("the family must be indexed by nonzero vertices of V_{d+1} with d >= 1")
    if np.iscomplexobj(arr):
        raise InvalidInputError("functions must be real valued")
    d = dd - 1
    check_resources(group, dd)
    p = 2**d
    for row in arr:
        if lp_norm(GroupFunction(group, row), p) > 1 + 1e-12:
            raise InvalidInputError(f"every function needs L^{p} norm at most 1")
    # row of code c is arr[c - 1]; eta 0 has code 2 eta and eta 1 has code 2 eta + 1
    f0 = np.array([arr[2 * e - 1] for e in range(1, 2**d)])
    f1 = np.array([arr[2 * e] for e in range(2**d)])
    return group, d, arr, f0, f1


def _rectangle_constants(rect, m, D) -> np.ndarray:
    consts = np.zeros((m,) * D)
    for key, avg in rect.averages.items():
        consts[key] = avg
    return consts


def _top_function(f1) -> CubeFunction:
    """``F = pi(prod_eta f_{eta 1})`` on ``Z_d``."""
    return diagonal_project(CubeFunction.from_vertex_functions(list(f1)))


def _assemble(group, d, f0, F, partition, delta, theta, **extra) -> MainDecomposition:
    D = 2**d
    m = partition.m
    if m ** (D - 1) > MAX_PIECE_TERMS:
        raise ResourceError(f"pieces would have {m ** (D - 1)} terms")
    F_P, rect = average_over_rectangles(F, partition)
    diff = F - F_P
    return MainDecomposition(
        group=group,
        d=d,
        delta=delta,
        theta=theta,
        partition=partition,
        rho=proj_conditional(diff * diff).map(np.sqrt),
        constants=_rectangle_constants(rect, m, D),
        f0=f0,
        approximation_error=diff.norm(2),
        **extra,
    )


def assemble_decomposition(fs, partition: Partition, delta: float = math.inf) -> MainDecomposition:
    """Envelope and pieces for a given partition, without regularizing or checking.

    The pointwise estimate holds for every partition; only the size of
    ``rho`` depends on how regular the partition is.
    """
    group, d, _, f0, f1 = _split_family(fs)
    if partition.group != group:
        raise InvalidInputError("partition and functions live on different groups")
    return _assemble(group, d, f0, _top_function(f1), partition, delta, math.nan)


def structured_decompose(fs, delta: float, opts: StructuredOptions | None = None) -> MainDecomposition:
    """Partition, envelope ``rho`` and certified pieces for the translates of ``D_{d+1}(fs)``.

    ``fs`` is indexed by the nonzero vertices of ``V_{d+1}``, each with
    ``||f||_{2^d} <= 1``.  The result is checked against all three
    guarantees (``||rho||_2 <= delta``; pieces bounded by 1 with certificates
    at most ``m^(2^d - 1)``; the pointwise estimate for every ``x, t``)
    before it is returned.
    """
    opts = opts or StructuredOptions()
    group, d, arr, f0, f1 = _split_family(fs)
    F = _top_function(f1)
    theta = choose_theta(d, delta)
    res = regularize(F, theta, opts.regularity)
    M = _assemble(
        group, d, f0, F, res.partition, delta, theta,
        cell_cap=opts.regularity.cell_cap or group.order,
        history=res.history,
    )
    report = _check(M, _phi_translates(group, d, arr), M.piece_values(), M.certificates(), delta, opts.tol)
    if not report["ok"]:
        raise NumericalConsistencyError(f"decomposition violates its guarantees: {report}")
    return M


def _phi_translates(group: GroupSpec, d: int, arr: np.ndarray) -> np.ndarray:
    """``out[x, t] = phi(x + t)`` by direct enumeration of the ``N^(d+2)`` cube points."""
    idx = parameter_index(group, d + 1).reshape(2 ** (d + 1), group.order, -1)
    prod = np.ones(idx.shape[1:])
    for e in range(1, 2 ** (d + 1)):
        prod = prod * arr[e - 1][idx[e]]
    phi = prod.mean(axis=1)
    return phi[group.add_table]


def _check(M, phi_xt, pieces, certs, delta, tol) -> dict:
    """Slack of each guarantee; ``pieces[i, t, x]``, ``certs[i, t]``."""
    rho = M.rho.values
    rho_norm = math.sqrt(float(np.mean(rho**2)))
    sup = float(np.abs(pieces).max(initial=0.0))
    cert = float(certs.max(initial=0.0))
    labels = M.partition.labels
    n = M.group.order
    main = pieces[labels, :, np.arange(n)]  # (x, t)
    excess = np.abs(phi_xt - main) - rho[:, None]
    worst = np.unravel_index(int(np.argmax(excess)), excess.shape)
    items = {
        "rho_norm": {"value": rho_norm, "bound": delta, "slack": delta - rho_norm, "ok": rho_norm <= delta + tol},
        "piece_sup": {"value": sup, "bound": 1.0, "slack": 1.0 - sup, "ok": sup <= 1.0 + tol},
        "piece_certificate": {
            "value": cert, "bound": M.C_bound, "slack": M.C_bound - cert, "ok": cert <= M.C_bound + tol,
        },
        "pointwise": {
            "value": float(excess.max()),
            "bound": 0.0,
            "slack": -float(excess.max()),
            "worst_x": int(worst[0]),
            "worst_t": int(worst[1]),
            "ok": float(excess.max()) <= tol,
        },
    }
    return {"cells": M.m, "items": items, "ok": all(v["ok"] for v in items.values())}


def verify_main(M: MainDecomposition, fs, delta: float, tol: float = 1e-8) -> dict:
    """Re-check a decomposition from scratch.

    ``phi`` is recomputed by enumeration, every piece is materialised from
    its certificate terms and every certificate value is recomputed term by
    term.  Failures are reported, never raised.
    """
    group, d, arr, _, _ = _split_family(fs)
    if group != M.group or d != M.d:
        raise InvalidInputError("decomposition and family do not match")
    n = group.order
    pieces = np.empty((M.m, n, n))
    certs = np.empty((M.m, n))
    for i in range(M.m):
        for t in range(n):
            pieces[i, t] = M.piece_function(i, t).values
            certs[i, t] = M.piece(i, t).value
    return _check(M, _phi_translates(group, d, arr), pieces, certs, delta, tol)
