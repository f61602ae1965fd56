"""Decomposable functions on the cube group and the diagonal projection.

A decomposable function is ``F(x) = sum_j a_j prod_{eps in V_d} f_{j,eps}(x_eps)``
with certificate value ``sum_j |a_j| prod_eps ||f_{j,eps}||_{2^d}``.
Diagonal translation by ``t`` acts on parameters as ``(x, t_vec) -> (x + t, t_vec)``,
so the projection ``pi`` averages over ``x`` with ``t_vec`` fixed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cube import CubeFunction, check_resources, family_array, parameter_index, vertex_code, vertices
from .errors import DimensionError, InvalidInputError, ResourceError
from .group import GroupFunction, GroupSpec, lp_norm

__all__ = [
    "DecomposableFunction",
    "diagonal_translate",
    "diagonal_project",
    "proj_conditional",
    "dd_product",
]

MAX_TERMS = 10**6


@dataclass(eq=False)
class DecomposableFunction:
    """Terms are ``(coefficient, atoms)`` with ``atoms`` of shape ``(2^d, N)``."""

    group: GroupSpec
    d: int
    terms: list = field(default_factory=list)

    def __post_init__(self):
        check_resources(self.group, self.d)
        shape = (2**self.d, self.group.order)
        clean = []
        for coef, atoms in self.terms:
            atoms = np.asarray(atoms, dtype=float)
            if atoms.shape != shape:
                raise DimensionError(f"term atoms have shape {atoms.shape}, expected {shape}")
            clean.append((float(coef), atoms))
        self.terms = clean

    @classmethod
    def single(cls, fs, coefficient=1.0) -> "DecomposableFunction":
        group, d, arr = family_array(fs)
        return cls(group, d, [(coefficient, arr)])

    @property
    def value(self) -> float:
        p = 2**self.d
        return math.fsum(
            abs(c) * math.prod(lp_norm(GroupFunction(self.group, row), p) for row in atoms)
            for c, atoms in self.terms
        )

    def materialize(self) -> CubeFunction:
        idx = parameter_index(self.group, self.d)
        n = self.group.order
        out = np.zeros((n, n**self.d))
        for c, atoms in self.terms:
            prod = atoms[0][idx[0]]
            for e in range(1, 2**self.d):
                prod = prod * atoms[e][idx[e]]
            out += c * prod
        return CubeFunction(self.group, self.d, out)

    def to_dict(self) -> dict:
        labels = vertices(self.d)
        return {
            "orders": list(self.group.orders),
            "d": self.d,
            "terms": [
                {"coefficient": c, "atoms": {lab: row.tolist() for lab, row in zip(labels, atoms)}}
                for c, atoms in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, data) -> "DecomposableFunction":
        try:
            group = GroupSpec(tuple(data["orders"]))
            d = int(data["d"])
            terms = []
            for raw in data["terms"]:
                rows = [None] * 2**d
                for label, vals in raw["atoms"].items():
                    rows[vertex_code(label, d)] = np.asarray(vals, float)
                if any(r is None for r in rows):
                    raise InvalidInputError("a term is missing a vertex")
                terms.append((raw.get("coefficient", 1.0), np.array(rows)))
            return cls(group, d, terms)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"not a DecomposableFunction object: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def diagonal_translate(F: CubeFunction, t) -> CubeFunction:
    """``x -> F(x + t^Delta)``: the parameter ``x`` moves by ``t``."""
    shift = F.group.add_table[F.group.index(t)]
    return CubeFunction(F.group, F.d, F.values[shift])


def diagonal_project(F: CubeFunction) -> CubeFunction:
    """``pi F(x) = E_t F(x + t^Delta)``, the average over the ``x`` parameter."""
    avg = F.values.mean(axis=0, keepdims=True)
    return CubeFunction(F.group, F.d, np.broadcast_to(avg, F.values.shape))


def proj_conditional(H: CubeFunction) -> GroupFunction:
    """Conditional expectation onto the zero-vertex coordinate: ``E_t H(x, t)``."""
    return GroupFunction(H.group, H.flat.mean(axis=1))


def dd_product(a: DecomposableFunction, b: DecomposableFunction, project_b: bool = True,
               max_terms: int = MAX_TERMS, atol: float = 1e-10) -> DecomposableFunction:
    """Decomposition of ``F . pi G`` from decompositions of ``F`` and ``G``.

    ``pi G(x) = E_t sum_l b_l prod_eps g_{l,eps}(x_eps + t)``, so the product
    has one term ``a_j b_l / N`` with atoms ``f_{j,eps} g_{l,eps}(. + t)`` per
    ``(j, l, t)``.  With ``project_b=False``, ``G`` must already be invariant
    under diagonal translations and the result represents ``F . G``.
    """
    if a.group != b.group or a.d != b.d:
        raise DimensionError("decomposable functions live on different cubes")
    group = a.group
    n = group.order
    if not project_b:
        G = b.materialize()
        if not G.allclose(diagonal_project(G), atol=atol):
            raise InvalidInputError("second factor is not invariant under diagonal translations")
    count = len(a.terms) * len(b.terms) * n
    if count > max_terms:
        raise ResourceError(f"product would have {count} terms, above the cap {max_terms}")
    add = group.add_table
    terms = []
    for ca, fa in a.terms:
        for cb, fb in b.terms:
            moved = fb[:, add]  # moved[e, t, x] = g_e(x + t)
            for t in range(n):
                terms.append((ca * cb / n, fa * moved[:, t, :]))
    return DecomposableFunction(group, a.d, terms)
