"""Certificates for the order-``d`` Fourier algebra ``A(d)``.

A certificate is a finite sum ``g = sum_j a_j D_d(f_{j,eps} : eps != 0)``;
its value ``sum_j |a_j| prod_eps ||f_{j,eps}||_{2^(d-1)}`` bounds the
``A(d)`` norm of ``g`` from above.  Atoms may be complex: the exact ``A(2)``
certificate is built from characters, and a real atom pairing ``xi`` with
``-xi`` necessarily costs a factor ``sqrt(2)`` more.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .cube import check_resources, family_array, nonzero_vertices, shift_table, vertex_code
from .errors import DimensionError, InvalidInputError, ResourceError
from .group import GroupFunction, GroupSpec, inner, lp_norm
from .norms import gowers_norm
from .spectral import character, dft

__all__ = [
    "AdTerm",
    "AdDecomposition",
    "ad_certificate_value",
    "character_decomposition",
    "real_character_decomposition",
    "ad_product",
    "ad_pairing_bound_check",
    "MAX_TERMS",
]

MAX_TERMS = 10**6


def _lp_abs(group, row, p):
    return lp_norm(GroupFunction(group, np.abs(row)), p)


@dataclass(frozen=True, eq=False)
class AdTerm:
    """``coefficient * D_d(atoms)``; ``atoms`` has one row per nonzero vertex."""

    coefficient: complex
    atoms: np.ndarray = field(repr=False)

    def cost(self, group: GroupSpec, d: int) -> float:
        p = 2 ** (d - 1)
        return abs(self.coefficient) * math.prod(_lp_abs(group, row, p) for row in self.atoms)


@dataclass(eq=False)
class AdDecomposition:
    group: GroupSpec
    d: int
    terms: list = field(default_factory=list)

    def __post_init__(self):
        check_resources(self.group, self.d)
        shape = (2**self.d - 1, self.group.order)
        for t in self.terms:
            if t.atoms.shape != shape:
                raise DimensionError(f"term atoms have shape {t.atoms.shape}, expected {shape}")

    @classmethod
    def single(cls, fs, coefficient=1.0) -> "AdDecomposition":
        group, d, arr = family_array(fs, nonzero=True)
        return cls(group, d, [AdTerm(coefficient, arr)])

    @property
    def value(self) -> float:
        return ad_certificate_value(self)

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "AdDecomposition") -> "AdDecomposition":
        self._check_compatible(other)
        return AdDecomposition(self.group, self.d, self.terms + other.terms)

    def scaled(self, c) -> "AdDecomposition":
        return AdDecomposition(self.group, self.d, [AdTerm(c * t.coefficient, t.atoms) for t in self.terms])

    def _check_compatible(self, other):
        if other.group != self.group or other.d != self.d:
            raise DimensionError("decompositions live on different groups or levels")

    def materialize_complex(self) -> np.ndarray:
        out = np.zeros(self.group.order, dtype=complex)
        add = self.group.add_table
        shifts = shift_table(self.group, self.d)[1:]
        for t in self.terms:
            out += t.coefficient * _backend.cubic_convolution(t.atoms, add, shifts)
        return out

    def materialize(self, imag_tol: float = 1e-9) -> GroupFunction:
        """The represented real function; raises if it is not real."""
        vals = self.materialize_complex()
        scale = max(1.0, float(np.abs(vals).max(initial=0.0)))
        if np.abs(vals.imag).max(initial=0.0) > imag_tol * scale:
            raise InvalidInputError("decomposition does not represent a real function")
        return GroupFunction(self.group, vals.real)

    def to_dict(self) -> dict:
        labels = nonzero_vertices(self.d)
        terms = []
        for t in self.terms:
            c = complex(t.coefficient)
            atoms = {}
            for label, row in zip(labels, t.atoms):
                if np.iscomplexobj(row):
                    atoms[label] = {"re": row.real.tolist(), "im": row.imag.tolist()}
                else:
                    atoms[label] = row.tolist()
            terms.append({"coefficient": [c.real, c.imag], "atoms": atoms})
        return {"orders": list(self.group.orders), "d": self.d, "terms": terms}

    @classmethod
    def from_dict(cls, data) -> "AdDecomposition":
        try:
            group = GroupSpec(tuple(data["orders"]))
            d = int(data["d"])
            terms = []
            for raw in data["terms"]:
                re, im = raw.get("coefficient", [1.0, 0.0])
                rows = [None] * (2**d - 1)
                for label, vals in raw["atoms"].items():
                    if isinstance(vals, dict):
                        row = np.asarray(vals["re"], float) + 1j * np.asarray(vals["im"], float)
                    else:
                        row = np.asarray(vals, float)
                    rows[vertex_code(label, d) - 1] = row
                if any(r is None for r in rows):
                    raise InvalidInputError("a term is missing a vertex")
                dtype = complex if any(np.iscomplexobj(r) for r in rows) else float
                coef = complex(re, im) if im else float(re)
                terms.append(AdTerm(coef, np.array(rows, dtype=dtype)))
            return cls(group, d, terms)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"not an AdDecomposition object: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "AdDecomposition":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"invalid JSON: {exc}") from exc


def ad_certificate_value(dec: AdDecomposition) -> float:
    """``sum_j |a_j| prod_eps ||f_{j,eps}||_{2^(d-1)}``."""
    return math.fsum(t.cost(dec.group, dec.d) for t in dec.terms)


def _character_signs(d):
    # D_d of xi^{s_eps} with s_eps = (-1)^(|eps|+1) is xi itself
    return [(-1) ** (bin(e).count("1") + 1) for e in range(1, 2**d)]


def character_decomposition(g: GroupFunction, d: int = 2, tol: float = 0.0) -> AdDecomposition:
    """One term ``g_hat(xi) D_d(xi^{+-1})`` per frequency; value ``sum |g_hat|``.

    Frequencies with ``|g_hat(xi)| <= tol`` are dropped.
    """
    check_resources(g.group, d)
    coeffs = dft(g).coefficients
    signs = _character_signs(d)
    terms = []
    for xi in range(g.group.order):
        c = coeffs[xi]
        if abs(c) <= tol:
            continue
        chi = character(g.group, xi)
        atoms = np.array([chi if s > 0 else np.conj(chi) for s in signs])
        terms.append(AdTerm(complex(c), atoms))
    return AdDecomposition(g.group, d, terms)


def real_character_decomposition(g: GroupFunction) -> AdDecomposition:
    """A ``d = 2`` certificate with real cosine atoms.

    Each conjugate pair contributes ``2|g_hat(xi)| cos(xi . x + theta)``,
    written as ``2 sqrt(2) |g_hat(xi)| D(sqrt2 cos(. + theta), sqrt2 cos, sqrt2 cos)``.
    Its value is ``sum |g_hat(xi)|`` over self-conjugate ``xi`` plus
    ``sqrt(2) (|g_hat(xi)| + |g_hat(-xi)|)`` per pair.
    """
    group = g.group
    coeffs = dft(g).coefficients
    neg = group.neg_table
    terms = []
    for xi in range(group.order):
        c = coeffs[xi]
        if c == 0:
            continue
        j = int(neg[xi])
        chi = character(group, xi)
        if j == xi:
            atom = chi.real
            terms.append(AdTerm(float(c.real), np.array([atom, atom, atom])))
        elif xi < j:
            phase = np.angle(c)
            r = math.sqrt(2.0)
            cos = r * chi.real
            shifted = r * (chi * np.exp(1j * phase)).real
            terms.append(AdTerm(2 * r * abs(c), np.array([shifted, cos, cos])))
    return AdDecomposition(group, 2, terms)


def ad_product(a: AdDecomposition, b: AdDecomposition, max_terms: int = MAX_TERMS) -> AdDecomposition:
    """Certificate for the pointwise product of two represented functions.

    Uses ``D(f) D(f') = E_u D(f_eps . f'_eps(. + eps . u))``: one term per
    pair of terms and per ``u in Z^d``, weighted ``1/N^d``.
    """
    a._check_compatible(b)
    group, d = a.group, a.d
    n = group.order
    count = len(a.terms) * len(b.terms) * n**d
    if count > max_terms:
        raise ResourceError(f"product would have {count} terms, above the cap {max_terms}")
    shifts = shift_table(group, d)[1:]  # (2^d - 1, N^d)
    add = group.add_table
    terms = []
    for ta in a.terms:
        for tb in b.terms:
            coef = ta.coefficient * tb.coefficient / n**d
            # moved[e, U, x] = f'_e(x + eps_e . u_U)
            moved = np.stack([tb.atoms[e][add[shifts[e]]] for e in range(len(shifts))])
            for u in range(n**d):
                terms.append(AdTerm(coef, ta.atoms * moved[:, u, :]))
    return AdDecomposition(group, d, terms)


def ad_pairing_bound_check(dec: AdDecomposition, h: GroupFunction) -> dict:
    """``|<g; h>| <= value(dec) ||h||_{U(d)}`` for the represented ``g``."""
    if h.group != dec.group:
        raise DimensionError("function and decomposition live on different groups")
    lhs = abs(inner(dec.materialize(), h))
    rhs = dec.value * gowers_norm(h, dec.d)
    return {"lhs": lhs, "rhs": rhs, "ok": lhs <= rhs + 1e-10}
