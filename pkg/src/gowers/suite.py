"""Randomised verification suite: one entry per checked invariant.

Every entry draws its cases from its own child of a ``SeedSequence`` and
reports the worst slack, ``bound - value`` for inequalities and
``-|a - b|`` for identities.  An entry passes when that slack is at least
``-tolerance``.  Entries run on a thread pool; the report does not depend
on the number of threads.

Faults (``faults=``) corrupt a computed quantity before it is checked, so a
healthy harness must report the affected entries as failures:

``dual-function``
    adds ``1e-3`` to ``D_d f`` at the origin.
``spectrum``
    scales spectral norms by ``1 + 1e-6``.
``piece``
    perturbs one piece of a structured decomposition.
``partition``
    moves one element to another cell after the partition is computed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import AdDecomposition, AdTerm, ad_product, character_decomposition
from .cube import (
    CubeFunction,
    all_isometries,
    csg_check,
    cube_integral,
    face_lift,
    permute_family,
)
from .decomposable import (
    DecomposableFunction,
    dd_product,
    diagonal_project,
    diagonal_translate,
    proj_conditional,
)
from .dual import dual_norm, nnorm, thborne_decompose, thk_decompose
from .errors import InvalidParameterError
from .group import GroupFunction, GroupSpec, cyclic, inner, lp_norm, translate
from .norms import (
    convolution_sup_bound,
    cube_integral_bound,
    cubic_convolution,
    dual_function,
    gowers_norm,
    gowers_power,
)
from .regularity import (
    Partition,
    average_over_rectangles,
    partition_defect,
    regularize,
    uniformize,
    weak_to_strong_check,
)
from .signals import TorusFunctionSpec, gen_indicator, gen_polynomial_phase, gen_random, gen_torus_sequence
from .spectral import a2_norm, u2_dual_norm_spectral, u2_norm_spectral
from .structured import assemble_decomposition, structured_decompose, verify_main

__all__ = ["FAULTS", "LEVELS", "entry_names", "verify_suite"]

FAULTS = ("dual-function", "spectrum", "piece", "partition")
LEVELS = ("quick", "full")


@dataclass(frozen=True)
class _Entry:
    name: str
    module: str
    tolerance: float
    check: Callable  # (rng, cases, faults) -> list of slacks
    quick: int
    full: int


# -- random inputs --------------------------------------------------------------

def _group(rng, max_n=8, allow_product=True):
    if allow_product and rng.random() < 0.25:
        return GroupSpec((2, int(rng.integers(2, max(3, max_n // 2 + 1)))))
    return cyclic(int(rng.integers(2, max_n + 1)))


def _fn(rng, group, scale=1.0):
    return GroupFunction(group, scale * rng.standard_normal(group.order))


def _unit_rows(rng, count, n, p):
    rows = rng.standard_normal((count, n))
    rows /= (np.mean(np.abs(rows) ** p, axis=1) ** (1 / p))[:, None]
    return rows * rng.uniform(0.5, 1.0, (count, 1))


def _decomposable(rng, group, d, terms=2):
    """Random decomposable function with certificate value at most 1."""
    n, p = group.order, 2**d
    parts = []
    weights = rng.dirichlet(np.ones(terms))
    for w in weights:
        atoms = rng.uniform(-1.0, 1.0, (p, n))
        scale = math.prod(float(np.mean(np.abs(a) ** p) ** (1 / p)) for a in atoms)
        parts.append((float(rng.choice([-1, 1]) * w / max(scale, 1.0)), atoms))
    return DecomposableFunction(group, d, parts)


def _cube_fn(rng, group, d):
    n = group.order
    return CubeFunction(group, d, rng.standard_normal((n,) * (d + 1)))


def _ad(rng, group, d, terms=2):
    rows = 2**d - 1
    return AdDecomposition(
        group, d, [AdTerm(float(rng.uniform(-1, 1)), rng.uniform(-1, 1, (rows, group.order))) for _ in range(terms)]
    )


def _partition(rng, n, m):
    return Partition(cyclic(n), rng.integers(0, m, n))


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _dual_fn(f, d, faults):
    D = dual_function(f, d)
    if "dual-function" in faults:
        vals = D.values.copy()
        vals[0] += 1e-3
        D = GroupFunction(f.group, vals)
    return D


def _spectral(value, faults):
    return value * (1 + 1e-6) if "spectrum" in faults else value


def _move_one(P: Partition) -> Partition:
    labels = P.labels.copy()
    labels[0] = (labels[0] + 1) % max(P.m, 2)
    return Partition(P.group, labels)


_P_VALUES = (1.0, 1.5, 2.0, 3.0, 4.0, math.inf)


# -- group_core -----------------------------------------------------------------

def _lp_norm_axioms(rng, cases, faults):
    out = []
    for _ in range(cases):
        g = _group(rng, 16)
        f, h = _fn(rng, g), _fn(rng, g)
        c = float(rng.uniform(-3, 3))
        for p in _P_VALUES:
            out.append(lp_norm(f, p) + lp_norm(h, p) - lp_norm(f + h, p))
            out.append(-abs(lp_norm(f * c, p) - abs(c) * lp_norm(f, p)))
    return out


def _holder(rng, cases, faults):
    out = []
    for _ in range(cases):
        g = _group(rng, 16)
        f, h = _fn(rng, g), _fn(rng, g)
        p = float(rng.uniform(1.05, 6.0))
        q = p / (p - 1)
        out.append(lp_norm(f, p) * lp_norm(h, q) - abs(inner(f, h)))
        out.append(lp_norm(f, 1) * lp_norm(h, math.inf) - abs(inner(f, h)))
    return out


def _lp_monotone(rng, cases, faults):
    out = []
    for _ in range(cases):
        f = _fn(rng, _group(rng, 16))
        ps = np.sort(rng.uniform(1.0, 8.0, 4))
        norms = [lp_norm(f, float(p)) for p in ps] + [lp_norm(f, math.inf)]
        out.extend(b - a for a, b in zip(norms, norms[1:]))
    return out


def _translate_lp(rng, cases, faults):
    out = []
    for _ in range(cases):
        g = _group(rng, 16)
        f = _fn(rng, g)
        t = int(rng.integers(g.order))
        out.extend(-abs(lp_norm(translate(f, t), p) - lp_norm(f, p)) for p in _P_VALUES)
    return out


# -- cube_geometry --------------------------------------------------------------

def _face_projection(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 3))
        g = cyclic(int(rng.integers(2, 6)))
        F = CubeFunction.from_vertex_functions(list(rng.standard_normal((2**d, g.order))))
        for alpha in (0, 1):
            out.append(-abs(face_lift(F, alpha).integral() - F.integral()))
    return out


def _symmetry(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 4))
        g = cyclic(int(rng.integers(2, 6 if d < 3 else 5)))
        fam = [GroupFunction(g, row) for row in rng.standard_normal((2**d, g.order))]
        base = cube_integral(fam)
        isos = all_isometries(d)
        for k in rng.choice(len(isos), min(len(isos), 6), replace=False):
            out.append(-abs(cube_integral(permute_family(fam, isos[int(k)])) - base))
    return out


def _zero_vertex(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(2, 4))
        g = _group(rng, 6)
        rest = [GroupFunction(g, row) for row in rng.standard_normal((2**d - 1, g.order))]
        lhs = cube_integral([GroupFunction.constant(g)] + rest)
        out.append(-abs(lhs - cubic_convolution(rest).mean()))
    return out


# -- gowers_norms ---------------------------------------------------------------

def _method_agreement(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 5))
        n = int(rng.integers(2, 17))
        f = _fn(rng, cyclic(n))
        a = gowers_norm(f, d, method="closed_formula")
        b = gowers_norm(f, d, method="inductive")
        out.append(-_rel(a, b))
    return out


def _translation_invariance(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 4))
        g = _group(rng, 10)
        f = _fn(rng, g)
        t = int(rng.integers(g.order))
        out.append(-abs(gowers_norm(translate(f, t), d) - gowers_norm(f, d)))
    return out


def _monotone_in_d(rng, cases, faults):
    out = []
    for _ in range(cases):
        f = _fn(rng, _group(rng, 10))
        us = [gowers_norm(f, d) for d in range(1, 5)]
        out.extend(b - a for a, b in zip(us, us[1:]))
    return out


def _duality_identity(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 5))
        f = _fn(rng, _group(rng, 8))
        out.append(-_rel(inner(_dual_fn(f, d, faults), f), gowers_power(f, d)))
    return out


def _csg(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 4))
        g = _group(rng, 8)
        lhs, rhs = csg_check([GroupFunction(g, r) for r in rng.standard_normal((2**d, g.order))])
        out.append(rhs - lhs)
    return out


def _distinguished_vertex(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 4))
        g = _group(rng, 8)
        fam = [GroupFunction(g, r) for r in rng.standard_normal((2**d, g.order))]
        alpha = int(rng.integers(2**d))
        out.append(cube_integral_bound(fam, alpha) - abs(cube_integral(fam)))
    return out


def _dual_sup(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 5))
        f = _fn(rng, _group(rng, 8))
        D = _dual_fn(f, d, faults)
        out.append(lp_norm(f, 2 ** (d - 1)) ** (2**d - 1) - lp_norm(D, math.inf))
        if d >= 2:
            fam = [GroupFunction(f.group, r) for r in rng.standard_normal((2**d - 1, f.group.order))]
            out.append(convolution_sup_bound(fam) - lp_norm(cubic_convolution(fam), math.inf))
    return out


# -- spectral_d2 ----------------------------------------------------------------

def _parseval(rng, cases, faults):
    out = []
    for _ in range(cases):
        f = _fn(rng, cyclic(int(rng.choice([4, 8, 16, 32, 64]))))
        out.append(-abs(gowers_norm(f, 2) - _spectral(u2_norm_spectral(f), faults)))
    return out


def _spectral_dual(rng, cases, faults):
    out = []
    for _ in range(cases):
        g = _fn(rng, _group(rng, 8))
        out.append(-abs(dual_norm(g, 2).value - _spectral(u2_dual_norm_spectral(g), faults)))
    return out


def _a2_submultiplicative(rng, cases, faults):
    out = []
    for _ in range(cases):
        g = _group(rng, 16)
        f, h = _fn(rng, g), _fn(rng, g)
        out.append(a2_norm(f) * a2_norm(h) - a2_norm(f * h))
    return out


def _character_certificate(rng, cases, faults):
    out = []
    for _ in range(cases):
        g = _fn(rng, _group(rng, 12))
        dec = character_decomposition(g)
        out.append(-abs(dec.value - _spectral(a2_norm(g), faults)))
        out.append(-float(np.max(np.abs(dec.materialize().values - g.values))))
    return out


# -- anti_uniform ---------------------------------------------------------------

def _dual_of_dual_d2(rng, cases, faults):
    out = []
    for _ in range(cases):
        f = _fn(rng, _group(rng, 16))
        target = gowers_norm(f, 2) ** 3
        D = _dual_fn(f, 2, faults)
        out.append(-abs(dual_norm(D, 2).value - target))
        out.append(-abs(_spectral(u2_dual_norm_spectral(D), faults) - target))
    return out


def _dual_of_dual_d3(rng, cases, faults):
    out = []
    for _ in range(cases):
        f = _fn(rng, _group(rng, 8))
        target = gowers_norm(f, 3) ** 7
        res = dual_norm(_dual_fn(f, 3, faults), 3)
        out.append(-abs(res.value - target))
        out.append(lp_norm(f, 4) ** 7 - target)
    return out


def _dual_antitone(rng, cases, faults):
    out = []
    for _ in range(cases):
        g = _fn(rng, _group(rng, 6))
        out.append(dual_norm(g, 2).value - dual_norm(g, 3).value)
    return out


def _regularised_axioms(rng, cases, faults):
    out = []
    for _ in range(cases):
        g = _group(rng, 8)
        d = int(rng.integers(1, 3))
        k = d + int(rng.integers(0, 3)) if d > 1 else int(rng.integers(1, 3))
        delta = float(rng.uniform(0.1, 1.0))
        f, h = _fn(rng, g), _fn(rng, g)
        c = float(rng.uniform(-3, 3))
        nf = nnorm(f, d, k, delta)
        out.append(-abs(nnorm(f * c, d, k, delta) - abs(c) * nf) / max(1.0, abs(c) * nf))
        out.append(nf + nnorm(h, d, k, delta) - nnorm(f + h, d, k, delta))
    return out


def _unit_dual(rng, group):
    g = _fn(rng, group)
    return g * (1.0 / u2_dual_norm_spectral(g))


def _thk_identity(rng, cases, faults):
    out = []
    for _ in range(cases):
        g = _unit_dual(rng, _group(rng, 12))
        k = int(rng.integers(2, 4))
        delta = float(rng.choice([0.1, 0.3]))
        r = thk_decompose(g, 2, k, delta)
        fp = r.f_prime
        u = gowers_norm(fp, 2)
        recon = r.c * (u ** (2**k - 4) * dual_function(fp, 2).values + delta ** (2**k) * fp.values ** (2**k - 1))
        out.append(-abs(math.sqrt(float(np.mean((recon - g.values) ** 2))) - r.residual))
    return out


def _thk_bounds(rng, cases, faults):
    out = []
    for _ in range(cases):
        g = _unit_dual(rng, _group(rng, 16))
        k = int(rng.integers(2, 4))
        delta = float(rng.choice([0.1, 0.3]))
        b = thk_decompose(g, 2, k, delta).bounds()
        out += [1 - b["f_u"], 1 / delta - b["f_lp"], delta - b["h_lq"], -b["residual"]]
    return out


def _thborne_bounds(rng, cases, faults):
    out = []
    for _ in range(cases):
        g = _unit_dual(rng, _group(rng, 16))
        delta = float(rng.choice([0.1, 0.3]))
        b = thborne_decompose(g, 2, delta).bounds()
        out += [1 - b["f_u"], 1 / delta - b["f_sup"], delta - b["h_l1"], -b["residual"]]
    return out


# -- fourier_algebra ------------------------------------------------------------

def _certificate_sup(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(2, 4))
        dec = _ad(rng, _group(rng, 8), d, int(rng.integers(1, 4)))
        out.append(dec.value - lp_norm(dec.materialize(), math.inf))
    return out


def _certificate_dual(rng, cases, faults):
    out = []
    for _ in range(cases):
        dec = _ad(rng, _group(rng, 8), 2, int(rng.integers(1, 3)))
        out.append(dec.value - dual_norm(dec.materialize(), 2).value)
    return out


def _ad_product(rng, cases, faults):
    out = []
    for _ in range(cases):
        g = _group(rng, 4)
        a, b, c = (_ad(rng, g, 2, 1) for _ in range(3))
        ab = ad_product(a, b)
        out.append(-float(np.max(np.abs(ab.materialize().values - (a.materialize() * b.materialize()).values))))
        out.append(a.value * b.value - ab.value)
        left = ad_product(ab, c).materialize().values
        right = ad_product(a, ad_product(b, c)).materialize().values
        out.append(-float(np.max(np.abs(left - right))))
    return out


# -- decomposable ---------------------------------------------------------------

def _projection_contraction(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 3))
        F = _cube_fn(rng, _group(rng, 6, allow_product=False), d)
        P = diagonal_project(F)
        out.append(F.norm(2) - P.norm(2))
        out.append(-float(np.max(np.abs(diagonal_project(P).values - P.values))))
        t = int(rng.integers(F.group.order))
        out.append(-float(np.max(np.abs(diagonal_translate(P, t).values - P.values))))
    return out


def _projection_sup(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 3))
        F = _decomposable(rng, _group(rng, 6, allow_product=False), d, int(rng.integers(1, 4)))
        out.append(F.value - float(np.max(np.abs(diagonal_project(F.materialize()).values))))
    return out


def _proj_cauchy_schwarz(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 3))
        g = _group(rng, 6, allow_product=False)
        G, F = _cube_fn(rng, g, d), _cube_fn(rng, g, d)
        lhs = np.abs(proj_conditional(G * F).values)
        rhs = np.sqrt(proj_conditional(G * G).values * proj_conditional(F * F).values)
        out.append(float(np.min(rhs - lhs)))
    return out


def _dd_product(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 3))
        g = _group(rng, 5, allow_product=False)
        a, b = _decomposable(rng, g, d), _decomposable(rng, g, d)
        prod = dd_product(a, b)
        expect = a.materialize().values * diagonal_project(b.materialize()).values
        out.append(-float(np.max(np.abs(prod.materialize().values - expect))))
        out.append(a.value * b.value - prod.value)
    return out


# -- regularity -----------------------------------------------------------------

def _energy(F):
    return float(np.mean(F.values**2))


def _refinement_monotone(rng, cases, faults):
    out = []
    for _ in range(cases):
        n = int(rng.integers(3, 9))
        d = int(rng.integers(1, 3))
        F = _cube_fn(rng, cyclic(n), d)
        P = _partition(rng, n, 2)
        Q = P.meet(_partition(rng, n, 3))
        out.append(_energy(average_over_rectangles(F, Q)[0]) - _energy(average_over_rectangles(F, P)[0]))
    return out


def _energy_increment(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 3))
        F = _decomposable(rng, cyclic(int(rng.integers(4, 9))), d).materialize()
        res = regularize(F, float(rng.uniform(0.02, 0.2)))
        for h in res.history:
            if h.get("accepted"):
                out.append(h["increment"] - h["defect"] ** 2)
    return out


def _own_rectangles(rng, cases, faults):
    out = []
    for _ in range(cases):
        n = int(rng.integers(3, 9))
        d = int(rng.integers(1, 3))
        F = _cube_fn(rng, cyclic(n), d)
        P = _partition(rng, n, int(rng.integers(1, 4)))
        F_P, _ = average_over_rectangles(F, P)
        Q = _move_one(P) if "partition" in faults else P
        out.append(-partition_defect(F, F_P, Q))
    return out


def _uniformization(rng, cases, faults):
    out = []
    for _ in range(cases):
        n = int(rng.integers(2, 17))
        S = _partition(rng, n, int(rng.integers(1, n + 1)))
        m = int(rng.integers(max(S.m, 1), n + 1))
        U = uniformize(S, m)
        if "partition" in faults:
            U = _move_one(U)
        lo, hi = n // U.m, -(-n // U.m)
        out.append(0.0 if np.all((U.sizes >= lo) & (U.sizes <= hi)) else -1.0)
    return out


def _weak_to_strong(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 3))
        F = _decomposable(rng, cyclic(8), d)
        theta = float(rng.choice([0.05, 0.1, 0.2]))
        r = weak_to_strong_check(F, theta, seed=int(rng.integers(2**31)))
        energy = float(np.mean(F.materialize().values ** 2))
        out += [r["bound"] - r["lhs"], theta - r["defect"], math.floor(energy / theta**2) - r["rounds"]]
        out.append(r["pairing_bound"] - r["pairing_worst"])
    return out


# -- structured_decomposition ---------------------------------------------------

def _unit_family(rng, n, d):
    return list(_unit_rows(rng, 2 ** (d + 1) - 1, n, 2**d))


def _structured_verified(rng, cases, faults):
    out = []
    for _ in range(cases):
        d = int(rng.integers(1, 3))
        delta = 0.3 if d == 1 else 0.5
        fs = _unit_family(rng, 8, d)
        M = structured_decompose(fs, delta)
        if "piece" in faults:
            M = M.with_perturbation(0, 1, M.partition.cells[0][0], 1e-3)
        r = verify_main(M, fs, delta)
        out.extend(item["slack"] for item in r["items"].values())
    return out


def _coarse(rng):
    d = int(rng.integers(1, 3))
    n = int(rng.integers(4, 7))
    fs = _unit_family(rng, n, d)
    P = _partition(rng, n, int(rng.integers(1, 4)))
    M = assemble_decomposition(fs, P)
    f0 = [fs[2 * e - 1] for e in range(1, 2**d)]
    f1 = [fs[2 * e] for e in range(2**d)]
    G = CubeFunction.from_vertex_functions([np.ones(n)] + f0)
    F = diagonal_project(CubeFunction.from_vertex_functions(f1))
    return fs, M, G, F, average_over_rectangles(F, P)[0]


def _envelope(rng, cases, faults):
    out = []
    for _ in range(cases):
        _, M, G, F, F_P = _coarse(rng)
        for t in range(G.group.order):
            Gt = diagonal_translate(G, t)
            env = np.sqrt(proj_conditional(Gt * Gt).values)
            err = np.abs(proj_conditional(Gt * (F - F_P)).values)
            out.append(float(np.min(env * M.rho.values - err)))
            out.append(float(np.min(1.0 - env)))
    return out


def _rho_chain(rng, cases, faults):
    out = []
    for _ in range(cases):
        _, M, _, F, F_P = _coarse(rng)
        out.append((F - F_P).norm(2) - M.rho.norm(2))
    return out


def _identity(rng, cases, faults):
    out = []
    for _ in range(cases):
        _, M, G, _, F_P = _coarse(rng)
        dense = M.piece_values()
        n = G.group.order
        for t in range(n):
            main = proj_conditional(diagonal_translate(G, t) * F_P).values
            out.append(-float(np.max(np.abs(main - dense[M.partition.labels, t, np.arange(n)]))))
    return out


def _remark_fidelity(rng, cases, faults):
    out = []
    for _ in range(cases):
        _, M, G, _, _ = _coarse(rng)
        g, d = M.group, M.d
        bound = M.m ** (2**d - 1)
        for i in range(M.m):
            for t in range(g.order):
                piece = M.piece(i, t)
                out.append(bound - len(piece))
                for term in piece.terms:
                    out.append(1.0 - abs(term.coefficient))
                    out.extend(1.0 - lp_norm(GroupFunction(g, row), 2 ** (d - 1)) for row in term.atoms)
    return out


# -- signals --------------------------------------------------------------------

def _embedding(rng, cases, faults):
    from fractions import Fraction

    out = []
    for _ in range(cases):
        n = int(rng.integers(2, 33))
        p = int(rng.integers(0, n))
        top = int(rng.integers(1, 6))
        spec = TorusFunctionSpec(cos=tuple(rng.uniform(-1, 1, top)), sin=tuple(rng.uniform(-1, 1, top)))
        h, bound = gen_torus_sequence(spec, Fraction(p, n), n)
        out.append(bound - _spectral(u2_dual_norm_spectral(h), faults))
        out.append(-float(np.max(np.abs(h.values - spec((p * np.arange(n) % n) / n)))))
    return out


def _generators_deterministic(rng, cases, faults):
    out = []
    for _ in range(cases):
        g = _group(rng, 16)
        seed = int(rng.integers(2**31))
        pairs = [
            (gen_random(g, seed), gen_random(g, seed)),
            (gen_random(g, seed, 2.0, 1), gen_random(g, seed, 2.0, 1)),
            (gen_indicator(g, [0]), gen_indicator(g, [0])),
        ]
        coeffs = [int(c) for c in rng.integers(-50, 50, 3)]
        pairs.append((gen_polynomial_phase(g.order, coeffs), gen_polynomial_phase(g.order, coeffs)))
        out.extend(0.0 if np.array_equal(a.values, b.values) else -1.0 for a, b in pairs)
    return out


_ENTRIES = [
    _Entry("lp_norm_axioms", "group_core", 1e-12, _lp_norm_axioms, 20, 100),
    _Entry("holder", "group_core", 1e-12, _holder, 20, 200),
    _Entry("lp_monotone_in_p", "group_core", 1e-12, _lp_monotone, 20, 200),
    _Entry("translate_preserves_lp", "group_core", 0.0, _translate_lp, 20, 200),
    _Entry("face_projection_average", "cube_geometry", 1e-12, _face_projection, 10, 60),
    _Entry("isometry_invariance", "cube_geometry", 1e-12, _symmetry, 10, 60),
    _Entry("zero_vertex_convolution", "cube_geometry", 1e-12, _zero_vertex, 10, 60),
    _Entry("method_agreement", "gowers_norms", 1e-10, _method_agreement, 30, 200),
    _Entry("translation_invariance", "gowers_norms", 1e-12, _translation_invariance, 20, 200),
    _Entry("monotone_in_d", "gowers_norms", 1e-12, _monotone_in_d, 20, 200),
    _Entry("duality_identity", "gowers_norms", 1e-10, _duality_identity, 20, 200),
    _Entry("csg_inequality", "gowers_norms", 1e-10, _csg, 30, 300),
    _Entry("distinguished_vertex_bound", "gowers_norms", 1e-10, _distinguished_vertex, 30, 300),
    _Entry("dual_function_sup_bound", "gowers_norms", 1e-10, _dual_sup, 30, 300),
    _Entry("parseval", "spectral_d2", 1e-10, _parseval, 50, 500),
    _Entry("spectral_dual_vs_ascent", "spectral_d2", 1e-6, _spectral_dual, 5, 40),
    _Entry("a2_submultiplicative", "spectral_d2", 1e-10, _a2_submultiplicative, 30, 200),
    _Entry("character_certificate", "spectral_d2", 1e-10, _character_certificate, 20, 100),
    _Entry("dual_norm_of_dual_function_d2", "anti_uniform", 1e-6, _dual_of_dual_d2, 5, 100),
    _Entry("dual_norm_of_dual_function_d3", "anti_uniform", 1e-4, _dual_of_dual_d3, 5, 40),
    _Entry("dual_norm_antitone", "anti_uniform", 1e-6, _dual_antitone, 5, 40),
    _Entry("regularised_norm_axioms", "anti_uniform", 1e-12, _regularised_axioms, 20, 200),
    _Entry("thk_residual_identity", "anti_uniform", 1e-12, _thk_identity, 5, 50),
    _Entry("thk_bounds", "anti_uniform", 1e-5, _thk_bounds, 5, 50),
    _Entry("thborne_bounds", "anti_uniform", 1e-5, _thborne_bounds, 5, 50),
    _Entry("certificate_sup_bound", "fourier_algebra", 1e-10, _certificate_sup, 20, 200),
    _Entry("certificate_dual_bound", "fourier_algebra", 1e-6, _certificate_dual, 5, 40),
    _Entry("ad_product", "fourier_algebra", 1e-8, _ad_product, 3, 30),
    _Entry("projection_contraction", "decomposable", 1e-12, _projection_contraction, 10, 100),
    _Entry("projection_sup_bound", "decomposable", 1e-10, _projection_sup, 10, 100),
    _Entry("proj_cauchy_schwarz", "decomposable", 1e-12, _proj_cauchy_schwarz, 10, 100),
    _Entry("dd_product", "decomposable", 1e-8, _dd_product, 5, 50),
    _Entry("refinement_monotone", "regularity", 1e-12, _refinement_monotone, 10, 100),
    _Entry("energy_increment", "regularity", 1e-9, _energy_increment, 3, 20),
    _Entry("own_rectangles_zero", "regularity", 1e-12, _own_rectangles, 10, 100),
    _Entry("uniformization", "regularity", 0.0, _uniformization, 20, 200),
    _Entry("weak_to_strong", "regularity", 1e-10, _weak_to_strong, 4, 20),
    _Entry("structured_verified", "structured_decomposition", 1e-8, _structured_verified, 2, 10),
    _Entry("cauchy_schwarz_envelope", "structured_decomposition", 1e-12, _envelope, 5, 40),
    _Entry("rho_norm_chain", "structured_decomposition", 1e-10, _rho_chain, 5, 40),
    _Entry("rectangle_identity", "structured_decomposition", 1e-10, _identity, 5, 40),
    _Entry("piece_fidelity", "structured_decomposition", 1e-12, _remark_fidelity, 5, 40),
    _Entry("embedding_bound", "signals", 1e-10, _embedding, 20, 200),
    _Entry("generators_deterministic", "signals", 0.0, _generators_deterministic, 10, 50),
]


def entry_names() -> list[str]:
    return [e.name for e in _ENTRIES]


def _run(entry: _Entry, seq: np.random.SeedSequence, level: str, faults: frozenset) -> dict:
    cases = entry.quick if level == "quick" else entry.full
    slacks = entry.check(np.random.default_rng(seq), cases, faults)
    worst = float(min(slacks)) if slacks else 0.0
    return {
        "name": entry.name,
        "module": entry.module,
        "cases": cases,
        "checks": len(slacks),
        "worst_slack": worst,
        "tolerance": entry.tolerance,
        "ok": bool(worst >= -entry.tolerance),
    }


def verify_suite(level: str = "quick", seed: int = 0, threads: int = 1, faults=(), only=None) -> dict:
    """Run every entry (or those named in ``only``) and collect a report.

    Failures are entries with ``ok`` false; nothing is raised for them.
    """
    if level not in LEVELS:
        raise InvalidParameterError(f"level must be one of {LEVELS}, got {level!r}")
    faults = frozenset(faults)
    unknown = faults - set(FAULTS)
    if unknown:
        raise InvalidParameterError(f"unknown faults {sorted(unknown)}; choose from {FAULTS}")
    if threads < 1:
        raise InvalidParameterError("threads must be at least 1")
    seqs = np.random.SeedSequence(seed).spawn(len(_ENTRIES))
    jobs = [(e, s) for e, s in zip(_ENTRIES, seqs) if only is None or e.name in only]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        entries = list(pool.map(lambda job: _run(job[0], job[1], level, faults), jobs))
    failed = [e["name"] for e in entries if not e["ok"]]
    return {
        "level": level,
        "seed": seed,
        "faults": sorted(faults),
        "entries": entries,
        "failed": failed,
        "ok": not failed,
    }
