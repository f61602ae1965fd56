"""Anti-uniform norms and the regularised decompositions ``g = D_d f + h``.

Every solver here maximises a ratio ``<g; f> / N(f)`` for a norm ``N`` on
the unit sphere of ``N``.  On that sphere the ascent direction is
``g - R grad N(f)``, and at the maximiser ``g = R grad N(f)``, which is the
identity the decompositions are read off from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ._summation import fmean
from .cube import check_resources, convolve_rows
from .errors import InvalidParameterError
from .group import GroupFunction, inner, lp_norm
from .norms import gowers_norm
from .spectral import u2_dual_norm_spectral

__all__ = [
    "DualNormOptions",
    "DualNormResult",
    "ThkResult",
    "dual_norm",
    "nnorm",
    "thk_decompose",
    "thborne_decompose",
    "convex_hull_probe",
]


@dataclass(frozen=True)
class DualNormOptions:
    restarts: int = 8
    tol: float = 1e-9
    max_iter: int = 1000
    seed: int = 0


@dataclass
class DualNormResult:
    """Outcome of :func:`dual_norm`.

    ``value`` is ``<g; witness>`` for a witness of unit ``U(d)`` norm, hence
    always a lower bound; ``certificate_upper`` is a rigorous upper bound.
    """

    value: float
    witness: GroupFunction | None
    d: int
    certificate_upper: float | None = None
    iterations: int = 0
    stationarity_residual: float = 0.0
    converged: bool = True
    is_lower_bound: bool = True

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "d": self.d,
            "certificate_upper": self.certificate_upper,
            "iterations": self.iterations,
            "stationarity_residual": self.stationarity_residual,
            "converged": self.converged,
            "is_lower_bound": self.is_lower_bound,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


@dataclass
class ThkResult:
    """``g = D_d f + h`` together with the quantities the bounds refer to."""

    f: GroupFunction
    h: GroupFunction
    d: int
    k: int | None
    delta: float
    c: float
    residual: float
    f_prime: GroupFunction | None = None
    iterations: int = 0
    converged: bool = True
    history: list = field(default_factory=list)

    def bounds(self) -> dict:
        """Norms appearing in the decomposition statements."""
        out = {
            "f_u": gowers_norm(self.f, self.d),
            "f_sup": lp_norm(self.f, math.inf),
            "h_l1": lp_norm(self.h, 1),
            "residual": self.residual,
        }
        if self.k is not None:
            p = 2.0**self.k
            out["f_lp"] = lp_norm(self.f, p)
            out["h_lq"] = lp_norm(self.h, p / (p - 1.0)) if p > 1 else lp_norm(self.h, math.inf)
        return out

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "k": self.k,
            "delta": self.delta,
            "c": self.c,
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "bounds": self.bounds(),
            "f": self.f.to_dict(),
            "h": self.h.to_dict(),
            "history": self.history,
        }


# -- norms on the sphere ------------------------------------------------------

class _UNorm:
    """``||.||_{U(d)}`` and its gradient at points of its unit sphere."""

    def __init__(self, group, d):
        self.group, self.d = group, d

    def dual(self, v):
        return convolve_rows(self.group, self.d, np.broadcast_to(v, (2**self.d - 1, v.size)))

    def norm(self, v):
        power = fmean(v * self.dual(v))
        return max(power, 0.0) ** (1.0 / 2**self.d)

    def grad_unit(self, v):
        return self.dual(v)


class _RegularisedNorm(_UNorm):
    """``(||f||_U^{2^k} + delta^{2^k} ||f||_{2^k}^{2^k})^{1/2^k}`` and its ``k = d-1`` variant."""

    def __init__(self, group, d, k, delta):
        super().__init__(group, d)
        self.k, self.delta = k, float(delta)
        self.variant = k == d - 1
        self.q = 2**d if self.variant else 2**k
        self.p = 2 ** (d - 1) if self.variant else 2**k

    def norm(self, v):
        a = super().norm(v)
        b = self.delta * lp_norm(GroupFunction(self.group, v), self.p)
        m = max(a, b)
        if m == 0.0:
            return 0.0
        return m * ((a / m) ** self.q + (b / m) ** self.q) ** (1.0 / self.q)

    def grad_unit(self, v):
        dv = self.dual(v)
        a = super().norm(v)
        if self.variant:
            p = self.p
            lp_p = lp_norm(GroupFunction(self.group, v), p) ** p
            return dv + self.delta**self.q * lp_p * _signed_power(v, p - 1)
        scale = a ** (self.q - 2**self.d) if a > 0 else 0.0
        return scale * dv + self.delta * _signed_power(self.delta * v, self.q - 1)


def _signed_power(v, e):
    if e == 1:
        return v.copy()
    return np.sign(v) * np.abs(v) ** e


def _ratio_ascent(g, f0, nrm, tol, max_iter):
    """Maximise ``<g; f> / N(f)`` from ``f0`` by projected gradient ascent.

    Barzilai-Borwein step lengths with Armijo backtracking on the ratio.
    Stops once the residual ``||g - R grad N||_2`` drops below
    ``tol ||g||_2``, or when five consecutive steps gain less than the
    rounding level of ``R``.  Returns
    ``(R, unit f, iterations, residual, converged)``.
    """
    n0 = nrm.norm(f0)
    f = f0 / n0
    R = fmean(g * f)
    G = nrm.grad_unit(f)
    gscale = math.sqrt(fmean(g * g))
    step, prev = 1.0, None
    small = 0
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        v = g - R * G
        vv = fmean(v * v)
        res = math.sqrt(vv)
        if res <= tol * gscale or small >= 5:
            converged = True
            break
        if prev is not None:
            df, dv = f - prev[0], v - prev[1]
            curv = abs(fmean(df * dv))
            if curv > 0:
                step = fmean(df * df) / curv
        accepted = False
        while step > 1e-30:
            cand = f + step * v
            nc = nrm.norm(cand)
            if nc > 0:
                cand = cand / nc
                Rc = fmean(g * cand)
                if Rc >= R + 1e-4 * step * vv:
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            converged = True  # no representable ascent left
            break
        prev = (f, v)
        gain = Rc - R
        f, R = cand, Rc
        G = nrm.grad_unit(f)
        small = small + 1 if gain <= 1e-15 * abs(R) else 0
    residual = math.sqrt(fmean((g - R * G) ** 2))
    return R, f, it, residual, converged


def _starts(g, exponent, restarts, seed):
    starts = [g.copy()]
    s = np.sign(g)
    if np.any(s):
        starts.append(s)
    if exponent != 1.0:
        starts.append(_signed_power(g, exponent))
    rng = np.random.default_rng(seed)
    while len(starts) < restarts:
        starts.append(rng.standard_normal(g.size))
    return starts[:max(restarts, 1)]


# -- dual norm ----------------------------------------------------------------

def dual_norm(g: GroupFunction, d: int, options: DualNormOptions | None = None, **overrides) -> DualNormResult:
    """``||g||_{U(d)}^*`` by ratio ascent over ``<g; f> / ||f||_{U(d)}``.

    Starts are ``g``, ``sign(g)``, the Holder extremal ``sign(g)|g|^(q-1)``
    for the ``L^{2^(d-1)}`` norm, then seeded Gaussian vectors.  For
    ``d >= 2`` the returned upper certificate uses
    ``<g; f'> <= R + ||g - R D f||_{U(d)}^*`` and
    ``||.||_{U(d)}^* <= ||.||_{U(2)}^*``.
    """
    opts = options or DualNormOptions()
    if overrides:
        opts = DualNormOptions(**{**opts.__dict__, **overrides})
    check_resources(g.group, d)
    gv = g.values
    if not np.any(gv):
        zero = GroupFunction.zeros(g.group)
        return DualNormResult(0.0, zero, d, 0.0, is_lower_bound=False)
    if d == 1:
        return _dual_norm_level_one(g)
    nrm = _UNorm(g.group, d)
    exponent = 1.0 / (2 ** (d - 1) - 1)
    best = None
    total = 0
    for f0 in _starts(gv, exponent, opts.restarts, opts.seed):
        if nrm.norm(f0) == 0.0:
            continue
        R, f, it, res, conv = _ratio_ascent(gv, f0, nrm, opts.tol, opts.max_iter)
        total += it
        if best is None or R > best[0]:
            best = (R, f, res, conv)
    R, f, res, conv = best
    f, res = _newton_polish(gv, f, R, nrm, res)
    witness = GroupFunction(g.group, f / gowers_norm(GroupFunction(g.group, f), d))
    value = inner(g, witness)
    dual = GroupFunction(g.group, nrm.dual(witness.values))
    upper = max(value, 0.0) + u2_dual_norm_spectral(g - max(value, 0.0) * dual)
    return DualNormResult(
        value=value,
        witness=witness,
        d=d,
        certificate_upper=upper,
        iterations=total,
        stationarity_residual=res,
        converged=conv,
        is_lower_bound=d >= 3,
    )


_POLISH_BUDGET = 2e8


def _newton_polish(g, f, R, nrm, res, max_steps=20):
    """Refine a unit witness by Newton's method on ``D_d u = g``.

    At the optimum ``g = R D_d f``, so ``u = R^{1/(2^d-1)} f`` solves the
    equation.  Steps are kept only while the residual decreases; skipped
    when the explicit Jacobian would be too expensive.
    """
    n, d = g.size, nrm.d
    if R <= 0 or n * (2**d - 1) * n ** (d + 1) > _POLISH_BUDGET:
        return f, res
    u = R ** (1.0 / (2**d - 1)) * f
    r = nrm.dual(u) - g
    best = math.sqrt(fmean(r * r))
    for _ in range(max_steps):
        step = np.linalg.lstsq(_dual_jacobian(u, nrm), r, rcond=None)[0]
        cand = u - step
        rc = nrm.dual(cand) - g
        rn = math.sqrt(fmean(rc * rc))
        if not rn < best:
            break
        u, r, best = cand, rc, rn
    unit = u / nrm.norm(u)
    R_new = fmean(g * unit)
    res_new = math.sqrt(fmean((g - R_new * nrm.dual(unit)) ** 2))
    if res_new < res and R_new >= R - 1e-14 * abs(R):
        return unit, res_new
    return f, res


def _dual_jacobian(u, nrm):
    """``J[x, y] = d (D_d u)(x) / d u(y)`` by one basis vector per vertex slot."""
    n, nv = u.size, 2**nrm.d - 1
    jac = np.zeros((n, n))
    rows = np.tile(u, (nv, 1))
    for y in range(n):
        basis = np.zeros(n)
        basis[y] = 1.0
        for e in range(nv):
            trial = rows.copy()
            trial[e] = basis
            jac[:, y] += convolve_rows(nrm.group, nrm.d, trial)
    return jac


def _dual_norm_level_one(g):
    # ||f||_{U(1)} = |E f|, so only constants have a finite dual norm
    c = g.mean()
    if np.allclose(g.values, c, rtol=0.0, atol=1e-12 * max(1.0, abs(c))):
        witness = GroupFunction.constant(g.group, math.copysign(1.0, c))
        return DualNormResult(inner(g, witness), witness, 1, abs(c), is_lower_bound=False)
    return DualNormResult(math.inf, None, 1, math.inf, is_lower_bound=False)


# -- regularised norm and decompositions --------------------------------------

def _check_regularised(d, k, delta):
    if k < d - 1:
        raise InvalidParameterError(f"k must be >= d - 1, got k={k}, d={d}")
    if not delta > 0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")


def nnorm(f: GroupFunction, d: int, k: int, delta: float) -> float:
    """The regularised norm mixing ``||f||_{U(d)}`` with ``delta ||f||_{2^k}``."""
    _check_regularised(d, k, delta)
    check_resources(f.group, d)
    return _RegularisedNorm(f.group, d, k, delta).norm(f.values)


def thk_decompose(g: GroupFunction, d: int, k: int, delta: float, tol: float = 1e-12,
                  max_iter: int = 20000, start: GroupFunction | None = None) -> ThkResult:
    """Write ``g = D_d f + h`` through the maximiser ``f'`` of ``<g; f>`` on the unit ball.

    With ``c`` the dual regularised norm of ``g`` and ``k >= d``:
    ``f = (c ||f'||_U^{2^k - 2^d})^{1/(2^d - 1)} f'`` and
    ``h = c delta^{2^k} f'^{2^k - 1}``.  For ``k = d - 1``:
    ``f = c^{1/(2^d-1)} f'`` and ``h = c delta^{2^d} ||f'||_p^p f'^{p-1}``
    with ``p = 2^(d-1)``.  The bounds on ``f`` and ``h`` need
    ``||g||_{U(d)}^* <= 1``; normalise first.
    """
    _check_regularised(d, k, delta)
    if d == 1 and k == 0:
        raise InvalidParameterError("k = 0 with d = 1 gives a non-smooth L^1 term; use k >= 1")
    check_resources(g.group, d)
    grp = g.group
    zero = GroupFunction.zeros(grp)
    if not np.any(g.values):
        return ThkResult(zero, zero, d, k, delta, 0.0, 0.0, zero)
    nrm = _RegularisedNorm(grp, d, k, delta)
    gv = g.values
    if start is not None:
        starts = [start.values]
    else:
        starts = _starts(gv, 1.0 / (nrm.p - 1) if nrm.p > 1 else 1.0, 3, 0)
    best = None
    total = 0
    for f0 in starts:
        if nrm.norm(f0) == 0.0:
            continue
        R, f, it, res, conv = _ratio_ascent(gv, f0, nrm, tol, max_iter)
        total += it
        if best is None or R > best[0]:
            best = (R, f, conv)
    c, fp, conv = best
    f, h = _thk_parts(nrm, c, fp)
    residual = math.sqrt(fmean((gv - nrm.dual(f) - h) ** 2))
    return ThkResult(
        GroupFunction(grp, f), GroupFunction(grp, h), d, k, delta, c, residual,
        GroupFunction(grp, fp), total, conv,
    )


def _thk_parts(nrm, c, fp):
    d, delta = nrm.d, nrm.delta
    if nrm.variant:
        p = nrm.p
        lp_p = lp_norm(GroupFunction(nrm.group, fp), p) ** p
        f = c ** (1.0 / (2**d - 1)) * fp
        h = c * delta ** (2**d) * lp_p * _signed_power(fp, p - 1)
        return f, h
    q = nrm.q
    a = _UNorm.norm(nrm, fp)
    f = (c * a ** (q - 2**d)) ** (1.0 / (2**d - 1)) * fp
    h = c * delta * _signed_power(delta * fp, q - 1)
    return f, h


def thborne_decompose(g: GroupFunction, d: int, delta: float, k_schedule=None, k_max: int = 16,
                      stable_tol: float = 1e-6) -> ThkResult:
    """Decomposition with ``||f||_inf <= 1/delta`` and ``||h||_1 <= delta``.

    Runs :func:`thk_decompose` along ``k = d, d+2, ...`` (warm-started,
    stopping once ``||f_k||_inf`` moves by less than ``stable_tol``) and
    then solves the ``k -> infinity`` problem, maximising ``<g; f>`` over
    ``||f||_U <= 1``, ``|f| <= 1/delta``, from the last iterate.  With its
    maximiser ``f*`` and ``lam`` minimising ``||g - lam D f*||_1`` over
    ``[0, 1]`` the result is ``f = lam^{1/(2^d-1)} f*``, ``h = g - D f``.
    """
    if not delta > 0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")
    check_resources(g.group, d)
    grp = g.group
    zero = GroupFunction.zeros(grp)
    if not np.any(g.values):
        return ThkResult(zero, zero, d, None, delta, 0.0, 0.0, zero)
    if k_schedule is None:
        k_schedule = list(range(max(d, 1), k_max + 1, 2))
    history = []
    start = None
    prev_sup = None
    last = None
    for k in k_schedule:
        res = thk_decompose(g, d, k, delta, start=start)
        sup = lp_norm(res.f, math.inf)
        history.append({"k": k, "c": res.c, "f_sup": sup, "h_l1": lp_norm(res.h, 1), "residual": res.residual})
        start, last = res.f_prime, res
        if prev_sup is not None and abs(sup - prev_sup) <= stable_tol:
            break
        prev_sup = sup
    f, h, lam, ok = _limit_decomposition(g, d, delta, last.f_prime.values)
    history.append({"k": "limit", "lambda": lam, "solver_ok": ok})
    residual = math.sqrt(fmean((g.values - _UNorm(grp, d).dual(f) - h) ** 2))
    return ThkResult(
        GroupFunction(grp, f), GroupFunction(grp, h), d, None, delta, last.c, residual,
        last.f_prime, last.iterations, last.converged and ok, history,
    )


def _limit_decomposition(g, d, delta, f0):
    grp = g.group
    nrm = _UNorm(grp, d)
    gv = g.values
    n = gv.size
    cap = 1.0 / delta
    x0 = np.clip(f0, -cap, cap)
    u = nrm.norm(x0)
    if u > 1.0:
        x0 = x0 / u
    gs = gv / max(np.abs(gv).max(), 1e-300)
    sol = minimize(
        lambda x: -float(np.dot(gs, x)) / n,
        x0,
        jac=lambda x: -gs / n,
        method="SLSQP",
        bounds=[(-cap, cap)] * n,
        constraints=[{
            "type": "ineq",
            "fun": lambda x: 1.0 - float(np.mean(x * nrm.dual(x))),
            "jac": lambda x: -(2**d) * nrm.dual(x) / n,
        }],
        options={"ftol": 1e-15, "maxiter": 1000},
    )
    fstar = np.clip(sol.x, -cap, cap)
    u = nrm.norm(fstar)
    if u > 1.0:
        fstar = fstar / u
    a = nrm.dual(fstar)
    lam = _weighted_median_fit(gv, a)
    f = lam ** (1.0 / (2**d - 1)) * fstar
    h = gv - nrm.dual(f)
    return f, h, lam, bool(sol.success)


def _weighted_median_fit(y, a):
    """``argmin_{lam in [0, 1]} sum |y - lam a|``."""
    mask = a != 0
    if not np.any(mask):
        return 0.0
    ratios = y[mask] / a[mask]
    w = np.abs(a[mask])
    order = np.argsort(ratios, kind="stable")
    ratios, w = ratios[order], w[order]
    cum = np.cumsum(w)
    lam = ratios[np.searchsorted(cum, 0.5 * cum[-1])]
    return float(min(max(lam, 0.0), 1.0))


# -- convex hull --------------------------------------------------------------

def convex_hull_probe(g: GroupFunction, d: int, samples: int = 200, tol: float = 1e-12) -> dict:
    """Approximate ``g`` by convex combinations of dual functions ``D_d f``, ``||f||_U <= 1``.

    Frank-Wolfe on ``1/2 ||g - q||_2^2``.  The first atom is ``D_d`` of the
    dual-norm witness of ``g``; afterwards the linear oracle over the hull
    is solved exactly by ``D_d(r / ||r||_U)`` for the residual ``r``.
    Reports the ``L^2`` error after each step.
    """
    check_resources(g.group, d)
    nrm = _UNorm(g.group, d)
    gv = g.values
    dn = dual_norm(g, d)
    report = {"dual_norm": dn.value, "dual_norm_is_lower_bound": dn.is_lower_bound, "errors": [], "weights": []}
    if dn.witness is None or not np.any(gv):
        report["errors"] = [math.sqrt(fmean(gv * gv))]
        return report
    q = nrm.dual(dn.witness.values)
    weights = [1.0]
    errors = [math.sqrt(fmean((gv - q) ** 2))]
    for _ in range(samples - 1):
        if errors[-1] <= tol:
            break
        r = gv - q
        ur = nrm.norm(r)
        if ur == 0.0:
            break
        s = nrm.dual(r / ur)
        direction = s - q
        denom = fmean(direction * direction)
        if denom == 0.0:
            break
        gamma = min(max(fmean(r * direction) / denom, 0.0), 1.0)
        if gamma == 0.0:
            break
        q = q + gamma * direction
        weights = [w * (1 - gamma) for w in weights] + [gamma]
        errors.append(math.sqrt(fmean((gv - q) ** 2)))
    report["errors"] = errors
    report["weights"] = weights
    report["atoms"] = len(weights)
    report["final_error"] = errors[-1]
    return report
