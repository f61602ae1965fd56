"""Deterministic test-function generators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError, InvalidParameterError, NumericalConsistencyError
from .group import GroupFunction, GroupSpec, cyclic
from .spectral import dft, u2_dual_norm_spectral

__all__ = [
    "TorusFunctionSpec",
    "gen_indicator",
    "gen_polynomial_phase",
    "gen_torus_sequence",
    "gen_random",
]


def gen_indicator(group: GroupSpec, subset) -> GroupFunction:
    vals = np.zeros(group.order)
    for z in subset:
        try:
            vals[group.index(z)] = 1.0
        except (IndexError, ValueError) as exc:
            raise InvalidInputError(f"{z!r} is not an element of the group") from exc
    return GroupFunction(group, vals)


def _cyclic_order(group) -> int:
    if isinstance(group, int):
        group = cyclic(group)
    if len(group.orders) != 1:
        raise InvalidParameterError("polynomial phases are defined on cyclic groups only")
    n = group.orders[0]
    if n < 2:
        raise InvalidParameterError("the group must have at least two elements")
    return n


def gen_polynomial_phase(group, coefficients) -> GroupFunction:
    """``cos(2 pi p(n) / N)`` with ``p(n) = sum_k a_k n^k`` reduced mod ``N`` exactly."""
    n = _cyclic_order(group)
    coeffs = [int(a) for a in coefficients]
    residues = []
    for x in range(n):
        acc = 0
        for a in reversed(coeffs):
            acc = (acc * x + a) % n
        residues.append(acc)
    return GroupFunction(cyclic(n), np.cos(2 * np.pi * np.array(residues) / n))


@dataclass(frozen=True)
class TorusFunctionSpec:
    """``F(theta) = a_0 + sum_k a_k cos(2 pi k theta) + b_k sin(2 pi k theta)``.

    ``cos[k]`` is ``a_k`` (``cos[0]`` the constant term) and ``sin[k]`` is
    ``b_k`` (``sin[0]`` is ignored).
    """

    cos: tuple = field(default=(0.0,))
    sin: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "cos", tuple(float(a) for a in self.cos))
        object.__setattr__(self, "sin", tuple(float(b) for b in self.sin))
        if not all(math.isfinite(v) for v in self.cos + self.sin):
            raise InvalidInputError("coefficients must be finite")

    def _pairs(self):
        top = max(len(self.cos), len(self.sin))
        a = list(self.cos) + [0.0] * (top - len(self.cos))
        b = list(self.sin) + [0.0] * (top - len(self.sin))
        return a, b

    @property
    def l1_mass(self) -> float:
        """``sum_k |F_hat(k)|``: each ``k >= 1`` contributes ``sqrt(a_k^2 + b_k^2)``."""
        a, b = self._pairs()
        if not a:
            return 0.0
        return math.fsum([abs(a[0])] + [math.hypot(a[k], b[k]) for k in range(1, len(a))])

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        a, b = self._pairs()
        out = np.full(theta.shape, a[0] if a else 0.0)
        for k in range(1, len(a)):
            out = out + a[k] * np.cos(2 * np.pi * k * theta) + b[k] * np.sin(2 * np.pi * k * theta)
        return out

    def to_dict(self) -> dict:
        return {"cos": list(self.cos), "sin": list(self.sin)}


def _as_rational(alpha, n):
    """``alpha`` as ``p/n`` when it is one, else ``None``."""
    if isinstance(alpha, Fraction):
        return alpha if (alpha * n).denominator == 1 else None
    if isinstance(alpha, (int, np.integer)):
        return Fraction(int(alpha))
    x = float(alpha) * n
    return Fraction(round(x), n) if abs(x - round(x)) <= 1e-12 * max(1.0, abs(x)) else None


def gen_torus_sequence(spec: TorusFunctionSpec, alpha, n: int):
    """``h(k) = F(k alpha mod 1)`` on ``Z_n`` and the bound ``||F_hat||_{l^1}``.

    When ``alpha = p/n`` the rotation is an embedding of ``Z_n`` in the circle,
    the spectrum of ``h`` is a re-indexing (with aliasing) of that of ``F``, and
    ``||h||_{U(2)}^* <= ||F_hat||_{l^1}`` is asserted.
    """
    if n < 2:
        raise InvalidParameterError("n must be at least 2")
    rational = _as_rational(alpha, n)
    if rational is not None:
        step = int(rational * n) % n
        theta = (np.arange(n) * step % n) / n
    else:
        theta = np.mod(np.arange(n) * float(alpha), 1.0)
    h = GroupFunction(cyclic(n), spec(theta))
    bound = spec.l1_mass
    if rational is not None:
        value = u2_dual_norm_spectral(h)
        if value > bound + 1e-10:
            raise NumericalConsistencyError(f"embedded sequence has dual norm {value} above {bound}")
    return h, bound


def gen_random(group: GroupSpec, seed, bound: float = 1.0, smoothness: int | None = None) -> GroupFunction:
    """Uniform values in ``[-bound, bound]``, reproducible per ``seed``.

    With ``smoothness = K`` only the frequencies ``xi`` with
    ``0 < max_j dist(xi_j, 0) <= K`` are kept (so ``K = 1`` on a cyclic group
    leaves the pair ``+-1``), and the result is rescaled to sup norm ``bound``.
    """
    if bound < 0:
        raise InvalidParameterError("bound must be nonnegative")
    rng = np.random.default_rng(seed)
    vals = rng.uniform(-1.0, 1.0, group.order)
    f = GroupFunction(group, vals)
    if smoothness is not None:
        dist = np.zeros(group.order, dtype=np.int64)
        for axis, n in enumerate(group.orders):
            digits = np.unravel_index(np.arange(group.order), group.orders)[axis]
            dist = np.maximum(dist, np.minimum(digits, n - digits))
        coeffs = dft(f).coefficients.copy()
        coeffs[(dist == 0) | (dist > smoothness)] = 0.0
        grid = np.fft.ifftn(coeffs.reshape(group.orders)) * group.order
        vals = grid.real.ravel()
    peak = np.max(np.abs(vals), initial=0.0)
    scale = bound / peak if peak > 0 else 0.0
    return GroupFunction(group, vals * scale)
