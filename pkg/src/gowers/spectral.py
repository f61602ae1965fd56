"""The ``d = 2`` theory through the normalised discrete Fourier transform.

Characters are indexed like group elements: ``xi`` with digits ``(k_1..k_r)``
is ``x -> exp(2 pi i sum_j k_j x_j / N_j)``, and
``f_hat(xi) = E_x f(x) conj(xi(x))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._summation import fsum
from .errors import DimensionError, InvalidInputError
from .group import GroupFunction, GroupSpec

__all__ = [
    "Spectrum",
    "dft",
    "idft",
    "character",
    "u2_norm_spectral",
    "u2_dual_norm_spectral",
    "a2_norm",
    "spectral_cubic_bound_check",
]


@dataclass(frozen=True, eq=False)
class Spectrum:
    group: GroupSpec
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex).ravel()
        if c.size != self.group.order:
            raise DimensionError(f"expected {self.group.order} coefficients, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def __getitem__(self, xi):
        return self.coefficients[self.group.index(xi)]

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.coefficients)

    def lp(self, p: float) -> float:
        """``(sum_xi |f_hat(xi)|^p)^(1/p)`` (counting measure on the dual group)."""
        a = self.magnitudes
        peak = float(a.max(initial=0.0))
        if peak == 0.0:
            return 0.0
        if p == 1:
            return fsum(a)
        return peak * fsum((a / peak) ** p) ** (1.0 / p)

    def to_dict(self) -> dict:
        return {
            "orders": list(self.group.orders),
            "re": self.coefficients.real.tolist(),
            "im": self.coefficients.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data) -> "Spectrum":
        try:
            re = np.asarray(data["re"], dtype=float)
            im = np.asarray(data["im"], dtype=float)
            return cls(GroupSpec(tuple(data["orders"])), re + 1j * im)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"not a Spectrum object: {exc}") from exc


def dft(f: GroupFunction) -> Spectrum:
    grid = np.fft.fftn(f.as_grid()) / f.group.order
    return Spectrum(f.group, grid.ravel())


def idft(spec: Spectrum, real: bool = True):
    """Inverse transform; returns a GroupFunction, or a complex array if ``real=False``."""
    grid = np.fft.ifftn(spec.coefficients.reshape(spec.group.orders)) * spec.group.order
    if not real:
        return grid.ravel()
    return GroupFunction(spec.group, grid.real.ravel())


def character(group: GroupSpec, xi) -> np.ndarray:
    """Values of the character ``xi`` at every element, as a complex vector."""
    k = np.asarray(group.digits(group.index(xi)))
    x = np.stack(np.unravel_index(np.arange(group.order), group.orders), axis=1)
    phase = (x * k / np.asarray(group.orders)).sum(axis=1)
    return np.exp(2j * np.pi * phase)


def u2_norm_spectral(f: GroupFunction) -> float:
    """``||f||_{U(2)} = ||f_hat||_{l^4}``."""
    return dft(f).lp(4)


def u2_dual_norm_spectral(g: GroupFunction) -> float:
    """``||g||_{U(2)}^* = ||g_hat||_{l^{4/3}}``."""
    return dft(g).lp(4 / 3)


def a2_norm(g: GroupFunction) -> float:
    """``||g||_{A(2)} = ||g_hat||_{l^1}``."""
    return dft(g).lp(1)


def spectral_cubic_bound_check(f01, f10, f11, atol: float = 1e-12) -> dict:
    """Spectral bound for the ``d = 2`` cubic convolution of three functions.

    With ``g = D(f01, f10, f11)`` one has
    ``g_hat = f01_hat * f10_hat * conj(f11_hat)`` and
    ``sum |g_hat|^(2/3) <= prod ||f||_2^(2/3)``.
    """
    from .norms import cubic_convolution

    g = cubic_convolution({"01": f01, "10": f10, "11": f11})
    gh = dft(g).coefficients
    predicted = dft(f01).coefficients * dft(f10).coefficients * np.conj(dft(f11).coefficients)
    lhs = fsum(np.abs(gh) ** (2 / 3))
    rhs = math.prod(f.norm(2) ** (2 / 3) for f in (f01, f10, f11))
    coeff_err = float(np.max(np.abs(gh - predicted)))
    return {
        "lhs": lhs,
        "rhs": rhs,
        "coefficient_error": coeff_err,
        "bound_ok": lhs <= rhs + 1e-10,
        "coefficients_ok": coeff_err <= atol,
    }
