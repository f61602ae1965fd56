"""Reproducible reductions.

Scalar reductions go through :func:`math.fsum`, which returns the correctly
rounded sum and is therefore independent of the order of the terms.  Row-wise
reductions use Neumaier's compensated summation in a fixed order; the
compiled kernels replay exactly the same floating point operations so the two
backends agree bit for bit.
"""

import math

import numpy as np


def fsum(values):
    """Correctly rounded sum of every entry of ``values``."""
    arr = np.asarray(values)
    if np.iscomplexobj(arr):
        return complex(math.fsum(arr.real.ravel().tolist()), math.fsum(arr.imag.ravel().tolist()))
    return math.fsum(arr.ravel().tolist())


def fmean(values):
    arr = np.asarray(values)
    return fsum(arr) / arr.size


class NeumaierAccumulator:
    """Vectorised running compensated sum over a fixed-shape array."""

    def __init__(self, shape):
        self.total = np.zeros(shape)
        self.comp = np.zeros(shape)

    def add(self, v):
        s = self.total
        t = s + v
        big = np.abs(s) >= np.abs(v)
        self.comp += np.where(big, (s - t) + v, (v - t) + s)
        self.total = t

    def result(self):
        return self.total + self.comp


def compensated_rows(a):
    """Compensated sum of ``a`` along axis 0, in index order."""
    a = np.asarray(a, dtype=float)
    acc = NeumaierAccumulator(a.shape[1:])
    for row in a:
        acc.add(row)
    return acc.result()
