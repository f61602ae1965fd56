"""Pure numpy fallback for the compiled kernels."""

import numpy as np

from ._summation import NeumaierAccumulator

_BLOCK = 256


def cubic_convolution(fs, add, shifts):
    """``out[x] = mean_T prod_v fs[v, x + shifts[v, T]]``.

    ``fs`` has one row per nonzero cube vertex, ``shifts[v, T]`` is the
    element ``eps_v . t`` for the T-th shift tuple, ``add`` is the group
    addition table.
    """
    fs = np.asarray(fs)
    if np.iscomplexobj(fs):
        return _complex(fs, add, shifts)
    nv, n = fs.shape
    nt = shifts.shape[1]
    acc = NeumaierAccumulator(n)
    for start in range(0, nt, _BLOCK):
        block = shifts[:, start:start + _BLOCK]
        prod = fs[0][add[block[0]]]
        for v in range(1, nv):
            prod = prod * fs[v][add[block[v]]]
        for row in prod:
            acc.add(row)
    return acc.result() / float(nt)


def _complex(fs, add, shifts):
    nv, n = fs.shape
    nt = shifts.shape[1]
    re, im = NeumaierAccumulator(n), NeumaierAccumulator(n)
    for start in range(0, nt, _BLOCK):
        block = shifts[:, start:start + _BLOCK]
        prod = fs[0][add[block[0]]]
        for v in range(1, nv):
            prod = prod * fs[v][add[block[v]]]
        for row in prod:
            re.add(row.real)
            im.add(row.imag)
    return (re.result() + 1j * im.result()) / float(nt)
