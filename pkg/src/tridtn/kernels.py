"""Hot numeric kernels with an optional numba-compiled path.

The dominant inner loop of every solver in this package is the weighted
exponential sum

    out[i] = sum_j fw[j] * exp(mu[i] * (s[j] - shift[i])),

evaluated for batches of spectral points ``mu`` against one fixed quadrature
rule.  Both a numba ``@njit`` implementation and a pure-numpy one are
provided; the environment variable ``TRIDTN_NUMBA=0`` forces the numpy path
(the default is to use numba when importable).  ``benchmarks/bench_kernels.py``
compares the two lanes.
"""
from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("TRIDTN_NUMBA", "1") != "0"

if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


def _exp_dot_numpy(mu, s, fw, shift):
    arg = np.multiply.outer(mu, s) - (mu * shift)[:, None]
    return np.exp(arg) @ fw


if USE_NUMBA:

    @numba.njit(parallel=True, cache=True)
    def _exp_dot_numba(mu, s, fw, shift):  # pragma: no cover - compiled
        m = mu.shape[0]
        n = s.shape[0]
        out = np.empty(m, dtype=np.complex128)
        for i in numba.prange(m):
            acc = 0.0 + 0.0j
            mi = mu[i]
            sh = shift[i]
            for j in range(n):
                acc += fw[j] * np.exp(mi * (s[j] - sh))
            out[i] = acc
        return out


def exp_weighted_sum(mu, s, fw, shift=None):
    """Batched sum_j fw[j] exp(mu[i] (s[j] - shift[i])) over j.

    Parameters are 1-D arrays; ``shift`` defaults to zeros.  Returns a
    complex array of the same length as ``mu``.
    """
    mu = np.ascontiguousarray(mu, dtype=complex)
    s = np.ascontiguousarray(s, dtype=float)
    fw = np.ascontiguousarray(fw, dtype=complex)
    if shift is None:
        shift = np.zeros(mu.shape[0])
    shift = np.ascontiguousarray(shift, dtype=float)
    if USE_NUMBA:
        return _exp_dot_numba(mu, s, fw, shift)
    return _exp_dot_numpy(mu, s, fw, shift)
