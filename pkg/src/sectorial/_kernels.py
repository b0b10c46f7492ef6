"""Inner loops shared by the sampling oracles and family evaluation.

Each kernel has a numba version and a numpy version with identical
semantics. The numba path is used when numba imports and the environment
variable ``SECTORIAL_NUMBA`` is not set to ``0``.
"""

from __future__ import annotations

import os

import numpy as np


def _numpy_quad_forms(mat, vecs):
    # rows of vecs are the sample vectors u_k; returns u_k^* M u_k
    return np.einsum("ki,ki->k", vecs.conj(), vecs @ mat.T)


def _numpy_horner(coeffs, z):
    out = coeffs[-1].copy()
    for k in range(coeffs.shape[0] - 2, -1, -1):
        out = out * z + coeffs[k]
    return out


def _numpy_sector_excess(re_vals, im_vals, gamma, slope, weights):
    return np.abs(im_vals) - slope * (re_vals - gamma * weights)


try:
    if os.environ.get("SECTORIAL_NUMBA", "1") == "0":
        raise ImportError("numba disabled by SECTORIAL_NUMBA=0")
    from numba import njit
except ImportError:
    HAVE_NUMBA = False
else:
    HAVE_NUMBA = True

    @njit(cache=True)
    def _numba_quad_forms(mat, vecs):
        m, n = vecs.shape
        out = np.empty(m, dtype=np.complex128)
        for k in range(m):
            acc = 0j
            for i in range(n):
                row = 0j
                for j in range(n):
                    row += mat[i, j] * vecs[k, j]
                acc += vecs[k, i].conjugate() * row
            out[k] = acc
        return out

    @njit(cache=True)
    def _numba_horner(coeffs, z):
        d, n, _ = coeffs.shape
        out = coeffs[d - 1].copy()
        for k in range(d - 2, -1, -1):
            for i in range(n):
                for j in range(n):
                    out[i, j] = out[i, j] * z + coeffs[k, i, j]
        return out

    @njit(cache=True)
    def _numba_sector_excess(re_vals, im_vals, gamma, slope, weights):
        out = np.empty_like(re_vals)
        for k in range(re_vals.shape[0]):
            out[k] = abs(im_vals[k]) - slope * (re_vals[k] - gamma * weights[k])
        return out


BACKEND = "numba" if HAVE_NUMBA else "numpy"


def quad_forms(mat, vecs, backend: str | None = None) -> np.ndarray:
    """Return ``u_k^* M u_k`` for every row ``u_k`` of ``vecs``."""
    mat = np.ascontiguousarray(mat, dtype=np.complex128)
    vecs = np.ascontiguousarray(np.atleast_2d(vecs), dtype=np.complex128)
    if (backend or BACKEND) == "numba":
        return _numba_quad_forms(mat, vecs)
    return _numpy_quad_forms(mat, vecs)


def horner(coeffs, z: complex, backend: str | None = None) -> np.ndarray:
    """Evaluate ``sum_k z**k coeffs[k]`` for a stack of square matrices."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    if (backend or BACKEND) == "numba":
        return _numba_horner(coeffs, complex(z))
    return _numpy_horner(coeffs, complex(z))


def sector_excess(re_vals, im_vals, gamma: float, slope: float, weights,
                  backend: str | None = None) -> np.ndarray:
    """Pointwise ``|Im w| - C (Re w - gamma |u|^2)``; positive entries violate the sector."""
    re_vals = np.ascontiguousarray(re_vals, dtype=np.float64)
    im_vals = np.ascontiguousarray(im_vals, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if (backend or BACKEND) == "numba":
        return _numba_sector_excess(re_vals, im_vals, float(gamma), float(slope), weights)
    return _numpy_sector_excess(re_vals, im_vals, float(gamma), float(slope), weights)
