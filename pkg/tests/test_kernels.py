import os
import subprocess
import sys

import numpy as np
import pytest

from sectorial import _kernels

from _instances import crandn

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba unavailable")


@needs_numba
def test_quad_forms_backends_agree(rng):
    M = crandn(rng, 7, 7)
    U = crandn(rng, 50, 7)
    a = _kernels.quad_forms(M, U, backend="numba")
    b = _kernels.quad_forms(M, U, backend="numpy")
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)
    direct = np.array([np.vdot(u, M @ u) for u in U])
    np.testing.assert_allclose(b, direct, rtol=1e-12, atol=1e-12)


@needs_numba
def test_horner_backends_agree(rng):
    coeffs = crandn(rng, 4, 5, 5)
    z = 0.3 - 0.7j
    naive = sum(z**k * coeffs[k] for k in range(4))
    for backend in ("numba", "numpy"):
        np.testing.assert_allclose(_kernels.horner(coeffs, z, backend=backend), naive, rtol=1e-14, atol=1e-14)


@needs_numba
def test_sector_excess_backends_agree(rng):
    re, im, w = rng.standard_normal(30), rng.standard_normal(30), rng.random(30)
    np.testing.assert_allclose(_kernels.sector_excess(re, im, 0.1, 2.0, w, backend="numba"),
                               _kernels.sector_excess(re, im, 0.1, 2.0, w, backend="numpy"))


def test_env_flag_selects_numpy():
    env = dict(os.environ, SECTORIAL_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", "from sectorial import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
