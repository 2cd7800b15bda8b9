import os
import subprocess
import sys

import numpy as np
import pytest

from superbath import kernels
from superbath.lattice import BathParams, coupling_weights, dispersion, k_grid


def direct_sum(z, n, delta, sign, r):
    p = BathParams(1.0, delta, n)
    k = k_grid(n)
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    w = dispersion(k1, k2, p)
    wu, wl = coupling_weights(k1, k2, "A" if sign > 0 else "B", p)
    ph = np.cos(k1 * r[0] + k2 * r[1])
    val = np.sum(ph * (wu / (z - w) + wl / (z + w))) / n**2
    der = -np.sum(ph * (wu / (z - w) ** 2 + wl / (z + w) ** 2)) / n**2
    return val, der


@pytest.mark.parametrize("name", list(kernels.available_backends()))
@pytest.mark.parametrize("sign,r", [(1, (0, 0)), (-1, (0, 0)), (1, (3, -2))])
def test_backend_matches_direct_sum(name, sign, r):
    fn = kernels.available_backends()[name]
    zs = np.array([0.3, -4.5 + 0.1j, 2.0 + 0.5j])
    val, der = fn(zs, 24, 1.0, 1.0, sign, *r)
    for i, z in enumerate(zs):
        v, d = direct_sum(z, 24, 1.0, sign, r)
        assert abs(val[i] - v) < 1e-13 and abs(der[i] - d) < 1e-13


def test_backends_agree():
    fns = kernels.available_backends()
    zs = np.array([0.2, 5.0, 1.5 + 0.01j])
    ref = fns["numpy"](zs, 64, 0.5, 1.0, 1, 2, 1)
    for fn in fns.values():
        out = fn(zs, 64, 0.5, 1.0, 1, 2, 1)
        assert np.allclose(out[0], ref[0], rtol=0, atol=1e-14)


def test_compiled_backend_is_built():
    assert "cython" in kernels.available_backends()
    assert kernels.BACKEND == "cython" or os.environ.get("SUPERBATH_BACKEND") == "numpy"


def test_env_forces_fallback():
    env = dict(os.environ, SUPERBATH_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", "import superbath; print(superbath.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
