import os
import subprocess
import sys

import numpy as np
import pytest

from imspekit import kernels
from imspekit._accel import NUMBA_AVAILABLE
from imspekit.rmatrix import strip_geometry


def _inputs(n, n_int, method, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-0.7, 0.7, (n, 2))
    c, ws, wa = strip_geometry(n_int)
    w = ws if method == "A" else wa
    outer = kernels.OUTER_ERF if method == "B" else kernels.OUTER_MIDPOINT
    ei, ej = kernels.entry_index(n)
    return x[:, 0], x[:, 1], ei, ej, 1.3, 0.4, c, w, 1.0 / n_int, outer


def test_entry_index_layout():
    ei, ej = kernels.entry_index(3)
    assert list(ei[:3]) == [-1, -1, -1]
    assert list(ej[:3]) == [0, 1, 2]
    assert len(ei) == 3 + 6
    assert all(i <= j for i, j in zip(ei[3:], ej[3:]))
    ei, ej = kernels.entry_index(3, pairs=False)
    assert len(ei) == 3


@pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba not installed")
@pytest.mark.parametrize("method", ["A", "B", "C"])
def test_backends_agree(method):
    args = _inputs(4, 128, method)
    a = kernels.disk_terms_numba(*args)
    b = kernels.disk_terms_numpy(*args)
    assert a.shape == b.shape == (128, 4 + 10)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-300)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.disk_terms(*_inputs(1, 4, "C"), backend="cuda")


def test_env_flag_selects_numpy():
    env = dict(os.environ, IMSPEKIT_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from imspekit._accel import default_backend; print(default_backend())"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
