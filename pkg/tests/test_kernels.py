import os
import subprocess
import sys

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from dworkmod import _kernels as K


def _sympy_det(A, M, D):
    T = sympy.Symbol("T")
    n = len(A)
    poly = sympy.Poly((sympy.eye(n) - T * sympy.Matrix(A)).det(), T)
    coeffs = poly.all_coeffs()[::-1]
    return [int(coeffs[i]) % M if i < len(coeffs) else 0 for i in range(D + 1)]


matrices = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-50, 50), min_size=n, max_size=n), min_size=n, max_size=n))


@given(matrices, st.integers(1, 7))
def test_berkowitz_matches_sympy(A, D):
    M = 2**10
    assert K.berkowitz_mod(A, M, D) == _sympy_det(A, M, D)


@given(matrices)
def test_berkowitz_big_modulus_python_path(A):
    M = 3**40
    assert K.berkowitz_mod(A, M, len(A)) == _sympy_det(A, M, len(A))


@given(st.lists(st.integers(0, 999), min_size=1, max_size=30),
       st.lists(st.integers(0, 999), min_size=1, max_size=30), st.integers(0, 60))
def test_convolution_matches_numpy(a, b, cap):
    M = 1000
    full = np.convolve(np.array(a, dtype=object), np.array(b, dtype=object))
    expect = [int(x) % M for x in full[:cap + 1]]
    assert K.conv_mod(a, b, M, cap) == expect


@pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")
def test_numba_and_numpy_agree():
    rng = np.random.default_rng(5)
    M = 2**13
    for n in (1, 3, 12, 30):
        A = rng.integers(0, M, size=(n, n), dtype=np.int64)
        assert np.array_equal(K.berkowitz_numba(A, M, 8), K.berkowitz_numpy(A, M, 8))
        a = rng.integers(0, M, size=5 * n, dtype=np.int64)
        b = rng.integers(0, M, size=4 * n, dtype=np.int64)
        assert np.array_equal(K.conv_numba(a, b, M, 6 * n), K.conv_numpy(a, b, M, 6 * n))


def test_no_numba_flag_selects_numpy():
    code = "from dworkmod import _kernels as K; print(K.NUMBA_ENABLED, K.berkowitz_mod([[2,1],[0,3]], 64, 2))"
    env = dict(os.environ, DWORKMOD_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split()[0] == "False"
    assert "[1, 59, 6]" in out.stdout
