"""Compiled and fallback kernels must be interchangeable."""

import os
import subprocess
import sys

import numpy as np
import pytest

from quantcut import kernels
from quantcut.kernels import _fallback

_core = pytest.importorskip("quantcut.kernels._core")

IMPLS = [_fallback, _core]


def _random_state(n, rng):
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    psi /= np.linalg.norm(psi)
    return psi.astype(np.complex128)


def test_backend_is_reported():
    assert kernels.BACKEND in ("compiled", "python")


def test_pure_python_env_forces_fallback():
    code = (
        "import quantcut.kernels as k; print(k.BACKEND)"
    )
    env = dict(os.environ, QUANTCUT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "python"


def test_apply_1q_agreement():
    rng = np.random.default_rng(11)
    for n in (1, 2, 4, 7):
        psi = _random_state(n, rng)
        for q in range(n):
            u = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            a, b = psi.copy(), psi.copy()
            _fallback.apply_1q(a, u, q)
            _core.apply_1q(b, u, q)
            np.testing.assert_allclose(a, b, atol=1e-13)


def test_apply_2q_agreement_both_orders():
    rng = np.random.default_rng(12)
    for n in (2, 3, 5, 8):
        psi = _random_state(n, rng)
        for q1 in range(n):
            for q2 in range(n):
                if q1 == q2:
                    continue
                u = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
                a, b = psi.copy(), psi.copy()
                _fallback.apply_2q(a, u, q1, q2)
                _core.apply_2q(b, u, q1, q2)
                np.testing.assert_allclose(a, b, atol=1e-13)


def test_pauli_expval_agreement():
    rng = np.random.default_rng(13)
    for n in (1, 3, 6):
        psi = _random_state(n, rng)
        for _ in range(20):
            xm = int(rng.integers(0, 1 << n))
            zm = int(rng.integers(0, 1 << n))
            r1 = _fallback.pauli_expval(psi, xm, zm)
            r2 = _core.pauli_expval(psi, xm, zm)
            assert abs(r1 - r2) < 1e-12


def test_prob_and_collapse_agreement():
    rng = np.random.default_rng(14)
    for n in (1, 4, 6):
        psi = _random_state(n, rng)
        for q in range(n):
            p1f = _fallback.prob_one(psi.copy(), q)
            p1c = _core.prob_one(psi.copy(), q)
            assert abs(p1f - p1c) < 1e-13
            for outcome in (0, 1):
                a, b = psi.copy(), psi.copy()
                pa = _fallback.collapse(a, q, outcome)
                pb = _core.collapse(b, q, outcome)
                assert abs(pa - pb) < 1e-13
                np.testing.assert_allclose(a, b, atol=1e-13)
                assert abs(np.linalg.norm(a) - 1.0) < 1e-12


@pytest.mark.parametrize("impl", IMPLS, ids=["fallback", "core"])
def test_unitary_preserves_norm(impl):
    rng = np.random.default_rng(15)
    psi = _random_state(6, rng)
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    impl.apply_1q(psi, h, 3)
    assert abs(np.linalg.norm(psi) - 1.0) < 1e-12
    cx = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )
    impl.apply_2q(psi, cx, 5, 1)
    assert abs(np.linalg.norm(psi) - 1.0) < 1e-12


@pytest.mark.parametrize("impl", IMPLS, ids=["fallback", "core"])
def test_collapse_probabilities_sum_to_one(impl):
    rng = np.random.default_rng(16)
    psi = _random_state(5, rng)
    for q in range(5):
        p1 = impl.prob_one(psi.copy(), q)
        p0 = impl.collapse(psi.copy(), q, 0, False)
        assert abs((1.0 - p1) - p0) < 1e-12
