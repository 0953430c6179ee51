"""Pure-numpy statevector kernels.

Reference semantics for the compiled module: every function here mutates the
state in place and agrees with `_core` to floating-point rounding (numpy's
vectorized complex arithmetic may fuse multiply-adds, so results can differ
from the compiled loop by a few ulp). States are 1-D contiguous complex128
arrays of length 2**n with qubit 0 as the least-significant bit.
"""

from __future__ import annotations

import math

import numpy as np

# reorder 4x4 rows/cols from (bit q1, bit q2) to (bit hi, bit lo) when q1 < q2
_SWAP2 = np.array([0, 2, 1, 3])


def apply_1q(psi: np.ndarray, u: np.ndarray, q: int) -> None:
    """Apply a 2x2 unitary to qubit ``q``."""
    step = 1 << q
    v = psi.reshape(-1, 2, step)
    a = v[:, 0, :].copy()
    b = v[:, 1, :]
    v[:, 0, :] = u[0, 0] * a + u[0, 1] * b
    v[:, 1, :] = u[1, 0] * a + u[1, 1] * b


def apply_2q(psi: np.ndarray, u: np.ndarray, q1: int, q2: int) -> None:
    """Apply a 4x4 unitary whose high bit is ``q1`` and low bit is ``q2``."""
    hi, lo = (q1, q2) if q1 > q2 else (q2, q1)
    if q1 < q2:
        u = u[np.ix_(_SWAP2, _SWAP2)]
    v = psi.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)
    pairs = ((0, 0), (0, 1), (1, 0), (1, 1))
    blocks = [v[:, i, :, j, :].copy() for i, j in pairs]
    for r, (i, j) in enumerate(pairs):
        v[:, i, :, j, :] = (
            u[r, 0] * blocks[0]
            + u[r, 1] * blocks[1]
            + u[r, 2] * blocks[2]
            + u[r, 3] * blocks[3]
        )


def pauli_expval(psi: np.ndarray, x_mask: int, z_mask: int) -> complex:
    """Raw overlap sum(s_b * psi[b] * conj(psi[b ^ x_mask])) with s_b the
    z_mask parity sign of b.  The caller folds in the i**n_y phase."""
    n = psi.size
    idx = np.arange(n, dtype=np.uint64)
    if z_mask:
        par = idx & np.uint64(z_mask)
        for s in (32, 16, 8, 4, 2, 1):
            par ^= par >> np.uint64(s)
        signs = 1.0 - 2.0 * (par & np.uint64(1)).astype(np.float64)
    else:
        signs = 1.0
    if x_mask:
        flipped = np.conj(psi[idx ^ np.uint64(x_mask)])
    else:
        flipped = np.conj(psi)
    return complex(np.sum(signs * psi * flipped))


def prob_one(psi: np.ndarray, q: int) -> float:
    """Probability that qubit ``q`` reads 1."""
    v = psi.reshape(-1, 2, 1 << q)[:, 1, :]
    return float(np.sum(v.real * v.real + v.imag * v.imag))


def collapse(psi: np.ndarray, q: int, outcome: int, renorm: bool = True) -> float:
    """Project qubit ``q`` onto ``outcome`` in place; returns the branch weight."""
    v = psi.reshape(-1, 2, 1 << q)
    keep = v[:, outcome, :]
    p = float(np.sum(keep.real * keep.real + keep.imag * keep.imag))
    v[:, 1 - outcome, :] = 0.0
    if renorm and p > 0.0:
        psi *= 1.0 / math.sqrt(p)
    return p
