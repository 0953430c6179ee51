"""Independent reference implementations used as test oracles.

Everything here is raw dense matrix algebra on full 2**n operators, built
without the package's kernels or execution machinery, so agreement between
the two routes is meaningful.
"""

from __future__ import annotations

import numpy as np

I2 = np.eye(2, dtype=complex)
PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# number of set partitions of n items, n = 0..8
BELL_NUMBERS = [1, 1, 2, 5, 15, 52, 203, 877, 4140]


def embed_1q(u: np.ndarray, q: int, n: int) -> np.ndarray:
    """Full 2**n unitary of a one-qubit gate (qubit 0 = least significant)."""
    factors = [I2] * n
    factors[q] = u
    out = factors[-1]
    for f in reversed(factors[:-1]):
        out = np.kron(out, f)
    return out


def embed_2q(u4: np.ndarray, q1: int, q2: int, n: int) -> np.ndarray:
    """Full 2**n unitary of a 4x4 gate whose index is (bit q1 << 1) | bit q2."""
    dim = 1 << n
    mask = (1 << q1) | (1 << q2)
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        c = (((col >> q1) & 1) << 1) | ((col >> q2) & 1)
        base = col & ~mask
        for r in range(4):
            row = base | ((r >> 1) << q1) | ((r & 1) << q2)
            out[row, col] = u4[r, c]
    return out


def circuit_unitary(c, gate_matrix) -> np.ndarray:
    """Full unitary of a circuit by embedding each gate (small n only)."""
    n = c.n_qubits
    out = np.eye(1 << n, dtype=complex)
    for g in c.gates:
        u = gate_matrix(g)
        if g.n_qubits == 1:
            out = embed_1q(u, g.qubits[0], n) @ out
        else:
            out = embed_2q(u, g.qubits[0], g.qubits[1], n) @ out
    return out


def simulate(c, gate_matrix) -> np.ndarray:
    """Output amplitudes of a circuit from the all-zeros state."""
    psi = np.zeros(1 << c.n_qubits, dtype=complex)
    psi[0] = 1.0
    return circuit_unitary(c, gate_matrix) @ psi


def observable_matrix(obs, n: int) -> np.ndarray:
    """Dense Hermitian matrix of a Pauli-sum observable."""
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for t in obs.terms:
        term = np.eye(dim, dtype=complex)
        for q, a in t.paulis:
            term = term @ embed_1q(PAULI[a], q, n)
        out += t.coeff * term
    return out


def maxcut_python(n: int, edges) -> tuple[int, float]:
    """Plain-loop exhaustive maximum cut; returns (best index, best value)."""
    best_idx, best_val = 0, -1.0
    for x in range(1 << n):
        val = 0.0
        for i, j, w in edges:
            if ((x >> i) & 1) != ((x >> j) & 1):
                val += w
        if val > best_val + 1e-12:
            best_idx, best_val = x, val
    return best_idx, best_val
