"""Dense statevector simulation.

Exact expectation values, counts sampling with an optional readout confusion
matrix, and projective mid-circuit measurement that returns both collapse
branches so callers can follow every outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .circuit import Circuit, Gate, PauliObservable, gate_matrix, index_to_bitstring
from .errors import AsymmetricNoiseUnsupported, QubitCapExceeded

DEFAULT_QUBIT_CAP = 24

# imaginary residue above this on a Hermitian expectation means a caller bug
_IMAG_TOL = 1e-8
# branch weights below this are dropped as numerically empty
_PROB_FLOOR = 1e-15


def as_rng(rng: np.random.Generator | int | None) -> np.random.Generator:
    """Normalize a seed-or-generator argument to a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass
class StateVector:
    """1-D complex128 amplitude array; qubit 0 is the least-significant bit."""

    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.ascontiguousarray(self.amps, dtype=np.complex128).ravel()
        n = self.amps.size
        if n < 2 or n & (n - 1):
            raise ValueError(f"amplitude length {n} is not a power of two >= 2")

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps)

    @property
    def n_qubits(self) -> int:
        return int(self.amps.size).bit_length() - 1

    def copy(self) -> "StateVector":
        return StateVector(self.amps.copy())

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.amps.real**2 + self.amps.imag**2)))

    def probabilities(self) -> np.ndarray:
        return self.amps.real**2 + self.amps.imag**2


@dataclass(frozen=True)
class ReadoutNoise:
    """Per-qubit readout confusion: p01 = P(read 1 | true 0), p10 = P(read 0 | true 1)."""

    p01: float
    p10: float

    def __post_init__(self):
        for p in (self.p01, self.p10):
            if not 0.0 <= p < 0.5:
                raise ValueError(f"flip probability {p} outside [0, 0.5)")

    @classmethod
    def symmetric(cls, eps: float) -> "ReadoutNoise":
        return cls(eps, eps)

    @property
    def is_symmetric(self) -> bool:
        return self.p01 == self.p10


@dataclass
class Branch:
    """One outcome of a projective measurement.

    ``sign`` is the measured eigenvalue (+1 for outcome 0, -1 for outcome 1).
    ``unused`` marks a zero-probability placeholder whose state is a bare
    eigenstate kept only so downstream bookkeeping sees both outcomes.
    """

    probability: float
    sign: int
    state: StateVector
    unused: bool = False


@lru_cache(maxsize=4096)
def _matrix(g: Gate) -> np.ndarray:
    return gate_matrix(g)


def apply_gate(state: StateVector, g: Gate) -> None:
    """Apply one gate to ``state`` in place."""
    u = _matrix(g)
    if g.n_qubits == 1:
        kernels.apply_1q(state.amps, u, g.qubits[0])
    else:
        kernels.apply_2q(state.amps, u, g.qubits[0], g.qubits[1])


def run(
    c: Circuit,
    initial: StateVector | None = None,
    max_qubits: int = DEFAULT_QUBIT_CAP,
) -> StateVector:
    """Simulate ``c`` from ``initial`` (default all-zeros) and return the state."""
    if c.n_qubits > max_qubits:
        raise QubitCapExceeded(f"{c.n_qubits} qubits exceed cap {max_qubits}")
    state = StateVector.zero(c.n_qubits) if initial is None else initial.copy()
    if state.n_qubits != c.n_qubits:
        raise ValueError("initial state width differs from circuit width")
    for g in c.gates:
        apply_gate(state, g)
    return state


def pauli_masks(paulis) -> tuple[int, int, int]:
    """Bit masks (x_mask, z_mask, n_y) for a Pauli string given as
    ``{qubit: axis}`` or an iterable of ``(qubit, axis)`` pairs."""
    items = paulis.items() if hasattr(paulis, "items") else paulis
    x_mask = z_mask = n_y = 0
    for q, a in items:
        bit = 1 << q
        if a == "X":
            x_mask |= bit
        elif a == "Z":
            z_mask |= bit
        elif a == "Y":
            x_mask |= bit
            z_mask |= bit
            n_y += 1
        else:
            raise ValueError(f"bad Pauli axis {a!r}")
    return x_mask, z_mask, n_y


def term_expectation(state: StateVector, paulis) -> float:
    """<state| P |state> for one Pauli string (empty string gives <1>)."""
    x_mask, z_mask, n_y = pauli_masks(paulis)
    raw = kernels.pauli_expval(state.amps, x_mask, z_mask)
    val = (1j**n_y) * raw
    if abs(val.imag) > _IMAG_TOL * max(1.0, abs(val.real)):
        raise ValueError(f"non-real Pauli expectation {val}")
    return float(val.real)


def expectation(state: StateVector, obs: PauliObservable) -> float:
    """Exact expectation of a Pauli-sum observable."""
    if obs.max_qubit() >= state.n_qubits:
        raise ValueError("observable references qubits outside the state")
    return math.fsum(t.coeff * term_expectation(state, t.paulis) for t in obs.terms)


def sample(
    state: StateVector,
    shots: int,
    noise: ReadoutNoise | None = None,
    rng: np.random.Generator | int | None = None,
) -> dict[str, int]:
    """Draw measurement counts in the computational basis.

    Returns ``{bitstring: count}`` with most-significant qubit first and keys
    in ascending index order; zero-count strings are omitted.  Readout noise
    flips each recorded bit independently.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    gen = as_rng(rng)
    n = state.n_qubits
    probs = state.probabilities()
    total = probs.sum()
    if not total > 0:
        raise ValueError("cannot sample a zero state")
    counts_vec = gen.multinomial(shots, probs / total)
    if noise is not None:
        idx = np.repeat(np.arange(probs.size, dtype=np.int64), counts_vec)
        for q in range(n):
            bit = (idx >> q) & 1
            flip_p = np.where(bit == 1, noise.p10, noise.p01)
            flips = gen.random(shots) < flip_p
            idx ^= flips.astype(np.int64) << q
        counts_vec = np.bincount(idx, minlength=probs.size)
    return {
        index_to_bitstring(i, n): int(c) for i, c in enumerate(counts_vec) if c > 0
    }


_MEAS_ROT: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    # basis -> (gates into the measurement frame, gates back out)
    "Z": ((), ()),
    "X": (("H",), ("H",)),
    "Y": (("Sdg", "H"), ("H", "S")),
}


def _basis_eigenstate(n_qubits: int, qubit: int, basis: str, outcome: int) -> StateVector:
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    hi = 1 << qubit
    if basis == "Z":
        amps[hi if outcome else 0] = 1.0
    else:
        amps[0] = 1.0 / math.sqrt(2.0)
        unit = 1.0 if basis == "X" else 1.0j
        amps[hi] = (unit if outcome == 0 else -unit) / math.sqrt(2.0)
    return StateVector(amps)


def branch_measure(state: StateVector, qubit: int, basis: str) -> list[Branch]:
    """Measure one qubit in a Pauli basis and return both collapse branches.

    Each returned branch state is the normalized post-measurement state (the
    projector onto the measured eigenstate, renormalized).  A numerically
    empty branch is replaced by an ``unused`` placeholder eigenstate so the
    result always has exactly two entries, outcome 0 first.
    """
    if basis not in _MEAS_ROT:
        raise ValueError(f"bad measurement basis {basis!r}")
    rot, unrot = _MEAS_ROT[basis]
    work = state.copy()
    for kind in rot:
        apply_gate(work, Gate(kind, (qubit,)))
    p1 = kernels.prob_one(work.amps, qubit)
    p0 = 1.0 - p1
    branches = []
    for outcome, p in ((0, p0), (1, p1)):
        sign = 1 if outcome == 0 else -1
        if p < _PROB_FLOOR:
            branches.append(
                Branch(0.0, sign, _basis_eigenstate(state.n_qubits, qubit, basis, outcome), True)
            )
            continue
        out = StateVector(work.amps.copy())
        kernels.collapse(out.amps, qubit, outcome)
        for kind in unrot:
            apply_gate(out, Gate(kind, (qubit,)))
        branches.append(Branch(float(p), sign, out))
    return branches


def apply_readout_to_expectation(
    value: float, n_measured: int, noise: ReadoutNoise | None
) -> float:
    """Attenuate an ideal +-1-valued product expectation for readout noise.

    Each independently flipped bit multiplies the expectation by (1 - 2*eps),
    so ``n_measured`` bits attenuate it by (1 - 2*eps)**n_measured.  Only the
    symmetric confusion matrix admits this closed form.
    """
    if noise is None or n_measured == 0:
        return value
    if not noise.is_symmetric:
        raise AsymmetricNoiseUnsupported(
            f"p01={noise.p01} != p10={noise.p10} has no scalar attenuation"
        )
    return value * (1.0 - 2.0 * noise.p01) ** n_measured


def expectation_from_counts(counts: dict[str, int], qubits) -> float:
    """Estimate a Z-string expectation from counts over MSB-first bitstrings."""
    qs = tuple(qubits)
    total = 0
    acc = 0
    for bits, c in counts.items():
        n = len(bits)
        parity = 0
        for q in qs:
            parity ^= bits[n - 1 - q] == "1"
        acc += -c if parity else c
        total += c
    if total == 0:
        raise ValueError("no counts")
    return acc / total


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 for two pure states of equal width."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("state widths differ")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)
