"""Circuit intermediate representation.

Gates, circuits and Pauli observables, plus the matrix semantics used by the
simulator and the reduction of every supported two-qubit gate to the canonical
form  local * exp(i*theta * A1 x A2) * local  that gate cutting relies on.

Conventions (fixed across the package):

* Qubit 0 is the least-significant bit of a basis-state index.
* For a two-qubit gate on ``(q1, q2)`` the 4x4 matrix is indexed by
  ``(bit(q1) << 1) | bit(q2)``: the first listed qubit is the high bit.
* ``Rx/Ry/Rz(theta) = exp(-i*theta*P/2)``; ``Phase(theta) = diag(1, e^{i*theta})``.
* Bitstrings are rendered most-significant qubit first.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGate, NotCuttable

PAULI_AXES = ("X", "Y", "Z")

ONE_QUBIT_KINDS = frozenset({"H", "X", "Y", "Z", "S", "Sdg", "Rx", "Ry", "Rz", "Phase"})
TWO_QUBIT_KINDS = frozenset({"CX", "CRZ", "Interaction"})
PARAMETRIC_KINDS = frozenset({"Rx", "Ry", "Rz", "Phase", "CRZ", "Interaction"})
CUTTABLE_KINDS = frozenset({"CX", "CRZ", "Interaction"})


@dataclass(frozen=True)
class Gate:
    """One gate instance: kind, target qubits, optional angle and axes."""

    kind: str
    qubits: tuple[int, ...]
    theta: float | None = None
    axes: tuple[str, str] | None = None

    def __post_init__(self):
        if self.kind not in ONE_QUBIT_KINDS and self.kind not in TWO_QUBIT_KINDS:
            raise InvalidGate(f"unknown gate kind {self.kind!r}")
        arity = 1 if self.kind in ONE_QUBIT_KINDS else 2
        qs = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qs)
        if len(qs) != arity:
            raise InvalidGate(f"{self.kind} expects {arity} qubit(s), got {qs}")
        if any(q < 0 for q in qs):
            raise InvalidGate(f"negative qubit index in {qs}")
        if arity == 2 and qs[0] == qs[1]:
            raise InvalidGate(f"{self.kind} needs two distinct qubits, got {qs}")
        if self.kind in PARAMETRIC_KINDS:
            if self.theta is None or not math.isfinite(self.theta):
                raise InvalidGate(f"{self.kind} requires a finite theta")
            object.__setattr__(self, "theta", float(self.theta))
        elif self.theta is not None:
            raise InvalidGate(f"{self.kind} takes no theta")
        if self.kind == "Interaction":
            if self.axes is None or len(self.axes) != 2 or any(
                a not in PAULI_AXES for a in self.axes
            ):
                raise InvalidGate(f"Interaction needs two Pauli axes, got {self.axes}")
            object.__setattr__(self, "axes", (self.axes[0], self.axes[1]))
        elif self.axes is not None:
            raise InvalidGate(f"{self.kind} takes no axes")

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)


def H(q: int) -> Gate:
    return Gate("H", (q,))


def X(q: int) -> Gate:
    return Gate("X", (q,))


def Y(q: int) -> Gate:
    return Gate("Y", (q,))


def Z(q: int) -> Gate:
    return Gate("Z", (q,))


def S(q: int) -> Gate:
    return Gate("S", (q,))


def Sdg(q: int) -> Gate:
    return Gate("Sdg", (q,))


def Rx(theta: float, q: int) -> Gate:
    return Gate("Rx", (q,), theta)


def Ry(theta: float, q: int) -> Gate:
    return Gate("Ry", (q,), theta)


def Rz(theta: float, q: int) -> Gate:
    return Gate("Rz", (q,), theta)


def Phase(theta: float, q: int) -> Gate:
    return Gate("Phase", (q,), theta)


def CX(control: int, target: int) -> Gate:
    return Gate("CX", (control, target))


def CRZ(theta: float, control: int, target: int) -> Gate:
    return Gate("CRZ", (control, target), theta)


def Interaction(theta: float, axis1: str, axis2: str, q1: int, q2: int) -> Gate:
    return Gate("Interaction", (q1, q2), theta, (axis1, axis2))


_SQ2 = 1.0 / math.sqrt(2.0)

_PAULI_MATS = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_FIXED_1Q = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "X": _PAULI_MATS["X"],
    "Y": _PAULI_MATS["Y"],
    "Z": _PAULI_MATS["Z"],
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "Sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
}


def pauli_matrix(axis: str) -> np.ndarray:
    """2x2 matrix of a Pauli axis letter."""
    return _PAULI_MATS[axis].copy()


def gate_matrix(g: Gate) -> np.ndarray:
    """Unitary of ``g``: 2x2 for one-qubit kinds, 4x4 for two-qubit kinds.

    For two-qubit kinds the first listed qubit indexes the high bit of the
    4x4 basis, independent of the numeric order of the qubit ids.
    """
    k = g.kind
    if k in _FIXED_1Q:
        return _FIXED_1Q[k].copy()
    t = g.theta
    if k == "Rx":
        c, s = math.cos(t / 2), math.sin(t / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if k == "Ry":
        c, s = math.cos(t / 2), math.sin(t / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if k == "Rz":
        return np.array(
            [[cmath.exp(-0.5j * t), 0], [0, cmath.exp(0.5j * t)]], dtype=complex
        )
    if k == "Phase":
        return np.array([[1, 0], [0, cmath.exp(1j * t)]], dtype=complex)
    if k == "CX":
        return np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
    if k == "CRZ":
        return np.diag(
            [1, 1, cmath.exp(-0.5j * t), cmath.exp(0.5j * t)]
        ).astype(complex)
    if k == "Interaction":
        a1, a2 = g.axes
        kron = np.kron(_PAULI_MATS[a1], _PAULI_MATS[a2])
        return math.cos(t) * np.eye(4, dtype=complex) + 1j * math.sin(t) * kron
    raise InvalidGate(f"unknown gate kind {k!r}")


@dataclass(frozen=True)
class InteractionForm:
    """Canonical form of a cuttable gate.

    The original gate equals, up to the scalar ``phase``,

        (post gates, applied left to right) *
        exp(i*theta * A1 x A2) *
        (pre gates, applied left to right)

    where ``axis1`` acts on ``qubits[0]`` and ``axis2`` on ``qubits[1]``.
    All member gates are single-qubit gates on one of the two qubits.
    """

    theta: float
    axis1: str
    axis2: str
    qubits: tuple[int, int]
    pre: tuple[Gate, ...] = ()
    post: tuple[Gate, ...] = ()
    phase: complex = 1.0 + 0.0j

    def interaction_gate(self) -> Gate:
        return Interaction(self.theta, self.axis1, self.axis2, *self.qubits)

    def matrix(self) -> np.ndarray:
        """Reassembled 4x4 unitary, for checking against ``gate_matrix``."""
        q1, q2 = self.qubits
        mat = np.eye(4, dtype=complex)

        def local(g: Gate) -> np.ndarray:
            u = gate_matrix(g)
            if g.qubits[0] == q1:
                return np.kron(u, np.eye(2))
            return np.kron(np.eye(2), u)

        for g in self.pre:
            mat = local(g) @ mat
        mat = gate_matrix(self.interaction_gate()) @ mat
        for g in self.post:
            mat = local(g) @ mat
        return self.phase * mat


def interaction_form(g: Gate) -> InteractionForm:
    """Reduce a two-qubit gate to its single-interaction canonical form.

    Raises NotCuttable for one-qubit gates; every supported two-qubit kind
    has such a form by construction.
    """
    if g.kind == "Interaction":
        return InteractionForm(g.theta, g.axes[0], g.axes[1], g.qubits)
    if g.kind == "CRZ":
        control, target = g.qubits
        return InteractionForm(
            g.theta / 4.0,
            "Z",
            "Z",
            (control, target),
            post=(Rz(g.theta / 2.0, target),),
        )
    if g.kind == "CX":
        control, target = g.qubits
        return InteractionForm(
            math.pi / 4.0,
            "X",
            "X",
            (control, target),
            pre=(Ry(math.pi / 2.0, control),),
            post=(
                Ry(-math.pi / 2.0, control),
                S(control),
                H(target),
                S(target),
                H(target),
            ),
            phase=cmath.exp(-0.25j * math.pi),
        )
    raise NotCuttable(f"{g.kind} has no single-interaction form")


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string; ``paulis`` maps qubit -> axis, identity elsewhere."""

    coeff: float
    paulis: tuple[tuple[int, str], ...]

    def __post_init__(self):
        if not math.isfinite(self.coeff):
            raise InvalidGate("term coefficient must be finite")
        object.__setattr__(self, "coeff", float(self.coeff))
        items = tuple(sorted((int(q), a) for q, a in self.paulis))
        qubits = [q for q, _ in items]
        if any(q < 0 for q in qubits):
            raise InvalidGate("negative qubit index in Pauli term")
        if len(set(qubits)) != len(qubits):
            raise InvalidGate("duplicate qubit in Pauli term")
        if any(a not in PAULI_AXES for _, a in items):
            raise InvalidGate("Pauli axes must be X, Y or Z")
        object.__setattr__(self, "paulis", items)

    def as_dict(self) -> dict[int, str]:
        return dict(self.paulis)

    @property
    def weight(self) -> int:
        """Number of non-identity factors."""
        return len(self.paulis)


@dataclass(frozen=True)
class PauliObservable:
    """Real linear combination of Pauli strings."""

    terms: tuple[PauliTerm, ...]

    @classmethod
    def from_terms(cls, terms) -> "PauliObservable":
        """Build from an iterable of ``(coeff, {qubit: axis})`` pairs."""
        return cls(tuple(PauliTerm(c, tuple(p.items())) for c, p in terms))

    @classmethod
    def single(cls, coeff: float, paulis: dict[int, str]) -> "PauliObservable":
        return cls.from_terms([(coeff, paulis)])

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def max_qubit(self) -> int:
        """Largest qubit index referenced, or -1 for a constant observable."""
        qs = [q for t in self.terms for q, _ in t.paulis]
        return max(qs) if qs else -1

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"coeff": t.coeff, "paulis": {str(q): a for q, a in t.paulis}}
                for t in self.terms
            ]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PauliObservable":
        try:
            terms = [
                (float(t["coeff"]), {int(q): a for q, a in t.get("paulis", {}).items()})
                for t in data["terms"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidGate(f"malformed observable payload: {exc}") from exc
        return cls.from_terms(terms)


def basis_state_expectation(obs: PauliObservable, index: int) -> float:
    """Expectation of ``obs`` in the computational basis state ``|index>``.

    X and Y factors have zero diagonal, so only all-Z terms contribute; each
    contributes ``coeff * (-1)^(parity of the term's bits in index)``.
    """
    vals = []
    for t in obs.terms:
        if any(a != "Z" for _, a in t.paulis):
            continue
        parity = 0
        for q, _ in t.paulis:
            parity ^= (index >> q) & 1
        vals.append(-t.coeff if parity else t.coeff)
    return math.fsum(vals)


@dataclass(frozen=True)
class Circuit:
    """A fixed-width sequence of gates."""

    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidGate("circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.n_qubits:
                raise InvalidGate(
                    f"gate {g.kind} on {g.qubits} exceeds width {self.n_qubits}"
                )

    @property
    def n_gates(self) -> int:
        return len(self.gates)

    def two_qubit_indices(self) -> list[int]:
        """Positions of all two-qubit gates, in circuit order."""
        return [i for i, g in enumerate(self.gates) if g.n_qubits == 2]

    def to_dict(self) -> dict:
        out = []
        for g in self.gates:
            entry: dict = {"kind": g.kind, "qubits": list(g.qubits)}
            if g.theta is not None:
                entry["theta"] = g.theta
            if g.axes is not None:
                entry["axes"] = list(g.axes)
            out.append(entry)
        return {"n_qubits": self.n_qubits, "gates": out}

    @classmethod
    def from_dict(cls, data: dict) -> "Circuit":
        try:
            n = int(data["n_qubits"])
            gates = []
            for e in data["gates"]:
                axes = e.get("axes")
                gates.append(
                    Gate(
                        str(e["kind"]),
                        tuple(int(q) for q in e["qubits"]),
                        e.get("theta"),
                        tuple(axes) if axes is not None else None,
                    )
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidGate(f"malformed circuit payload: {exc}") from exc
        return cls(n, tuple(gates))


def index_to_bitstring(index: int, n_qubits: int) -> str:
    """Render a basis index as a bitstring, most-significant qubit first."""
    return format(index, f"0{n_qubits}b")


def bitstring_to_index(bits: str) -> int:
    return int(bits, 2)
