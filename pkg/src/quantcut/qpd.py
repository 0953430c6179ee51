"""Quasiprobability decomposition of two-qubit interaction gates.

The channel of ``exp(i*theta * A1 x A2)`` equals a signed mixture of six
channels built only from one-qubit gates and one-qubit measurements:

    1. do nothing
    2. apply A1 and A2
    3. measure A1, apply exp(+i*pi/4 * A2)
    4. measure A1, apply exp(-i*pi/4 * A2)
    5. apply exp(+i*pi/4 * A1), measure A2
    6. apply exp(-i*pi/4 * A1), measure A2

with coefficients (cos^2 t, sin^2 t, s, -s, s, -s), s = sin(2t)/2.  Variants
3-6 carry a recorded sign: the measured eigenvalue multiplies the final
estimate.  The +-pi/4 rotations are theta-independent; only the coefficients
move with theta.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .circuit import Gate, InteractionForm, Rx, Ry, Rz, interaction_form
from .errors import CombinationBudgetExceeded, SameSubcircuit

N_VARIANTS = 6
DEFAULT_COMBO_CAP = N_VARIANTS**8
_COMBO_CAP_ENV = "QUANTCUT_COMBO_CAP"


@dataclass(frozen=True)
class QpdCoefficients:
    """Signed weights of the six variants for one interaction angle."""

    theta: float
    a: tuple[float, float, float, float, float, float]

    @property
    def abs_sum(self) -> float:
        return math.fsum(abs(x) for x in self.a)


def qpd_coefficients(theta: float) -> QpdCoefficients:
    """Coefficients (cos^2 t, sin^2 t, s, -s, s, -s) with s = sin(2t)/2.

    cos^2 is computed as (1 + cos 2t)/2 and sin^2 as its exact complement so
    that a1 + a2 == 1 holds in floating point.
    """
    a1 = (1.0 + math.cos(2.0 * theta)) / 2.0
    a2 = 1.0 - a1
    s = math.sin(2.0 * theta) / 2.0
    return QpdCoefficients(theta, (a1, a2, s, -s, s, -s))


def sampling_overhead(thetas: Iterable[float]) -> float:
    """gamma = prod(1 + 2|sin 2t|): squared one-norm growth of the estimate."""
    return math.prod(1.0 + 2.0 * abs(math.sin(2.0 * t)) for t in thetas)


def sampling_overhead_for_gates(gates: Iterable[Gate]) -> float:
    """Overhead of cutting every gate in ``gates``."""
    return sampling_overhead(interaction_form(g).theta for g in gates)


@dataclass(frozen=True)
class SignMeasure:
    """Measure ``qubit`` in the ``basis`` eigenbasis and record the eigenvalue
    sign into measurement record ``register``."""

    qubit: int
    basis: str
    register: int


def _rot(axis: str, angle: float, qubit: int) -> Gate:
    if axis == "X":
        return Rx(angle, qubit)
    if axis == "Y":
        return Ry(angle, qubit)
    return Rz(angle, qubit)


@dataclass(frozen=True)
class Subexperiment:
    """One locally executable variant of a cut gate.

    ``ops`` holds, per side, the sequence replacing the original gate on that
    side's qubit (one-qubit gates and sign measurements, in order).  Side 0
    is the gate's first listed qubit.  ``sign_registers`` lists
    ``(subcircuit_id, register)`` pairs whose recorded signs must multiply
    any estimate built from this variant.
    """

    variant: int
    coefficient: float
    ops: tuple[tuple[Gate | SignMeasure, ...], tuple[Gate | SignMeasure, ...]]
    sign_registers: tuple[tuple[int, int], ...]


def make_subexperiments(
    g: Gate, sides: tuple[int, int], register: int = 0
) -> tuple[Subexperiment, ...]:
    """The six variants of cutting ``g``, whose qubits sit in subcircuits
    ``sides`` (side 0 = first listed qubit).

    The local pre/post factors of the gate's interaction form are folded into
    every variant, so variant 1 of an angle-zero cut reproduces the original
    gate exactly.  The form's scalar phase drops out at the channel level.
    """
    if sides[0] == sides[1]:
        raise SameSubcircuit(f"gate on {g.qubits} does not cross parts {sides}")
    form: InteractionForm = interaction_form(g)
    q1, q2 = form.qubits
    coeffs = qpd_coefficients(form.theta)

    def side_ops(q: int, middle: tuple[Gate | SignMeasure, ...]):
        pre = tuple(x for x in form.pre if x.qubits[0] == q)
        post = tuple(x for x in form.post if x.qubits[0] == q)
        return pre + middle + post

    a1, a2 = form.axis1, form.axis2
    half_pi = math.pi / 2.0
    variants: list[tuple[tuple, tuple, tuple]] = [
        ((), (), ()),
        ((Gate(a1, (q1,)),), (Gate(a2, (q2,)),), ()),
        ((SignMeasure(q1, a1, register),), (_rot(a2, -half_pi, q2),), ((sides[0], register),)),
        ((SignMeasure(q1, a1, register),), (_rot(a2, half_pi, q2),), ((sides[0], register),)),
        ((_rot(a1, -half_pi, q1),), (SignMeasure(q2, a2, register),), ((sides[1], register),)),
        ((_rot(a1, half_pi, q1),), (SignMeasure(q2, a2, register),), ((sides[1], register),)),
    ]
    out = []
    for i, (ops1, ops2, regs) in enumerate(variants):
        out.append(
            Subexperiment(
                variant=i + 1,
                coefficient=coeffs.a[i],
                ops=(side_ops(q1, ops1), side_ops(q2, ops2)),
                sign_registers=regs,
            )
        )
    return tuple(out)


@dataclass(frozen=True)
class CombinationIndex:
    """One choice of variant per cut; ``coefficient`` is the product weight."""

    variants: tuple[int, ...]
    coefficient: float


def combo_cap() -> int:
    """Active combination budget (env QUANTCUT_COMBO_CAP, else 6**8)."""
    raw = os.environ.get(_COMBO_CAP_ENV)
    if raw is None or raw == "":
        return DEFAULT_COMBO_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"{_COMBO_CAP_ENV}={raw!r} is not an integer") from exc
    if cap < 1:
        raise ValueError(f"{_COMBO_CAP_ENV} must be positive")
    return cap


def combination_count(n_cuts: int) -> int:
    return N_VARIANTS**n_cuts


def enumerate_combinations(
    subexp_sets: Sequence[tuple[Subexperiment, ...]],
    cap: int | None = None,
) -> Iterator[CombinationIndex]:
    """Iterate all variant combinations in odometer order (last cut fastest).

    Raises CombinationBudgetExceeded up front when 6**k exceeds the cap
    (argument, else env QUANTCUT_COMBO_CAP, else the default).
    """
    k = len(subexp_sets)
    total = combination_count(k)
    limit = combo_cap() if cap is None else cap
    if total > limit:
        raise CombinationBudgetExceeded(f"{total} combinations exceed cap {limit}")

    def gen() -> Iterator[CombinationIndex]:
        for choice in itertools.product(*(range(N_VARIANTS) for _ in range(k))):
            coeff = 1.0
            for j, v in enumerate(choice):
                coeff *= subexp_sets[j][v].coefficient
            yield CombinationIndex(tuple(v + 1 for v in choice), coeff)

    return gen()
