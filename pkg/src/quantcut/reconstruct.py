"""Execute cut circuits part by part and recombine the pieces.

A cut plan splits the circuit into independent subcircuits that communicate
only through the signed six-variant decomposition of each cut gate.  For one
choice of variant per cut (a combination) every subcircuit is simulated on
its own few qubits; a Pauli observable factorizes over the parts, so the
combination contributes

    (product of variant coefficients) * (product of per-part signed values)

and summing over all 6**k combinations reproduces the uncut result exactly.
Per-part values are memoized on the variants visible to that part, so the
simulation work grows with 6**(cuts touching a part), not 6**k.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, PauliObservable
from .cutfinder import CutPlan
from .errors import ManualInvalid, MixedStateDetected, QubitCapExceeded
from .qpd import (
    Subexperiment,
    SignMeasure,
    combination_count,
    enumerate_combinations,
    make_subexperiments,
)
from . import sim
from .sim import Branch, ReadoutNoise, StateVector

# dense density-operator rebuild is quadratic in state size
_STATEVECTOR_MAX_QUBITS = 12
_PURITY_TOL = 1e-6
_MIN_SHOTS_PER_COMBO = 100


@dataclass(frozen=True)
class ExecutionBackend:
    """How subexperiments are evaluated.

    ``mode`` is "exact" (closed-form branch expectations) or "shots"
    (sampled counts; ``shots`` is the total budget, split evenly over the
    combinations with a floor of 100 each).  ``noise`` applies a readout
    confusion matrix to every measured bit in both modes.  ``seed`` fixes all
    sampling; results are independent of ``workers``.
    """

    mode: str = "exact"
    shots: int = 10_000
    noise: ReadoutNoise | None = None
    seed: int | None = 0
    max_qubits: int = sim.DEFAULT_QUBIT_CAP
    workers: int = 1

    def __post_init__(self):
        if self.mode not in ("exact", "shots"):
            raise ValueError(f"mode must be 'exact' or 'shots', got {self.mode!r}")
        if self.shots < 1:
            raise ValueError("shots must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass(frozen=True)
class CutSite:
    """Placeholder token where cut ``cut_index`` touches one subcircuit;
    ``side`` 0 is the cut gate's first listed qubit."""

    cut_index: int
    side: int


@dataclass(frozen=True)
class SubcircuitSpec:
    """One part: its sorted global qubits and its token sequence (gates with
    global indices, plus cut sites).  Local qubit i is ``qubits[i]``."""

    index: int
    qubits: tuple[int, ...]
    tokens: tuple[Gate | CutSite, ...]

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    def local_index(self, q: int) -> int:
        return self.qubits.index(q)

    def local_cuts(self) -> tuple[int, ...]:
        """Cut indices visible to this part, in first-appearance order."""
        seen: list[int] = []
        for t in self.tokens:
            if isinstance(t, CutSite) and t.cut_index not in seen:
                seen.append(t.cut_index)
        return tuple(seen)


@dataclass(frozen=True)
class CutCircuit:
    """A circuit partitioned by a plan, ready for execution."""

    circuit: Circuit
    plan: CutPlan
    specs: tuple[SubcircuitSpec, ...]
    subexp_sets: tuple[tuple[Subexperiment, ...], ...]

    @property
    def n_cuts(self) -> int:
        return len(self.subexp_sets)

    @property
    def n_combinations(self) -> int:
        return combination_count(self.n_cuts)


def partition_circuit(c: Circuit, plan: CutPlan) -> CutCircuit:
    """Split ``c`` along ``plan`` into per-part token sequences.

    Every gate that crosses parts must be listed in ``plan.cut_gates`` and
    must be cuttable; a one-qubit gate lands in its qubit's part.
    """
    if len(plan.assignment) != c.n_qubits:
        raise ManualInvalid(
            f"plan covers {len(plan.assignment)} qubits, circuit has {c.n_qubits}"
        )
    cut_set = set(plan.cut_gates)
    if len(cut_set) != len(plan.cut_gates):
        raise ManualInvalid("duplicate entries in cut_gates")
    for i in plan.cut_gates:
        if not 0 <= i < c.n_gates or c.gates[i].n_qubits != 2:
            raise ManualInvalid(f"cut_gates entry {i} is not a two-qubit gate")
    n_parts = plan.n_parts
    tokens: list[list[Gate | CutSite]] = [[] for _ in range(n_parts)]
    subexp_sets: list = [None] * len(plan.cut_gates)
    cut_ordinal = {gate_idx: j for j, gate_idx in enumerate(plan.cut_gates)}
    for i, g in enumerate(c.gates):
        labels = [plan.assignment[q] for q in g.qubits]
        if i in cut_set:
            if labels[0] == labels[1]:
                raise ManualInvalid(f"cut gate {i} does not cross parts")
            j = cut_ordinal[i]
            subexp_sets[j] = make_subexperiments(g, (labels[0], labels[1]), register=j)
            tokens[labels[0]].append(CutSite(j, 0))
            tokens[labels[1]].append(CutSite(j, 1))
        elif len(set(labels)) > 1:
            raise ManualInvalid(f"gate {i} crosses parts but is not cut")
        else:
            tokens[labels[0]].append(g)
    parts = plan.parts()
    specs = tuple(
        SubcircuitSpec(p, parts[p], tuple(tokens[p])) for p in range(n_parts)
    )
    return CutCircuit(c, plan, specs, tuple(subexp_sets))


@dataclass(frozen=True)
class SplitTerm:
    """One observable term factorized over the parts.

    ``factors[p]`` is the term's restriction to part p as ``(global qubit,
    axis)`` pairs; the union over parts is exactly the original term.
    """

    coeff: float
    factors: tuple[tuple[tuple[int, str], ...], ...]


@dataclass(frozen=True)
class SplitObservable:
    terms: tuple[SplitTerm, ...]
    constant: float
    n_parts: int


def split_observable(obs: PauliObservable, plan: CutPlan) -> SplitObservable:
    """Factorize each term over the plan's parts; empty terms fold into
    ``constant`` (the identity reconstructs to 1 by trace preservation)."""
    n_parts = plan.n_parts
    n = len(plan.assignment)
    if obs.max_qubit() >= n:
        raise ValueError("observable references qubits outside the circuit")
    terms = []
    constant = []
    for t in obs.terms:
        if not t.paulis:
            constant.append(t.coeff)
            continue
        factors: list[list[tuple[int, str]]] = [[] for _ in range(n_parts)]
        for q, a in t.paulis:
            factors[plan.assignment[q]].append((q, a))
        terms.append(SplitTerm(t.coeff, tuple(tuple(f) for f in factors)))
    return SplitObservable(tuple(terms), math.fsum(constant), n_parts)


@dataclass
class _Leaf:
    """One measurement-outcome path of a subcircuit run."""

    probability: float
    sign: int
    state: StateVector


def _local_gate(g: Gate, local: dict[int, int]) -> Gate:
    return Gate(g.kind, tuple(local[q] for q in g.qubits), g.theta, g.axes)


def simulate_subcircuit(
    spec: SubcircuitSpec,
    chosen: dict[int, Subexperiment],
    max_qubits: int,
) -> tuple[list[_Leaf], int]:
    """Run one part under one variant choice per visible cut.

    Returns every nonzero measurement branch (probability, recorded sign,
    final state) plus the number of sign measurements executed.
    """
    if spec.n_qubits > max_qubits:
        raise QubitCapExceeded(
            f"subcircuit {spec.index} has {spec.n_qubits} qubits, cap {max_qubits}"
        )
    local = {q: i for i, q in enumerate(spec.qubits)}
    leaves = [_Leaf(1.0, 1, StateVector.zero(spec.n_qubits))]
    n_regs = 0
    for tok in spec.tokens:
        ops: tuple = (tok,)
        if isinstance(tok, CutSite):
            ops = chosen[tok.cut_index].ops[tok.side]
        for op in ops:
            if isinstance(op, SignMeasure):
                n_regs += 1
                nxt = []
                for leaf in leaves:
                    for b in sim.branch_measure(leaf.state, local[op.qubit], op.basis):
                        if b.unused:
                            continue
                        nxt.append(
                            _Leaf(leaf.probability * b.probability, leaf.sign * b.sign, b.state)
                        )
                leaves = nxt
            else:
                for leaf in leaves:
                    sim.apply_gate(leaf.state, _local_gate(op, local))
    return leaves, n_regs


def _exact_term_values(
    leaves: list[_Leaf],
    n_regs: int,
    factors: list[tuple[tuple[int, str], ...]],
    local: dict[int, int],
    noise: ReadoutNoise | None,
) -> list[float]:
    """Signed expectation of each factor over the branch ensemble, with
    analytic readout attenuation on the factor bits and the sign bits."""
    out = []
    for f in factors:
        lf = tuple((local[q], a) for q, a in f)
        e = math.fsum(
            leaf.probability * leaf.sign * sim.term_expectation(leaf.state, lf)
            for leaf in leaves
        )
        out.append(sim.apply_readout_to_expectation(e, len(f) + n_regs, noise))
    return out


_ROT_KINDS = {"X": ("H",), "Y": ("Sdg", "H"), "Z": ()}


def _shot_term_value(
    leaves: list[_Leaf],
    n_regs: int,
    factor_local: tuple[tuple[int, str], ...],
    m_shots: int,
    noise: ReadoutNoise | None,
    rng: np.random.Generator,
) -> float:
    """Sampled estimate of one factor's signed expectation.

    Shots are allocated over branches by probability.  Readout noise flips
    each recorded bit independently; a flip of any of the (factor + sign
    register) bits flips the per-shot product, so the combined flip is a
    single Bernoulli with p = (1 - (1-2*eps)**n_bits)/2, sampled per outcome.
    """
    eps = 0.0
    if noise is not None:
        sim.apply_readout_to_expectation(1.0, 1, noise)  # reject asymmetric
        eps = noise.p01
    probs = np.array([leaf.probability for leaf in leaves])
    alloc = rng.multinomial(m_shots, probs / probs.sum())
    n_bits = len(factor_local) + n_regs
    p_flip = 0.5 * (1.0 - (1.0 - 2.0 * eps) ** n_bits) if eps else 0.0
    acc = 0.0
    for leaf, m in zip(leaves, alloc):
        if m == 0:
            continue
        if not factor_local:
            flips = rng.binomial(m, p_flip) if p_flip else 0
            acc += leaf.sign * (m - 2 * flips)
            continue
        work = leaf.state.copy()
        for q, a in factor_local:
            for kind in _ROT_KINDS[a]:
                sim.apply_gate(work, Gate(kind, (q,)))
        pvals = work.probabilities()
        counts = rng.multinomial(m, pvals / pvals.sum())
        mask = 0
        for q, _ in factor_local:
            mask |= 1 << q
        idx = np.arange(pvals.size, dtype=np.uint64) & np.uint64(mask)
        for s in (32, 16, 8, 4, 2, 1):
            idx ^= idx >> np.uint64(s)
        eig = 1.0 - 2.0 * (idx & np.uint64(1)).astype(np.float64)
        if p_flip:
            flipped = rng.binomial(counts, p_flip)
            acc += leaf.sign * float(np.sum(eig * (counts - 2 * flipped)))
        else:
            acc += leaf.sign * float(np.sum(eig * counts))
    return acc / m_shots


def execute_parallel(tasks, fn, workers: int = 1) -> list:
    """Run ``fn`` over ``tasks`` preserving order; results land in fixed
    slots so the output is identical for any worker count.  The first failed
    task's exception (in task order) propagates."""
    results = [None] * len(tasks)
    if workers <= 1:
        for i, t in enumerate(tasks):
            results[i] = fn(t)
        return results
    errors: list[tuple[int, BaseException]] = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(fn, t): i for i, t in enumerate(tasks)}
        for fut, i in futures.items():
            try:
                results[i] = fut.result()
            except BaseException as exc:
                errors.append((i, exc))
    if errors:
        errors.sort(key=lambda e: e[0])
        raise errors[0][1]
    return results


def _variant_vectors(n_local: int):
    return itertools.product(range(1, 7), repeat=n_local)


def reconstruct_expectation(
    c: Circuit,
    obs: PauliObservable,
    plan: CutPlan,
    backend: ExecutionBackend,
) -> float:
    """Expectation of ``obs`` on ``c`` evaluated only through the plan's
    subcircuits.  Exact mode reproduces the uncut value to numerical
    precision; shots mode is an unbiased estimate whose variance grows with
    the squared sampling overhead."""
    cut = partition_circuit(c, plan)
    split = split_observable(obs, plan)
    sets = cut.subexp_sets
    specs = cut.specs
    n_combos = cut.n_combinations
    local_maps = [{q: i for i, q in enumerate(s.qubits)} for s in specs]
    local_cuts = [s.local_cuts() for s in specs]

    if not split.terms:
        return split.constant

    # one simulation per (part, variants visible to that part)
    tasks = []
    for s, spec in enumerate(specs):
        for vvec in _variant_vectors(len(local_cuts[s])):
            tasks.append((s, vvec))

    def simulate(task):
        s, vvec = task
        chosen = {ci: sets[ci][v - 1] for ci, v in zip(local_cuts[s], vvec)}
        return simulate_subcircuit(specs[s], chosen, backend.max_qubits)

    sims = execute_parallel(tasks, simulate, backend.workers)
    leaves_of = {task: res for task, res in zip(tasks, sims)}

    factors_by_part = [
        [t.factors[s] for t in split.terms] for s in range(len(specs))
    ]

    if backend.mode == "exact":
        vals: dict[tuple[int, tuple[int, ...]], list[float]] = {}
        for (s, vvec), (leaves, n_regs) in leaves_of.items():
            vals[(s, vvec)] = _exact_term_values(
                leaves, n_regs, factors_by_part[s], local_maps[s], backend.noise
            )
        acc = [0.0] * len(split.terms)
        for combo in enumerate_combinations(sets):
            for t in range(len(split.terms)):
                prod = combo.coefficient
                for s in range(len(specs)):
                    vv = tuple(combo.variants[ci] for ci in local_cuts[s])
                    prod *= vals[(s, vv)][t]
                acc[t] += prod
        total = math.fsum(
            term.coeff * acc[t] for t, term in enumerate(split.terms)
        )
        return total + split.constant

    # shots mode: every combination is an independent experiment
    seed_root = 0 if backend.seed is None else backend.seed
    m_shots = max(_MIN_SHOTS_PER_COMBO, backend.shots // n_combos)
    acc = [0.0] * len(split.terms)
    for combo_idx, combo in enumerate(enumerate_combinations(sets)):
        for t, term in enumerate(split.terms):
            prod = combo.coefficient
            for s in range(len(specs)):
                vv = tuple(combo.variants[ci] for ci in local_cuts[s])
                leaves, n_regs = leaves_of[(s, vv)]
                lf = tuple((local_maps[s][q], a) for q, a in term.factors[s])
                rng = np.random.default_rng(
                    np.random.SeedSequence((seed_root, 101, combo_idx, s, t))
                )
                prod *= _shot_term_value(
                    leaves, n_regs, lf, m_shots, backend.noise, rng
                )
            acc[t] += prod
    total = math.fsum(term.coeff * acc[t] for t, term in enumerate(split.terms))
    return total + split.constant


def uncut_expectation(
    c: Circuit, obs: PauliObservable, backend: ExecutionBackend
) -> float:
    """Expectation on the whole circuit under the same backend semantics."""
    state = sim.run(c, max_qubits=backend.max_qubits)
    if backend.mode == "exact":
        vals = []
        for t in obs.terms:
            e = sim.term_expectation(state, t.paulis)
            vals.append(
                t.coeff * sim.apply_readout_to_expectation(e, t.weight, backend.noise)
            )
        return math.fsum(vals)
    seed_root = 0 if backend.seed is None else backend.seed
    vals = []
    for ti, t in enumerate(obs.terms):
        if not t.paulis:
            vals.append(t.coeff)
            continue
        work = state.copy()
        for q, a in t.paulis:
            for kind in _ROT_KINDS[a]:
                sim.apply_gate(work, Gate(kind, (q,)))
        rng = np.random.default_rng(np.random.SeedSequence((seed_root, 202, ti)))
        counts = sim.sample(work, backend.shots, noise=backend.noise, rng=rng)
        est = sim.expectation_from_counts(counts, [q for q, _ in t.paulis])
        vals.append(t.coeff * est)
    return math.fsum(vals)


def expectation_with_backend(
    c: Circuit,
    obs: PauliObservable,
    backend: ExecutionBackend,
    plan: CutPlan | None = None,
) -> float:
    """Dispatch to the cut or uncut evaluation path."""
    if plan is None:
        return uncut_expectation(c, obs, backend)
    return reconstruct_expectation(c, obs, plan, backend)


def reconstruct_statevector(
    c: Circuit, plan: CutPlan, backend: ExecutionBackend
) -> StateVector:
    """Rebuild the full output state from subcircuit runs alone.

    Sums the signed product density operators over all combinations, then
    extracts the dominant eigenvector.  The result is the circuit's pure
    output state (global phase fixed by making the first sizeable amplitude
    real positive); a non-dominant spectrum raises MixedStateDetected.
    """
    n = c.n_qubits
    if n > _STATEVECTOR_MAX_QUBITS:
        raise QubitCapExceeded(
            f"density rebuild capped at {_STATEVECTOR_MAX_QUBITS} qubits, got {n}"
        )
    cut = partition_circuit(c, plan)
    sets = cut.subexp_sets
    specs = cut.specs
    local_cuts = [s.local_cuts() for s in specs]

    tasks = []
    for s, spec in enumerate(specs):
        for vvec in _variant_vectors(len(local_cuts[s])):
            tasks.append((s, vvec))

    def density(task):
        s, vvec = task
        chosen = {ci: sets[ci][v - 1] for ci, v in zip(local_cuts[s], vvec)}
        leaves, _ = simulate_subcircuit(specs[s], chosen, backend.max_qubits)
        dim = 1 << specs[s].n_qubits
        rho = np.zeros((dim, dim), dtype=np.complex128)
        for leaf in leaves:
            w = leaf.probability * leaf.sign
            rho += w * np.outer(leaf.state.amps, np.conj(leaf.state.amps))
        return rho

    rhos = execute_parallel(tasks, density, backend.workers)
    rho_of = {task: r for task, r in zip(tasks, rhos)}

    # permutation from kron order (part 0 least significant) to global order
    g = np.arange(1 << n, dtype=np.int64)
    k = np.zeros_like(g)
    offset = 0
    for spec in specs:
        for j, q in enumerate(spec.qubits):
            k |= ((g >> q) & 1) << (offset + j)
        offset += spec.n_qubits

    rho_full = np.zeros((1 << n, 1 << n), dtype=np.complex128)
    for combo in enumerate_combinations(sets):
        parts = []
        for s in range(len(specs)):
            vv = tuple(combo.variants[ci] for ci in local_cuts[s])
            parts.append(rho_of[(s, vv)])
        kron = parts[-1]
        for s in range(len(specs) - 2, -1, -1):
            kron = np.kron(kron, parts[s])
        rho_full += combo.coefficient * kron[np.ix_(k, k)]

    evals, evecs = np.linalg.eigh(rho_full)
    lead = float(evals[-1])
    if lead < 1.0 - _PURITY_TOL or abs(float(np.sum(evals)) - 1.0) > _PURITY_TOL:
        raise MixedStateDetected(
            f"dominant eigenvalue {lead:.6f}, trace {float(np.sum(evals)):.6f}"
        )
    vec = evecs[:, -1]
    for x in vec:
        if abs(x) > 1e-9:
            vec = vec * (abs(x) / x)
            break
    return StateVector(vec)
