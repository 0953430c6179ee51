"""Find where to cut a circuit so every part fits a qubit budget.

The circuit's two-qubit gates induce a weighted connectivity graph (weight =
number of gates per qubit pair).  A partition of the qubits into parts of at
most ``max_qubits`` costs the total crossing weight, i.e. the number of gates
that must be cut.  Minimization runs a univariate marginal estimation-of-
distribution algorithm over assignment vectors; an exhaustive set-partition
search provides the exact optimum for small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .errors import ManualInvalid, NoCutNeeded

_BRUTE_FORCE_MAX = 12


@dataclass(frozen=True)
class CutPlan:
    """A qubit partition plus the circuit gate indices it cuts.

    ``assignment[q]`` is the part label of qubit ``q``; labels are canonical
    (they appear in first-occurrence order starting at 0).  ``cost`` equals
    ``len(cut_gates)``.
    """

    assignment: tuple[int, ...]
    cut_gates: tuple[int, ...]
    cost: int

    @property
    def n_parts(self) -> int:
        return max(self.assignment) + 1 if self.assignment else 0

    def parts(self) -> list[tuple[int, ...]]:
        """Qubits of each part, sorted, indexed by part label."""
        out: list[list[int]] = [[] for _ in range(self.n_parts)]
        for q, p in enumerate(self.assignment):
            out[p].append(q)
        return [tuple(p) for p in out]

    def to_dict(self) -> dict:
        return {
            "assignment": list(self.assignment),
            "cut_gates": list(self.cut_gates),
            "cost": int(self.cost),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CutPlan":
        try:
            return cls(
                tuple(int(x) for x in data["assignment"]),
                tuple(int(x) for x in data["cut_gates"]),
                int(data["cost"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ManualInvalid(f"malformed cut plan payload: {exc}") from exc


def connectivity(c: Circuit) -> np.ndarray:
    """Symmetric (n, n) int matrix counting two-qubit gates per qubit pair."""
    w = np.zeros((c.n_qubits, c.n_qubits), dtype=np.int64)
    for g in c.gates:
        if g.n_qubits == 2:
            a, b = g.qubits
            w[a, b] += 1
            w[b, a] += 1
    return w


def canonical_assignment(assignment) -> tuple[int, ...]:
    """Relabel parts so labels appear in first-occurrence order from 0."""
    relabel: dict[int, int] = {}
    out = []
    for a in assignment:
        if a not in relabel:
            relabel[a] = len(relabel)
        out.append(relabel[a])
    return tuple(out)


def part_sizes(assignment) -> list[int]:
    sizes: dict[int, int] = {}
    for a in assignment:
        sizes[a] = sizes.get(a, 0) + 1
    return [sizes[k] for k in sorted(sizes)]


def crossing_cost(w: np.ndarray, assignment) -> int:
    """Total connectivity weight between distinct parts."""
    a = np.asarray(assignment)
    diff = a[:, None] != a[None, :]
    return int((w * diff).sum() // 2)


def batch_objective(
    w: np.ndarray, assignments: np.ndarray, max_qubits: int
) -> np.ndarray:
    """Crossing cost per row, with invalid rows (an oversized part) charged
    the flat penalty 1 + total weight so any valid partition beats them."""
    a = np.asarray(assignments)
    diff = a[:, :, None] != a[:, None, :]
    costs = (diff * w[None, :, :]).sum(axis=(1, 2)) // 2
    penalty = 1 + int(w.sum() // 2)
    n_vals = int(a.max()) + 1 if a.size else 1
    counts = (a[:, :, None] == np.arange(n_vals)[None, None, :]).sum(axis=1)
    costs = np.where(counts.max(axis=1) > max_qubits, penalty, costs)
    return costs.astype(np.int64)


def _restricted_growth_strings(n: int, max_size: int):
    """All canonical set partitions of n items, pruning parts over max_size."""
    assignment = [0] * n
    sizes = [0] * (n + 1)

    def rec(i: int, n_parts: int):
        if i == n:
            yield tuple(assignment)
            return
        for label in range(n_parts + 1):
            if sizes[label] >= max_size:
                continue
            assignment[i] = label
            sizes[label] += 1
            yield from rec(i + 1, max(n_parts, label + 1))
            sizes[label] -= 1

    yield from rec(0, 0)


def brute_force_cuts(c: Circuit, max_qubits: int) -> CutPlan:
    """Exact minimum-cost plan by exhaustive canonical-partition search.

    Ties break toward the lexicographically smallest assignment (the
    enumeration order).  Only feasible below ~12 qubits.
    """
    n = c.n_qubits
    if n > _BRUTE_FORCE_MAX:
        raise ValueError(f"exhaustive search capped at {_BRUTE_FORCE_MAX} qubits")
    if n <= max_qubits:
        raise NoCutNeeded(f"{n} qubits already fit budget {max_qubits}")
    w = connectivity(c)
    assignments = np.array(list(_restricted_growth_strings(n, max_qubits)), dtype=np.int64)
    best: tuple[int, ...] | None = None
    best_cost = None
    for start in range(0, len(assignments), 20_000):
        chunk = assignments[start : start + 20_000]
        diff = chunk[:, :, None] != chunk[:, None, :]
        costs = (diff * w[None, :, :]).sum(axis=(1, 2)) // 2
        i = int(costs.argmin())
        if best_cost is None or costs[i] < best_cost:
            best = tuple(int(x) for x in chunk[i])
            best_cost = int(costs[i])
    assert best is not None
    return _plan_from_assignment(c, best)


@dataclass
class EdaConfig:
    """Univariate-marginal EDA settings."""

    population: int = 120
    generations: int = 120
    elite_frac: float = 0.3
    smoothing: float = 0.5
    min_prob: float = 0.02
    seed: int | None = 0
    seeds: tuple[tuple[int, ...], ...] = field(default_factory=tuple)


def eda_minimize(
    objective,
    n_vars: int,
    n_values: int,
    cfg: EdaConfig | None = None,
) -> tuple[tuple[int, ...], int]:
    """Minimize a batch objective over categorical vectors.

    ``objective`` maps an (m, n_vars) int array to m costs.  Marginals for
    each variable start uniform, are refit on the elite fraction of each
    generation with Laplace smoothing, and are floored at ``min_prob``.  The
    best individual ever seen is re-injected every generation and returned.
    """
    cfg = cfg or EdaConfig()
    rng = np.random.default_rng(cfg.seed)
    probs = np.full((n_vars, n_values), 1.0 / n_values)
    n_elite = max(2, int(round(cfg.elite_frac * cfg.population)))

    best_x: np.ndarray | None = None
    best_cost = None
    for gen in range(cfg.generations):
        u = rng.random((cfg.population, n_vars, 1))
        cdf = probs.cumsum(axis=1)[None, :, :]
        pop = (u > cdf).sum(axis=2)
        if gen == 0:
            for row, seeded in enumerate(cfg.seeds[: cfg.population]):
                pop[row] = seeded
        if best_x is not None:
            pop[-1] = best_x
        costs = np.asarray(objective(pop))
        order = np.argsort(costs, kind="stable")
        top = order[0]
        if best_cost is None or costs[top] < best_cost:
            best_cost = int(costs[top])
            best_x = pop[top].copy()
        elite = pop[order[:n_elite]]
        for v in range(n_vars):
            counts = np.bincount(elite[:, v], minlength=n_values).astype(float)
            p = (counts + cfg.smoothing) / (counts.sum() + cfg.smoothing * n_values)
            p = np.clip(p, cfg.min_prob, None)
            probs[v] = p / p.sum()
    assert best_x is not None and best_cost is not None
    return tuple(int(x) for x in best_x), best_cost


def _plan_from_assignment(c: Circuit, assignment) -> CutPlan:
    canon = canonical_assignment(assignment)
    cut = tuple(
        i
        for i, g in enumerate(c.gates)
        if g.n_qubits == 2 and canon[g.qubits[0]] != canon[g.qubits[1]]
    )
    return CutPlan(canon, cut, len(cut))


def _block_fill(n: int, max_qubits: int, n_parts: int) -> tuple[int, ...]:
    """A valid assignment filling parts left to right; used to seed the EDA."""
    return tuple(min(q // max_qubits, n_parts - 1) for q in range(n))


def find_cuts(
    c: Circuit,
    max_qubits: int,
    manual=None,
    cfg: EdaConfig | None = None,
) -> CutPlan:
    """Minimum-cut partition of ``c`` into parts of at most ``max_qubits``.

    With ``manual`` (an assignment vector) the plan is built directly after
    validation.  Otherwise the EDA searches over ceil(n/max_qubits) parts and
    one extra, keeping the cheaper result.  Raises NoCutNeeded when the
    circuit already fits.
    """
    n = c.n_qubits
    if max_qubits < 1:
        raise ManualInvalid(f"max_qubits must be positive, got {max_qubits}")
    if n <= max_qubits:
        raise NoCutNeeded(f"{n} qubits already fit budget {max_qubits}")

    if manual is not None:
        manual = tuple(int(x) for x in manual)
        if len(manual) != n:
            raise ManualInvalid(f"assignment length {len(manual)} != {n} qubits")
        if max(part_sizes(manual)) > max_qubits:
            raise ManualInvalid(f"a part exceeds the budget of {max_qubits}")
        if min(manual) < 0:
            raise ManualInvalid("part labels must be non-negative")
        return _plan_from_assignment(c, manual)

    w = connectivity(c)
    k_min = math.ceil(n / max_qubits)
    best_plan: CutPlan | None = None
    for offset, k in enumerate(range(k_min, min(n, k_min + 1) + 1)):
        run_cfg = cfg or EdaConfig()
        seed_base = 0 if run_cfg.seed is None else run_cfg.seed
        run_cfg = EdaConfig(
            population=run_cfg.population,
            generations=run_cfg.generations,
            elite_frac=run_cfg.elite_frac,
            smoothing=run_cfg.smoothing,
            min_prob=run_cfg.min_prob,
            seed=seed_base + offset,
            seeds=run_cfg.seeds + (_block_fill(n, max_qubits, k),),
        )
        assignment, _ = eda_minimize(
            lambda pop: batch_objective(w, pop, max_qubits), n, k, run_cfg
        )
        plan = _plan_from_assignment(c, assignment)
        if max(part_sizes(plan.assignment)) > max_qubits:
            continue
        if best_plan is None or plan.cost < best_plan.cost:
            best_plan = plan
    assert best_plan is not None, "seeded block fill guarantees a valid plan"
    return best_plan
