"""Weighted Max-Cut via the alternating-operator ansatz.

The cost observable for a graph with weights w_ij is
H = sum_ij (w_ij/2) * (Z_i Z_j - 1), whose expectation on a basis state is
exactly minus the cut value of that bitstring.  One ansatz layer applies
CRZ(2*gamma*w_ij) per edge and Rx(2*beta) per qubit after an initial H on
every qubit.  A derivative-free simplex search drives the angles, and every
energy evaluation can run through gate cutting instead of the full device.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import optimize as scipy_optimize

from .circuit import CRZ, Circuit, Gate, PauliObservable, Rx, index_to_bitstring
from .cutfinder import CutPlan
from .errors import LengthMismatch
from .reconstruct import ExecutionBackend, expectation_with_backend
from . import sim

_BRUTE_FORCE_MAX = 20
_TIE_TOL = 1e-12


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with non-negative edge weights, edges stored as
    (i, j, w) with i < j, sorted, no duplicates or self loops."""

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one node")
        norm = []
        seen = set()
        for i, j, w in self.edges:
            i, j, w = int(i), int(j), float(w)
            if i == j:
                raise ValueError(f"self loop at node {i}")
            if i > j:
                i, j = j, i
            if not 0 <= i < j < self.n:
                raise ValueError(f"edge ({i},{j}) outside 0..{self.n - 1}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i},{j})")
            if not math.isfinite(w) or w < 0:
                raise ValueError(f"edge ({i},{j}) has bad weight {w}")
            seen.add((i, j))
            norm.append((i, j, w))
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def total_weight(self) -> float:
        return math.fsum(w for _, _, w in self.edges)

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [[i, j, w] for i, j, w in self.edges]}

    @classmethod
    def from_dict(cls, data: dict) -> "WeightedGraph":
        return cls(int(data["n"]), tuple((e[0], e[1], e[2]) for e in data["edges"]))


def _as_bits(g: WeightedGraph, bits) -> tuple[int, ...]:
    """Normalize a bitstring (MSB-first str) or per-node sequence to a tuple
    indexed by node."""
    if isinstance(bits, str):
        if len(bits) != g.n:
            raise LengthMismatch(f"bitstring length {len(bits)} != {g.n} nodes")
        return tuple(1 if bits[g.n - 1 - q] == "1" else 0 for q in range(g.n))
    vals = tuple(int(b) for b in bits)
    if len(vals) != g.n:
        raise LengthMismatch(f"assignment length {len(vals)} != {g.n} nodes")
    return vals


def cut_value(g: WeightedGraph, bits) -> float:
    """Total weight crossing the two sides; exact rational accumulation."""
    x = _as_bits(g, bits)
    acc = Fraction(0)
    for i, j, w in g.edges:
        if x[i] != x[j]:
            acc += Fraction(w)
    return float(acc)


def maxcut_hamiltonian(g: WeightedGraph) -> PauliObservable:
    """H = sum (w_ij/2)(Z_i Z_j) - total/2; diagonal value is -cut(x)."""
    terms = [(w / 2.0, {i: "Z", j: "Z"}) for i, j, w in g.edges]
    terms.append((-g.total_weight() / 2.0, {}))
    return PauliObservable.from_terms(terms)


@dataclass(frozen=True)
class QaoaParams:
    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        if len(self.gammas) != len(self.betas) or not self.gammas:
            raise ValueError("need equal, nonzero numbers of gammas and betas")
        object.__setattr__(self, "gammas", tuple(float(x) for x in self.gammas))
        object.__setattr__(self, "betas", tuple(float(x) for x in self.betas))

    @property
    def p(self) -> int:
        return len(self.gammas)

    def as_vector(self) -> np.ndarray:
        return np.array(self.gammas + self.betas, dtype=float)

    @classmethod
    def from_vector(cls, vec) -> "QaoaParams":
        vec = list(vec)
        p = len(vec) // 2
        return cls(tuple(vec[:p]), tuple(vec[p:]))


def build_ansatz(g: WeightedGraph, params: QaoaParams) -> Circuit:
    """Initial H layer, then per layer: CRZ(2*gamma*w) per edge (control =
    lower node) followed by Rx(2*beta) on every qubit."""
    gates: list[Gate] = [Gate("H", (q,)) for q in range(g.n)]
    for gamma, beta in zip(params.gammas, params.betas):
        for i, j, w in g.edges:
            gates.append(CRZ(2.0 * gamma * w, i, j))
        for q in range(g.n):
            gates.append(Rx(2.0 * beta, q))
    return Circuit(g.n, tuple(gates))


@dataclass
class ConvergenceEntry:
    iteration: int
    wall_seconds: float
    cost_units: int
    expectation: float


@dataclass
class ConvergenceLog:
    """One entry per objective evaluation.

    ``cost_units`` is a deterministic logical clock (cumulative subexperiment
    simulations); wall time is recorded alongside.  CSV output defaults to
    the logical clock so identical runs produce identical bytes.
    """

    entries: list[ConvergenceEntry] = field(default_factory=list)

    def record(self, wall_seconds: float, cost_units: int, expectation: float):
        self.entries.append(
            ConvergenceEntry(len(self.entries) + 1, wall_seconds, cost_units, expectation)
        )

    def best(self) -> float:
        return min(e.expectation for e in self.entries)

    def to_csv(self, clock: str = "logical") -> str:
        if clock not in ("logical", "wall"):
            raise ValueError(f"clock must be 'logical' or 'wall', got {clock!r}")
        lines = ["iter,seconds,expectation"]
        for e in self.entries:
            seconds = str(e.cost_units) if clock == "logical" else f"{e.wall_seconds:.6f}"
            lines.append(f"{e.iteration},{seconds},{e.expectation!r}")
        return "\n".join(lines) + "\n"


@dataclass
class OptimizerConfig:
    max_evals: int = 200
    seed: int | None = 0
    initial: QaoaParams | None = None
    xatol: float = 1e-3
    fatol: float = 1e-6


@dataclass
class QaoaResult:
    params: QaoaParams
    expectation: float
    log: ConvergenceLog
    converged: bool


def optimize(
    g: WeightedGraph,
    p: int,
    backend: ExecutionBackend,
    plan: CutPlan | None = None,
    cfg: OptimizerConfig | None = None,
) -> QaoaResult:
    """Minimize the cost expectation over ansatz angles by simplex search.

    Every evaluation builds the ansatz, evaluates it through ``backend``
    (through the cut plan when given), and is logged.  The start point is
    drawn uniformly from [0, 2*pi) with the configured seed, so cut and
    uncut runs of the same seed follow the same trajectory in exact mode.
    """
    cfg = cfg or OptimizerConfig()
    obs = maxcut_hamiltonian(g)
    if cfg.initial is not None:
        x0 = cfg.initial.as_vector()
        if cfg.initial.p != p:
            raise ValueError(f"initial params have p={cfg.initial.p}, expected {p}")
    else:
        rng = np.random.default_rng(cfg.seed)
        x0 = rng.uniform(0.0, 2.0 * math.pi, size=2 * p)
    units_per_eval = 1
    if plan is not None:
        units_per_eval = 6 ** len(plan.cut_gates) * plan.n_parts
    log = ConvergenceLog()
    t0 = time.perf_counter()
    clock = 0

    def objective(x: np.ndarray) -> float:
        nonlocal clock
        params = QaoaParams.from_vector(x)
        circ = build_ansatz(g, params)
        value = expectation_with_backend(circ, obs, backend, plan)
        clock += units_per_eval
        log.record(time.perf_counter() - t0, clock, value)
        return value

    res = scipy_optimize.minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "maxfev": cfg.max_evals,
            "xatol": cfg.xatol,
            "fatol": cfg.fatol,
            "adaptive": False,
        },
    )
    return QaoaResult(
        params=QaoaParams.from_vector(res.x),
        expectation=float(res.fun),
        log=log,
        converged=bool(res.success),
    )


def extract_solution(
    g: WeightedGraph,
    params: QaoaParams,
    max_qubits: int = sim.DEFAULT_QUBIT_CAP,
) -> tuple[str, float]:
    """Most probable basis state of the optimized ansatz and its cut value.

    Probability ties within 1e-12 resolve to the smallest basis index.
    """
    state = sim.run(build_ansatz(g, params), max_qubits=max_qubits)
    probs = state.probabilities()
    best = int(np.flatnonzero(probs >= probs.max() - _TIE_TOL)[0])
    bits = index_to_bitstring(best, g.n)
    return bits, cut_value(g, bits)


def brute_force_maxcut(g: WeightedGraph) -> tuple[str, float]:
    """Exhaustive maximum cut; ties resolve to the smallest basis index.

    Only the half-space with node n-1 on side 0 is scanned (complementing a
    bitstring preserves the cut).
    """
    if g.n > _BRUTE_FORCE_MAX:
        raise ValueError(f"exhaustive search capped at {_BRUTE_FORCE_MAX} nodes")
    m = 1 << (g.n - 1) if g.n > 1 else 1
    idx = np.arange(m, dtype=np.int64)
    acc = np.zeros(m)
    for i, j, w in g.edges:
        crossing = ((idx >> i) ^ (idx >> j)) & 1
        acc += w * crossing
    best = int(np.flatnonzero(acc >= acc.max() - _TIE_TOL)[0])
    bits = index_to_bitstring(best, g.n)
    return bits, cut_value(g, bits)


def random_graph(
    n: int,
    edge_prob: float,
    rng: np.random.Generator | int | None = None,
    weights: str = "unit",
) -> WeightedGraph:
    """Erdos-Renyi graph; weights are 1.0 ("unit") or uniform on (0, 1)."""
    gen = sim.as_rng(rng)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if gen.random() < edge_prob:
                w = 1.0 if weights == "unit" else float(gen.uniform(0.1, 1.0))
                edges.append((i, j, w))
    return WeightedGraph(n, tuple(edges))


def random_cut_baseline(
    g: WeightedGraph, n_samples: int, rng: np.random.Generator | int | None = None
) -> float:
    """Mean cut value of uniformly random assignments."""
    gen = sim.as_rng(rng)
    sides = gen.integers(0, 2, size=(n_samples, g.n))
    acc = np.zeros(n_samples)
    for i, j, w in g.edges:
        acc += w * (sides[:, i] != sides[:, j])
    return float(acc.mean())
