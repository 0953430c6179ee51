"""Command-line interface.

Subcommands: ``cut`` (find or validate a partition), ``run`` (evaluate an
observable through cutting), ``qaoa`` (Max-Cut with cutting in the loop),
``market`` (prices CSV to correlation graph).  Exit codes: 0 success,
2 invalid input, 3 the circuit already fits the budget, 4 a qubit or
combination budget was exceeded.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .circuit import Circuit, Gate, PauliObservable
from .cutfinder import CutPlan, EdaConfig, find_cuts
from .errors import (
    CombinationBudgetExceeded,
    NoCutNeeded,
    QuantCutError,
    QubitCapExceeded,
)
from .market import (
    MarketGraph,
    build_market_graph,
    covariance_matrix,
    ingest_csv,
    split_metrics,
    conservation_residual,
)
from .qaoa import (
    OptimizerConfig,
    WeightedGraph,
    extract_solution,
    optimize,
)
from .qpd import combination_count, sampling_overhead_for_gates
from .reconstruct import ExecutionBackend, expectation_with_backend, partition_circuit
from .sim import ReadoutNoise

import numpy as np


def _load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def load_graph(path) -> tuple[WeightedGraph, tuple[str, ...] | None]:
    """Load a graph from JSON (market or plain) or an ``i j w`` edge list."""
    p = Path(path)
    if p.suffix == ".json":
        data = _load_json(p)
        if "tickers" in data:
            mg = MarketGraph.from_dict(data)
            return mg.graph, mg.tickers
        return WeightedGraph.from_dict(data), None
    edges = []
    n = 0
    for lineno, line in enumerate(p.read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise QuantCutError(f"{path}:{lineno}: expected 'i j [w]'")
        i, j = int(parts[0]), int(parts[1])
        w = float(parts[2]) if len(parts) == 3 else 1.0
        edges.append((i, j, w))
        n = max(n, i + 1, j + 1)
    return WeightedGraph(n, tuple(edges)), None


def _gate_tokens(g: Gate) -> dict[int, str]:
    if g.n_qubits == 1:
        return {g.qubits[0]: g.kind}
    a, b = g.qubits
    if g.kind == "CX":
        return {a: "o", b: "X"}
    if g.kind == "CRZ":
        return {a: "o", b: "Z"}
    return {a: f"I{g.axes[0]}", b: f"I{g.axes[1]}"}


def _render_grid(qubits, columns) -> str:
    """Wire-per-qubit text grid; each column maps qubit -> token."""
    width = max((len(t) for col in columns for t in col.values()), default=1)
    lines = []
    for q in qubits:
        row = "-".join(col.get(q, "").center(width, "-") for col in columns)
        lines.append(f"q{q:<3}|-{row}-|")
    return "\n".join(lines)


def render_circuit(c: Circuit, plan: CutPlan | None = None) -> str:
    """ASCII diagram, one wire per qubit; cut gates render as [cutJ]."""
    cut_ord = (
        {gi: j for j, gi in enumerate(plan.cut_gates)} if plan is not None else {}
    )
    columns = []
    for i, g in enumerate(c.gates):
        if i in cut_ord:
            tok = f"[cut{cut_ord[i]}]"
            columns.append({g.qubits[0]: tok, g.qubits[1]: tok})
        else:
            columns.append(_gate_tokens(g))
    return _render_grid(range(c.n_qubits), columns)


def render_subcircuits(c: Circuit, plan: CutPlan) -> str:
    """Per-part diagrams of the partitioned circuit, cut sites marked."""
    cut = partition_circuit(c, plan)
    blocks = []
    for spec in cut.specs:
        columns = []
        for tok in spec.tokens:
            if isinstance(tok, Gate):
                columns.append(_gate_tokens(tok))
            else:
                gate = c.gates[plan.cut_gates[tok.cut_index]]
                columns.append({gate.qubits[tok.side]: f"[cut{tok.cut_index}]"})
        blocks.append(
            f"part {spec.index} (qubits {list(spec.qubits)}):\n"
            + _render_grid(spec.qubits, columns)
        )
    return "\n\n".join(blocks)


def _backend_from(args) -> ExecutionBackend:
    noise = None
    if args.noise is not None and args.noise > 0:
        noise = ReadoutNoise.symmetric(args.noise)
    return ExecutionBackend(
        mode=args.mode,
        shots=args.shots,
        noise=noise,
        seed=args.seed,
        max_qubits=args.max_qubits,
        workers=args.workers,
    )


def _require_files(*paths):
    for p in paths:
        if p is not None and not Path(p).is_file():
            raise QuantCutError(f"input file not found: {p}")


def cmd_cut(args) -> int:
    _require_files(args.circuit)
    c = Circuit.from_dict(_load_json(args.circuit))
    manual = None
    if args.manual:
        manual = [int(x) for x in args.manual.split(",")]
    plan = find_cuts(c, args.max_qubits, manual=manual, cfg=EdaConfig(seed=args.seed))
    print(render_circuit(c, plan))
    print()
    print(render_subcircuits(c, plan))
    print()
    print(_dump_json(plan.to_dict()))
    if args.out:
        Path(args.out).write_text(_dump_json(plan.to_dict()) + "\n")
    return 0


def cmd_run(args) -> int:
    _require_files(args.circuit, args.observable, args.plan)
    c = Circuit.from_dict(_load_json(args.circuit))
    obs = PauliObservable.from_dict(_load_json(args.observable))
    backend = _backend_from(args)
    plan = None
    if args.plan:
        plan = CutPlan.from_dict(_load_json(args.plan))
    elif c.n_qubits > args.max_qubits:
        plan = find_cuts(c, args.max_qubits, cfg=EdaConfig(seed=args.seed))
    value = expectation_with_backend(c, obs, backend, plan)
    if plan is not None:
        cut_gates = [c.gates[i] for i in plan.cut_gates]
        gamma = sampling_overhead_for_gates(cut_gates)
        combos = combination_count(len(plan.cut_gates))
    else:
        gamma = 1.0
        combos = 1
    print(
        _dump_json(
            {
                "expectation": value,
                "combinations": combos,
                "gamma": gamma,
                "mode": backend.mode,
            }
        )
    )
    return 0


def cmd_qaoa(args) -> int:
    _require_files(args.graph)
    graph, tickers = load_graph(args.graph)
    backend = _backend_from(args)
    plan = None
    if graph.n > args.max_qubits:
        from .qaoa import build_ansatz, QaoaParams

        probe = build_ansatz(
            graph, QaoaParams((0.1,) * args.p, (0.1,) * args.p)
        )
        plan = find_cuts(probe, args.max_qubits, cfg=EdaConfig(seed=args.seed))
    cfg = OptimizerConfig(max_evals=args.max_evals, seed=args.seed)
    result = optimize(graph, args.p, backend, plan=plan, cfg=cfg)
    bits, value = extract_solution(graph, result.params)
    side = [1 if bits[graph.n - 1 - q] == "1" else 0 for q in range(graph.n)]
    metrics = split_metrics(graph, side)
    residual = conservation_residual(graph, side)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "convergence.csv").write_text(result.log.to_csv("logical"))
    (out_dir / "params.json").write_text(
        _dump_json(
            {
                "gammas": list(result.params.gammas),
                "betas": list(result.params.betas),
                "expectation": result.expectation,
                "converged": result.converged,
            }
        )
        + "\n"
    )
    solution = {
        "bitstring": bits,
        "cut_value": value,
        "acums": list(metrics.acums),
        "total_weight": metrics.total,
        "conservation_residual": residual,
    }
    if tickers:
        solution["sides"] = {
            "0": [tickers[q] for q in range(graph.n) if side[q] == 0],
            "1": [tickers[q] for q in range(graph.n) if side[q] == 1],
        }
    (out_dir / "solution.json").write_text(_dump_json(solution) + "\n")
    manifest = {
        "command": "qaoa",
        "graph": str(args.graph),
        "p": args.p,
        "seed": args.seed,
        "mode": args.mode,
        "shots": args.shots,
        "noise": args.noise,
        "max_qubits": args.max_qubits,
        "workers": args.workers,
        "max_evals": args.max_evals,
        "cut_plan": plan.to_dict() if plan is not None else None,
    }
    (out_dir / "manifest.json").write_text(_dump_json(manifest) + "\n")
    print(_dump_json(solution))
    return 0


def cmd_market(args) -> int:
    _require_files(args.prices)
    ingest = ingest_csv(args.prices)
    cov = covariance_matrix(ingest.value_matrix())
    mg = build_market_graph(cov, ingest.tickers, args.alpha)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "market_graph.json").write_text(_dump_json(mg.to_dict()) + "\n")
    (out_dir / "edges.txt").write_text(mg.to_edge_list())
    upper = cov[np.triu_indices(cov.shape[0], k=1)]
    counts, bins = np.histogram(upper, bins=20, range=(-1.0, 1.0))
    hist_lines = ["bin_lo,bin_hi,count"]
    hist_lines += [
        f"{bins[i]!r},{bins[i + 1]!r},{int(counts[i])}" for i in range(len(counts))
    ]
    (out_dir / "weight_hist.csv").write_text("\n".join(hist_lines) + "\n")
    print(
        _dump_json(
            {
                "n_assets": mg.graph.n,
                "n_edges": mg.graph.n_edges,
                "dropped_rows": ingest.dropped_rows,
                "alpha": args.alpha,
                "total_weight": mg.graph.total_weight(),
            }
        )
    )
    return 0


def _add_backend_args(p: argparse.ArgumentParser, max_qubits_default=24):
    p.add_argument("--max-qubits", type=int, default=max_qubits_default,
                   help="qubit budget per subcircuit")
    p.add_argument("--mode", choices=("exact", "shots"), default="exact")
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--noise", type=float, default=None,
                   help="symmetric readout flip probability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantcut",
        description="cut two-qubit gates into local subexperiments and recombine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cut = sub.add_parser("cut", help="find or validate a cut plan")
    p_cut.add_argument("circuit", help="circuit JSON file")
    p_cut.add_argument("--max-qubits", type=int, required=True)
    p_cut.add_argument("--manual", help="comma-separated part label per qubit")
    p_cut.add_argument("--seed", type=int, default=0)
    p_cut.add_argument("--out", help="write the plan JSON here")
    p_cut.set_defaults(func=cmd_cut)

    p_run = sub.add_parser("run", help="evaluate an observable through cutting")
    p_run.add_argument("circuit", help="circuit JSON file")
    p_run.add_argument("observable", help="observable JSON file")
    p_run.add_argument("--plan", help="cut plan JSON (else cut when needed)")
    _add_backend_args(p_run)
    p_run.set_defaults(func=cmd_run)

    p_qaoa = sub.add_parser("qaoa", help="Max-Cut with cutting in the loop")
    p_qaoa.add_argument("graph", help="graph JSON or 'i j w' edge list")
    p_qaoa.add_argument("--p", type=int, default=1, help="ansatz layers")
    p_qaoa.add_argument("--max-evals", type=int, default=200)
    p_qaoa.add_argument("--out-dir", default=".")
    _add_backend_args(p_qaoa)
    p_qaoa.set_defaults(func=cmd_qaoa)

    p_market = sub.add_parser("market", help="prices CSV to correlation graph")
    p_market.add_argument("prices", help="CSV with date,...,close,...,Name columns")
    p_market.add_argument("--alpha", type=float, default=0.2,
                          help="correlation threshold for an edge")
    p_market.add_argument("--out-dir", default=".")
    p_market.set_defaults(func=cmd_market)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoCutNeeded as exc:
        print(f"no cut needed: {exc}", file=sys.stderr)
        return 3
    except (QubitCapExceeded, CombinationBudgetExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 4
    except (QuantCutError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
