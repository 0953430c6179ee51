"""Cut two-qubit gates into locally executable subexperiments, run the
pieces on small simulators, and reconstruct the uncut result."""

from .circuit import (
    CRZ,
    CX,
    Circuit,
    Gate,
    H,
    Interaction,
    InteractionForm,
    PauliObservable,
    PauliTerm,
    Phase,
    Rx,
    Ry,
    Rz,
    S,
    Sdg,
    X,
    Y,
    Z,
    gate_matrix,
    interaction_form,
)
from .cutfinder import CutPlan, EdaConfig, brute_force_cuts, connectivity, find_cuts
from .qaoa import (
    ConvergenceLog,
    OptimizerConfig,
    QaoaParams,
    QaoaResult,
    WeightedGraph,
    brute_force_maxcut,
    build_ansatz,
    cut_value,
    extract_solution,
    maxcut_hamiltonian,
    optimize,
)
from .qpd import (
    CombinationIndex,
    QpdCoefficients,
    SignMeasure,
    Subexperiment,
    enumerate_combinations,
    make_subexperiments,
    qpd_coefficients,
    sampling_overhead,
)
from .reconstruct import (
    ExecutionBackend,
    execute_parallel,
    expectation_with_backend,
    partition_circuit,
    reconstruct_expectation,
    reconstruct_statevector,
    split_observable,
)
from .market import (
    MarketGraph,
    acum,
    build_market_graph,
    conservation_residual,
    covariance_matrix,
    ingest_csv,
    pearson,
    repeated_bisection,
    split_metrics,
    synthetic_prices,
)
from .sim import Branch, ReadoutNoise, StateVector, expectation, run, sample
from . import errors

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "CRZ",
    "CX",
    "Circuit",
    "CombinationIndex",
    "ConvergenceLog",
    "CutPlan",
    "EdaConfig",
    "ExecutionBackend",
    "Gate",
    "H",
    "Interaction",
    "InteractionForm",
    "MarketGraph",
    "OptimizerConfig",
    "PauliObservable",
    "PauliTerm",
    "Phase",
    "QaoaParams",
    "QaoaResult",
    "QpdCoefficients",
    "ReadoutNoise",
    "Rx",
    "Ry",
    "Rz",
    "S",
    "Sdg",
    "SignMeasure",
    "StateVector",
    "Subexperiment",
    "WeightedGraph",
    "X",
    "Y",
    "Z",
    "acum",
    "brute_force_cuts",
    "brute_force_maxcut",
    "build_ansatz",
    "build_market_graph",
    "connectivity",
    "conservation_residual",
    "covariance_matrix",
    "cut_value",
    "enumerate_combinations",
    "errors",
    "execute_parallel",
    "expectation",
    "expectation_with_backend",
    "extract_solution",
    "find_cuts",
    "gate_matrix",
    "ingest_csv",
    "interaction_form",
    "make_subexperiments",
    "maxcut_hamiltonian",
    "optimize",
    "partition_circuit",
    "pearson",
    "qpd_coefficients",
    "reconstruct_expectation",
    "reconstruct_statevector",
    "repeated_bisection",
    "run",
    "sample",
    "sampling_overhead",
    "split_metrics",
    "split_observable",
    "synthetic_prices",
]
