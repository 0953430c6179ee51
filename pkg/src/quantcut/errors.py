"""Exception hierarchy shared across the package."""


class QuantCutError(Exception):
    """Base class for all package-specific errors."""


class InvalidGate(QuantCutError):
    """Gate construction with an unknown kind, bad qubits, or bad parameters."""


class NotCuttable(QuantCutError):
    """Gate has no single-interaction-term form, so it cannot be cut."""


class QubitCapExceeded(QuantCutError):
    """A circuit (or subcircuit) is wider than the configured qubit cap."""


class AsymmetricNoiseUnsupported(QuantCutError):
    """Analytic readout attenuation requires a symmetric confusion matrix."""


class NoCutNeeded(QuantCutError):
    """The circuit already fits the qubit budget; there is nothing to cut."""


class ManualInvalid(QuantCutError):
    """A user-supplied partition violates the size budget or node count."""


class SameSubcircuit(QuantCutError):
    """Both qubits of a cut gate landed in one part; the cut is vacuous."""


class CombinationBudgetExceeded(QuantCutError):
    """6^k subexperiment combinations exceed the configured cap."""


class MixedStateDetected(QuantCutError):
    """Reconstructed density operator has no dominant pure component."""


class LengthMismatch(QuantCutError):
    """Bitstring length differs from the number of graph nodes."""


class MalformedCsv(QuantCutError):
    """Price CSV is missing required columns or is otherwise unreadable."""


class EmptyIntersection(QuantCutError):
    """Assets share fewer than two common dates."""


class ConstantSeries(QuantCutError):
    """Series has zero range or zero variance; it cannot be rescaled."""


class WeightSumInvalid(QuantCutError):
    """Portfolio weights do not sum to one."""


class UnknownNode(QuantCutError):
    """A partition references a node that is not in the graph."""
