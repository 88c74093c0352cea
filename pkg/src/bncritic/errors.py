"""Exception hierarchy shared across the package."""


class BnCriticError(Exception):
    """Base class for all package errors."""


class ParseError(BnCriticError):
    """Network or dataset file content is not well-formed."""


class ValidationError(BnCriticError):
    """A network is well-formed but violates structural/probabilistic invariants."""

    def __init__(self, report):
        self.report = report
        lines = "; ".join(f"{f.code}@{f.location}" for f in report.errors)
        super().__init__(f"network failed validation: {lines}")


class TooLargeError(BnCriticError):
    """Full-joint enumeration guard exceeded."""


class UnknownVariableError(BnCriticError):
    """A referenced variable name does not exist in the network."""


class UnknownStateError(BnCriticError):
    """A referenced state label/index does not exist for the variable."""


class InvalidEvidenceError(BnCriticError):
    """Evidence names a latent variable or an out-of-range state index."""


class ZeroEvidenceProbabilityError(BnCriticError):
    """The conditioning evidence has probability zero under the network."""

    def __init__(self, message, node=None, row=None):
        self.node = node
        self.row = row
        super().__init__(message)


class ScoreError(BnCriticError):
    """Base class for scoring-rule domain errors."""


class ZeroProbabilityObservedError(ScoreError):
    """Surprise index undefined: the observed state has probability zero."""


class DegenerateBaselineError(ScoreError):
    """Logarithmic-score penalty is zero: baseline marginals are a point mass."""


class LogOfZeroError(ScoreError):
    """Logarithmic-score argument is zero."""


class SingleStateError(ScoreError):
    """Ranked probability score needs at least two states."""


class EmptyDatasetError(BnCriticError):
    """Operation requires a dataset with at least one row."""


class OutOfRangeError(BnCriticError):
    """Requested prefix length exceeds the dataset size."""


class EmptyMatrixError(BnCriticError):
    """Measures require a non-empty score matrix."""


class InsufficientRowsError(BnCriticError):
    """Observed dataset is smaller than the largest configured sample size."""


class DatasetMismatchError(BnCriticError):
    """Dataset columns do not match the network's observable declaration order."""


class TransformError(BnCriticError):
    """Base class for error-model transform failures."""


class UnknownNodeError(TransformError):
    """Transform references a node absent from the base network."""


class UnknownStateTransformError(TransformError):
    """Transform references a state absent from the node."""


class InvalidResultError(TransformError):
    """Transform produced a network that fails validation."""

    def __init__(self, report):
        self.report = report
        super().__init__(
            "transform produced an invalid network: "
            + "; ".join(f"{f.code}@{f.location}" for f in report.errors)
        )
