"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericalError -> 4.
"""


class RdflexError(Exception):
    """Base class for all package errors."""


class ConfigError(RdflexError):
    """Invalid or inconsistent run configuration."""


class DataError(RdflexError):
    """Problem with the input data itself."""


class NumericalError(RdflexError):
    """Estimation failed for numerical reasons."""


class InsufficientSupport(NumericalError):
    """Fewer usable observations on a side than the local fit requires."""


class SingularDesign(NumericalError):
    """Local design matrix is numerically rank deficient."""


class NoTrainingData(DataError):
    """A localized first-stage training side is empty."""


class InsufficientNeighbors(DataError):
    """A side has too few observations for the requested neighbor count."""


class WeakFirstStage(NumericalError):
    """Fuzzy design with a treatment jump too close to zero."""


class MissingTreatment(DataError):
    """Fuzzy estimation requested without a treatment column."""


class MissingColumn(DataError):
    """A mapped column is absent from the input file."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"column {column!r} not found in input")


class NonNumericCell(DataError):
    """A mapped cell could not be parsed as a number."""

    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"non-numeric value {value!r} in column {column!r}, row {row}")


class EmptyAfterFiltering(DataError):
    """No rows left once missing values were dropped."""


class DegenerateRunning(DataError):
    """Running variable has no usable spread."""


class DegenerateCurvature(NumericalError):
    """Global quartic curvature difference is numerically zero (bandwidth step 0)."""
