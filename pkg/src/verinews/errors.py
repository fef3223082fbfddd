"""Exception hierarchy shared across the package."""


class VerinewsError(Exception):
    """Base class for all errors raised by this package."""


class CsvParseError(VerinewsError):
    """Malformed CSV input (e.g. an unterminated quoted field)."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"{message} (data row {row})"
        super().__init__(message)


class CsvSchemaError(VerinewsError):
    """The CSV header is missing a required column."""


class LabelError(VerinewsError):
    """A rating string does not name one of the four veracity classes."""


class TrainingError(VerinewsError):
    """Training preconditions violated (empty data, bad hyperparameters...)."""


class DimensionMismatchError(VerinewsError):
    """A vector's dimensionality does not match the model/vocabulary."""


class BundleError(VerinewsError):
    """Base class for model-bundle serialization failures."""


class BundleIntegrityError(BundleError):
    """Truncated or corrupted bundle payload (checksum / framing failure)."""


class BundleVersionError(BundleError):
    """Bundle format version newer than this build supports."""


class BundleValidationError(BundleError):
    """A decoded bundle violates a structural invariant."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"invalid bundle field '{field}': {message}")
