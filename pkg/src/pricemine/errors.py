"""Exception types shared across the package."""


class PricemineError(Exception):
    """Base class for all errors raised by this package."""


class MissingColumnError(PricemineError):
    """An input file header lacks one of the required columns."""


class EmptyInputError(PricemineError):
    """An operation that needs at least one record received none."""


class EmptyCorpusError(PricemineError):
    """Vocabulary fitting requires a non-empty document collection."""


class DimensionMismatchError(PricemineError):
    """Feature matrix and target vector shapes do not line up."""


class EmptyTrainingSetError(PricemineError):
    """A regressor was asked to fit zero rows."""


class ColumnMismatchError(PricemineError):
    """Prediction input columns differ from the training columns."""


class NotLinearError(PricemineError):
    """Linear weights were requested from a non-linear regressor."""


class NotFittedError(PricemineError):
    """A report or highlight was requested from an unfitted model."""


class FormatVersionError(PricemineError):
    """A model file is unreadable or carries an unsupported version."""


class LengthMismatchError(PricemineError):
    """Two vectors that must be the same length are not."""


class EmptyVectorsError(PricemineError):
    """A metric over vectors received empty input."""


class TooFewRecordsError(PricemineError):
    """Cross-validation needs at least as many records as folds."""
