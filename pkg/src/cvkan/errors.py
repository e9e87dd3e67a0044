"""Exception hierarchy shared across the package.

The CLI maps ConfigError/SchemaError to exit code 2 and everything else
raised at runtime to exit code 3.
"""


class CvkanError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(CvkanError):
    """Invalid configuration value or malformed config file."""


class ShapeError(CvkanError):
    """Array shape does not match the declared layer/batch contract."""


class GradientError(CvkanError):
    """A non-finite value appeared while computing gradients."""

    def __init__(self, op_name, detail=""):
        self.op_name = op_name
        msg = f"non-finite value in operation '{op_name}'"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class BatchStatsError(CvkanError):
    """Batch statistics requested on an undersized batch."""


class TrainingDiverged(CvkanError):
    """Training produced a non-finite loss or gradient."""


class DataError(CvkanError):
    """Dataset generation or ingestion failure."""


class SchemaError(CvkanError):
    """Serialized document does not match the expected schema/version."""
