"""Error taxonomy shared across the library and the CLI exit-code mapping."""


class DataError(ValueError):
    """Bad or missing input data (CLI exit code 2)."""


class NumericError(RuntimeError):
    """Numerical failure such as divergence or non-finite values (CLI exit code 3)."""
