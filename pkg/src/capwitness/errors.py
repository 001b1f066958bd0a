"""Exception hierarchy shared by the library and the CLI."""


class CapWitnessError(Exception):
    """Base class for all errors raised by this package."""


class DataError(CapWitnessError, ValueError):
    """Malformed input data: bad CSV schema, missing counts, invalid config."""


class NumericalError(CapWitnessError, ArithmeticError):
    """A computation left its domain of validity (singular deconvolution, drift)."""


class DensityMatrixError(NumericalError):
    """A matrix failed one of the density-matrix invariants."""
