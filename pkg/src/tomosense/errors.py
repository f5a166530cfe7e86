"""Exception hierarchy shared by all tomosense modules.

Two branches matter to callers (and to the CLI exit codes): ``ValidationError``
for requests that are wrong before any numerics run, and ``NumericalError``
for computations that could not be completed to tolerance.
"""


class TomosenseError(Exception):
    """Base class for all tomosense errors."""


class ValidationError(TomosenseError, ValueError):
    """Invalid parameters or inconsistent inputs (CLI exit code 2)."""


class NumericalError(TomosenseError, ArithmeticError):
    """A numerical procedure failed to meet its tolerance (CLI exit code 3)."""


class SubtractFromVacuum(ValidationError):
    """Photon subtraction requested from a state with no photons (r = 0)."""


class UnsupportedAddition(ValidationError):
    """Photon addition requested for a (family, count) with no known expansion."""


class AnnihilatedToZero(ValidationError):
    """Lowering produced the zero vector, so no normalized state exists."""


class EmptySamples(ValidationError):
    """Empirical distance needs at least two samples per side."""


class GridMismatch(ValidationError):
    """Two distribution slices do not share the same quadrature grid."""


class TruncationFailure(NumericalError):
    """Fock-series tail tolerance not reached before the cutoff cap."""


class GridTooNarrow(NumericalError):
    """Quadrature grid drops more probability mass than allowed."""


class MultipleRootsWarning(UserWarning):
    """More than one sign change seen while bracketing a crossover."""
