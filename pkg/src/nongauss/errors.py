"""Exception taxonomy, mirrored by the CLI exit codes."""


class NonGaussError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ArgumentError(NonGaussError, ValueError):
    """Invalid arguments or malformed input (exit code 2)."""

    exit_code = 2


class NumericalValidityError(NonGaussError, ArithmeticError):
    """A numerical invariant failed beyond tolerance (exit code 3)."""

    exit_code = 3


class TruncationError(NonGaussError, RuntimeError):
    """The Fock cutoff is too small for the requested computation (exit code 4)."""

    exit_code = 4


class ResourceError(NonGaussError, RuntimeError):
    """The computation would exceed configured resource limits (exit code 4)."""

    exit_code = 4
