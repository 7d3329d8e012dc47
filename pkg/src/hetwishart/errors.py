"""Exception hierarchy shared across the package.

The CLI maps these onto distinct exit codes, so keep the split:
parameter problems, size-guard refusals, broken caller contracts,
and numerical failures are different situations.
"""


class HetWishartError(Exception):
    """Base class for all package errors."""


class ParameterError(HetWishartError, ValueError):
    """Invalid argument value (bad dimensions, negative sigma, inadmissible tuple)."""


class SizeGuardError(HetWishartError, RuntimeError):
    """A computation was refused because it exceeds an explicit size guard."""


class ContractError(HetWishartError, ValueError):
    """Caller violated an input contract (e.g. passed an asymmetric matrix)."""


class NumericalError(HetWishartError, RuntimeError):
    """An underlying numerical routine failed to produce a certified result."""
