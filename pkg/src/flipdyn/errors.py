"""Exception types shared across the package.

The CLI maps these onto process exit codes: InputError -> 2,
CapacityError -> 3.  InvariantError signals an internal consistency
violation (e.g. a probability vector that breaks monotonicity mid-way
through a coupling construction) and is always a bug or bad input data,
never an expected runtime condition.
"""


class FlipDynError(Exception):
    """Base class for package-specific errors."""


class InputError(FlipDynError):
    """Malformed or out-of-domain input (bad file, bad parameter combination)."""


class CapacityError(FlipDynError):
    """Request exceeds a hard resource cap (state space too large, step cap hit)."""


class InvariantError(FlipDynError):
    """An internal invariant was violated; indicates a bug or inconsistent data."""
