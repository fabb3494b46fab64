"""Exception taxonomy shared across the package.

Four failure classes cover everything the solvers can hit: bad argument
ranges, numerical breakdown (stiffness, iteration caps), structural misuse
of the API (mismatched grids, wrong problem pairings), and root searches
that provably have nothing to find.
"""


class RangeError(ValueError):
    """An argument lies outside the range the operation supports."""


class ContractError(ValueError):
    """Inputs are individually fine but jointly inconsistent."""


class NumericError(RuntimeError):
    """An iteration failed to converge or lost too much accuracy."""


class NoSolutionError(NumericError):
    """A bracketing search exhausted its range without a sign change."""
