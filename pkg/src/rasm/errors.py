"""Exception types raised across the package."""


class InvalidConfiguration(ValueError):
    """A parameter set that the scheme cannot be built from."""


class InvalidInput(ValueError):
    """A well-formed configuration fed with out-of-range data."""


class NumericalError(ArithmeticError):
    """A quadrature or MGF evaluation produced a non-finite value."""
