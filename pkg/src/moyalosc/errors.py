"""Shared exception types."""


class ParameterError(ValueError):
    """A model or routine parameter is outside its documented domain."""


class DomainError(ValueError):
    """An input is structurally valid but the requested operation is not
    defined for it (wrong sign of t, non-integrable function, ...)."""


class NumericalInstabilityError(ArithmeticError):
    """A quadratic form or linear solve is too ill conditioned to trust."""


class UnsupportedProductError(ValueError):
    """Neither factor of a star product falls in a supported class."""
