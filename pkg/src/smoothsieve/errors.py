"""Exception types shared across the package.

Every error that a caller may reasonably want to catch separately gets its
own class; plain contract violations raise ValueError.
"""


class SieveError(Exception):
    """Base class for all package-specific errors."""


class FieldSizeError(SieveError):
    """A requested working field exceeds the configured size limit."""


class FieldMismatchError(SieveError):
    """Operands belong to different fields (base field vs working field)."""


class NotPrimeError(ValueError):
    """The characteristic passed to field construction is not prime."""


class PolyParseError(ValueError):
    """Base class for polynomial/element parse failures."""

    def __init__(self, message, position=None):
        super().__init__(message if position is None else f"{message} (at position {position})")
        self.position = position


class PolySyntaxError(PolyParseError):
    pass


class NotHomogeneousError(PolyParseError):
    def __init__(self, deg_a, deg_b):
        super().__init__(f"terms of two different degrees found: {deg_a} and {deg_b}")
        self.degrees = (deg_a, deg_b)


class BadVariableIndexError(PolyParseError):
    pass


class CoefficientNotInFieldError(PolyParseError):
    pass


class BudgetExceededError(SieveError):
    """An enumeration or search would exceed its configured budget."""


class InconsistentCountsError(SieveError):
    """Rational point counts are not consistent with any closed-point profile."""


class XNotValidatedError(SieveError):
    """The ambient subscheme failed its smoothness validation."""


class NotSurjectiveError(SieveError):
    """The jet map is not surjective at this degree; coset densities undefined."""


class EmptyJetSetError(SieveError):
    """The prescribed jet set T is empty."""


class DivergentError(SieveError):
    """Zeta product requested at an argument where it does not converge."""


class InconsistentConditionsError(SieveError):
    """Search conditions are structurally unsatisfiable."""


class NotSingularHereError(SieveError):
    """Singularity classification requested at a point that is not singular."""


class UnsupportedXError(SieveError):
    """Operation restricted to a smaller class of ambient subschemes."""


class PointsNotDistinctError(SieveError):
    """A jet scheme lists the same closed point twice."""
