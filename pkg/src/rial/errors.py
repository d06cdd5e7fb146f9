"""Exception types raised by the solver stack."""


class RialError(Exception):
    """Base class for all library errors."""


class DimensionError(RialError):
    """Operand shape is incompatible with the manifold or mapping."""


class ParameterError(RialError):
    """A numeric parameter is outside its valid range."""


class ConditioningError(RialError):
    """A matrix that must be positive definite is singular to working precision."""


class RankDeficiencyError(RialError):
    """A retraction target is rank deficient and cannot be normalized."""


class FeasibilityError(RialError):
    """A point violates its manifold constraint beyond tolerance."""


class UnsupportedError(RialError):
    """The requested operation needs data the object does not carry."""


class LineSearchStallError(RialError):
    """Backtracking failed to find sufficient decrease.

    Carries the partial inner-solver result so the outer loop can continue
    from the best iterate seen so far.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
