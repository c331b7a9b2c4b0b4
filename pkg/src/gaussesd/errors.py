"""Exception hierarchy shared by all gaussesd modules."""


class GaussEsdError(Exception):
    """Base class for all gaussesd errors."""


class NonPhysicalCM(GaussEsdError):
    """Covariance moments violate the physicality conditions
    (det V_i >= 1/4 and positive semidefiniteness of the 4x4 matrix)."""


class ExtractionOutOfDomain(GaussEsdError):
    """A parameter-extraction argument (arctanh/arccosh input, thermal
    occupation) falls outside its domain beyond the clamping tolerance."""


class DomainError(GaussEsdError):
    """An analytic expression was evaluated outside its domain of validity
    (vanishing denominator, arccosh argument below 1)."""


class InvalidGrid(GaussEsdError):
    """A sampling grid is empty, unordered, or otherwise malformed."""


class BudgetExceeded(GaussEsdError):
    """An iterative solver hit its iteration cap before converging."""


class CutoffInsufficient(GaussEsdError):
    """Fock-space truncation too small: population near the top levels
    exceeds the tail tolerance."""


class StepTooLarge(GaussEsdError):
    """Fixed-step integration failed the step-halving acceptance test."""


class NonNegligibleImaginaryPart(GaussEsdError):
    """A moment that must be real carries an imaginary part above tolerance."""


class ConfigError(GaussEsdError):
    """Run configuration failed to parse or validate."""
