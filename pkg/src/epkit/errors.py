"""Exception hierarchy.

Two families matter to callers and to the CLI exit codes: configuration
problems (``ValidationError``, exit 2) and numerical failures
(``NumericalError``, exit 3).
"""


class EPKitError(Exception):
    """Base class for every error raised by epkit."""


class ValidationError(EPKitError, ValueError):
    """Malformed input or configuration."""


class NumericalError(EPKitError, ArithmeticError):
    """A computation could not be carried out at the requested accuracy."""


class DegenerateCoupling(NumericalError):
    """``Z`` queried for a Hamiltonian with vanishing coupling ``omega``."""


class ExceptionalInput(NumericalError):
    """Diagonal-chart eigen-decomposition requested at (or inside the tolerance ball of) an EP."""


class IsotropicLine(NumericalError):
    """Line with ``chi^T chi = 0``; cannot be normalized in the diagonal chart."""


class IsotropicPoint(NumericalError):
    """Connection or bi-orthogonal quotient evaluated on a self-orthogonal vector."""


class EPCollision(NumericalError):
    """A path or grid point falls inside the EP tolerance ball."""


class StepTooLarge(NumericalError):
    """Branch continuation cannot keep the discrete jump below the step bound."""


class NotAtEP(NumericalError):
    """Jordan-chart construction requested away from an EP."""


class ZeroScale(ValidationError):
    """A scale factor that must be nonzero is zero."""


class DegenerateFit(NumericalError):
    """Regression over an abscissa with zero variance."""


class NoConvergence(NumericalError):
    """Adaptive quadrature did not reach the tolerance within the refinement budget."""


class SingularFrame(NumericalError):
    """Eigen-frame matrix is not invertible."""


class StepRejected(NumericalError):
    """ODE local error estimate stays above tolerance after maximal step refinement."""


class ZeroVector(ValidationError):
    """The zero vector has no projective image."""


class NotNormalized(NumericalError):
    """State does not satisfy ``Phi^T Phi = 1``."""


class InvalidBinding(ValidationError):
    """Landscape axis bound to an unknown or duplicated Hamiltonian field."""


class ZeroCoupling(ValidationError):
    """PT model with vanishing coupling ``s``."""


class EPSingularC(NumericalError):
    """The C operator does not exist at an exceptional point."""


class BrokenSymmetry(NumericalError):
    """Operation requires the exact PT phase but the model is in the broken phase."""


class LeadingOrderWarning(UserWarning):
    """Asymptotic formula used outside its small-``eps`` validity range."""


class DivergenceWarning(UserWarning):
    """Quantity is finite but diverging (close to an EP)."""
