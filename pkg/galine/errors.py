"""
Exception hierarchy for the galine engine
"""


class GalineError(Exception):
    """Base class for all engine errors"""


class DegreeBudgetError(GalineError):
    """Degree budgets disagree, or a result would exceed the budget"""


class SingularSystemError(GalineError):
    """The C functional has no nonzero coefficient, so a_q cannot be solved"""


class NotEmbeddableError(GalineError):
    """The cocycle spec has zero inertial mass and does not embed the Galilei cocycle"""


class RotationNotSupportedError(GalineError):
    """Only rotation-free group elements are representable"""


class ArityError(GalineError):
    """A cochain was evaluated on a tuple of the wrong length"""


class SupportEscapeError(GalineError):
    """A wavepacket left the interior of its grid"""


class NormDriftError(GalineError):
    """Evolution lost unitarity beyond tolerance even after step halving"""


class InsufficientSamplesError(GalineError):
    """Too few samples for a finite-difference estimate"""


class IntegrationError(GalineError):
    """Classical integration produced non-finite values or energy blowup"""


class ScenarioError(GalineError):
    """A scenario or run configuration is malformed"""


class InterpolationWarning(UserWarning):
    """Interpolated wavefunction values are losing accuracy near the grid edge"""
