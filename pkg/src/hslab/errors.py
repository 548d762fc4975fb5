"""Exception hierarchy shared by all hslab modules."""


class HSLabError(Exception):
    """Base class for every error raised by hslab."""


class InvalidArgumentError(HSLabError, ValueError):
    """Shape, dimension or unit-length precondition violated."""


class InvalidRadiusError(InvalidArgumentError):
    """Radius outside the admissible domain of a model family."""


class UnsupportedClassificationError(HSLabError):
    """Hopf classes are only defined for the hyperbolic kinds."""


class NotHopfError(HSLabError):
    """The structure vector is not a principal direction."""


class AmbiguousPairingError(HSLabError):
    """J does not map eigenspaces cleanly onto eigenspaces."""


class PairingInconsistentError(HSLabError):
    """An extracted J-pairing violates the lambda-star relation."""


class NotApplicableError(HSLabError):
    """Input does not satisfy the hypotheses of a decision procedure."""


class AmbiguousFocalStructureError(NotApplicableError):
    """More than one principal-curvature family focalizes."""


class OutOfScopeError(HSLabError):
    """Request falls outside the implemented range (e.g. n = 2)."""


class IntegrationError(HSLabError):
    """The numeric integrator could not make progress."""


class FocalPointEncountered(HSLabError):
    """A principal curvature blew up during a numeric flow.

    Attributes
    ----------
    theta : float
        Estimated focal time measured from the start of the flow.
    t_reached : float
        Last time at which the integrator held a finite state.
    A : numpy.ndarray
        Shape operator at ``t_reached``.
    """

    def __init__(self, theta, t_reached, A):
        super().__init__(f"focal point encountered at t ~ {theta:.12g}")
        self.theta = theta
        self.t_reached = t_reached
        self.A = A
