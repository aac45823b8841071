"""Exception and warning types raised across the package."""


class MpsOrfError(Exception):
    """Base class for all errors raised by mps_orf."""


class PoleHit(MpsOrfError, ZeroDivisionError):
    """A Mobius factor was evaluated at (or numerically at) its pole."""


class DomainError(MpsOrfError, ValueError):
    """A point lies outside the region an object is defined on."""


class AtomCollision(MpsOrfError, ValueError):
    """A boundary evaluation was requested at the position of an atom."""


class AtomOnPath(AtomCollision):
    pass


class NotSzego(MpsOrfError):
    """Too many density samples had to be clipped to take the logarithm."""


class FiniteBlaschkeDetected(MpsOrfError):
    """A Schur parameter reached the unit circle: f is a finite Blaschke product."""


class DerivativeUnavailable(MpsOrfError):
    """A confluent step needs derivatives the evaluator cannot provide."""


class RankDeficient(MpsOrfError):
    """The discrete Gram matrix became too ill-conditioned.

    Attributes
    ----------
    k : int
        First degree at which the condition number exceeded the limit.
    condition : float
    """

    def __init__(self, k, condition):
        self.k = k
        self.condition = condition
        super().__init__(f"Gram matrix condition {condition:.3e} exceeds limit at degree {k}")


class SolveFailure(MpsOrfError):
    pass


class ResolutionRefused(MpsOrfError):
    """A Poisson-weighted integral would be under-resolved by the grid."""


class HyperbolicOverflow(MpsOrfError):
    pass


class ParseError(MpsOrfError):
    """A configuration file could not be parsed."""


class ValidationError(MpsOrfError, ValueError):
    """A configuration parsed but violates a documented invariant."""


class ScenarioError(MpsOrfError):
    """A module error raised while running a scenario, tagged with context."""

    def __init__(self, scenario_id, n, cause):
        self.scenario_id = scenario_id
        self.n = n
        self.cause = cause
        where = f" at n={n}" if n is not None else ""
        super().__init__(f"scenario {scenario_id!r}{where}: {type(cause).__name__}: {cause}")


class DegenerateDensity(UserWarning):
    """Density falls below the floor at many grid nodes."""


class ResolutionWarning(UserWarning):
    pass


class ConditioningWarning(UserWarning):
    pass
