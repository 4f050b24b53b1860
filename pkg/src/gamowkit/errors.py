"""Exception hierarchy.

Every failure mode that callers might want to catch gets its own class so
tests and the CLI can dispatch on type instead of parsing messages.
"""


class GamowKitError(Exception):
    """Base class for all errors raised by this package."""


class NotDeltaShellFamily(GamowKitError):
    """Potential spec violates the shell/step family constraints."""


class KIsZero(GamowKitError):
    """Requested an evaluation at k = 0 where the formulas degenerate."""


class GridMissingShellNode(GamowKitError):
    """Radial grid does not place a node on every shell radius."""


class WronskianDrift(GamowKitError):
    """Wronskian probe values disagree beyond tolerance; solution pair is bad."""


class CircleTouchesOrigin(GamowKitError):
    """Cauchy circle for derivatives would enclose or touch k = 0."""


class WindingNotInteger(GamowKitError):
    """Argument-principle count came out far from an integer."""


class DepthExhausted(GamowKitError):
    """Recursive box subdivision hit its depth limit without isolating zeros."""


class NewtonStalled(GamowKitError):
    """Newton polish failed to reach the requested residual."""


class BoundDegeneracyImpossible(GamowKitError):
    """A multiplicity-two zero was flagged on the positive imaginary axis."""


class AtPole(GamowKitError):
    """Evaluation requested exactly at (or too near) a pole."""


class NoConvergence(GamowKitError):
    """Iterative search did not converge within its budget."""


class SecondDerivativeVanishes(GamowKitError):
    """f'' is too small at a candidate double zero to define the chain."""


class LostZero(GamowKitError):
    """Continuation step lost the zero it was tracking."""


class MultiplicityMismatch(GamowKitError):
    """Local winding count disagrees with the assumed multiplicity."""


class ExtrapolationUnstable(GamowKitError):
    """Regulator extrapolation disagrees with itself beyond tolerance."""


class TailDivergence(GamowKitError):
    """Tail integrand has a non-decaying term the regulator cannot remove."""


class TooCoarse(GamowKitError):
    """Grid too coarse for the requested stencil accuracy."""


class ContourPoleClash(GamowKitError):
    """Deformed contour passes too close to a pole of the integrand."""


class AtEigenvalue(GamowKitError):
    """Resolvent requested at (or too near) a discrete eigenvalue."""


class BackgroundNotConverged(GamowKitError):
    """Contour background integral failed its refinement check."""
