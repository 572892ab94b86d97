"""Exception hierarchy.  Every error carries a stable ``name`` the CLI reports."""


class ForgeError(Exception):
    """Base class for all library errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


class FieldError(ForgeError):
    """Invalid field parameters or incompatible field contexts."""


class InverseTwistUndefined(ForgeError):
    """An inverse twist was requested on an element outside the available depth."""


class DivisionByApparentZero(ForgeError, ZeroDivisionError):
    """Division by a series indistinguishable from zero at its precision."""


class PrecisionExhausted(ForgeError):
    """A result would carry no correct terms."""


class NegativeTwistOnSeries(ForgeError):
    """Inverse twisting of truncated series is deliberately unsupported."""


class TailNotDominated(ForgeError):
    """Stored coefficients do not certify convergence at the evaluation point."""


class ConvergenceUncertified(ForgeError):
    """A logarithm series could not be certified to converge at the input."""


class MethodMismatch(ForgeError):
    """Two independent computation routes disagreed (internal bug sentinel)."""


class OutsideConvergenceDomain(ForgeError):
    """Input lies outside the stated convergence domain."""


class FixtureVerificationFailed(ForgeError):
    """A built-in fixture failed its own verification."""


class UnsupportedRank(ForgeError):
    """Constructor called with a rank it does not support."""


class SingularUpsilon(ForgeError):
    """The AGF matrix is not invertible at working precision."""


class RelationViolated(ForgeError):
    """A verified difference relation failed (internal bug sentinel)."""


class OracleMismatch(ForgeError):
    """Closed formula and brute-force oracle disagree."""


class ParameterMismatch(ForgeError):
    """Objects that must share parameters do not."""


class ParseError(ForgeError):
    """Malformed expression or JSON input."""
