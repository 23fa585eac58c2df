"""Exception hierarchy shared by every solver."""


class LPAError(Exception):
    """Base class for all errors raised by lpa_lab."""


class InvalidScenario(LPAError, ValueError):
    """Scenario fails one or more model assumptions."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SignalMismatch(LPAError, ValueError):
    """Schedule signals are not compatible with the outcome lattice."""


class Infeasible(LPAError):
    """No payout schedule implements the requested strategy."""


class DegenerateAdverseSelection(LPAError, ValueError):
    """Whole-portfolio formulas divide by the top bad-project success rate, which is zero."""


class NoConsistentCandidate(LPAError):
    """None of the candidate bindings of a conditional contract is self-consistent."""


class SingularSlope(LPAError, ValueError):
    """Good and bad types put equal mass on the low return; the corner rule is undefined."""


class RegimeStraddle(LPAError):
    """A finite-difference step crosses a regime boundary."""


class NoInteriorOptimum(LPAError):
    """Marginal cost at full effort does not exceed the project margin."""


class InvalidCost(LPAError, ValueError):
    """Power-cost parameters outside the admissible range."""


class InfeasibleParticipation(LPAError):
    """Expected project cash cannot cover the investor's capital."""


class OracleMismatch(LPAError):
    """Closed form and brute-force oracle disagree beyond tolerance."""
