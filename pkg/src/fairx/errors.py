"""Exception types raised on malformed input.

Verification routines never raise on a failed property; they return reports.
These exceptions are reserved for inputs that cannot be interpreted at all.
"""


class FairxError(Exception):
    pass


class MarketValidationError(FairxError, ValueError):
    """Raised by :func:`fairx.market.validate_market` with every problem found.

    ``problems`` is a list of ``(kind, detail)`` tuples, e.g.
    ``("NonPositiveEndowment", "a")`` or ``("DuplicateEdge", ("a", "b"))``.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        text = "; ".join(f"{kind}({detail})" for kind, detail in self.problems)
        super().__init__(text or "invalid market")

    def kinds(self):
        return [kind for kind, _ in self.problems]


class AllocationMismatch(FairxError, ValueError):
    pass


class DimensionMismatch(FairxError, ValueError):
    pass


class UnknownNode(FairxError, KeyError):
    pass


class NegativeLambda(FairxError, ValueError):
    pass


class EmptyEdgeSet(FairxError, ValueError):
    pass


class NotOptimalInput(FairxError, ValueError):
    pass


class InfeasibleTransport(FairxError, RuntimeError):
    """A cross-level transportation problem had no saturating solution.

    Structural theory guarantees feasibility, so this indicates a solver bug.
    """


class NotLexOptimalInput(FairxError, ValueError):
    pass


class InstanceTooLarge(FairxError, ValueError):
    pass


class MissingReference(FairxError, ValueError):
    pass
