"""Exception hierarchy shared by all modules."""


class MincostError(ValueError):
    """Base class for every validation or numerical failure raised here."""


class NotSquare(MincostError):
    pass


class NotHermitian(MincostError):
    pass


class NegativeEigenvalue(MincostError):
    pass


class DimensionMismatch(MincostError):
    pass


class NotNormalized(MincostError):
    pass


class DimensionExceedsN(MincostError):
    pass


class CutoffTooSmall(MincostError):
    pass


class InvalidMixture(MincostError):
    pass


class InvalidEnsemble(MincostError):
    pass


class InvalidPovm(MincostError):
    pass


class DegenerateInput(MincostError):
    pass


class UnsupportedPriors(MincostError):
    pass


class TableOutOfRange(MincostError):
    pass


class NotMonotoneRange(MincostError):
    """A declared convex/concave tag is contradicted on the attainable sums."""


class NoConvergence(MincostError):
    def __init__(self, iterations, best_cost, gap=None):
        self.iterations = iterations
        self.best_cost = best_cost
        self.gap = gap
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(best cost {best_cost!r}, duality gap {gap!r})"
        )


class EnvelopeNotNSD(MincostError):
    """A circulant envelope failed the negative-semidefiniteness test.

    The partially filled report is attached so callers can inspect the
    intermediate matrices and the offending eigenvalues.
    """

    def __init__(self, side, eigenvalues, report=None):
        self.side = side
        self.eigenvalues = list(eigenvalues)
        self.report = report
        super().__init__(
            f"{side} envelope is not negative semidefinite: eigenvalues {self.eigenvalues}"
        )


class ScenarioParseError(ValueError):
    """Scenario file is not valid JSON or does not match the scenario schema."""
