"""Exception hierarchy shared by every stage of the pipeline."""


class AnalysisError(Exception):
    """Base class; ``stage`` is filled in by the pipeline when it re-raises."""

    stage = None


# series
class SeriesError(AnalysisError):
    pass


class NonPositiveConstantTerm(SeriesError):
    pass


class BackendUnsupported(SeriesError):
    pass


class OrderMismatch(SeriesError):
    pass


class OutOfBox(SeriesError):
    pass


class DivisionResidue(SeriesError):
    pass


# polysys
class DegenerateSystem(AnalysisError):
    pass


class NoPositiveSolution(AnalysisError):
    pass


class Inconclusive(AnalysisError):
    pass


# asymptotics
class HypothesisFailure(AnalysisError):
    """A hypothesis of the asymptotic theorem does not hold."""


class HxVanishes(HypothesisFailure):
    pass


class MVanishes(HypothesisFailure):
    pass


class ChiMismatch(HypothesisFailure):
    pass


class NegativeLogArgument(HypothesisFailure):
    pass


class PositiveM(HypothesisFailure):
    pass


class UnsupportedAlpha(HypothesisFailure):
    pass


class TiedGrowth(HypothesisFailure):
    pass


class NonSmoothPoint(HypothesisFailure):
    pass


class NotMinimal(HypothesisFailure):
    pass


class DirectionMismatch(AnalysisError):
    pass


# cli
class ParseError(AnalysisError):
    pass
