"""Exception hierarchy shared by all ddecm modules."""

__all__ = [
    "DDECMError", "SingularMatrix", "NotRankDeficient", "NullSpaceTooLarge",
    "NotUnit", "OutOfDomain", "DimensionMismatch", "NoConvergence",
    "NotOnAxis", "NotSimple", "HypothesisViolated", "NormalizationDegenerate",
    "ResonantSecondOrder", "SolvabilityDefect", "RegularizedSystemSingular",
    "EpsTooLarge", "OracleMismatch", "ProblemFileError",
]


class DDECMError(Exception):
    """Base class for every error raised by this package."""


class SingularMatrix(DDECMError, ArithmeticError):
    def __init__(self, message, cond=float("inf")):
        super().__init__(message)
        self.cond = cond


class NotRankDeficient(DDECMError, ArithmeticError):
    pass


class NullSpaceTooLarge(DDECMError, ArithmeticError):
    pass


class NotUnit(DDECMError, ValueError):
    pass


class OutOfDomain(DDECMError, ValueError):
    pass


class DimensionMismatch(DDECMError, ValueError):
    pass


class NoConvergence(DDECMError, ArithmeticError):
    pass


class NotOnAxis(DDECMError, ArithmeticError):
    def __init__(self, message, root=None):
        super().__init__(message)
        self.root = root


class NotSimple(DDECMError, ArithmeticError):
    pass


class HypothesisViolated(DDECMError):
    """The instance is not a simple Hopf point with a stable remainder.

    ``report`` carries the full verification report and ``root`` the
    offending characteristic root, when one was identified.
    """

    def __init__(self, message, report=None, root=None):
        super().__init__(message)
        self.report = report
        self.root = root


class NormalizationDegenerate(DDECMError, ArithmeticError):
    pass


class ResonantSecondOrder(DDECMError, ArithmeticError):
    pass


class SolvabilityDefect(DDECMError, ArithmeticError):
    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class RegularizedSystemSingular(DDECMError, ArithmeticError):
    def __init__(self, message, cond=float("inf")):
        super().__init__(message)
        self.cond = cond


class EpsTooLarge(DDECMError, ValueError):
    pass


class OracleMismatch(DDECMError):
    def __init__(self, message, study=None):
        super().__init__(message)
        self.study = study


class ProblemFileError(DDECMError, ValueError):
    pass
