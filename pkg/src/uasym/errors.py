"""Exception hierarchy shared by all modules."""


class UasymError(Exception):
    """Base class for all library errors."""


class ShapeMismatch(UasymError):
    pass


class ArityMismatch(UasymError):
    pass


class DimMismatch(UasymError):
    pass


class NonCommuting(UasymError):
    def __init__(self, i, j, residual):
        self.i, self.j, self.residual = i, j, residual
        super().__init__(
            f"matrices {i} and {j} do not commute (relative residual {residual:.3e})"
        )


class SingularFactor(UasymError):
    def __init__(self, i, detail=""):
        self.i = i
        super().__init__(f"factor {i} is numerically singular{': ' + detail if detail else ''}")


class Diverging(UasymError):
    pass


class HorizonExhaustedWarning(UserWarning):
    """Averaging tolerance unmet at the horizon; best iterate returned."""


class NonSemisimpleUnimodular(UasymError):
    pass


class DecompositionFailed(UasymError):
    pass


class NotInCommutant(UasymError):
    pass


class NonUnique(UasymError):
    pass


class ZeroX(UasymError):
    pass


class NoFactorization(UasymError):
    pass


class NotIntertwining(UasymError):
    pass


class NotInjective(UasymError):
    pass


class NotUnitary(UasymError):
    def __init__(self, i, residual):
        self.i, self.residual = i, residual
        super().__init__(f"operator {i} is not unitary (residual {residual:.3e})")


class ClusterAmbiguity(UasymError):
    pass


class MeasureMismatch(UasymError):
    pass


class EmptySpace(UasymError):
    pass


class CriteriaDisagree(UasymError):
    """The three quasianalyticity criteria returned different verdicts."""


class IsQuasianalytic(UasymError):
    pass


class NoSplittingAtom(UasymError):
    pass


class InvarianceCheckFailed(UasymError):
    pass


class WindowTooSmall(UasymError):
    pass


class MeasureHypothesisViolated(UasymError):
    pass


class SeriesNotConverged(UasymError):
    pass


class ZeroVector(UasymError):
    pass


class ParseError(UasymError):
    def __init__(self, line, col, message):
        self.line, self.col, self.message = line, col, message
        super().__init__(f"line {line}, col {col}: {message}")


class UnknownExample(UasymError):
    pass
