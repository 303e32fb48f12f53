"""Exception types raised across the pipeline."""


class CascadeError(Exception):
    """Base class; the CLI reports ``<ClassName>: <message>`` and exits 1."""


class MalformedRow(CascadeError, ValueError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class NegativeQuantity(MalformedRow):
    pass


class UnsortedInput(CascadeError, ValueError):
    pass


class NegativeDuration(CascadeError, ValueError):
    pass


class MissingStats(CascadeError, KeyError):
    pass


class IndexOutOfRange(CascadeError, IndexError):
    pass


class EmptyDataset(CascadeError, ValueError):
    pass


class MissingClass(CascadeError, ValueError):
    pass


class DegenerateWeights(CascadeError, ArithmeticError):
    pass


class ArityMismatch(CascadeError, ValueError):
    pass


class InsufficientData(CascadeError, ValueError):
    pass


class MalformedSolution(CascadeError, ValueError):
    pass


class DuplicateSession(MalformedSolution):
    pass


class EmptyItemSet(CascadeError, ValueError):
    pass


class BothEmpty(CascadeError, ValueError):
    pass


class NoOverlap(CascadeError, ValueError):
    pass


class ModelFormatError(CascadeError, ValueError):
    pass
