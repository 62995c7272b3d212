"""Exception hierarchy.

Each family carries the CLI exit code it maps to.
"""


class SegboundError(Exception):
    exit_code = 1


class InfeasibleStatistics(SegboundError):
    """No sample count satisfies the requested (epsilon, delta)."""

    exit_code = 2

    def __init__(self, message, min_delta):
        super().__init__(message)
        self.min_delta = min_delta


class SolverInfeasible(SegboundError):
    exit_code = 3


class NodeLimit(SegboundError):
    exit_code = 3

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class NumericalFailure(SegboundError):
    exit_code = 3


class NoConvergence(SegboundError):
    exit_code = 3


class SingularTangent(SegboundError):
    exit_code = 3


class GeometryError(SegboundError):
    exit_code = 4


class DegenerateLine(GeometryError):
    pass


class ParallelLines(GeometryError):
    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class NonMonotoneBreakpoints(GeometryError):
    pass


class NoRegion(GeometryError):
    pass


class TauMaxTooSmall(GeometryError):
    pass


class UnboundedBox(GeometryError):
    pass


class ModelError(GeometryError):
    """Invalid structural model (zero-length member, bad support, ...)."""


class ZeroLengthMember(ModelError):
    pass


class DataError(SegboundError):
    exit_code = 5
