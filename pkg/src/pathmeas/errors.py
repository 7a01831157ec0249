"""Exception hierarchy for pathmeas."""


class PathmeasError(Exception):
    """Base class for all pathmeas errors."""


class DiagramError(PathmeasError):
    """Structural problem with a diagram specification."""


class WindowTooSmall(DiagramError):
    """A finite evaluation window does not cover the required vertices."""


class NotZeroOne(DiagramError):
    """Operation requires a 0-1 diagram but a multiplicity exceeds 1."""


class NonStationary(DiagramError):
    """Operation requires a stationary diagram."""


class PathError(PathmeasError):
    """Problem with a finite path."""


class EmptyPath(PathError):
    """A path must contain at least one edge."""


class NotAdmissible(PathError):
    """Source/range compatibility fails at some index."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"range/source mismatch at edge index {index}")


class TooShort(PathError):
    """Path too short for the requested operation."""


class DomainViolation(PathError):
    """Argument lies outside the domain of the map."""


class LengthMismatch(PathError):
    """Paths of unequal length where equal lengths are required."""


class Unreachable(PathError):
    """Vertex not reachable from level 0."""


class SolverError(PathmeasError):
    """Numerical solver failure."""


class NoConvergence(SolverError):
    """Iteration budget exhausted before reaching tolerance."""


class ReducibleSuspected(SolverError):
    """Power iteration support stabilized on a proper vertex subset."""


class DegenerateSolution(SolverError):
    """No strictly positive fixed vector exists (spectral radius != 1)."""


class NotStochastic(SolverError):
    """A row fails the stochasticity requirement."""

    def __init__(self, index=None, message=None):
        self.index = index
        super().__init__(message or f"row {index} is not stochastic")


class MeasureError(PathmeasError):
    """Problem constructing or evaluating a measure."""


class InconsistentVectors(MeasureError):
    """Vector sequence fails the level-consistency condition."""

    def __init__(self, level, residual):
        self.level = level
        self.residual = residual
        super().__init__(f"consistency residual {residual:g} at level {level}")


class SupportMismatch(MeasureError):
    """Positive weight assigned off the diagram's edge set."""


class ZeroMass(MeasureError):
    """Measure vanishes where a positive value is required."""


class ZeroTransition(MeasureError):
    """Zero transition probability along the inspected path."""


class ZeroMeasureCylinder(MeasureError):
    """Cylinder of zero mass in a ratio computation."""


class InfiniteMass(MeasureError):
    """Total mass diverges and no starting vertex was supplied."""


class NotHarmonic(MeasureError):
    """Harmonicity check failed for the supplied function."""


class ZeroMarginal(MeasureError):
    """Marginal mass vanishes on a source cell."""


class DepthExhausted(PathmeasError):
    """Cylinder-table depth consumed by repeated operator application."""
