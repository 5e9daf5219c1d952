"""Exception hierarchy shared by every module of the package."""


class ChamberBesselError(Exception):
    """Base class for all package errors."""


class DomainError(ChamberBesselError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ChamberError(DomainError):
    """A point that must lie in the open Weyl chamber does not."""


class DegenerateCoordinatesError(DomainError):
    """Coordinates too close for a Vandermonde/determinant quotient."""


class PochhammerPoleError(DomainError):
    """A generalized Pochhammer symbol in a denominator vanishes."""


class SingularDriftError(DomainError):
    """Drift evaluated on (or numerically at) a chamber wall."""


class WeylGroupTooLarge(DomainError):
    """Full Weyl group enumeration requested above the size guard."""


class EigenvalueCollisionError(ChamberBesselError, ArithmeticError):
    """Two dominance-comparable partitions share a Jack eigenvalue."""


class CalibrationError(ChamberBesselError, RuntimeError):
    """A calibrated constant failed its consistency check."""


class NormalizationError(ChamberBesselError, RuntimeError):
    """Density normalization constant is inconsistent across probes."""


class SimulationAborted(ChamberBesselError, RuntimeError):
    """Too many integration steps exhausted their retry budget."""
