"""Exception hierarchy shared by all hardylab modules."""


class HardyLabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(HardyLabError):
    """A numeric parameter lies outside its documented domain."""


class NotNormalized(HardyLabError):
    """A state vector required to be normalized is not."""


class InvalidDensity(HardyLabError):
    """A matrix does not satisfy the density-operator invariants."""


class NotPsd(HardyLabError):
    """An operator required to be positive semidefinite is not."""


class SingularAlpha(HardyLabError):
    """The first-particle tilt angle has sin(alpha) too close to zero."""


class SingularOverlap(HardyLabError):
    """The two first-particle directions are too close to parallel
    (|alpha - beta| within margin of an odd multiple of pi/2)."""


class ParallelStates(HardyLabError):
    """Unambiguous discrimination requested for (near-)parallel states."""


class SpectraMismatch(HardyLabError):
    """Two pure states have different Schmidt spectra and therefore
    cannot be related by local unitaries."""


class EmptyGrid(HardyLabError):
    """A sweep grid contains no admissible points."""


class TableInvalid(HardyLabError):
    """A correlation table violates normalization, positivity, or
    no-signaling."""
