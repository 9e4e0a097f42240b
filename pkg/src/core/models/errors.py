"""
Excepciones del dominio.
"""


class HOMTomoError(Exception):
    """Base class for every error raised by the lab."""


class PhysicalityError(HOMTomoError, ValueError):
    """Unnormalized state, non-Hermitian/non-positive density matrix or non-unitary operator."""


class DimensionError(HOMTomoError, ValueError):
    """Array size, qubit index or subsystem selection does not fit the object."""


class ParameterRangeError(HOMTomoError, ValueError):
    """A scalar parameter lies outside its allowed interval."""
