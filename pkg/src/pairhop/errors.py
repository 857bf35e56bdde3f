"""Exception hierarchy shared by the library and the command line runner."""

from __future__ import annotations


class PairhopError(Exception):
    """Base class for all errors raised by :mod:`pairhop`."""


class ConfigError(PairhopError, ValueError):
    """Malformed or incomplete experiment configuration."""


class PhysicsError(PairhopError, ValueError):
    """A physical precondition does not hold (instability, off-resonance, ...)."""


class InstabilityError(PhysicsError):
    """Coupling violates the ground-state stability bound ``g * omega_a < omega_c**2``."""


class ResonanceError(PhysicsError):
    """An operation that requires ``omega_a == omega_c`` was called off resonance."""


class ToleranceError(PairhopError, RuntimeError):
    """A numerical tolerance was violated during a run (norm drift, step too large, ...)."""
