"""Exception types raised by the engine."""


class EngineError(Exception):
    """Base class for all engine errors."""


class ConfigurationError(EngineError):
    """A scenario or grid configuration is invalid."""


class ScenarioValidationError(ConfigurationError):
    """Scenario document failed validation; carries all error paths."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("scenario validation failed:\n" + "\n".join(f"  - {e}" for e in self.errors))


class OutOfDomainError(EngineError):
    """A material point left the computational grid."""


class GeometryError(EngineError):
    """Degenerate contact geometry (e.g. zero-length master segment)."""


class ElementInversionError(EngineError):
    """Deformation gradient determinant became non-positive."""


class ContractViolationError(EngineError):
    """An operation was called outside its contract (internal misuse)."""
