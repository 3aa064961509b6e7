"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for every error the engine raises on purpose."""


class InvalidBoxError(EngineError, ValueError):
    """A box violates its structural or coordinate-space invariants."""


class SpaceMismatchError(EngineError, ValueError):
    """Two operands do not share a coordinate space."""


class GroupTooSmallError(EngineError, ValueError):
    """A completion group is too small for group-relative statistics."""


class LengthMismatchError(EngineError, ValueError):
    """Parallel sequences disagree in length."""


class NonFiniteInputError(EngineError, ValueError):
    """An input that must be finite is NaN or infinite."""


class InvalidConfigError(EngineError, ValueError):
    """A configuration value violates its invariants."""


class UnknownStyleError(EngineError, ValueError):
    """A prompt style / task combination has no template."""


class MalformedRequestError(EngineError, ValueError):
    """A scoring request is structurally invalid."""
