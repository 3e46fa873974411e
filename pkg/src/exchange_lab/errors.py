"""Exception types shared across the package."""


class SpaceMismatchError(ValueError):
    """Operators or factors that do not live on the same Hilbert space."""


class HermiticityError(ValueError):
    """An operator required to be Hermitian is not, beyond tolerance."""


class NormalizationError(ValueError):
    """Amplitudes or weights that do not define a valid density operator."""


class NotCaseBError(ValueError):
    """A case (b) formula was requested for a model where [H_S, H_SE] != 0."""


class PathDisagreementError(RuntimeError):
    """Two independent evaluation paths of the same quantity disagree."""


class TruncationError(RuntimeError):
    """A truncated Fock space is too small for the requested accuracy."""


class ConfigError(ValueError):
    """A run configuration failed schema validation."""
