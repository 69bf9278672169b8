"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Raised when a network configuration is inconsistent or unusable."""


class DegenerateBeamformerError(RuntimeError):
    """Raised when a beamformer has E[h_k^H v_k] = 0, so the UatF SINR is undefined."""


class StatisticalStageError(RuntimeError):
    """Raised when the statistical-stage linear system is numerically singular.

    Usually a symptom of a degenerate moment estimate (ensemble too small).
    """

    def __init__(self, message, condition_number=None):
        if condition_number is not None:
            message = f"{message} (condition estimate {condition_number:.3e})"
        super().__init__(message)
        self.condition_number = condition_number


class InternalConsistencyError(RuntimeError):
    """Raised when an algorithm violates one of its own guarantees."""
