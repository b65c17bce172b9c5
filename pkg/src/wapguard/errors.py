"""Exception types shared across the package."""


class MalformedInputError(ValueError):
    """Input data violates the detection-exchange contract (non-finite
    coordinates, bad JSON shape, negative class ids, ...)."""


class ConfigError(ValueError):
    """A configuration value violates its documented invariant."""


class DetectorError(RuntimeError):
    """Base class for external-detector failures.

    Carries the frame id the failure belongs to, so batch runs can report
    exactly which frame broke.
    """

    def __init__(self, message, frame_id=None):
        if frame_id is not None:
            message = f"frame {frame_id}: {message}"
        super().__init__(message)
        self.frame_id = frame_id


class DetectorExitError(DetectorError):
    """The detector command exited with a nonzero status."""


class DetectorOutputError(DetectorError):
    """The detector command produced unparseable or malformed output."""


class DetectorTimeoutError(DetectorError):
    """The detector command did not finish within the allowed time."""
