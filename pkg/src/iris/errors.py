"""Exception types shared across the package."""


class IrisError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(IrisError, ValueError):
    """An operation was called with arguments violating its contract."""


class InvalidConfigError(IrisError, ValueError):
    """A configuration object is internally inconsistent."""


class FormatError(IrisError):
    """A binary container is malformed (bad magic, truncation, size mismatch)."""


class EmptyForegroundError(IrisError):
    """A reference mask contains no voxels for a requested class."""


class AugmentationFailure(IrisError):
    """Reference augmentation could not preserve every annotated class."""


class InvalidEpisodeError(IrisError):
    """A training episode mixes pairs from different task sources."""


class UnseenClassError(IrisError):
    """A class id was requested from a memory bank that never saw it."""


class EmptyPoolError(IrisError):
    """A retrieval pool holds no candidate for a requested class."""


class TuningDivergedError(IrisError):
    """Embedding tuning hit a non-finite loss.

    Carries the last finite iterate so callers can still use it.
    """

    def __init__(self, message, last_embedding=None):
        super().__init__(message)
        self.last_embedding = last_embedding
