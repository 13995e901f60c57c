"""Exception types raised across the package."""


class SgseError(Exception):
    """Base class for every error this package raises on purpose."""


# audio file handling
class MalformedWav(SgseError):
    pass


class UnsupportedFormat(SgseError):
    pass


class EmptyAudio(SgseError):
    pass


class IoFailure(SgseError):
    pass


# spectral transforms
class InsufficientSamples(SgseError):
    pass


class ConfigMismatch(SgseError):
    pass


# noise tracking
class NoFrames(SgseError):
    pass


class NotInitialized(SgseError):
    pass


# streaming
class NonFiniteInput(SgseError):
    pass


# metrics
class RateMismatch(SgseError):
    pass


class SilentClean(SgseError):
    pass


class TooShort(SgseError):
    pass


class LengthMismatch(SgseError):
    pass
