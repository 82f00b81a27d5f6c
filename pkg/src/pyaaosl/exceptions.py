from enum import Enum


class PyAAOSLError(Exception):
    """Base exception for pyaaosl."""

    pass


class LevelOutOfRangeError(PyAAOSLError):
    """Raised when a hop level is 0 or exceeds max_lvl of its source."""

    pass


class InvalidRangeError(PyAAOSLError):
    """Raised when a hop is requested between indexes in the wrong order."""

    pass


class ArityMismatchError(PyAAOSLError):
    """Raised when the number of dependency digests differs from max_lvl(j)."""

    pass


class GenesisNotAuthableError(PyAAOSLError):
    """Raised when an authenticator is requested for the genesis index."""

    pass


class DigestSizeError(PyAAOSLError):
    """Raised when a digest is not exactly 32 bytes."""

    pass


class AlreadyInitializedError(PyAAOSLError):
    """Raised when initializing a log at a location that already holds one."""

    pass


class LogNotFoundError(PyAAOSLError):
    """Raised when opening a log that does not exist."""

    pass


class LogFormatError(PyAAOSLError):
    """Raised when a log file header is not recognized."""

    pass


class StorageError(PyAAOSLError):
    """Raised when reading or writing the log file fails."""

    pass


class IndexOutOfRangeError(PyAAOSLError):
    """Raised when an index lies outside the log."""

    pass


class LogClosedError(PyAAOSLError):
    """Raised when a closed LogStore is used."""

    pass


class EndpointMismatchError(PyAAOSLError):
    """Raised when path endpoints do not line up."""

    pass


class NotVisitedError(PyAAOSLError):
    """Raised when splitting a path at an index it does not visit."""

    pass


class PathRangeError(PyAAOSLError):
    """Raised when a visitation query falls outside the path's range."""

    pass


class GenesisMembershipError(PyAAOSLError):
    """Raised when a membership proof is requested for the genesis index."""

    pass


class MalformedReason(Enum):
    BROKEN_CHAIN = "broken-chain"
    LEVEL_OUT_OF_RANGE = "level-out-of-range"
    NONMONOTONE = "nonmonotone"


class MalformedPathError(PyAAOSLError):
    """Raised when an untrusted path is not well formed."""

    def __init__(self, reason: MalformedReason, message: str):
        super().__init__(f"{reason.value}: {message}")
        self.reason = reason


class MissingDependencyError(PyAAOSLError):
    """Raised when a view lacks a digest needed to rebuild an authenticator."""

    def __init__(self, index: int):
        super().__init__(f"view has no digest for index {index}")
        self.index = index


class ViewConflictError(PyAAOSLError):
    """Raised in strict mode when a provided binding disagrees with a rebuilt one."""

    def __init__(self, index: int):
        super().__init__(f"provided digest for index {index} disagrees with rebuilt value")
        self.index = index


class DecodeFailure(Enum):
    TRUNCATED = "truncated"
    BAD_MAGIC = "bad-magic"
    BAD_VERSION = "bad-version"
    BAD_KIND = "bad-kind"
    BAD_SCHEME = "bad-scheme"
    TRAILING_BYTES = "trailing-bytes"
    UNSORTED_VIEW = "unsorted-view"
    DUPLICATE_VIEW_INDEX = "duplicate-view-index"
    MALFORMED_PATH = "malformed-path"
    BAD_HEX = "bad-hex"


class DecodeError(PyAAOSLError):
    """Raised when wire bytes cannot be decoded."""

    def __init__(self, reason: DecodeFailure, message: str):
        super().__init__(f"{reason.value}: {message}")
        self.reason = reason


class ScenarioError(PyAAOSLError):
    """Raised when an evo-cr scenario's visitation facts do not hold."""

    pass
