"""Exception hierarchy shared by all modules."""


class CascadeBloomError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(CascadeBloomError, ValueError):
    pass


class KmerLengthError(CascadeBloomError, ValueError):
    pass


class EncodingError(CascadeBloomError, ValueError):
    """A DNA string contained a character outside ACGT."""

    def __init__(self, message: str, position: int):
        super().__init__(message)
        self.position = position


class BuildError(CascadeBloomError, ValueError):
    pass


class QueryError(CascadeBloomError, ValueError):
    pass


class FormatError(CascadeBloomError, ValueError):
    """Malformed FASTA input or index file."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class UnsupportedVersionError(FormatError):
    pass
