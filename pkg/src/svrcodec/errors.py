"""Exception hierarchy for the codec package."""


class CodecError(Exception):
    """Base class for every error raised by svrcodec."""


class UnsupportedFormat(CodecError):
    pass


class Truncated(CodecError):
    pass


class DimensionMismatch(CodecError):
    pass


class SingularSystem(CodecError):
    """The normalization inverse hit a non-invertible linear system."""


class ZeroMatrix(CodecError):
    pass


class NoConvergence(CodecError):
    """SVR coordinate ascent did not reach the KKT tolerance."""

    def __init__(self, message, violation=None, block=None):
        super().__init__(message)
        self.violation = violation
        self.block = block


class BadMagic(CodecError):
    pass


class VersionMismatch(CodecError):
    pass


class ParamDigestMismatch(CodecError):
    pass


class CorruptPayload(CodecError):
    pass


class TooSmall(CodecError):
    pass


class RaggedData(CodecError):
    pass
