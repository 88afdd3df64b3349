"""Exception types shared across ocrlab."""


class OcrLabError(Exception):
    """Base class for all ocrlab errors."""

    kind = "error"


class ConfigurationError(OcrLabError, ValueError):
    kind = "configuration"


class UsageError(OcrLabError, RuntimeError):
    kind = "usage"


class CtcLengthError(OcrLabError, ValueError):
    """The output sequence is too short to emit the requested labels."""

    kind = "ctc_length"


class DatasetError(OcrLabError, ValueError):
    kind = "dataset"


class ModelFormatError(OcrLabError, ValueError):
    kind = "model_format"


class BadMagicError(ModelFormatError):
    kind = "bad_magic"


class UnsupportedVersionError(ModelFormatError):
    kind = "unsupported_version"


class TruncatedFileError(ModelFormatError):
    kind = "truncated"
