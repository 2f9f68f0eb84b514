"""Typed errors raised at module boundaries.

Every invalid construction or contract violation maps to one of these, so
callers can catch a single base class or a precise condition.
"""


class MlcError(Exception):
    """Base class for all toolkit errors."""


# -- shared container errors -------------------------------------------------

class ShapeMismatch(MlcError):
    """Two containers that must agree in shape do not."""


class NonFinite(MlcError):
    """A score or pixel value is NaN or infinite."""


class NonBinaryLabel(MlcError):
    """A label entry is neither 0 nor 1."""


class PixelOutOfRange(MlcError):
    """A pixel value lies outside [0, 1]."""


class DimensionMismatch(MlcError):
    """Paired images or label vectors have incompatible dimensions."""


# -- file format errors ------------------------------------------------------

class BadMagic(MlcError):
    """Image data does not start with the P6 magic."""


class BadHeader(MlcError):
    """PPM header is malformed."""


class UnsupportedMaxval(MlcError):
    """PPM maxval is not 255."""


class TruncatedPixelData(MlcError):
    """PPM payload is shorter than width*height*3 bytes."""


class RaggedRows(MlcError):
    """CSV rows have differing lengths."""


class ParseError(MlcError):
    """A numeric field could not be parsed."""


class MissingClassHeader(MlcError):
    """Manifest lacks the leading '#classes=C' line."""


class IndexOutOfRange(MlcError):
    """A manifest label index is outside [0, C)."""


# -- model / metrics errors --------------------------------------------------

class GridTooLarge(MlcError):
    """Pooling grid exceeds the image dimensions."""


class KTooLarge(MlcError):
    """Requested top-k exceeds the number of classes."""


class NoPositives(MlcError):
    """Average precision is undefined without any positive example."""


class AllClassesEmpty(MlcError):
    """No class has a positive example, so mAP is undefined."""


class EmptyInput(MlcError):
    """An operation that needs at least one member received none."""


# -- pipeline errors ---------------------------------------------------------

class DataLoadError(MlcError):
    """A dataset file is missing or unreadable."""


class DivergedLoss(MlcError):
    """Training produced a non-finite epoch loss."""


class IoError(MlcError):
    """Writing generated artifacts to disk failed."""
