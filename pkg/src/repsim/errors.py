"""Exception hierarchy shared by all repsim modules.

Every validation or computation failure raises a subclass of RepsimError,
so the CLI can map any domain failure to a one-line diagnostic and exit 1.
"""


class RepsimError(Exception):
    """Base class for all domain errors."""


class ShapeMismatch(RepsimError):
    pass


class EmptyClass(RepsimError):
    pass


class NonFiniteValue(RepsimError):
    pass


class DuplicateClassName(RepsimError):
    pass


class ClassOutOfRange(RepsimError):
    pass


class DegenerateClassMean(RepsimError):
    pass


class TooFewClasses(RepsimError):
    pass


class LengthMismatch(RepsimError):
    pass


class ConstantInput(RepsimError):
    pass


class ClassMismatch(RepsimError):
    pass


class LabelMismatch(RepsimError):
    pass


class TooFewImages(RepsimError):
    pass


class BatchTooSmall(RepsimError):
    pass


class NonSquare(RepsimError):
    pass


class ConfigInvalid(RepsimError):
    pass


class InvalidLevels(RepsimError):
    pass


class ParseError(RepsimError):
    pass
