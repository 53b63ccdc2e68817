"""Domain errors. ``name`` is what the CLI prints; it never changes."""


class ChevError(Exception):
    name = "ChevError"


class ZeroArgument(ChevError, ValueError):
    """nu of zero is undefined."""

    name = "ZeroArgument"


class FieldMismatch(ChevError, TypeError):
    name = "FieldMismatch"


class PoleAtPoint(ChevError, ZeroDivisionError):
    name = "PoleAtPoint"


class ConstantFunction(ChevError, ValueError):
    name = "ConstantFunction"


class InfiniteOrderSigma(ChevError, ValueError):
    name = "InfiniteOrderSigma"


class InvalidRank(ChevError, ValueError):
    name = "InvalidRank"


class NotARoot(ChevError, ValueError):
    name = "NotARoot"


class NotSquare(ChevError, ValueError):
    name = "NotSquare"


class UnknownLabel(ChevError, KeyError):
    name = "UnknownLabel"


class NonInvertibleScalar(ChevError, ZeroDivisionError):
    name = "NonInvertibleScalar"


class SingularMatrix(ChevError, ZeroDivisionError):
    name = "SingularMatrix"


class IncompatibleField(ChevError, TypeError):
    name = "IncompatibleField"


class NoSuchSymmetry(ChevError, ValueError):
    name = "NoSuchSymmetry"


class ExhaustedCandidates(ChevError, RuntimeError):
    name = "ExhaustedCandidates"


class ConstantInvariant(ChevError, RuntimeError):
    """The symbolic twisted-norm trace turned out constant in T."""

    name = "ConstantInvariant"


class InconsistentSigns(ChevError, RuntimeError):
    """Graph-automorphism sign propagation contradicted itself."""

    name = "InconsistentSigns"


class ParseError(ChevError, ValueError):
    name = "ParseError"
