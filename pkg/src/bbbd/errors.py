"""Exception types raised across the package."""


class BBBDError(Exception):
    """Base class for all package errors."""


class LengthMismatch(BBBDError, ValueError):
    pass


class ExtentMismatch(BBBDError, ValueError):
    pass


class DegeneratePolygon(BBBDError, ValueError):
    pass


class DuplicateId(BBBDError, ValueError):
    pass


class DimensionMismatch(BBBDError, ValueError):
    pass


class InfeasibleConstraints(BBBDError, RuntimeError):
    pass


class ParseError(BBBDError, ValueError):
    pass


class SchemaError(BBBDError, ValueError):
    """A scene file is missing a field or has one of the wrong type.

    ``path`` is a JSON-path style location such as ``$.instances[2].mask``.
    """

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class ValidationError(BBBDError, ValueError):
    pass


class UnsupportedEncoding(BBBDError, ValueError):
    pass


class MissingField(BBBDError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class MissingGroundTruth(BBBDError, ValueError):
    pass
