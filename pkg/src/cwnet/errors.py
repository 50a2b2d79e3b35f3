"""Exception hierarchy.

Every error carries a stable ``code`` string, which the CLI reports in its
structured error object.
"""


class CwnetError(Exception):
    code = "CwnetError"

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self)}


class InvalidEdge(CwnetError):
    code = "InvalidEdge"


class HermitianViolation(CwnetError):
    code = "HermitianViolation"


class Disconnected(CwnetError):
    code = "Disconnected"


class ParseError(CwnetError):
    code = "ParseError"

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DimensionMismatch(CwnetError):
    code = "DimensionMismatch"


class NotHermitian(CwnetError):
    code = "NotHermitian"


class NumericalFailure(CwnetError):
    code = "NumericalFailure"


class NotInClass(CwnetError):
    code = "NotInClass"


class Bipartite(CwnetError):
    code = "Bipartite"


class TooLarge(CwnetError):
    code = "TooLarge"


class PhaseGridViolation(CwnetError):
    code = "PhaseGridViolation"


class InvalidSubset(CwnetError):
    code = "InvalidSubset"


class InvalidK(CwnetError):
    code = "InvalidK"


class InvalidParameter(CwnetError):
    code = "InvalidParameter"


class GenerationFailed(CwnetError):
    code = "GenerationFailed"
