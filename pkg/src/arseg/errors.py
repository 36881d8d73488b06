"""Exception hierarchy for arseg.

Every error raised by the library derives from :class:`ArsegError`, which
itself is a ``ValueError`` so callers that only care about bad input can
catch the builtin.
"""


class ArsegError(ValueError):
    """Base class for all library errors."""

    code = "ArsegError"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class TooShort(ArsegError):
    code = "TooShort"


class NonFinite(ArsegError):
    code = "NonFinite"

    def __init__(self, index, value=None):
        self.index = int(index)
        super().__init__(f"non-finite value {value!r} at index {self.index}")

    def to_dict(self):
        out = super().to_dict()
        out["index"] = self.index
        return out


class EmptyInput(ArsegError):
    code = "EmptyInput"


class TooFewValues(ArsegError):
    code = "TooFewValues"


class DegenerateMedian(ArsegError):
    code = "DegenerateMedian"


class DegenerateScale(ArsegError):
    code = "DegenerateScale"


class OutOfDomain(ArsegError):
    code = "OutOfDomain"


class IndexOutOfRange(ArsegError):
    code = "IndexOutOfRange"


class InfeasibleConstraints(ArsegError):
    code = "InfeasibleConstraints"


class EmptyFits(ArsegError):
    code = "EmptyFits"


class ZeroSS(ArsegError):
    code = "ZeroSS"


class AllDegenerate(ArsegError):
    code = "AllDegenerate"


class DegenerateResiduals(ArsegError):
    code = "DegenerateResiduals"


class DegenerateRegressor(ArsegError):
    code = "DegenerateRegressor"


class InvalidConfig(ArsegError):
    code = "InvalidConfig"
