"""Exception hierarchy.

DataError and ModelError split failures by the CLI exit code they map to.
"""


class UrlsiftError(Exception):
    pass


class DataError(UrlsiftError, ValueError):
    pass


class ModelError(UrlsiftError):
    pass


class EmptyInput(DataError):
    pass


class InputTooLong(DataError):
    pass


class LengthMismatch(DataError):
    pass


class TooFewSamples(DataError):
    pass


class EmptyDataset(DataError):
    pass


class HeaderMismatch(DataError):
    pass


class ClassTooSmall(DataError):
    pass


class SingleClass(DataError):
    pass


class SingleClassDataset(SingleClass):
    pass


class TooFewRows(DataError):
    pass


class EmptyNode(DataError):
    pass


class InvalidSpec(DataError):
    pass


class DimensionMismatch(ModelError, ValueError):
    pass


class UnsupportedVersion(ModelError):
    pass


class CorruptModel(ModelError):
    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        msg = f"corrupt model: {invariant}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class DigestMismatch(ModelError):
    pass
