"""Exception hierarchy shared by every stage of the pipeline."""


class RadsurvError(Exception):
    """Base class for all errors raised by radsurv."""


# volume I/O
class UnsupportedFormat(RadsurvError):
    pass


class CorruptHeader(RadsurvError):
    pass


class DimMismatch(RadsurvError):
    pass


class InvalidLabel(RadsurvError):
    def __init__(self, value):
        super().__init__(f"invalid mask label {value!r}; expected one of 0, 1, 2, 4")
        self.value = value


class IndexOutOfRange(RadsurvError, IndexError):
    pass


# preprocessing / features
class DegenerateSlice(RadsurvError):
    pass


class EmptyROI(RadsurvError):
    pass


class EmptyMask(RadsurvError):
    pass


class ContourTooShort(RadsurvError):
    pass


class NoValidPairs(RadsurvError):
    pass


class NoInteriorPixels(RadsurvError):
    pass


# dataset
class MissingColumn(RadsurvError):
    pass


class MalformedRow(RadsurvError):
    def __init__(self, line_no, reason=""):
        msg = f"malformed row at line {line_no}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.line_no = line_no


class UnknownSubject(RadsurvError):
    def __init__(self, subject_id):
        super().__init__(f"no clinical record for subject {subject_id!r}")
        self.subject_id = subject_id


# classifiers
class SingleClass(RadsurvError):
    pass


class NonFiniteFeature(RadsurvError):
    def __init__(self, row, col):
        super().__init__(f"non-finite feature value at row {row}, column {col}")
        self.row = row
        self.col = col


class DimensionMismatch(RadsurvError):
    pass


class NotAForest(RadsurvError):
    pass


# evaluation
class TooFewPerClass(RadsurvError):
    pass


class EmptySubject(RadsurvError):
    pass


class EmptyRow(RadsurvError):
    pass


class FoldError(RadsurvError):
    """Wraps an error raised while fitting or predicting one CV fold."""

    def __init__(self, fold, cause):
        super().__init__(f"fold {fold}: {cause}")
        self.fold = fold
        self.cause = cause
