"""
Error types raised by qsolab.

Every error derives from :class:`QsoError`, itself a ``ValueError``, so callers
that only care about "bad input" can catch a single type. Axiom errors keep the
zero-based offending indices as attributes and print them one-based.
"""

__all__ = [
    "QsoError",
    "DimensionMismatch",
    "InvalidDensity",
    "DegenerateDifference",
    "InvalidOperator",
    "NegativeEntry",
    "RowNotStochastic",
    "AsymmetricEntry",
    "NotInvariantSeed",
    "InvalidRange",
    "InvalidParameter",
    "PreconditionViolation",
    "IdenticalOperators",
    "InvalidPartition",
    "OperatorFileError",
    "NumericAssertionError",
]


class QsoError(ValueError):
    pass


class DimensionMismatch(QsoError):
    def __init__(self, expected, got, what="operand"):
        self.expected = expected
        self.got = got
        super().__init__(f"dimension mismatch: {what} has dim {got}, expected {expected}")


class InvalidDensity(QsoError):
    pass


class DegenerateDifference(QsoError):
    """
    Raised when the normalized positive/negative split of ``u - v`` is
    requested for ``u == v``.
    """


class InvalidOperator(QsoError):
    pass


class NegativeEntry(InvalidOperator):
    def __init__(self, i, j, k, value):
        self.index = (i, j, k)
        self.value = value
        super().__init__(
            "NegativeEntry (i={},j={},k={}): q={!r}".format(i + 1, j + 1, k + 1, value)
        )


class RowNotStochastic(InvalidOperator):
    def __init__(self, i, j, total):
        self.index = (i, j)
        self.total = total
        super().__init__(
            "RowNotStochastic (i={},j={}): sum_k q={!r}".format(i + 1, j + 1, total)
        )


class AsymmetricEntry(InvalidOperator):
    def __init__(self, i, j, k, gap):
        self.index = (i, j, k)
        self.gap = gap
        super().__init__(
            "AsymmetricEntry (i={},j={},k={}): |q_ijk - q_jik|={!r}".format(
                i + 1, j + 1, k + 1, gap
            )
        )


class NotInvariantSeed(QsoError):
    pass


class InvalidRange(QsoError):
    pass


class InvalidParameter(QsoError):
    pass


class PreconditionViolation(QsoError):
    pass


class IdenticalOperators(QsoError):
    pass


class InvalidPartition(QsoError):
    pass


class OperatorFileError(QsoError):
    pass


class NumericAssertionError(QsoError):
    """
    A certified bound or an exact arithmetic identity failed to hold.
    """
