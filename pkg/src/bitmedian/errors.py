"""Exception types shared across the package."""


class BitMedianError(Exception):
    """Base class for all errors raised by this package."""


class RangeError(BitMedianError):
    """A value falls outside the encodable range, or bounds are invalid."""


class WidthError(BitMedianError):
    """A word does not fit in the configured bit width."""


class RankError(BitMedianError):
    """Requested rank is outside 1..=number of selected rows."""


class MaskError(BitMedianError):
    """Row mask is empty or references rows outside the matrix."""


class KError(BitMedianError):
    """Cluster count is not in 1..=n."""


class ParseError(BitMedianError):
    """Malformed input file; carries the offending row/column when known."""

    def __init__(self, message, row=None, col=None):
        loc = ""
        if row is not None:
            loc = f" (row {row}" + (f", column {col})" if col is not None else ")")
        super().__init__(message + loc)
        self.row = row
        self.col = col


class ShapeError(BitMedianError):
    """Ragged rows: a data row does not match the header field count."""


class MissingError(BitMedianError):
    """Missing (NA) cells where complete numeric data is required."""
