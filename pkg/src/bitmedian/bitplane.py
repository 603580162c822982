"""Bit-serial rank selection over column-major bit planes.

Words are stored column-major: one Python integer per bit position, where bit
``i`` of the column integer is row ``i``'s bit at that position (column 0 is
the MSB).  A whole bit plane is therefore a single integer, and counting ones
among any subset of rows is an AND plus a popcount.

Selection walks the columns MSB to LSB.  At each column the number of rows
whose effective bit is 0 is compared against the requested rank: the output
bit is 0 iff that count reaches the rank.  Rows whose bit disagrees with the
output are frozen ("saturated") and contribute their own bit at every later
column, which is equivalent to rewriting all their lower-order bits.  With
rank = ceil(n/2) each column decision is exactly the majority vote of the
effective bits, and the selected word is the median (the lower median when n
is even).

Row subsets are plain integer bitmasks (bit i = row i participates).  The
matrix itself is never mutated; all selection state is per-call scratch, so
any number of selections may run concurrently over one matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MaskError, RankError, WidthError

__all__ = [
    "BitPlaneMatrix",
    "ColumnStep",
    "build_bitplanes",
    "majority",
    "median",
    "median_rank",
    "rank_select",
    "step_trace",
]


class BitPlaneMatrix:
    """N rows of W-bit words, stored as W column bitmasks (column 0 = MSB)."""

    __slots__ = ("n_rows", "width", "columns")

    def __init__(self, n_rows: int, width: int, columns: tuple[int, ...]):
        self.n_rows = n_rows
        self.width = width
        self.columns = columns

    @property
    def full_mask(self) -> int:
        """Mask selecting every row."""
        return (1 << self.n_rows) - 1

    def bit(self, row: int, col: int) -> int:
        return (self.columns[col] >> row) & 1

    def word(self, row: int) -> int:
        """Reconstruct the stored word of one row from the columns."""
        w = 0
        for col in self.columns:
            w = (w << 1) | ((col >> row) & 1)
        return w

    def words(self) -> list[int]:
        return [self.word(i) for i in range(self.n_rows)]

    def __repr__(self):
        return f"BitPlaneMatrix(n_rows={self.n_rows}, width={self.width})"


def build_bitplanes(values, width: int) -> BitPlaneMatrix:
    """Pack words into a column-major matrix.

    Raises WidthError if any value needs more than ``width`` bits, ValueError
    on an empty input.
    """
    values = list(values)
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    if not values:
        raise ValueError("cannot build bit planes from no values")
    limit = 1 << width
    cols = [0] * width
    for i, v in enumerate(values):
        if not 0 <= v < limit:
            raise WidthError(f"value {v} at row {i} does not fit in {width} bits")
        for c in range(width):
            cols[c] |= ((v >> (width - 1 - c)) & 1) << i
    return BitPlaneMatrix(len(values), width, tuple(cols))


def majority(zeros: int, ones: int) -> int:
    """Majority vote over zeros+ones inputs: 0 iff at least half are 0."""
    n = zeros + ones
    if n < 1:
        raise ValueError("majority needs at least one input")
    return 0 if 2 * zeros >= n else 1


def median_rank(count: int) -> int:
    """Rank (1-based, from the smallest) selected by the majority rule:
    ceil(count/2), i.e. the lower median for even counts."""
    return (count + 1) // 2


def _check_selection(m: BitPlaneMatrix, rank: int, mask: int | None) -> int:
    if mask is None:
        mask = m.full_mask
    elif mask <= 0 or mask >> m.n_rows:
        raise MaskError(f"mask must select at least one of {m.n_rows} rows")
    n_sel = mask.bit_count()
    if not 1 <= rank <= n_sel:
        raise RankError(f"rank {rank} out of range 1..{n_sel}")
    return mask


def rank_select(m: BitPlaneMatrix, rank: int, mask: int | None = None) -> int:
    """Select the rank-th smallest word among the masked-in rows.

    Rank is 1-based from the smallest.  Raises RankError / MaskError on a bad
    rank or an empty mask.
    """
    mask = _check_selection(m, rank, mask)
    n_sel = mask.bit_count()
    active = mask  # rows not yet saturated
    sat_ones = 0  # rows frozen contributing 1 at every remaining column
    out = 0
    for col in m.columns:
        ones_active = (col & active).bit_count()
        zeros = n_sel - sat_ones - ones_active  # includes rows frozen at 0
        if zeros >= rank:
            bit = 0
            disagree = col & active
            sat_ones += disagree.bit_count()
        else:
            bit = 1
            disagree = active & ~col
        active ^= disagree
        out = (out << 1) | bit
    return out


def median(m: BitPlaneMatrix, mask: int | None = None) -> int:
    """Majority-rule median of the masked-in rows (lower median for even
    counts)."""
    n_sel = (m.full_mask if mask is None else mask).bit_count()
    return rank_select(m, median_rank(n_sel), mask)


@dataclass(frozen=True)
class ColumnStep:
    """One column of a selection walk."""

    column: int
    zeros: int
    ones: int
    out_bit: int
    rows_saturated: int


def step_trace(
    m: BitPlaneMatrix, rank: int | None = None, mask: int | None = None
) -> list[ColumnStep]:
    """Instrumented version of :func:`rank_select`: one record per column.

    ``rank=None`` traces the median walk.  The selected word is the
    concatenation of the ``out_bit`` fields.
    """
    if rank is None:
        rank = median_rank((m.full_mask if mask is None else mask).bit_count())
    mask = _check_selection(m, rank, mask)
    n_sel = mask.bit_count()
    active = mask
    sat_ones = 0
    steps = []
    for c, col in enumerate(m.columns):
        ones_active = (col & active).bit_count()
        zeros = n_sel - sat_ones - ones_active
        ones = ones_active + sat_ones
        if zeros >= rank:
            bit = 0
            disagree = col & active
            sat_ones += disagree.bit_count()
        else:
            bit = 1
            disagree = active & ~col
        active ^= disagree
        steps.append(ColumnStep(c, zeros, ones, bit, disagree.bit_count()))
    return steps
