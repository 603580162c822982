"""Behavioral model of tiled in-storage rank selection with a cost ledger.

Rows of a bit-plane matrix are partitioned into fixed-capacity arrays
("tiles").  Each column step is: every participating tile counts the zero/one
bits in its slice of the column (an analog counter handles at most
``group_size`` cells per step), the per-tile partial counts are merged by a
fan-in-``tree_fanin`` reduction tree, the selection bit is decided from the
global count, and that single bit is broadcast back so each tile can freeze
its own disagreeing rows locally.  Raw words never leave the tiles; only
partial counts and one bit per column cross array boundaries, and the ledger
counts exactly that traffic against a stream-everything baseline.

The selected word is bit-identical to :func:`bitmedian.bitplane.rank_select`
on the unpartitioned matrix; the ledger is a deterministic function of
(matrix shape, mask, config).
"""

from __future__ import annotations

from dataclasses import dataclass

from .bitplane import BitPlaneMatrix, median_rank
from .errors import MaskError, RankError

__all__ = [
    "CostLedger",
    "TileConfig",
    "TilePlan",
    "TileState",
    "partition",
    "tile_column_count",
    "reduce_counts",
    "simulated_rank_select",
    "simulated_median",
    "streaming_baseline_cost",
]


@dataclass(frozen=True)
class TileConfig:
    """Array geometry: rows per array, cells counted per step, tree fan-in.

    ``count_width`` is the bit width charged per partial-count component on
    reduction-tree edges; None derives the information-theoretic minimum,
    ceil(log2(selected_rows + 1)), per selection.
    """

    rows_per_array: int = 256
    group_size: int = 16
    tree_fanin: int = 2
    count_width: int | None = None

    def __post_init__(self):
        if self.rows_per_array < 1:
            raise ValueError("rows_per_array must be >= 1")
        if not 1 <= self.group_size <= self.rows_per_array:
            raise ValueError("group_size must be in 1..rows_per_array")
        if self.tree_fanin < 2:
            raise ValueError("tree_fanin must be >= 2")
        if self.count_width is not None and self.count_width < 1:
            raise ValueError("count_width must be >= 1 when set")


@dataclass
class CostLedger:
    """Exact, monotone counters of simulated work and data movement.

    bits_moved counts bits crossing an array boundary: partial counts on
    reduction-tree edges plus the one-bit column result broadcast to each
    participating tile.  host_bits_moved is the streaming baseline (every
    selected word shipped to the host once per selection).
    """

    column_activations: int = 0
    counting_steps: int = 0
    merge_ops: int = 0
    bits_moved: int = 0
    host_bits_moved: int = 0

    def ratio(self) -> float | None:
        """In-situ over streaming traffic; None until a baseline is charged."""
        if self.host_bits_moved == 0:
            return None
        return self.bits_moved / self.host_bits_moved

    def as_dict(self) -> dict:
        d = {
            "column_activations": self.column_activations,
            "counting_steps": self.counting_steps,
            "merge_ops": self.merge_ops,
            "bits_moved": self.bits_moved,
            "host_bits_moved": self.host_bits_moved,
        }
        r = self.ratio()
        if r is not None:
            d["ratio"] = r
        return d


@dataclass(frozen=True)
class TilePlan:
    """Partition of a matrix's rows into contiguous tiles of <= R rows."""

    matrix: BitPlaneMatrix
    config: TileConfig
    spans: tuple[tuple[int, int], ...]  # (start, stop) row ranges

    @property
    def n_tiles(self) -> int:
        return len(self.spans)


def partition(m: BitPlaneMatrix, cfg: TileConfig | None = None) -> TilePlan:
    """Split rows into ceil(N/R) tiles; row i lands in tile i // R."""
    cfg = cfg or TileConfig()
    r = cfg.rows_per_array
    spans = tuple(
        (start, min(start + r, m.n_rows)) for start in range(0, m.n_rows, r)
    )
    return TilePlan(m, cfg, spans)


class TileState:
    """Per-selection scratch of one tile: its slice of the row mask plus
    which of those rows are still unfrozen."""

    __slots__ = ("matrix", "config", "selected", "n_selected", "active", "sat_ones")

    def __init__(self, plan: TilePlan, span: tuple[int, int], mask: int):
        start, stop = span
        span_mask = ((1 << (stop - start)) - 1) << start
        self.matrix = plan.matrix
        self.config = plan.config
        self.selected = mask & span_mask
        self.n_selected = self.selected.bit_count()
        self.active = self.selected
        self.sat_ones = 0

    def apply_output_bit(self, column: int, bit: int) -> None:
        """Freeze this tile's rows that disagree with the broadcast bit."""
        col = self.matrix.columns[column]
        if bit == 0:
            disagree = col & self.active
            self.sat_ones += disagree.bit_count()
        else:
            disagree = self.active & ~col
        self.active ^= disagree


def tile_column_count(
    tile: TileState, column: int, ledger: CostLedger | None = None
) -> tuple[int, int]:
    """Exact zero/one counts of one tile at one column.

    Frozen rows contribute their frozen bit.  Charges one column activation
    and ceil(selected/group_size) counting steps: every selected cell is
    sensed, at most group_size per step.
    """
    col = tile.matrix.columns[column]
    ones_active = (col & tile.active).bit_count()
    zeros = tile.n_selected - tile.sat_ones - ones_active
    ones = ones_active + tile.sat_ones
    if ledger is not None:
        g = tile.config.group_size
        ledger.column_activations += 1
        ledger.counting_steps += -(-tile.n_selected // g)
    return zeros, ones


def reduce_counts(
    partials,
    fanin: int,
    ledger: CostLedger | None = None,
    count_width: int | None = None,
) -> tuple[int, int]:
    """Merge per-tile partial counts through a fan-in-F reduction tree.

    Charges one merge op per internal tree node, and for every partial
    entering a tree level, 2 * count_width bits (a zeros count and a ones
    count) crossing that edge.  count_width defaults to the bits needed for
    the total, ceil(log2(total+1)).
    """
    partials = list(partials)
    if not partials:
        raise ValueError("reduce_counts needs at least one partial")
    zeros = sum(p[0] for p in partials)
    ones = sum(p[1] for p in partials)
    if ledger is not None:
        if count_width is None:
            count_width = max(1, (zeros + ones).bit_length())
        level = len(partials)
        while level > 1:
            nodes = -(-level // fanin)
            ledger.merge_ops += nodes
            ledger.bits_moved += level * 2 * count_width
            level = nodes
    return zeros, ones


def simulated_rank_select(
    plan: TilePlan,
    rank: int,
    mask: int | None = None,
    ledger: CostLedger | None = None,
) -> tuple[int, CostLedger]:
    """Tiled selection of the rank-th smallest masked-in word.

    Returns the selected word (bit-identical to the unpartitioned engine)
    and the ledger, freshly created when none is passed in.
    """
    m = plan.matrix
    if mask is None:
        mask = m.full_mask
    elif mask <= 0 or mask >> m.n_rows:
        raise MaskError(f"mask must select at least one of {m.n_rows} rows")
    n_sel = mask.bit_count()
    if not 1 <= rank <= n_sel:
        raise RankError(f"rank {rank} out of range 1..{n_sel}")
    if ledger is None:
        ledger = CostLedger()

    tiles = [TileState(plan, span, mask) for span in plan.spans]
    tiles = [t for t in tiles if t.n_selected]  # fully masked-out arrays idle
    fanin = plan.config.tree_fanin
    count_width = plan.config.count_width or max(1, n_sel.bit_length())

    out = 0
    for column in range(m.width):
        partials = [tile_column_count(t, column, ledger) for t in tiles]
        zeros, _ones = reduce_counts(partials, fanin, ledger, count_width)
        bit = 0 if zeros >= rank else 1
        ledger.bits_moved += len(tiles)  # one-bit broadcast per tile
        for t in tiles:
            t.apply_output_bit(column, bit)
        out = (out << 1) | bit
    return out, ledger


def simulated_median(
    plan: TilePlan, mask: int | None = None, ledger: CostLedger | None = None
) -> tuple[int, CostLedger]:
    n_sel = (plan.matrix.full_mask if mask is None else mask).bit_count()
    return simulated_rank_select(plan, median_rank(n_sel), mask, ledger)


def streaming_baseline_cost(
    n_values: int, width: int, ledger: CostLedger | None = None
) -> CostLedger:
    """Charge the stream-to-host baseline for one selection: every selected
    word crosses the boundary once, n * W bits."""
    if ledger is None:
        ledger = CostLedger()
    ledger.host_bits_moved += n_values * width
    return ledger
