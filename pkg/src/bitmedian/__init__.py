"""Bit-serial median/rank selection by majority voting, a tiled in-storage
execution model with an exact cost ledger, and k-means/k-medians clustering
built on top of it."""

__version__ = "0.1.0"

from .bitplane import (
    BitPlaneMatrix,
    build_bitplanes,
    majority,
    median,
    median_rank,
    rank_select,
    step_trace,
)
from .clustering import ClusterConfig, ClusterModel, run, sweep_k
from .errors import (
    BitMedianError,
    KError,
    MaskError,
    MissingError,
    ParseError,
    RangeError,
    RankError,
    ShapeError,
    WidthError,
)
from .fixedpoint import FixedPointCodec, codec_for_values, decode, encode
from .ingest import Dataset, encode_dataset, parse, summary_stats
from .pimsim import (
    CostLedger,
    TileConfig,
    TilePlan,
    partition,
    simulated_median,
    simulated_rank_select,
    streaming_baseline_cost,
)

__all__ = [
    "__version__",
    "BitMedianError",
    "BitPlaneMatrix",
    "ClusterConfig",
    "ClusterModel",
    "CostLedger",
    "Dataset",
    "FixedPointCodec",
    "KError",
    "MaskError",
    "MissingError",
    "ParseError",
    "RangeError",
    "RankError",
    "ShapeError",
    "TileConfig",
    "TilePlan",
    "WidthError",
    "build_bitplanes",
    "codec_for_values",
    "decode",
    "encode",
    "encode_dataset",
    "majority",
    "median",
    "median_rank",
    "parse",
    "partition",
    "rank_select",
    "run",
    "simulated_median",
    "simulated_rank_select",
    "step_trace",
    "streaming_baseline_cost",
    "summary_stats",
    "sweep_k",
]
