"""Order-preserving fixed-point encoding of reals into unsigned words.

A codec maps a real value to ``round(value * 2**frac_bits) + bias``, an
unsigned word of ``width`` bits.  Because the map is monotone, comparing the
words as unsigned integers is the same as comparing the original reals, which
is what lets bit-serial rank selection operate on the encoded words directly.

Signed data uses a bias (offset-binary) rather than two's complement so the
ordering property holds without special-casing the sign bit.  Rounding is
half-to-even throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import RangeError

MAX_WIDTH = 64


@dataclass(frozen=True)
class FixedPointCodec:
    """Encoding parameters: word width, fractional bits, additive bias.

    ``width`` in 1..=64, ``0 <= frac_bits < width``, ``0 <= bias < 2**width``.
    ``bias`` is 0 for non-negative data and conventionally ``2**(width-1)``
    for signed data.
    """

    width: int
    frac_bits: int = 0
    bias: int = 0

    def __post_init__(self):
        if not 1 <= self.width <= MAX_WIDTH:
            raise ValueError(f"width must be in 1..={MAX_WIDTH}, got {self.width}")
        if not 0 <= self.frac_bits < self.width:
            raise ValueError(
                f"frac_bits must be in 0..{self.width - 1}, got {self.frac_bits}"
            )
        if not 0 <= self.bias < (1 << self.width):
            raise ValueError(f"bias must be in 0..2**width-1, got {self.bias}")

    @property
    def max_word(self) -> int:
        return (1 << self.width) - 1

    @property
    def resolution(self) -> float:
        """Grid spacing, ``2**-frac_bits``."""
        return 1.0 / (1 << self.frac_bits)


def encode(value: float, codec: FixedPointCodec) -> int:
    """Encode a real into the codec's unsigned word.

    Raises RangeError if the scaled-and-biased value does not fit in
    ``width`` bits (or the value is not finite).
    """
    if not math.isfinite(value):
        raise RangeError(f"cannot encode non-finite value {value!r}")
    # Exact rational arithmetic: Fraction(round()) is half-to-even.
    word = round(Fraction(value) * (1 << codec.frac_bits)) + codec.bias
    if not 0 <= word <= codec.max_word:
        raise RangeError(
            f"value {value!r} encodes to {word}, outside 0..{codec.max_word}"
        )
    return word


def decode(word: int, codec: FixedPointCodec) -> float:
    """Inverse of :func:`encode`: ``(word - bias) / 2**frac_bits``."""
    return (word - codec.bias) / (1 << codec.frac_bits)


def codec_for_values(
    values, width: int = MAX_WIDTH, bias: int | None = None
) -> FixedPointCodec:
    """Pick the finest codec of the given width that fits all values.

    ``frac_bits`` is the largest f such that every value encodes within the
    word range.  ``bias`` defaults to 0 for non-negative data and
    ``2**(width-1)`` otherwise.
    """
    values = list(values)
    if not values:
        raise ValueError("cannot derive a codec from no values")
    for v in values:
        if not math.isfinite(v):
            raise RangeError(f"cannot encode non-finite value {v!r}")
    lo, hi = min(values), max(values)
    if bias is None:
        bias = 0 if lo >= 0 else 1 << (width - 1)
    max_word = (1 << width) - 1
    # round() is monotone, so checking the extremes suffices.
    for f in range(width - 1, -1, -1):
        lo_w = round(Fraction(lo) * (1 << f)) + bias
        hi_w = round(Fraction(hi) * (1 << f)) + bias
        if 0 <= lo_w and hi_w <= max_word:
            return FixedPointCodec(width=width, frac_bits=f, bias=bias)
    raise RangeError(
        f"no frac_bits in 0..{width - 1} fits values [{lo}, {hi}] "
        f"at width {width} with bias {bias}"
    )
