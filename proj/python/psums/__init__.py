"""Succinct partial sums over arrays of k-bit integers."""

from ._psums import (
    ClassicFenwick,
    DeltaTooLarge,
    IndexOutOfRange,
    InvalidParameter,
    LayeredFenwick,
    NaiveArray,
    PackedFenwick,
    ParseError,
    SampledFenwick,
    SpaceReport,
    ValueRangeError,
    decode_array,
    encode_array,
    sample_rate_for,
)

__all__ = [
    "ClassicFenwick",
    "DeltaTooLarge",
    "IndexOutOfRange",
    "InvalidParameter",
    "LayeredFenwick",
    "NaiveArray",
    "PackedFenwick",
    "ParseError",
    "SampledFenwick",
    "SpaceReport",
    "ValueRangeError",
    "decode_array",
    "encode_array",
    "sample_rate_for",
]
