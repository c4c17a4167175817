"""Detect numeric RDF literals distorted by the xsd:float / xsd:double mappings."""
from .exactness import (
    BINARY32,
    BINARY64,
    BinaryFloatValue,
    BinaryFormat,
    DistortionReport,
    ExactDecimal,
    Kind,
    MalformedNumeral,
    NotationClass,
    NotFinite,
    binary_to_exact_decimal,
    classify_lexical,
    distortion_report,
    exact_add,
    exact_sub,
    is_exactly_representable,
    lexical_to_binary,
    parse_exact_decimal,
    round_to_binary,
    shortest_roundtrip_string,
    widen,
)

__version__ = "0.1.0"
