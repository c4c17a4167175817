"""Exact numeric semantics for xsd:decimal, xsd:float and xsd:double.

Everything here is decided with Python integers. Host floating point is never
consulted, so results do not depend on the platform.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional


class MalformedNumeral(ValueError):
    """Raised when a string is not a numeric lexical form."""


class NumeralOutOfRange(MalformedNumeral):
    """The decimal exponent is too large to expand into an exact value."""


class NotFinite(ValueError):
    """Raised when an exact expansion is requested for INF or NaN."""


# Expanding "1e999999999" into an integer would exhaust memory; beyond this
# many decimal orders of magnitude past the digit count we refuse to expand.
EXPONENT_LIMIT = 100_000


@lru_cache(maxsize=4096)
def _pow10(n: int) -> int:
    return 10**n


@lru_cache(maxsize=4096)
def _pow5(n: int) -> int:
    return 5**n


def _strip_tens(c: int, s: int) -> tuple[int, int]:
    if c == 0:
        return 0, 0
    while s >= 16 and c % 10**16 == 0:
        c //= 10**16
        s -= 16
    while s > 0 and c % 10 == 0:
        c //= 10
        s -= 1
    return c, s


class ExactDecimal:
    """The value ``coefficient / 10**scale``, kept in canonical form.

    Canonical means ``scale == 0`` or the coefficient is not a multiple of
    ten, so equal values always share one representation.
    """

    __slots__ = ("coefficient", "scale")

    coefficient: int
    scale: int

    def __init__(self, coefficient: int, scale: int = 0):
        if scale < 0:
            coefficient *= _pow10(-scale)
            scale = 0
        coefficient, scale = _strip_tens(int(coefficient), int(scale))
        object.__setattr__(self, "coefficient", coefficient)
        object.__setattr__(self, "scale", scale)

    def __setattr__(self, name, value):
        raise AttributeError("ExactDecimal is immutable")

    @classmethod
    def from_fraction(cls, value: Fraction) -> "ExactDecimal":
        """Exact conversion; fails when the denominator has a prime other than 2 or 5."""
        num, den = value.numerator, value.denominator
        twos = (den & -den).bit_length() - 1
        rest = den >> twos
        fives = 0
        while rest % 5 == 0:
            rest //= 5
            fives += 1
        if rest != 1:
            raise ValueError(f"{value} has no finite decimal expansion")
        scale = max(twos, fives)
        return cls(num * (2 ** (scale - twos)) * _pow5(scale - fives), scale)

    def as_fraction(self) -> Fraction:
        return Fraction(self.coefficient, _pow10(self.scale))

    def is_zero(self) -> bool:
        return self.coefficient == 0

    def __neg__(self) -> "ExactDecimal":
        return ExactDecimal(-self.coefficient, self.scale)

    def __abs__(self) -> "ExactDecimal":
        return ExactDecimal(abs(self.coefficient), self.scale)

    def _aligned(self, other: "ExactDecimal") -> tuple[int, int, int]:
        s = max(self.scale, other.scale)
        return (
            self.coefficient * _pow10(s - self.scale),
            other.coefficient * _pow10(s - other.scale),
            s,
        )

    def __add__(self, other):
        if not isinstance(other, ExactDecimal):
            return NotImplemented
        a, b, s = self._aligned(other)
        return ExactDecimal(a + b, s)

    def __sub__(self, other):
        if not isinstance(other, ExactDecimal):
            return NotImplemented
        a, b, s = self._aligned(other)
        return ExactDecimal(a - b, s)

    def __eq__(self, other):
        if isinstance(other, ExactDecimal):
            return self.coefficient == other.coefficient and self.scale == other.scale
        if isinstance(other, (int, Fraction)):
            return self.as_fraction() == other
        return NotImplemented

    def __hash__(self):
        return hash(self.as_fraction()) if self.scale else hash(self.coefficient)

    def __lt__(self, other):
        if not isinstance(other, ExactDecimal):
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a < b

    def __le__(self, other):
        if not isinstance(other, ExactDecimal):
            return NotImplemented
        a, b, _ = self._aligned(other)
        return a <= b

    def __gt__(self, other):
        if not isinstance(other, ExactDecimal):
            return NotImplemented
        return other < self

    def __ge__(self, other):
        if not isinstance(other, ExactDecimal):
            return NotImplemented
        return other <= self

    def __str__(self):
        sign = "-" if self.coefficient < 0 else ""
        digits = str(abs(self.coefficient))
        if self.scale == 0:
            return sign + digits
        if len(digits) <= self.scale:
            digits = "0" * (self.scale - len(digits) + 1) + digits
        return f"{sign}{digits[:-self.scale]}.{digits[-self.scale:]}"

    def __repr__(self):
        return f"ExactDecimal('{self}')"


def exact_add(a: ExactDecimal, b: ExactDecimal) -> ExactDecimal:
    return a + b


def exact_sub(a: ExactDecimal, b: ExactDecimal) -> ExactDecimal:
    return a - b


@dataclass(frozen=True)
class BinaryFormat:
    name: str
    precision_bits: int
    min_exponent: int
    max_exponent: int

    def __repr__(self):
        return self.name


BINARY32 = BinaryFormat("binary32", 24, -149, 104)
BINARY64 = BinaryFormat("binary64", 53, -1074, 971)
FORMATS = {f.name: f for f in (BINARY32, BINARY64)}


class Kind(enum.Enum):
    FINITE = "Finite"
    POSITIVE_ZERO = "PositiveZero"
    NEGATIVE_ZERO = "NegativeZero"
    POSITIVE_INFINITY = "PositiveInfinity"
    NEGATIVE_INFINITY = "NegativeInfinity"
    NAN = "NotANumber"


@dataclass(frozen=True)
class BinaryFloatValue:
    """A member of the binary32 or binary64 value space.

    Finite values carry a canonical ``significand * 2**exponent``: the
    significand is normalized (``|m| >= 2**(p-1)``) unless the exponent is
    already the format minimum. Use :meth:`finite` to build one from any
    ``(m, e)`` pair.

    ``==`` is structural (NaN equals NaN, -0 differs from +0) so values work
    in sets and dicts; :func:`ieee_equal` gives the IEEE comparison.
    """

    format: BinaryFormat
    kind: Kind
    significand: int = 0
    exponent: int = 0

    def __post_init__(self):
        if self.kind is Kind.FINITE:
            fmt = self.format
            m = abs(self.significand)
            if m == 0:
                raise ValueError("finite values are nonzero; use a zero kind")
            if m >= 1 << fmt.precision_bits:
                raise ValueError("significand out of range")
            if not fmt.min_exponent <= self.exponent <= fmt.max_exponent:
                raise ValueError("exponent out of range")
            if m < 1 << (fmt.precision_bits - 1) and self.exponent != fmt.min_exponent:
                raise ValueError("non-canonical significand; use BinaryFloatValue.finite")
        elif self.significand or self.exponent:
            raise ValueError("special values carry no significand or exponent")

    @classmethod
    def finite(cls, fmt: BinaryFormat, significand: int, exponent: int) -> "BinaryFloatValue":
        """Canonicalize ``significand * 2**exponent``; ValueError if not in the value space."""
        if significand == 0:
            return cls(fmt, Kind.POSITIVE_ZERO)
        sign = -1 if significand < 0 else 1
        m = abs(significand)
        while m & 1 == 0 and m >= 1 << fmt.precision_bits:
            m >>= 1
            exponent += 1
        shift = fmt.precision_bits - m.bit_length()
        if shift > 0:
            shift = min(shift, exponent - fmt.min_exponent)
            if shift > 0:
                m <<= shift
                exponent -= shift
        elif shift < 0:
            raise ValueError("significand has more bits than the format's precision")
        while exponent < fmt.min_exponent and m & 1 == 0:
            m >>= 1
            exponent += 1
        return cls(fmt, Kind.FINITE, sign * m, exponent)

    @classmethod
    def special(cls, fmt: BinaryFormat, kind: Kind) -> "BinaryFloatValue":
        return cls(fmt, kind)

    @property
    def is_finite(self) -> bool:
        return self.kind is Kind.FINITE

    @property
    def is_zero(self) -> bool:
        return self.kind in (Kind.POSITIVE_ZERO, Kind.NEGATIVE_ZERO)

    @property
    def is_infinite(self) -> bool:
        return self.kind in (Kind.POSITIVE_INFINITY, Kind.NEGATIVE_INFINITY)

    @property
    def is_nan(self) -> bool:
        return self.kind is Kind.NAN

    def as_fraction(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_finite:
            raise NotFinite(self.kind.value)
        if self.exponent >= 0:
            return Fraction(self.significand << self.exponent)
        return Fraction(self.significand, 1 << -self.exponent)

    def total_order_key(self, signed_zero: bool = True) -> tuple:
        """Sort key: -INF < finite < +INF < NaN, with -0 before +0 unless ``signed_zero`` is off."""
        k = self.kind
        if k is Kind.NAN:
            return (3, 0, 0)
        if k is Kind.NEGATIVE_INFINITY:
            return (0, 0, 0)
        if k is Kind.POSITIVE_INFINITY:
            return (2, 0, 0)
        tie = -1 if (k is Kind.NEGATIVE_ZERO and signed_zero) else 0
        return (1, self.as_fraction(), tie)

    def __repr__(self):
        if self.is_finite:
            return f"BinaryFloatValue({self.format.name}, m={self.significand}, e={self.exponent})"
        return f"BinaryFloatValue({self.format.name}, {self.kind.value})"


def ieee_equal(a: BinaryFloatValue, b: BinaryFloatValue) -> bool:
    if a.is_nan or b.is_nan:
        return False
    if a.is_zero and b.is_zero:
        return True
    return a.total_order_key() == b.total_order_key()


class NotationClass(enum.Enum):
    INTEGER = "Integer"
    DECIMAL = "Decimal"
    EXPONENTIAL = "Exponential"
    INF_OR_NAN = "InfOrNaN"
    INVALID = "Invalid"


# ASCII digits only: \d would admit other Unicode digits.
_INTEGER_RE = re.compile(r"[+-]?[0-9]+")
_DECIMAL_RE = re.compile(r"[+-]?(?:[0-9]+\.[0-9]*|\.[0-9]+)")
_NUMERAL_RE = re.compile(
    r"(?P<sign>[+-]?)(?:(?P<int>[0-9]+)(?:\.(?P<frac1>[0-9]*))?|\.(?P<frac2>[0-9]+))"
    r"(?:[eE](?P<exp>[+-]?[0-9]+))?"
)
_SPECIALS = {"INF", "+INF", "-INF", "NaN"}
_XML_WHITESPACE = " \t\n\r"


def _collapse(s: str) -> str:
    return s.strip(_XML_WHITESPACE)


def classify_lexical(s: str) -> NotationClass:
    s = _collapse(s)
    if _INTEGER_RE.fullmatch(s):
        return NotationClass.INTEGER
    if _DECIMAL_RE.fullmatch(s):
        return NotationClass.DECIMAL
    if s in _SPECIALS:
        return NotationClass.INF_OR_NAN
    m = _NUMERAL_RE.fullmatch(s)
    if m and m.group("exp") is not None:
        return NotationClass.EXPONENTIAL
    return NotationClass.INVALID


def _decompose(s: str) -> tuple[int, int, int]:
    """Split a numeral into (sign, digit integer, power of ten)."""
    m = _NUMERAL_RE.fullmatch(_collapse(s))
    if m is None:
        raise MalformedNumeral(f"not a numeric lexical form: {s!r}")
    frac = m.group("frac1") or m.group("frac2") or ""
    digits = int((m.group("int") or "") + frac or "0")
    exp = int(m.group("exp") or 0) - len(frac)
    sign = -1 if m.group("sign") == "-" else 1
    return sign, digits, exp


def _out_of_range(digits: int, exp: int) -> bool:
    if digits == 0:
        return False
    # digit count of a huge integer, cheaply bounded by its bit length
    ndigits = digits.bit_length() * 30103 // 100000 + 1
    return abs(exp) > ndigits + EXPONENT_LIMIT


def parse_exact_decimal(s: str) -> ExactDecimal:
    """Exact value of an integer, decimal or exponential lexical form."""
    sign, digits, exp = _decompose(s)
    if _out_of_range(digits, exp):
        raise NumeralOutOfRange(f"exponent too large to expand exactly: {s!r}")
    if digits == 0:
        return ExactDecimal(0)
    return ExactDecimal(sign * digits, -exp)


def _round_fraction(sign: int, num: int, den: int, fmt: BinaryFormat) -> BinaryFloatValue:
    # num/den > 0; nearest m * 2**e with ties to even significand
    p = fmt.precision_bits
    k = num.bit_length() - den.bit_length()
    if (num >= den << k) if k >= 0 else (num << -k >= den):
        floor_log2 = k
    else:
        floor_log2 = k - 1
    e = max(floor_log2 - (p - 1), fmt.min_exponent)
    if e >= 0:
        q, r = divmod(num, den << e)
        half = r * 2 - (den << e)
    else:
        q, r = divmod(num << -e, den)
        half = r * 2 - den
    if half > 0 or (half == 0 and q & 1):
        q += 1
    if q == 1 << p:
        q >>= 1
        e += 1
    if q == 0:
        return BinaryFloatValue(fmt, Kind.POSITIVE_ZERO if sign > 0 else Kind.NEGATIVE_ZERO)
    if e > fmt.max_exponent:
        return BinaryFloatValue(fmt, Kind.POSITIVE_INFINITY if sign > 0 else Kind.NEGATIVE_INFINITY)
    return BinaryFloatValue(fmt, Kind.FINITE, sign * q, e)


def round_to_binary(d: ExactDecimal, fmt: BinaryFormat, negative_zero: bool = False) -> BinaryFloatValue:
    """roundTiesToEven mapping of an exact decimal into ``fmt``.

    ``negative_zero`` selects -0 for a zero input; the decimal value space has
    no signed zero, so the lexical mapping passes the sign through here.
    """
    c = d.coefficient
    if c == 0:
        return BinaryFloatValue(fmt, Kind.NEGATIVE_ZERO if negative_zero else Kind.POSITIVE_ZERO)
    sign = -1 if c < 0 else 1
    return _round_fraction(sign, abs(c), _pow10(d.scale), fmt)


def lexical_to_binary(s: str, fmt: BinaryFormat) -> BinaryFloatValue:
    notation = classify_lexical(s)
    if notation is NotationClass.INVALID:
        raise MalformedNumeral(f"not in the lexical space of {fmt.name}: {s!r}")
    if notation is NotationClass.INF_OR_NAN:
        t = _collapse(s)
        kind = {"INF": Kind.POSITIVE_INFINITY, "+INF": Kind.POSITIVE_INFINITY,
                "-INF": Kind.NEGATIVE_INFINITY, "NaN": Kind.NAN}[t]
        return BinaryFloatValue(fmt, kind)
    sign, digits, exp = _decompose(s)
    if digits == 0:
        return BinaryFloatValue(fmt, Kind.NEGATIVE_ZERO if sign < 0 else Kind.POSITIVE_ZERO)
    if _out_of_range(digits, exp):
        if exp > 0:
            kind = Kind.POSITIVE_INFINITY if sign > 0 else Kind.NEGATIVE_INFINITY
        else:
            kind = Kind.POSITIVE_ZERO if sign > 0 else Kind.NEGATIVE_ZERO
        return BinaryFloatValue(fmt, kind)
    if exp >= 0:
        return _round_fraction(sign, digits * _pow10(exp), 1, fmt)
    return _round_fraction(sign, digits, _pow10(-exp), fmt)


def binary_to_exact_decimal(v: BinaryFloatValue) -> ExactDecimal:
    """The full decimal expansion of a finite value; both zeros give 0."""
    if v.is_zero:
        return ExactDecimal(0)
    if not v.is_finite:
        raise NotFinite(f"{v.kind.value} has no decimal expansion")
    m, e = v.significand, v.exponent
    tz = (m & -m).bit_length() - 1
    m >>= tz
    e += tz
    if e >= 0:
        return ExactDecimal(m << e)
    # m odd, so m * 5**-e is not a multiple of ten
    return ExactDecimal(m * _pow5(-e), -e)


def widen(v: BinaryFloatValue) -> BinaryFloatValue:
    if v.format != BINARY32:
        raise ValueError("widen expects a binary32 value")
    if v.is_finite:
        return BinaryFloatValue.finite(BINARY64, v.significand, v.exponent)
    return BinaryFloatValue(BINARY64, v.kind)


def _odd_part(c: int, scale: int) -> Optional[tuple[int, int]]:
    """Write c/10**scale as odd * 2**e, or None if the denominator keeps a factor 5."""
    if scale:
        q, r = divmod(c, _pow5(scale))
        if r:
            return None
        c = q
    tz = (c & -c).bit_length() - 1
    return c >> tz, tz - scale


def is_exactly_representable(d: ExactDecimal, fmt: BinaryFormat) -> bool:
    """Whether ``d`` lies in the value space of ``fmt``, decided from its reduced fraction."""
    if d.coefficient == 0:
        return True
    parts = _odd_part(abs(d.coefficient), d.scale)
    if parts is None:
        return False
    m, e = parts
    if e < fmt.min_exponent:
        return False
    if e > fmt.max_exponent:
        m <<= e - fmt.max_exponent
    return m < 1 << fmt.precision_bits


def is_exactly_representable_roundtrip(d: ExactDecimal, fmt: BinaryFormat) -> bool:
    """Second decision path: map into ``fmt`` and compare the expansion with ``d``."""
    v = round_to_binary(d, fmt)
    if not (v.is_finite or v.is_zero):
        return False
    return binary_to_exact_decimal(v) == d


def lexical_is_exactly_representable(s: str, fmt: BinaryFormat) -> bool:
    """Representability of a numeric lexical form, safe for huge exponents."""
    _, digits, exp = _decompose(s)
    if _out_of_range(digits, exp):
        return False
    return is_exactly_representable(parse_exact_decimal(s), fmt)


def _candidate_ok(coeff: int, exp10: int, v: BinaryFloatValue) -> bool:
    return round_to_binary(ExactDecimal(coeff, -exp10), v.format) == v


def shortest_digits(v: BinaryFloatValue) -> tuple[int, int]:
    """Fewest-digit ``(digits, exp10)`` with ``digits * 10**exp10`` mapping back to ``v``.

    ``v`` must be finite and positive-signed semantics are handled by the
    caller; ties go to the candidate closest to ``v``, then to an even digit.
    """
    exact = abs(binary_to_exact_decimal(v))
    c, s = exact.coefficient, exact.scale
    target = BinaryFloatValue.finite(v.format, abs(v.significand), v.exponent)
    top = len(str(c)) - 1 - s  # floor(log10(|v|))
    k = 1
    while True:
        q = top - k + 1
        shift = s + q
        if shift >= 0:
            lo, r = divmod(c, _pow10(shift))
            unit = _pow10(shift)
        else:
            lo, r, unit = c * _pow10(-shift), 0, 1
        if r == 0:
            if _candidate_ok(lo, q, target):
                return _trim(lo, q)
        else:
            lo_ok = _candidate_ok(lo, q, target)
            hi_ok = _candidate_ok(lo + 1, q, target)
            if lo_ok and hi_ok:
                twice = 2 * r
                if twice < unit or (twice == unit and lo % 2 == 0):
                    return _trim(lo, q)
                return _trim(lo + 1, q)
            if lo_ok:
                return _trim(lo, q)
            if hi_ok:
                return _trim(lo + 1, q)
        k += 1


def _trim(digits: int, exp10: int) -> tuple[int, int]:
    while digits % 10 == 0:
        digits //= 10
        exp10 += 1
    return digits, exp10


def shortest_roundtrip_string(v: BinaryFloatValue) -> str:
    """Shortest decimal string that maps back to exactly ``v`` in its format.

    Plain notation for magnitudes in [1e-4, 1e17), otherwise ``d.dddE±n``.
    """
    k = v.kind
    if k is Kind.POSITIVE_ZERO:
        return "0"
    if k is Kind.NEGATIVE_ZERO:
        return "-0"
    if k is Kind.POSITIVE_INFINITY:
        return "INF"
    if k is Kind.NEGATIVE_INFINITY:
        return "-INF"
    if k is Kind.NAN:
        return "NaN"
    digits, exp10 = shortest_digits(v)
    sign = "-" if v.significand < 0 else ""
    text = str(digits)
    magnitude = len(text) - 1 + exp10
    if -4 <= magnitude < 17:
        return sign + str(ExactDecimal(digits, -exp10))
    mantissa = text[0] + "." + (text[1:] or "0")
    return f"{sign}{mantissa}E{magnitude}"


@dataclass(frozen=True)
class DistortionReport:
    lexical: str
    format: BinaryFormat
    notation: NotationClass
    parsed: Optional[ExactDecimal]
    mapped: Optional[BinaryFloatValue]
    mapped_exact: Optional[ExactDecimal]
    distorted: bool
    absolute_error: Optional[ExactDecimal]


def distortion_report(s: str, fmt: BinaryFormat) -> DistortionReport:
    notation = classify_lexical(s)
    if notation is NotationClass.INVALID:
        return DistortionReport(s, fmt, notation, None, None, None, False, None)
    mapped = lexical_to_binary(s, fmt)
    if notation is NotationClass.INF_OR_NAN:
        return DistortionReport(s, fmt, notation, None, mapped, None, False, None)
    try:
        parsed = parse_exact_decimal(s)
    except NumeralOutOfRange:
        # the mapping saturated to zero or infinity; the lexical value is nonzero
        return DistortionReport(s, fmt, notation, None, mapped, None, True, None)
    if mapped.is_infinite:
        return DistortionReport(s, fmt, notation, parsed, mapped, None, True, None)
    mapped_exact = binary_to_exact_decimal(mapped)
    return DistortionReport(
        s, fmt, notation, parsed, mapped, mapped_exact,
        mapped_exact != parsed, abs(mapped_exact - parsed),
    )


def display_value(v: BinaryFloatValue) -> str:
    """How the survey tools print a mapped value: binary32 goes through binary64."""
    if v.format == BINARY32:
        v = widen(v)
    return shortest_roundtrip_string(v)

