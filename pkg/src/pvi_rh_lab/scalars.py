"""Scalar backends.

Two fields are used throughout the package:

* exact: Gaussian rationals Q(i), represented by :class:`GaussianRational`.
  Every polynomial identity checked by the package has integer coefficients,
  so evaluating both sides at random Gaussian-rational points is an exact
  (Schwartz-Zippel style) identity test.
* approx: Python ``complex``.

All algebraic code in the package is written against ``+ - * /`` and ``==``
only, so the same function runs in either field.
"""

from __future__ import annotations

import math
import random
import re
from fractions import Fraction
from numbers import Rational
from typing import Union

__all__ = [
    "GaussianRational",
    "Scalar",
    "I",
    "gq",
    "is_exact",
    "to_complex",
    "exactify",
    "field_of",
    "parse_scalar",
    "format_scalar",
    "literal_kind",
    "parse_scalar_list",
    "random_rational",
    "random_gaussian",
]


class GaussianRational:
    """An element re + im*i of Q(i).

    Mixing with ``float``/``complex`` raises ``TypeError``; exactness is never
    dropped implicitly.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: Rational | int = 0, im: Rational | int = 0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "GaussianRational":
        # hot path: both parts are already Fractions
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return GaussianRational(other)
        if isinstance(other, bool):
            return GaussianRational(int(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return _mixing(self, other)
        return GaussianRational._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return _mixing(self, other)
        return GaussianRational._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return _mixing(self, other)
        return GaussianRational._raw(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return _mixing(self, other)
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return GaussianRational._raw(a * c, b)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def _inv(self):
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational._raw(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return _mixing(self, other)
        return self * o._inv()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return _mixing(self, other)
        return o * self._inv()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self._inv() ** (-n)
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __repr__(self):
        return f"GaussianRational({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def _mixing(a, b):
    if isinstance(b, (float, complex)):
        raise TypeError(
            f"refusing to mix exact {a!r} with inexact {b!r}; convert explicitly")
    return NotImplemented


Scalar = Union[GaussianRational, complex]

I = GaussianRational(0, 1)


def gq(re, im=0) -> GaussianRational:
    """Shorthand constructor; accepts ints, Fractions or "p/q" strings."""
    return GaussianRational(Fraction(re), Fraction(im))


def is_exact(x) -> bool:
    return isinstance(x, (GaussianRational, Fraction)) or (
        isinstance(x, int) and not isinstance(x, bool))


def exactify(x):
    """Promote ints and Fractions to GaussianRational; leave other values alone."""
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return GaussianRational(x)
    return x


def to_complex(x) -> complex:
    return complex(x)


def field_of(*values) -> str:
    """Return "exact" if every value is exact, "approx" otherwise."""
    return "exact" if all(is_exact(v) for v in values) else "approx"


# --- text form -------------------------------------------------------------

_NUM_RE = re.compile(r"^(?:\d+/\d+|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)$")


def _split_complex(s: str) -> tuple[str, str | None]:
    """Split "a+b*i" into ("a", "+b"); the imaginary part is None if absent."""
    if not s.endswith("i"):
        return s, None
    body = s[:-1]
    if body.endswith("*"):
        body = body[:-1]
    cut = 0
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-" and body[pos - 1] not in "eE":
            cut = pos
            break
    re_part, im_part = body[:cut], body[cut:]
    if im_part in ("", "+"):
        im_part = "1"
    elif im_part == "-":
        im_part = "-1"
    return re_part, im_part


def _check_num(tok: str, text: str) -> str:
    sign = ""
    if tok[:1] in "+-":
        sign, tok = tok[0], tok[1:]
    if not _NUM_RE.match(tok):
        raise ValueError(f"cannot parse scalar literal {text!r}")
    return sign + tok


def literal_kind(text: str) -> str:
    """Classify a literal as "int", "rational" or "decimal"."""
    body = text.replace("*i", "").replace("i", "")
    if re.search(r"[.eE]", body):
        return "decimal"
    if "/" in body:
        return "rational"
    return "int"


def parse_scalar(text: str, field: str | None = None) -> Scalar:
    """Parse "p/q", "p/q+r/s*i", "0.25-1.5*i", "i", ... .

    ``field`` forces the backend; by default rationals and integers are exact
    and decimals are approximate. Decimal literals with ``field="exact"`` are
    rejected.
    """
    s = str(text).strip().replace(" ", "")
    if not s:
        raise ValueError("empty scalar literal")
    kind = literal_kind(s)
    if field is None:
        field = "approx" if kind == "decimal" else "exact"
    if field == "exact" and kind == "decimal":
        raise ValueError(f"decimal literal {text!r} cannot be used exactly")
    re_tok, im_tok = _split_complex(s)
    conv = Fraction if field == "exact" else _float
    re_val = conv(_check_num(re_tok, text)) if re_tok else conv("0")
    im_val = conv(_check_num(im_tok, text)) if im_tok is not None else conv("0")
    if field == "exact":
        return GaussianRational(re_val, im_val)
    return complex(re_val, im_val)


def parse_scalar_list(text: str, field: str | None = None) -> list:
    """Comma-separated literals in one field.

    Integers follow the other entries; rationals next to decimals are an
    error unless ``field`` is given.
    """
    items = [t for t in str(text).split(",")]
    if any(not t.strip() for t in items):
        raise ValueError(f"empty entry in {text!r}")
    kinds = {literal_kind(t.strip().replace(" ", "")) for t in items}
    if field is None:
        if "decimal" in kinds and "rational" in kinds:
            raise ValueError(f"mixing rational and decimal literals in {text!r}")
        field = "approx" if "decimal" in kinds else "exact"
    return [parse_scalar(t, field) for t in items]


def _float(s: str) -> float:
    if "/" in s:
        num, den = s.split("/")
        return float(num) / float(den)
    return float(s)


def _fmt_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_scalar(x) -> str:
    """Inverse of :func:`parse_scalar` (round-trips exactly in both fields)."""
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        x = GaussianRational(x)
    if isinstance(x, GaussianRational):
        re_s, im = _fmt_fraction(x.re), x.im
        if im == 0:
            return re_s
        im_s = _fmt_fraction(abs(im))
        if x.re == 0:
            return ("-" if im < 0 else "") + f"{im_s}*i"
        return f"{re_s}{'-' if im < 0 else '+'}{im_s}*i"
    z = complex(x)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite scalar {z!r}")
    re_s = repr(z.real)
    if z.imag == 0:
        return re_s
    im_s = repr(abs(z.imag))
    return f"{re_s}{'-' if math.copysign(1.0, z.imag) < 0 else '+'}{im_s}*i"


# --- random sampling -------------------------------------------------------

def random_rational(rng: random.Random, bound: int = 1000) -> Fraction:
    """Numerator in [-bound, bound], denominator in [1, bound]."""
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_gaussian(rng: random.Random, bound: int = 1000) -> GaussianRational:
    return GaussianRational(random_rational(rng, bound), random_rational(rng, bound))
