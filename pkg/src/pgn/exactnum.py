"""Exact arithmetic in a real quadratic field Q(sqrt(r)), plus signed infinities.

Every coordinate of a template lives in one field Q(sqrt(r)) with ``r`` a
square-free non-negative integer (``r = 0`` means the value is rational).
Values with different irrational parts cannot be mixed; rationals mix with
anything.
"""
from __future__ import annotations

import decimal
import math
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Union

from sympy import factorint

__all__ = [
    "QuadExt",
    "Infinity",
    "INF",
    "NEG_INF",
    "ExtReal",
    "IncompatibleFieldError",
    "IndeterminateFormError",
    "as_quad",
    "is_finite",
    "qx_normalize",
    "qx_arith",
    "qx_sign",
    "qx_sqrt",
    "rational_sqrt",
    "parse_rational",
    "qx_to_json",
    "qx_from_json",
    "ext_to_json",
    "ext_from_json",
    "to_decimal_str",
]


class IncompatibleFieldError(ValueError):
    """Raised when two irrational values from different fields are combined."""


class IndeterminateFormError(ArithmeticError):
    """Raised for inf - inf, 0 * inf, inf / inf and similar."""


RationalLike = Union[int, Fraction]


def parse_rational(text: str | int | Fraction) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {text!r}") from exc


@lru_cache(maxsize=4096)
def _squarefree_split(m: int) -> tuple[int, int]:
    """Return (k, f) with m = k**2 * f and f square-free."""
    if m <= 1:
        return 1, m
    k, f = 1, 1
    for p, e in factorint(m).items():
        k *= p ** (e // 2)
        if e % 2:
            f *= p
    return k, f


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a non-negative rational, or None if irrational."""
    if x < 0:
        return None
    p, q = x.numerator, x.denominator
    sp, sq = math.isqrt(p), math.isqrt(q)
    if sp * sp == p and sq * sq == q:
        return Fraction(sp, sq)
    return None


@total_ordering
class QuadExt:
    """The exact real number ``a + b*sqrt(r)``.

    Instances are immutable and always canonical: ``r`` is square-free and
    ``r == 0`` exactly when ``b == 0``.  Two equal numbers therefore have
    identical fields, which keeps hashing and serialization stable.
    """

    __slots__ = ("a", "b", "r")

    def __init__(self, a: RationalLike = 0, b: RationalLike = 0, r: RationalLike = 0):
        na, nb, nr = _canonical(Fraction(a), Fraction(b), Fraction(r))
        object.__setattr__(self, "a", na)
        object.__setattr__(self, "b", nb)
        object.__setattr__(self, "r", nr)

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction, r: int) -> QuadExt:
        # caller guarantees r square-free (or b == 0)
        obj = object.__new__(cls)
        if b == 0:
            r = 0
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        object.__setattr__(obj, "r", r)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt is immutable")

    def __reduce__(self):
        return (QuadExt._raw, (self.a, self.b, self.r))

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    def conjugate(self) -> QuadExt:
        return QuadExt._raw(self.a, -self.b, self.r)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.r

    def sign(self) -> int:
        return qx_sign(self)

    # arithmetic -------------------------------------------------------

    def __add__(self, other):
        y = _coerce(other)
        if y is None:
            return NotImplemented
        r = _common_r(self, y)
        return QuadExt._raw(self.a + y.a, self.b + y.b, r)

    __radd__ = __add__

    def __neg__(self) -> QuadExt:
        return QuadExt._raw(-self.a, -self.b, self.r)

    def __pos__(self) -> QuadExt:
        return self

    def __sub__(self, other):
        y = _coerce(other)
        if y is None:
            return NotImplemented
        r = _common_r(self, y)
        return QuadExt._raw(self.a - y.a, self.b - y.b, r)

    def __rsub__(self, other):
        y = _coerce(other)
        if y is None:
            return NotImplemented
        return y - self

    def __mul__(self, other):
        y = _coerce(other)
        if y is None:
            return NotImplemented
        r = _common_r(self, y)
        return QuadExt._raw(
            self.a * y.a + self.b * y.b * r, self.a * y.b + self.b * y.a, r
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        y = _coerce(other)
        if y is None:
            return NotImplemented
        r = _common_r(self, y)
        if y.b == 0:
            if y.a == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt r)")
            return QuadExt._raw(self.a / y.a, self.b / y.a, r)
        nrm = y.norm()
        # r square-free and positive, so nrm == 0 only if y == 0
        num = self * y.conjugate()
        return QuadExt._raw(num.a / nrm, num.b / nrm, r)

    def __rtruediv__(self, other):
        y = _coerce(other)
        if y is None:
            return NotImplemented
        return y / self

    def __pow__(self, k: int) -> QuadExt:
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QuadExt(1) / (self ** (-k))
        result = QuadExt._raw(Fraction(1), Fraction(0), 0)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __abs__(self) -> QuadExt:
        return -self if qx_sign(self) < 0 else self

    # comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Infinity):
            return False
        y = _coerce(other)
        if y is None:
            return NotImplemented
        return self.a == y.a and self.b == y.b and self.r == y.r

    def __lt__(self, other) -> bool:
        if isinstance(other, Infinity):
            return other.sign > 0
        y = _coerce(other)
        if y is None:
            return NotImplemented
        return qx_sign(self - y) < 0

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.r))

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.r)

    # display ----------------------------------------------------------

    def __repr__(self) -> str:
        if self.b == 0:
            return f"QuadExt({_frac_str(self.a)})"
        return f"QuadExt({_frac_str(self.a)}, {_frac_str(self.b)}, {self.r})"

    def __str__(self) -> str:
        if self.b == 0:
            return _frac_str(self.a)
        den = math.lcm(self.a.denominator, self.b.denominator)
        big_a = int(self.a * den)
        big_b = int(self.b * den)
        if big_b == 1:
            root = f"sqrt({self.r})"
        elif big_b == -1:
            root = f"-sqrt({self.r})"
        else:
            root = f"{big_b}*sqrt({self.r})"
        if not big_a:
            body = root
        elif big_b > 0:
            body = f"{root}{big_a:+d}"
        else:
            body = f"{big_a}{root}"
        if den == 1:
            return body
        return f"({body})/{den}"


def _frac_str(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _canonical(a: Fraction, b: Fraction, r: Fraction) -> tuple[Fraction, Fraction, int]:
    if r < 0:
        raise ValueError(f"negative discriminant {r}")
    if b == 0 or r == 0:
        return a, Fraction(0), 0
    # sqrt(p/q) = sqrt(p*q)/q
    p, q = r.numerator, r.denominator
    k, f = _squarefree_split(p * q)
    b = b * k / q
    if f == 1:
        return a + b, Fraction(0), 0
    return a, b, f


def _coerce(x) -> QuadExt | None:
    if isinstance(x, QuadExt):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return QuadExt._raw(Fraction(x), Fraction(0), 0)
    return None


def as_quad(x) -> QuadExt:
    """Coerce an int, Fraction, rational string or QuadExt to QuadExt."""
    if isinstance(x, str):
        return QuadExt(parse_rational(x))
    q = _coerce(x)
    if q is None:
        raise TypeError(f"cannot interpret {x!r} as an exact number")
    return q


def _common_r(x: QuadExt, y: QuadExt) -> int:
    if x.b == 0:
        return y.r
    if y.b == 0 or x.r == y.r:
        return x.r
    raise IncompatibleFieldError(f"cannot combine Q(sqrt {x.r}) with Q(sqrt {y.r})")


def qx_normalize(a: RationalLike, b: RationalLike, r: RationalLike) -> QuadExt:
    return QuadExt(a, b, r)


def qx_arith(op: str, x, y) -> QuadExt:
    x, y = as_quad(x), as_quad(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def qx_sign(x: QuadExt) -> int:
    """Exact sign of a + b*sqrt(r), decided by comparing a**2 with b**2 * r."""
    sa = (x.a > 0) - (x.a < 0)
    sb = (x.b > 0) - (x.b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    lhs = x.a * x.a
    rhs = x.b * x.b * x.r
    if lhs > rhs:
        return sa
    if lhs < rhs:
        return sb
    return 0


def qx_sqrt(x) -> QuadExt:
    """Square root of a non-negative value.

    Rational input always succeeds (the result may define a new field).  An
    irrational input succeeds only when it is a perfect square inside its own
    field; otherwise ValueError is raised.
    """
    x = as_quad(x)
    if qx_sign(x) < 0:
        raise ValueError(f"square root of negative number {x}")
    if x.b == 0:
        return QuadExt(0, 1, x.a)
    # (c + d sqrt r)^2 = a + b sqrt r  =>  c^2 = (a +- sqrt(a^2 - b^2 r)) / 2
    disc = rational_sqrt(x.norm())
    if disc is not None:
        for c2 in ((x.a + disc) / 2, (x.a - disc) / 2):
            c = rational_sqrt(c2)
            if c is None or c == 0:
                continue
            d = x.b / (2 * c)
            cand = QuadExt._raw(c, d, x.r)
            if qx_sign(cand) < 0:
                cand = -cand
            if cand * cand == x:
                return cand
    raise ValueError(f"{x} has no square root in Q(sqrt {x.r})")


class Infinity:
    """Signed infinity for extended-real exponent values.

    Only unambiguous operations are defined; inf - inf, 0 * inf and
    inf / inf raise IndeterminateFormError.
    """

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        object.__setattr__(self, "sign", 1 if sign > 0 else -1)

    def __setattr__(self, name, value):
        raise AttributeError("Infinity is immutable")

    def __reduce__(self):
        return (Infinity, (self.sign,))

    def __repr__(self) -> str:
        return "INF" if self.sign > 0 else "NEG_INF"

    def __str__(self) -> str:
        return "inf" if self.sign > 0 else "-inf"

    def __eq__(self, other) -> bool:
        return isinstance(other, Infinity) and other.sign == self.sign

    def __hash__(self) -> int:
        return hash(("inf", self.sign))

    def __lt__(self, other) -> bool:
        if isinstance(other, Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __le__(self, other) -> bool:
        return self == other or self < other

    def __gt__(self, other) -> bool:
        if isinstance(other, Infinity):
            return self.sign > other.sign
        return self.sign > 0

    def __ge__(self, other) -> bool:
        return self == other or self > other

    def __neg__(self) -> Infinity:
        return Infinity(-self.sign)

    def __add__(self, other):
        if isinstance(other, Infinity):
            if other.sign != self.sign:
                raise IndeterminateFormError("inf - inf")
            return self
        if _coerce(other) is None:
            return NotImplemented
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Infinity):
            return self + (-other)
        if _coerce(other) is None:
            return NotImplemented
        return self

    def __rsub__(self, other):
        if _coerce(other) is None:
            return NotImplemented
        return -self

    def __mul__(self, other):
        if isinstance(other, Infinity):
            return Infinity(self.sign * other.sign)
        y = _coerce(other)
        if y is None:
            return NotImplemented
        s = qx_sign(y)
        if s == 0:
            raise IndeterminateFormError("0 * inf")
        return Infinity(self.sign * s)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Infinity):
            raise IndeterminateFormError("inf / inf")
        y = _coerce(other)
        if y is None:
            return NotImplemented
        s = qx_sign(y)
        if s == 0:
            raise ZeroDivisionError("inf / 0")
        return Infinity(self.sign * s)

    def __rtruediv__(self, other):
        if _coerce(other) is None:
            return NotImplemented
        return QuadExt(0)


INF = Infinity(1)
NEG_INF = Infinity(-1)

ExtReal = Union[QuadExt, Infinity]


def is_finite(x: ExtReal) -> bool:
    return not isinstance(x, Infinity)


# serialization --------------------------------------------------------


def qx_to_json(x) -> dict[str, str]:
    x = as_quad(x)
    return {"a": _frac_str(x.a), "b": _frac_str(x.b), "r": str(x.r)}


def qx_from_json(obj) -> QuadExt:
    if isinstance(obj, (str, int)):
        return QuadExt(parse_rational(obj))
    try:
        return QuadExt(
            parse_rational(obj["a"]), parse_rational(obj.get("b", "0")),
            parse_rational(obj.get("r", "0")),
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed exact number {obj!r}") from exc


def ext_to_json(x: ExtReal):
    if isinstance(x, Infinity):
        return str(x)
    return qx_to_json(x)


def ext_from_json(obj) -> ExtReal:
    if obj == "inf":
        return INF
    if obj == "-inf":
        return NEG_INF
    return qx_from_json(obj)


def to_decimal_str(x: ExtReal, digits: int = 15) -> str:
    """Decimal rendering with ``digits`` significant digits (display only)."""
    if isinstance(x, Infinity):
        return str(x)
    ctx = decimal.Context(prec=digits + 20)
    val = ctx.divide(decimal.Decimal(x.a.numerator), decimal.Decimal(x.a.denominator))
    if x.b != 0:
        root = ctx.sqrt(decimal.Decimal(x.r))
        coef = ctx.divide(decimal.Decimal(x.b.numerator), decimal.Decimal(x.b.denominator))
        val = ctx.add(val, ctx.multiply(coef, root))
    out = decimal.Context(prec=digits).plus(val)
    if out.is_zero():
        return "0"
    return format(out, "g") if abs(out.adjusted()) > 12 else format(out.normalize(), "f")
