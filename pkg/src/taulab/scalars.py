"""Exact scalars: rationals and rational functions of the formal variable u.

The deformation parameter is carried through ``u = q**(1/2)`` so that every
half-integer power of q is an honest Laurent monomial.  Rationals are
``flint.fmpq``; rational functions are :class:`QRational`, a reduced pair of
integer polynomials in u.  Arithmetic between the two kinds mixes freely and a
QRational that turns out to be u-free collapses back to a rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import flint

from taulab._expr import ParseError, evaluate

Rational = flint.fmpq
_P = flint.fmpz_poly
_ONE = _P([1])


class LimitError(ArithmeticError):
    """Raised when u -> 1 hits a pole."""


class DomainError(ValueError):
    """Raised for arguments outside an operation's domain."""


class QRational:
    """Reduced quotient num(u)/den(u) of integer polynomials.

    Invariants: gcd(num, den) = 1 in Z[u] and den has a positive leading
    coefficient.  Construct through :func:`qrat` to get the rational collapse.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=_ONE):
        self.num = num
        self.den = den

    # -- coercion -----------------------------------------------------------
    @staticmethod
    def _parts(x):
        if isinstance(x, QRational):
            return x.num, x.den
        if isinstance(x, int):
            return _P([x]), _ONE
        if isinstance(x, (flint.fmpq, Fraction)):
            return _P([int(x.numerator if isinstance(x, Fraction) else x.p)]), _P(
                [int(x.denominator if isinstance(x, Fraction) else x.q)]
            )
        if isinstance(x, flint.fmpz):
            return _P([int(x)]), _ONE
        return None

    def __add__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return _reduce(self.num * o[1] + o[0] * self.den, self.den * o[1])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return _reduce(self.num * o[1] - o[0] * self.den, self.den * o[1])

    def __rsub__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return _reduce(o[0] * self.den - self.num * o[1], self.den * o[1])

    def __mul__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return _reduce(self.num * o[0], self.den * o[1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        if o[0] == 0:
            raise ZeroDivisionError("QRational division by zero")
        return _reduce(self.num * o[1], self.den * o[0])

    def __rtruediv__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return _reduce(o[0] * self.den, o[1] * self.num)

    def __neg__(self):
        return QRational(-self.num, self.den)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n >= 0:
            return _reduce(self.num**n, self.den**n)
        return _reduce(self.den ** (-n), self.num ** (-n))

    def __eq__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return self.num * o[1] == o[0] * self.den

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def __bool__(self):
        return self.num != 0

    def __repr__(self):
        return f"QRational({format_scalar(self)!r})"

    __str__ = lambda self: format_scalar(self)  # noqa: E731


Scalar = Union[Rational, QRational]


def _reduce(num, den) -> Scalar:
    if num == 0:
        return Rational(0)
    g = num.gcd(den)
    if g != 1:
        num = num // g
        den = den // g
    if den.coeffs()[-1] < 0:
        num, den = -num, -den
    if num.degree() == 0 and den.degree() == 0:
        return Rational(int(num[0]), int(den[0]))
    return QRational(num, den)


def qrat(num, den=_ONE) -> Scalar:
    """Reduced scalar from two integer polynomials in u."""
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    return _reduce(num, den)


def to_scalar(x) -> Scalar:
    """Coerce ints, Fractions, fmpq and QRationals to an exact scalar."""
    if isinstance(x, QRational):
        return x
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, flint.fmpz)):
        return Rational(int(x))
    if isinstance(x, Fraction):
        return Rational(x.numerator, x.denominator)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")


def is_scalar(x) -> bool:
    return isinstance(x, (QRational, flint.fmpq, int, flint.fmpz, Fraction)) and not isinstance(x, bool)


@lru_cache(maxsize=None)
def u_pow(k: int) -> Scalar:
    """u**k as an exact scalar (k may be negative)."""
    if k == 0:
        return Rational(1)
    mono = _P([0] * abs(k) + [1])
    return QRational(mono, _ONE) if k > 0 else QRational(_ONE, mono)


def q_pow(k) -> Scalar:
    """q**k for integer or half-integer k."""
    twice = HalfInt.of(k).twice
    return u_pow(twice)


U = u_pow(1)
Q = u_pow(2)


def is_zero(x) -> bool:
    return x == 0


def depends_on_u(x) -> bool:
    return isinstance(x, QRational)


def at_u1(x) -> Rational:
    """Specialize u -> 1, raising LimitError on a pole."""
    if not isinstance(x, QRational):
        return to_scalar(x)
    d = x.den(1)
    if d == 0:
        raise LimitError(f"pole at u=1 in {format_scalar(x)}")
    return Rational(int(x.num(1)), 1) / Rational(int(d), 1)


def _reverse(p, deg: int):
    coeffs = [int(c) for c in p.coeffs()]
    coeffs += [0] * (deg + 1 - len(coeffs))
    return _P(list(reversed(coeffs)))


def invert_q(x) -> Scalar:
    """Apply u -> 1/u."""
    if not isinstance(x, QRational):
        return x
    dn, dd = x.num.degree(), x.den.degree()
    num = _reverse(x.num, dn)
    den = _reverse(x.den, dd)
    if dd > dn:
        num = num * _P([0] * (dd - dn) + [1])
    elif dn > dd:
        den = den * _P([0] * (dn - dd) + [1])
    return _reduce(num, den)


def evaluate_at(x, u_value: complex) -> complex:
    """Numeric value at a given u."""
    if isinstance(x, QRational):
        return _peval(x.num, u_value) / _peval(x.den, u_value)
    x = to_scalar(x)
    return int(x.p) / int(x.q)


def _peval(p, z):
    acc = 0
    for c in reversed([int(c) for c in p.coeffs()]):
        acc = acc * z + c
    return acc


# -- text form --------------------------------------------------------------

def _poly_text(p) -> str:
    coeffs = [int(c) for c in p.coeffs()]
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            mono = "u" if k == 1 else f"u^{k}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts) if parts else "0"


def format_scalar(x) -> str:
    """Serialize: rationals as "p/q" (or "p"), QRationals as "(num)/(den)"."""
    if isinstance(x, QRational):
        if x.den == 1:
            return f"({_poly_text(x.num)})"
        return f"({_poly_text(x.num)})/({_poly_text(x.den)})"
    x = to_scalar(x)
    return str(x.p) if x.q == 1 else f"{x.p}/{x.q}"


def parse_scalar(text: str) -> Scalar:
    """Exact inverse of :func:`format_scalar`; also accepts q = u^2."""

    def resolve(name):
        if name == "u":
            return u_pow(1)
        if name == "q":
            return u_pow(2)
        raise ParseError(f"unknown symbol {name!r} in scalar {text!r}")

    val = evaluate(text, resolve, lambda n: Rational(n))
    return to_scalar(val)


# -- half integers ----------------------------------------------------------

@dataclass(frozen=True, order=True)
class HalfInt:
    """A spin lambda in (1/2)Z, stored as 2*lambda."""

    twice: int

    @classmethod
    def of(cls, x) -> "HalfInt":
        if isinstance(x, HalfInt):
            return x
        if isinstance(x, bool):
            raise TypeError("booleans are not spins")
        if isinstance(x, int):
            return cls(2 * x)
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, float):
            x = Fraction(x)
        if isinstance(x, flint.fmpq):
            x = Fraction(int(x.p), int(x.q))
        if isinstance(x, Fraction):
            tw = 2 * x
            if tw.denominator != 1:
                raise DomainError(f"{x} is not a half-integer")
            return cls(int(tw))
        raise TypeError(f"cannot read {x!r} as a half-integer")

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __add__(self, other):
        return HalfInt(self.twice + HalfInt.of(other).twice)

    __radd__ = __add__

    def __sub__(self, other):
        return HalfInt(self.twice - HalfInt.of(other).twice)

    def __rsub__(self, other):
        return HalfInt(HalfInt.of(other).twice - self.twice)

    def __neg__(self):
        return HalfInt(-self.twice)

    def __float__(self):
        return self.twice / 2

    def __str__(self):
        return str(self.twice // 2) if self.twice % 2 == 0 else f"{self.twice}/2"


HALF = HalfInt(1)


# -- q-combinatorics --------------------------------------------------------

SYMMETRIC = "symmetric"
NONSYMMETRIC = "nonsymmetric"


def _check_variant(variant: str) -> None:
    if variant not in (SYMMETRIC, NONSYMMETRIC):
        raise DomainError(f"unknown q-number variant {variant!r}")


@lru_cache(maxsize=None)
def _qnum_twice(twice: int, variant: str) -> Scalar:
    if variant == SYMMETRIC:
        # [x] = (u^{2x} - u^{-2x}) / (u^2 - u^{-2}); multiply through by u^{2|x|+2}
        return (u_pow(twice) - u_pow(-twice)) / (u_pow(2) - u_pow(-2))
    # (x) = (1 - q^{2x}) / (1 - q^2)
    return (1 - u_pow(2 * twice)) / (1 - u_pow(4))


def qnum(x, variant: str = SYMMETRIC) -> Scalar:
    """Symmetric [x]_q or nonsymmetric (x)_q for integer or half-integer x."""
    _check_variant(variant)
    return _qnum_twice(HalfInt.of(x).twice, variant)


def qnum_base(n: int, base_upow: int) -> Scalar:
    """(1 - Q^n)/(1 - Q) with Q = u**base_upow, i.e. the Q-number of n."""
    if n == 0:
        return Rational(0)
    return (1 - u_pow(base_upow * n)) / (1 - u_pow(base_upow))


@lru_cache(maxsize=None)
def qfactorial(n: int, variant: str = SYMMETRIC) -> Scalar:
    """[n]_q! (or (n)_q!) as the product of q-numbers 1..n."""
    _check_variant(variant)
    if n < 0:
        raise DomainError("q-factorial of a negative integer")
    acc: Scalar = Rational(1)
    for k in range(1, n + 1):
        acc = acc * qnum(k, variant)
    return acc


@lru_cache(maxsize=None)
def qfactorial_base(n: int, base_upow: int) -> Scalar:
    """Q-factorial with Q = u**base_upow."""
    if n < 0:
        raise DomainError("q-factorial of a negative integer")
    acc: Scalar = Rational(1)
    for k in range(1, n + 1):
        acc = acc * qnum_base(k, base_upow)
    return acc


def qgamma_ratio(lam, i: int, variant: str = SYMMETRIC) -> Scalar:
    """Falling q-factorial prod_{k<i} [2 lam - k]_q, i.e. Gamma_q ratio."""
    if i < 0:
        raise DomainError("negative window in qgamma_ratio")
    two_lam = HalfInt.of(lam).twice
    acc: Scalar = Rational(1)
    for k in range(i):
        acc = acc * qnum(two_lam - k, variant)
        if acc == 0:
            return Rational(0)
    return acc


E_Q_SYM = "e_q"
E_Q_NONSYM = "E_q"


def qexp_coeff(k: int, variant: str = E_Q_SYM, base_upow: int = 4) -> Scalar:
    """Coefficient of x^k in e_q(x) = sum x^n/[n]! or E_Q(x) = sum x^n/(n)_Q!.

    For ``E_q`` the base Q is u**base_upow; the default 4 is Q = q^2, the
    base of the nonsymmetric q-number (n)_q = (1-q^{2n})/(1-q^2).
    """
    if k < 0:
        raise DomainError("negative order in qexp_coeff")
    if variant == E_Q_SYM:
        return 1 / qfactorial(k, SYMMETRIC)
    if variant == E_Q_NONSYM:
        return 1 / qfactorial_base(k, base_upow)
    raise DomainError(f"unknown q-exponential {variant!r}")
