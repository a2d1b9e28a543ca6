"""Sparse commutative (Laurent) polynomials over exact scalars.

A :class:`MultiPoly` is a variable table plus a map from integer exponent
tuples to nonzero scalars.  Exponents may be negative, which is needed both for
the invertible generator ``E`` (standing for exp(-2 phi)) and for the
intermediate 1/t produced by shifted q-difference operators.

Binary operations unify variable tables, so polynomials built over different
sets of names combine without ceremony.
"""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Sequence

from taulab import scalars as sc
from taulab._expr import ParseError, evaluate
from taulab.scalars import HalfInt, Rational, Scalar

# The exponential extension: E <-> exp(-2 phi), so d/dphi E = -2 E.
EXP_GENERATOR = "E"
EXP_BASE = "phi"
EXP_RATE = -2

_RESERVED = {"u", "q"}

_BITS = 20
_BIAS = 1 << (_BITS - 1)
_MASK = (1 << _BITS) - 1


class UnknownVariable(KeyError):
    pass


def _is_poly(x) -> bool:
    return isinstance(x, MultiPoly)


class MultiPoly:
    """Sparse Laurent polynomial ``{exponent tuple: scalar}`` over named variables."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Iterable[str] = (), terms: Mapping | None = None, *, _trusted=False):
        self.vars = tuple(vars)
        if _trusted:
            self.terms = terms  # type: ignore[assignment]
            return
        n = len(self.vars)
        if len(set(self.vars)) != n:
            raise ValueError(f"duplicate variable names in {self.vars}")
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n:
                raise ValueError("exponent vector length does not match variable table")
            c = sc.to_scalar(c)
            if c != 0:
                clean[mono] = clean.get(mono, Rational(0)) + c
                if clean[mono] == 0:
                    del clean[mono]
        self.terms = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c, vars: Iterable[str] = ()) -> "MultiPoly":
        vars = tuple(vars)
        c = sc.to_scalar(c)
        return cls(vars, {(0,) * len(vars): c} if c != 0 else {}, _trusted=True)

    @classmethod
    def zero(cls, vars: Iterable[str] = ()) -> "MultiPoly":
        return cls(tuple(vars), {}, _trusted=True)

    @classmethod
    def var(cls, name: str, vars: Iterable[str] | None = None) -> "MultiPoly":
        if name in _RESERVED:
            raise ValueError(f"{name!r} is reserved for the deformation parameter")
        vars = (name,) if vars is None else tuple(vars)
        if name not in vars:
            vars = vars + (name,)
        mono = tuple(1 if v == name else 0 for v in vars)
        return cls(vars, {mono: Rational(1)}, _trusted=True)

    @classmethod
    def monomial(cls, exps: Mapping[str, int], coeff=1) -> "MultiPoly":
        vars = tuple(exps)
        return cls(vars, {tuple(exps[v] for v in vars): coeff})

    @classmethod
    def lift(cls, x, vars: Iterable[str] = ()) -> "MultiPoly":
        if isinstance(x, MultiPoly):
            return x
        return cls.const(x, vars)

    # -- variable tables ----------------------------------------------------
    def with_vars(self, vars: tuple[str, ...]) -> "MultiPoly":
        """Re-express over a superset table ``vars``."""
        if vars == self.vars:
            return self
        pos = []
        for v in self.vars:
            try:
                pos.append(vars.index(v))
            except ValueError:
                raise UnknownVariable(v) from None
        n = len(vars)
        out = {}
        for mono, c in self.terms.items():
            e = [0] * n
            for p, x in zip(pos, mono):
                e[p] = x
            out[tuple(e)] = c
        return MultiPoly(vars, out, _trusted=True)

    def _align(self, other: "MultiPoly"):
        if self.vars == other.vars:
            return self, other
        extra = tuple(v for v in other.vars if v not in self.vars)
        table = self.vars + extra
        return self.with_vars(table), other.with_vars(table)

    def compact(self) -> "MultiPoly":
        """Drop variables that appear in no term."""
        used = [i for i in range(len(self.vars)) if any(m[i] for m in self.terms)]
        if len(used) == len(self.vars):
            return self
        vars = tuple(self.vars[i] for i in used)
        out = {tuple(m[i] for i in used): c for m, c in self.terms.items()}
        return MultiPoly(vars, out, _trusted=True)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            return other
        if sc.is_scalar(other):
            return MultiPoly.const(other, self.vars)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._align(o)
        out = dict(a.terms)
        for m, c in b.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v == 0:
                    del out[m]
                else:
                    out[m] = v
        return MultiPoly(a.vars, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {m: -c for m, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c) -> "MultiPoly":
        c = sc.to_scalar(c)
        if c == 0:
            return MultiPoly.zero(self.vars)
        out = {}
        for m, v in self.terms.items():
            w = v * c
            if w != 0:
                out[m] = w
        return MultiPoly(self.vars, out, _trusted=True)

    def __mul__(self, other):
        if sc.is_scalar(other):
            return self.scale(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b = self._align(other)
        if not a.terms or not b.terms:
            return MultiPoly.zero(a.vars)
        if len(a.terms) == 1 or len(b.terms) == 1:
            return _mul_small(a, b)
        return _mul_packed(a, b)

    def __rmul__(self, other):
        if sc.is_scalar(other):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            c = other.constant_value()
            if c is None:
                raise ZeroDivisionError("division by a nonconstant polynomial")
            other = c
        if not sc.is_scalar(other):
            return NotImplemented
        return self.scale(1 / sc.to_scalar(other))

    def __rtruediv__(self, other):
        c = self.constant_value()
        if c is None or not sc.is_scalar(other):
            if len(self.terms) == 1:
                (m, v), = self.terms.items()
                return MultiPoly(self.vars, {tuple(-e for e in m): sc.to_scalar(other) / v}, _trusted=True)
            return NotImplemented
        return MultiPoly.const(sc.to_scalar(other) / c, self.vars)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("negative powers only for monomials")
            (m, v), = self.terms.items()
            return MultiPoly(self.vars, {tuple(-e * (-n) for e in m): 1 / v ** (-n)}, _trusted=True)
        result = MultiPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, MultiPoly) else other
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # -- inspection ---------------------------------------------------------
    def constant_value(self):
        """The scalar value if the polynomial is constant, else None."""
        if not self.terms:
            return Rational(0)
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            if not any(m):
                return c
        return None

    def coeff(self, exps: Mapping[str, int] | None = None) -> Scalar:
        exps = exps or {}
        for v in exps:
            if v not in self.vars and exps[v] != 0:
                return Rational(0)
        mono = tuple(exps.get(v, 0) for v in self.vars)
        return self.terms.get(mono, Rational(0))

    def items(self):
        """Iterate (dict name->exponent, coefficient)."""
        for m, c in self.terms.items():
            yield {v: e for v, e in zip(self.vars, m) if e}, c

    def degree(self, var: str) -> int:
        i = self._index(var)
        return max((m[i] for m in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def _index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise UnknownVariable(var) from None

    def map_coeffs(self, f: Callable[[Scalar], Scalar]) -> "MultiPoly":
        out = {}
        for m, c in self.terms.items():
            v = sc.to_scalar(f(c))
            if v != 0:
                out[m] = v
        return MultiPoly(self.vars, out, _trusted=True)

    def at_u1(self) -> "MultiPoly":
        """Classical specialization u -> 1 of every coefficient."""
        return self.map_coeffs(sc.at_u1)

    def depends_on_u(self) -> bool:
        return any(sc.depends_on_u(c) for c in self.terms.values())

    # -- calculus -----------------------------------------------------------
    def derive(self, var: str, order: int = 1) -> "MultiPoly":
        return derive(self, var, order)

    def qshift(self, var: str, halfpowers: int) -> "MultiPoly":
        return qshift(self, var, halfpowers)

    def qdiff(self, var: str, alpha=0, variant: str = sc.SYMMETRIC) -> "MultiPoly":
        return qdiff(self, var, alpha, variant)

    def substitute(self, bindings: Mapping[str, object]) -> "MultiPoly":
        return substitute(self, bindings)

    def mul_var(self, var: str, power: int = 1) -> "MultiPoly":
        """Multiply by ``var**power`` (power may be negative)."""
        p = self if var in self.vars else self.with_vars(self.vars + (var,))
        i = p._index(var)
        out = {}
        for m, c in p.terms.items():
            e = list(m)
            e[i] += power
            out[tuple(e)] = c
        return MultiPoly(p.vars, out, _trusted=True)

    def truncate(self, weights: Mapping[str, int], max_weight: int) -> "MultiPoly":
        """Keep only terms of weighted degree <= max_weight."""
        w = [weights.get(v, 0) for v in self.vars]
        out = {m: c for m, c in self.terms.items() if sum(a * b for a, b in zip(w, m)) <= max_weight}
        return MultiPoly(self.vars, out, _trusted=True)

    def evaluate(self, values: Mapping[str, complex], u_value: complex = 1.0) -> complex:
        """Numeric evaluation; coefficients are evaluated at ``u_value``."""
        total = 0
        for m, c in self.terms.items():
            term = sc.evaluate_at(c, u_value)
            for v, e in zip(self.vars, m):
                if e:
                    term *= values[v] ** e
            total += term
        return total

    # -- text ---------------------------------------------------------------
    def to_text(self) -> str:
        return format_poly(self)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"MultiPoly({format_poly(self)!r})"


def _mul_small(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    out: dict = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            v = out.get(m)
            out[m] = c1 * c2 if v is None else v + c1 * c2
    return MultiPoly(a.vars, {m: c for m, c in out.items() if c != 0}, _trusted=True)


def _pack(mono) -> int:
    key = 0
    for e in reversed(mono):
        key = (key << _BITS) | (e + _BIAS)
    return key


def _unpack(key: int, n: int) -> tuple:
    out = []
    for _ in range(n):
        out.append((key & _MASK) - _BIAS)
        key >>= _BITS
    return tuple(out)


def _mul_packed(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    n = len(a.vars)
    offset = _pack((0,) * n)
    bl = [(_pack(m) - offset, c) for m, c in b.terms.items()]
    out: dict = {}
    get = out.get
    for m1, c1 in a.terms.items():
        k1 = _pack(m1)
        for k2, c2 in bl:
            k = k1 + k2
            v = get(k)
            out[k] = c1 * c2 if v is None else v + c1 * c2
    terms = {_unpack(k, n): c for k, c in out.items() if c != 0}
    return MultiPoly(a.vars, terms, _trusted=True)


# -- operations on polynomials ---------------------------------------------

def derive(p: MultiPoly, var: str, order: int = 1) -> MultiPoly:
    """Exact partial derivative; d/dphi also acts on E by dE/dphi = -2E."""
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    ext = var == EXP_BASE and EXP_GENERATOR in p.vars
    if var not in p.vars:
        if ext:
            pass
        else:
            if var in _RESERVED:
                raise UnknownVariable(var)
            return MultiPoly.zero(p.vars) if order else p
    result = p
    for _ in range(order):
        out: dict = {}
        i = result.vars.index(var) if var in result.vars else None
        j = result.vars.index(EXP_GENERATOR) if ext else None
        for m, c in result.terms.items():
            if i is not None and m[i]:
                e = list(m)
                e[i] -= 1
                key = tuple(e)
                out[key] = out.get(key, Rational(0)) + c * m[i]
            if j is not None and m[j]:
                out[m] = out.get(m, Rational(0)) + c * (EXP_RATE * m[j])
        result = MultiPoly(result.vars, {k: v for k, v in out.items() if v != 0}, _trusted=True)
    return result


def qshift(p: MultiPoly, var: str, halfpowers: int) -> MultiPoly:
    """Multiplicative shift var -> u^halfpowers * var (q^{1/2} units)."""
    if var not in p.vars:
        if var in _RESERVED:
            raise UnknownVariable(var)
        return p
    i = p.vars.index(var)
    out = {}
    for m, c in p.terms.items():
        out[m] = c * sc.u_pow(halfpowers * m[i]) if m[i] else c
    return MultiPoly(p.vars, out, _trusted=True)


def qdiff(p: MultiPoly, var: str, alpha=0, variant: str = sc.SYMMETRIC) -> MultiPoly:
    """q-difference operator D^{(alpha)} in ``var``.

    symmetric:    (q^{-a} M+ - q^{a} M-) / ((q - q^{-1}) t), M+- : t -> q^{+-1} t,
                  so t^n -> [n - a]_q t^{n-1};
    nonsymmetric: (q^{2a} M - 1) / ((q^2 - 1) t) with M : t -> q^2 t,
                  so t^n -> (n + a)_q t^{n-1}.
    """
    a = HalfInt.of(alpha)
    if var not in p.vars:
        if var in _RESERVED:
            raise UnknownVariable(var)
        p = p.with_vars(p.vars + (var,))
    i = p.vars.index(var)
    out: dict = {}
    for m, c in p.terms.items():
        n = m[i]
        if variant == sc.SYMMETRIC:
            k = sc.qnum(HalfInt(2 * n) - a, sc.SYMMETRIC)
        elif variant == sc.NONSYMMETRIC:
            k = sc.qnum(HalfInt(2 * n) + a, sc.NONSYMMETRIC)
        else:
            raise sc.DomainError(f"unknown variant {variant!r}")
        if k == 0:
            continue
        e = list(m)
        e[i] -= 1
        key = tuple(e)
        v = out.get(key, Rational(0)) + c * k
        out[key] = v
    return MultiPoly(p.vars, {k: v for k, v in out.items() if v != 0}, _trusted=True)


def substitute(p: MultiPoly, bindings: Mapping[str, object]) -> MultiPoly:
    """Simultaneous substitution of variables by polynomials or scalars."""
    bind = {}
    for k, v in bindings.items():
        bind[k] = v if isinstance(v, MultiPoly) else MultiPoly.const(sc.to_scalar(v))
    keep = tuple(v for v in p.vars if v not in bind)
    keep_idx = [p.vars.index(v) for v in keep]
    sub_idx = [(p.vars.index(v), bind[v]) for v in bind if v in p.vars]
    result = MultiPoly.zero(keep)
    cache: dict = {}

    def power(poly, k, name):
        key = (name, k)
        if key not in cache:
            cache[key] = poly**k if k >= 0 else _inverse_power(poly, k, name)
        return cache[key]

    groups: dict = {}
    for m, c in p.terms.items():
        rest = tuple(m[i] for i in keep_idx)
        subs = tuple(m[i] for i, _ in sub_idx)
        groups.setdefault(subs, {})
        groups[subs][rest] = c
    for subs, rest_terms in groups.items():
        factor = MultiPoly(keep, rest_terms, _trusted=True)
        for (i, poly), k in zip(sub_idx, subs):
            if k:
                factor = factor * power(poly, k, p.vars[i])
        result = result + factor
    return result


def _inverse_power(poly: MultiPoly, k: int, name: str) -> MultiPoly:
    if len(poly.terms) != 1:
        raise ValueError(f"cannot substitute a non-monomial for {name!r} carrying negative powers")
    return poly**k


def variables(*names: str) -> tuple[MultiPoly, ...]:
    """Convenience: generators over a common table."""
    return tuple(MultiPoly.var(n, names) for n in names)


# -- text form ------------------------------------------------------------

def _graded_key(mono):
    return (sum(mono), mono)


def format_poly(p: MultiPoly) -> str:
    """Canonical text: graded-lex descending, e.g. ``3/2*t1^2*tb1 - t2``."""
    if not p.terms:
        return "0"
    pieces = []
    for m in sorted(p.terms, key=_graded_key, reverse=True):
        c = p.terms[m]
        factors = []
        for v, e in zip(p.vars, m):
            if e == 1:
                factors.append(v)
            elif e:
                factors.append(f"{v}^{e}")
        neg = False
        if isinstance(c, sc.QRational):
            ctext = sc.format_scalar(c)
        else:
            neg = c < 0
            mag = -c if neg else c
            ctext = "" if (mag == 1 and factors) else sc.format_scalar(mag)
        body = "*".join(([ctext] if ctext else []) + factors)
        if not pieces:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append(("- " if neg else "+ ") + body)
    return " ".join(pieces)


def parse_poly(text: str, vars: Iterable[str] = ()) -> MultiPoly:
    """Inverse of :func:`format_poly`; names other than u, q become variables."""
    table = tuple(vars)

    def resolve(name):
        if name == "u":
            return sc.u_pow(1)
        if name == "q":
            return sc.u_pow(2)
        return MultiPoly.var(name, table)

    try:
        val = evaluate(text, resolve, lambda n: Rational(n))
    except ZeroDivisionError as exc:
        raise ParseError(str(exc)) from None
    out = val if isinstance(val, MultiPoly) else MultiPoly.const(val, table)
    return out.with_vars(table + tuple(v for v in out.vars if v not in table)) if table else out


def det(matrix: Sequence[Sequence], one=None):
    """Determinant over any commutative ring by Laplace expansion on column subsets.

    Works for MultiPoly, scalars or floats; the empty matrix has determinant ``one``
    (default ``MultiPoly.const(1)``).
    """
    n = len(matrix)
    if one is None:
        one = MultiPoly.const(1)
    if n == 0:
        return one
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant needs a square matrix")
    # minors[mask] = det of the last popcount(mask) rows restricted to the columns in mask
    minors = {0: one}
    for r in range(n - 1, -1, -1):
        nxt = {}
        for mask, sub in minors.items():
            for c in range(n):
                if mask >> c & 1:
                    continue
                entry = matrix[r][c]
                if not entry:
                    continue
                # sign: position of column c among the columns of the enlarged set
                pos = bin(mask & ((1 << c) - 1)).count("1")
                term = entry * sub
                key = mask | (1 << c)
                term = term if pos % 2 == 0 else -term
                nxt[key] = nxt[key] + term if key in nxt else term
        minors = nxt
        if not minors:
            return one * 0
    return minors.get((1 << n) - 1, one * 0)
