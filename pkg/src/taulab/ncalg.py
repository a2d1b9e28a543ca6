"""Noncommutative quadratic rewriting rings and PBW normal forms.

A :class:`RingSpec` lists generators and oriented rules ``x*y -> sum c*w`` for
adjacent pairs.  Words are normalized by repeatedly rewriting the leftmost
reducible pair; results are memoized per ring.  Termination is checked when
the ring is built: every right-hand word must be smaller than the left-hand
pair in degree-lexicographic order.

Coefficients are exact scalars, central polynomials (:class:`MultiPoly` in
commuting parameters such as evolution times) or :class:`CMatrix` values.
Coefficients commute with generators, matrices multiply among themselves in
the order in which they appear.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from taulab import scalars as sc
from taulab._expr import ParseError, evaluate
from taulab.polyalg import MultiPoly
from taulab.scalars import Rational


class DivergenceError(RuntimeError):
    """Rewriting did not terminate within the configured budget."""


class RingError(ValueError):
    pass


# -- matrix coefficients ----------------------------------------------------

class CMatrix:
    """Square matrix over exact scalars; ``*`` is the matrix product."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence]):
        self.rows = tuple(tuple(sc.to_scalar(x) for x in r) for r in rows)

    @property
    def size(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int) -> "CMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def unit(cls, n: int, i: int, j: int) -> "CMatrix":
        return cls([[1 if (a, b) == (i, j) else 0 for b in range(n)] for a in range(n)])

    @classmethod
    def diag(cls, entries: Sequence) -> "CMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __add__(self, other):
        if isinstance(other, CMatrix):
            return CMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])
        if other == 0:
            return self
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return CMatrix([[-a for a in r] for r in self.rows])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, CMatrix):
            cols = list(zip(*other.rows))
            out = []
            for r in self.rows:
                row = []
                for col in cols:
                    acc = Rational(0)
                    for a, b in zip(r, col):
                        if a != 0 and b != 0:
                            acc = acc + a * b
                    row.append(acc)
                out.append(row)
            return CMatrix(out)
        if sc.is_scalar(other):
            return CMatrix([[a * other for a in r] for r in self.rows])
        return NotImplemented

    def __rmul__(self, other):
        if sc.is_scalar(other):
            return CMatrix([[other * a for a in r] for r in self.rows])
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, CMatrix):
            return self.rows == other.rows
        if other == 0:
            return all(a == 0 for r in self.rows for a in r)
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    __hash__ = None  # type: ignore[assignment]

    def entry(self, i: int, j: int):
        return self.rows[i][j]

    def __repr__(self):
        return f"CMatrix({[[sc.format_scalar(a) for a in r] for r in self.rows]})"


def kron(a: CMatrix, b: CMatrix) -> CMatrix:
    """Tensor (Kronecker) product a (x) b."""
    n, m = a.size, b.size
    rows = []
    for i in range(n):
        for k in range(m):
            rows.append([a.rows[i][j] * b.rows[k][l] for j in range(n) for l in range(m)])
    return CMatrix(rows)


def _iszero(c) -> bool:
    return c == 0


def _is_coeff(x) -> bool:
    return sc.is_scalar(x) or isinstance(x, MultiPoly)


def _as_coeff(x):
    return x if isinstance(x, MultiPoly) else sc.to_scalar(x)


def _coeff_at_u1(c):
    if isinstance(c, MultiPoly):
        return c.at_u1()
    if isinstance(c, CMatrix):
        return CMatrix([[sc.at_u1(x) for x in row] for row in c.rows])
    return sc.at_u1(c)


# -- rings --------------------------------------------------------------------

Word = tuple  # tuple of generator indices


@dataclass
class RingSpec:
    """Generators plus oriented quadratic rules on adjacent pairs."""

    name: str
    gens: tuple[str, ...]
    rules: dict  # (i, j) -> tuple[(word, scalar), ...]
    matrix_gens: dict = field(default_factory=dict)  # (row, col) -> generator index
    budget: int = 200_000
    _cache: dict = field(default_factory=dict, repr=False)
    _busy: set = field(default_factory=set, repr=False)

    @classmethod
    def build(
        cls,
        name: str,
        gens: Sequence[str],
        relations: Mapping[tuple[str, str], Iterable[tuple[object, Sequence[str]]]],
        inverses: Iterable[tuple[str, str]] = (),
        matrix_gens: Mapping[tuple[int, int], str] | None = None,
        check_order: bool = True,
    ) -> "RingSpec":
        gens = tuple(gens)
        idx = {g: i for i, g in enumerate(gens)}
        rules: dict = {}
        for (x, y), rhs in relations.items():
            key = (idx[x], idx[y])
            terms = []
            for coeff, word in rhs:
                c = sc.to_scalar(coeff)
                if c != 0:
                    terms.append((tuple(idx[w] for w in word), c))
            rules[key] = tuple(terms)
        for g, gi in inverses:
            rules[(idx[g], idx[gi])] = (((), Rational(1)),)
            rules[(idx[gi], idx[g])] = (((), Rational(1)),)
        ring = cls(name, gens, rules, {k: idx[v] for k, v in (matrix_gens or {}).items()})
        if check_order:
            ring.check_termination()
        return ring

    def check_termination(self) -> None:
        for lhs, rhs in self.rules.items():
            for word, _ in rhs:
                if not _deglex_less(word, lhs):
                    raise RingError(
                        f"rule {self.word_text(lhs)} -> ... produces {self.word_text(word)}, "
                        "which is not smaller in degree-lex order"
                    )

    def index(self, name: str) -> int:
        try:
            return self.gens.index(name)
        except ValueError:
            raise RingError(f"{name!r} is not a generator of {self.name}") from None

    def gen(self, name: str) -> "NCPoly":
        return NCPoly(self, {(self.index(name),): Rational(1)})

    def A(self, i: int, j: int) -> "NCPoly":
        """Matrix generator A^i_j (1-based) of an FRT-type ring."""
        try:
            return NCPoly(self, {(self.matrix_gens[(i, j)],): Rational(1)})
        except KeyError:
            raise RingError(f"no matrix generator A^{i}_{j} in {self.name}") from None

    def one(self) -> "NCPoly":
        return NCPoly(self, {(): Rational(1)})

    def zero(self) -> "NCPoly":
        return NCPoly(self, {})

    def scalar(self, c) -> "NCPoly":
        if isinstance(c, (CMatrix, MultiPoly)):
            return NCPoly(self, {(): c} if not _iszero(c) else {})
        c = sc.to_scalar(c)
        return NCPoly(self, {(): c} if c != 0 else {})

    def word_text(self, word: Word) -> str:
        return "*".join(self.gens[i] for i in word) or "1"

    def is_normal(self, word: Word) -> bool:
        return all((word[p], word[p + 1]) not in self.rules for p in range(len(word) - 1))

    # -- normal forms ---------------------------------------------------------
    def normal_form_word(self, word: Word) -> dict:
        """Normal form of a single word as {word: scalar}."""
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        self._steps = 0
        return self._nf(word)

    def _nf(self, word: Word) -> dict:
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        pos = -1
        for p in range(len(word) - 1):
            if (word[p], word[p + 1]) in self.rules:
                pos = p
                break
        if pos < 0:
            res = {word: Rational(1)}
            self._cache[word] = res
            return res
        if word in self._busy:
            raise DivergenceError(f"rewriting cycle through {self.word_text(word)} in {self.name}")
        self._steps = getattr(self, "_steps", 0) + 1
        if self._steps > self.budget:
            raise DivergenceError(f"rewrite budget exceeded in {self.name}")
        self._busy.add(word)
        try:
            res = self._rewrite_at(word, pos)
        finally:
            self._busy.discard(word)
        self._cache[word] = res
        return res

    def _rewrite_at(self, word: Word, pos: int) -> dict:
        res: dict = {}
        prefix, suffix = word[:pos], word[pos + 2 :]
        for w, c in self.rules[(word[pos], word[pos + 1])]:
            for w2, c2 in self._nf(prefix + w + suffix).items():
                v = res.get(w2)
                v = c * c2 if v is None else v + c * c2
                if v == 0:
                    res.pop(w2, None)
                else:
                    res[w2] = v
        return res

    def reduce_at(self, word: Word, pos: int) -> dict:
        """Normal form obtained by rewriting position ``pos`` first."""
        if (word[pos], word[pos + 1]) not in self.rules:
            raise RingError("position is not reducible")
        self._steps = 0
        return self._rewrite_at(word, pos)


def _deglex_less(a: Word, b: Word) -> bool:
    return (len(a), a) < (len(b), b)


# -- noncommutative polynomials ---------------------------------------------

class NCPoly:
    """Normal-ordered noncommutative polynomial over a :class:`RingSpec`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingSpec, terms: Mapping | None = None, *, normalize: bool = False):
        self.ring = ring
        if normalize:
            acc: dict = {}
            for w, c in (terms or {}).items():
                _accumulate(acc, ring.normal_form_word(tuple(w)), c)
            self.terms = acc
        else:
            self.terms = {tuple(w): c for w, c in (terms or {}).items() if not _iszero(c)}

    def _coerce(self, other):
        if isinstance(other, NCPoly):
            if other.ring is not self.ring:
                raise RingError("operands live in different rings")
            return other
        if _is_coeff(other) or isinstance(other, CMatrix):
            return self.ring.scalar(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for w, c in o.terms.items():
            v = out.get(w)
            v = c if v is None else v + c
            if _iszero(v):
                out.pop(w, None)
            else:
                out[w] = v
        return NCPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly(self.ring, {w: -c for w, c in self.terms.items()})

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

    def __mul__(self, other):
        if _is_coeff(other):
            c = _as_coeff(other)
            return NCPoly(self.ring, {w: v * c for w, v in self.terms.items()})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return nc_mul(self, o)

    def __rmul__(self, other):
        if _is_coeff(other):
            c = _as_coeff(other)
            return NCPoly(self.ring, {w: c * v for w, v in self.terms.items()})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return nc_mul(o, self)

    def __truediv__(self, other):
        if not sc.is_scalar(other):
            return NotImplemented
        return self * (1 / sc.to_scalar(other))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = self.ring.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.terms

    def map_coeffs(self, f) -> "NCPoly":
        return NCPoly(self.ring, {w: f(c) for w, c in self.terms.items()})

    def at_u1(self) -> "NCPoly":
        return self.map_coeffs(_coeff_at_u1)

    def matrix_entry(self, i: int, j: int) -> "NCPoly":
        """Replace each matrix coefficient by its (i, j) entry."""
        return NCPoly(self.ring, {w: c.entry(i, j) for w, c in self.terms.items()})

    def to_commutative(self) -> MultiPoly:
        """Image in the commutative polynomial ring (exponent counting)."""
        gens = self.ring.gens
        out: dict = {}
        polys = MultiPoly.zero()
        for w, c in self.terms.items():
            e = [0] * len(gens)
            for i in w:
                e[i] += 1
            key = tuple(e)
            if isinstance(c, MultiPoly):
                polys = polys + c * MultiPoly(gens, {key: Rational(1)})
            else:
                out[key] = out.get(key, Rational(0)) + c
        return MultiPoly(gens, out) + polys

    def __str__(self):
        return format_nc(self)

    def __repr__(self):
        return f"NCPoly({format_nc(self)!r})"


def _accumulate(acc: dict, nf: Mapping, c) -> None:
    for w, s in nf.items():
        v = acc.get(w)
        term = c * s if isinstance(c, CMatrix) else s * c
        v = term if v is None else v + term
        if _iszero(v):
            acc.pop(w, None)
        else:
            acc[w] = v


def nc_mul(x: NCPoly, y: NCPoly, ring: RingSpec | None = None) -> NCPoly:
    """Product reduced to PBW normal form."""
    ring = ring or x.ring
    if x.ring is not ring or y.ring is not ring:
        raise RingError("operands live in different rings")
    acc: dict = {}
    for w1, c1 in x.terms.items():
        for w2, c2 in y.terms.items():
            c = c1 * c2
            if _iszero(c):
                continue
            _accumulate(acc, ring.normal_form_word(w1 + w2), c)
    return NCPoly(ring, acc)


def normal_form(x: NCPoly) -> NCPoly:
    return NCPoly(x.ring, x.terms, normalize=True)


def word_poly(ring: RingSpec, names: Sequence[str], coeff=1) -> NCPoly:
    """Normal form of the (possibly unordered) word given by generator names."""
    word = tuple(ring.index(n) for n in names)
    return NCPoly(ring, {word: sc.to_scalar(coeff)}, normalize=True)


# -- text ---------------------------------------------------------------------

def _word_text(ring: RingSpec, word: Word) -> str:
    parts = []
    for g, grp in itertools.groupby(word):
        k = len(list(grp))
        parts.append(ring.gens[g] if k == 1 else f"{ring.gens[g]}^{k}")
    return "*".join(parts)


def format_nc(x: NCPoly) -> str:
    if not x.terms:
        return "0"
    pieces = []
    for w in sorted(x.terms, key=lambda w: (len(w), w), reverse=True):
        c = x.terms[w]
        wt = _word_text(x.ring, w)
        neg = False
        if isinstance(c, CMatrix):
            ctext = repr(c)
        elif isinstance(c, MultiPoly):
            ctext = "(" + c.to_text() + ")"
        elif isinstance(c, sc.QRational):
            ctext = sc.format_scalar(c)
        else:
            neg = c < 0
            mag = -c if neg else c
            ctext = "" if (mag == 1 and wt) else sc.format_scalar(mag)
        body = "*".join(p for p in (ctext, wt) if p)
        if not pieces:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append(("- " if neg else "+ ") + body)
    return " ".join(pieces)


def parse_nc(text: str, ring: RingSpec) -> NCPoly:
    """Parse text with noncommutative ``*`` into normal form."""

    def resolve(name):
        if name == "u":
            return sc.u_pow(1)
        if name == "q":
            return sc.u_pow(2)
        return ring.gen(name)

    try:
        val = evaluate(text, resolve, lambda n: Rational(n))
    except RingError as exc:
        raise ParseError(str(exc)) from None
    return val if isinstance(val, NCPoly) else ring.scalar(val)


# -- concrete rings ------------------------------------------------------------

def _frt_names(p: int) -> dict:
    if p == 2:
        return {(1, 1): "a", (1, 2): "b", (2, 1): "c", (2, 2): "d"}
    return {(i, j): f"A{i}{j}" for i in range(1, p + 1) for j in range(1, p + 1)}


def frt_ring(p: int) -> RingSpec:
    """Coordinate ring A(GL_q(p)): generators A^i_j in row-major order.

    For X = A^{i1}_{j1} before Y = A^{i2}_{j2} the out-of-order word Y*X is
    rewritten by one of the four exchange families:
    same row or column: YX = q^{-1} XY;  i1<i2, j1>j2: YX = XY;
    i1<i2, j1<j2: YX = XY - (q - q^{-1}) A^{i1}_{j2} A^{i2}_{j1}.
    """
    if p < 2:
        raise RingError("frt_ring needs p >= 2")
    names = _frt_names(p)
    order = [(i, j) for i in range(1, p + 1) for j in range(1, p + 1)]
    qinv = sc.u_pow(-2)
    qdiff = sc.u_pow(2) - sc.u_pow(-2)
    rel = {}
    for a, (i1, j1) in enumerate(order):
        for (i2, j2) in order[a + 1 :]:
            X, Y = names[(i1, j1)], names[(i2, j2)]
            if i1 == i2 or j1 == j2:
                rel[(Y, X)] = [(qinv, (X, Y))]
            elif j1 > j2:
                rel[(Y, X)] = [(1, (X, Y))]
            else:
                rel[(Y, X)] = [(1, (X, Y)), (-qdiff, (names[(i1, j2)], names[(i2, j1)]))]
    return RingSpec.build(f"A(GL_q({p}))", [names[k] for k in order], rel, matrix_gens=names)


def slq2_ring() -> RingSpec:
    """A(SL_q(2)) with ad - q bc = 1, ordered (b, c, a, d).

    Normal words are b^j c^k a^i and b^j c^k d^l.
    """
    q, qi = sc.u_pow(2), sc.u_pow(-2)
    rel = {
        ("c", "b"): [(1, "bc")],
        ("a", "b"): [(q, "ba")],
        ("a", "c"): [(q, "ca")],
        ("d", "b"): [(qi, "bd")],
        ("d", "c"): [(qi, "cd")],
        ("d", "a"): [(1, ""), (qi, "bc")],
        ("a", "d"): [(1, ""), (q, "bc")],
    }
    rel = {k: [(c, tuple(w)) for c, w in v] for k, v in rel.items()}
    return RingSpec.build("A(SL_q(2))", ["b", "c", "a", "d"], rel, matrix_gens=_frt_names(2))


def qplane_ring(names: Sequence[str], exponents: Mapping[tuple[str, str], int]) -> RingSpec:
    """q-plane: for x before y, y*x = u^{k} x*y with k = exponents[(x, y)] (default 0)."""
    rel = {}
    names = list(names)
    for a, x in enumerate(names):
        for y in names[a + 1 :]:
            k = exponents.get((x, y), 0)
            rel[(y, x)] = [(sc.u_pow(k), (x, y))]
    return RingSpec.build("q-plane(" + ",".join(names) + ")", names, rel)


def commutative_ring(names: Sequence[str]) -> RingSpec:
    return qplane_ring(names, {})


# -- confluence ---------------------------------------------------------------

@dataclass
class ConfluenceReport:
    ring: str
    degree: int
    checked: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_pbw_confluence(ring: RingSpec, degree: int = 3) -> ConfluenceReport:
    """Reduce every word of length ``degree`` starting from each reducible pair.

    All strategies must land on the same normal form; mismatching words are
    reported.  Degree 3 is the overlap (diamond) check.
    """
    if degree < 3:
        raise ValueError("confluence is checked from degree 3 upward")
    n = len(ring.gens)
    failures = []
    checked = 0
    for word in itertools.product(range(n), repeat=degree):
        positions = [p for p in range(degree - 1) if (word[p], word[p + 1]) in ring.rules]
        if len(positions) < 2:
            continue
        checked += 1
        forms = [ring.reduce_at(word, p) for p in positions]
        base = forms[0]
        for p, f in zip(positions[1:], forms[1:]):
            if not _same(base, f):
                failures.append(ring.word_text(word))
                break
    return ConfluenceReport(ring.name, degree, checked, failures)


def _same(a: Mapping, b: Mapping) -> bool:
    keys = set(a) | set(b)
    return all(a.get(k, 0) == b.get(k, 0) for k in keys)


# -- quantum minors ---------------------------------------------------------------

def _inversions(perm: Sequence[int]) -> int:
    return sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])


def _check_increasing(idx: Sequence[int], what: str) -> None:
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise RingError(f"{what} index list {tuple(idx)} is not strictly increasing")


def qdet_minor(ring: RingSpec, rows: Sequence[int], cols: Sequence[int]) -> NCPoly:
    """Quantum minor sum_P (-q)^{inv P} prod_a A^{rows[a]}_{cols[P(a)]}."""
    rows, cols = tuple(rows), tuple(cols)
    if len(rows) != len(cols) or not rows:
        raise RingError("row and column lists must be nonempty and of equal length")
    _check_increasing(rows, "row")
    _check_increasing(cols, "column")
    return q_antisym_cols(ring, rows, cols)


def q_antisym_cols(ring: RingSpec, rows: Sequence[int], cols: Sequence[int]) -> NCPoly:
    """Column q-antisymmetrization without ordering checks."""
    acc = ring.zero()
    mq = -sc.u_pow(2)
    for perm in itertools.permutations(range(len(cols))):
        term = ring.one() * (mq ** _inversions(perm))
        for a, p in enumerate(perm):
            term = term * ring.A(rows[a], cols[p])
        acc = acc + term
    return acc


def q_antisym_rows(ring: RingSpec, rows: Sequence[int], cols: Sequence[int]) -> NCPoly:
    """Row q-antisymmetrization sum_P (-q)^{inv P} prod_a A^{rows[P(a)]}_{cols[a]}."""
    acc = ring.zero()
    mq = -sc.u_pow(2)
    for perm in itertools.permutations(range(len(rows))):
        term = ring.one() * (mq ** _inversions(perm))
        for a, p in enumerate(perm):
            term = term * ring.A(rows[p], cols[a])
        acc = acc + term
    return acc


# -- matrices with NCPoly entries ---------------------------------------------------

def nc_matmul(A: Sequence[Sequence[NCPoly]], B: Sequence[Sequence[NCPoly]], ring: RingSpec) -> list:
    """Product of matrices whose entries are NCPolys over ``ring`` (entry order kept)."""
    n, m, k = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            acc = ring.zero()
            for l in range(m):
                if A[i][l].terms and B[l][j].terms:
                    acc = acc + A[i][l] * B[l][j]
            row.append(acc)
        out.append(row)
    return out


def nc_qexp_matrix(ring: RingSpec, x: NCPoly, X: Sequence[Sequence], base_upow: int, max_degree: int | None = None) -> list:
    """E_Q(x X) = sum_k x^k X^k / (k)_Q! with Q = u**base_upow, for a scalar matrix X.

    The series stops when X^k vanishes or at ``max_degree``.
    """
    n = len(X)
    out = [[ring.scalar(int(i == j)) for j in range(n)] for i in range(n)]
    P = [[Rational(int(i == j)) for j in range(n)] for i in range(n)]
    xk = ring.one()
    k = 0
    while max_degree is None or k < max_degree:
        k += 1
        P = [[sum((P[i][l] * X[l][j] for l in range(n) if P[i][l] != 0 and X[l][j] != 0), Rational(0)) for j in range(n)] for i in range(n)]
        if all(v == 0 for row in P for v in row):
            break
        if k > 4 * n + 8 and max_degree is None:
            raise DivergenceError("matrix is not nilpotent; pass max_degree")
        xk = xk * x
        f = 1 / sc.qfactorial_base(k, base_upow)
        out = [[out[i][j] + xk * (P[i][j] * f) if P[i][j] != 0 else out[i][j] for j in range(n)] for i in range(n)]
    return out
