"""SL(2) and SL_q(2) tau-functions and their bilinear identities.

Conventions used throughout:

* ``q = u^2``; symmetric q-numbers ``[x] = (q^x - q^-x)/(q - q^-1)``.
* Verma module of highest weight ``lam``: ``T- |n> = |n+1>``,
  ``T0 |n> = (lam - n)|n>``, ``T+ |n> = [n][2 lam + 1 - n] |n-1>``.
* Classical tau: ``tau_lam = <0| e^{t T+} g e^{tb T-} |0> = (a + b tb + c t + d t tb)^{2 lam}``.
* The difference operators of the noncommutative section are the q^2-Jackson
  derivative ``D f = (f(q^2 t) - f(t)) / ((q^2 - 1) t)`` and ``M-`` is the
  q^{-1} dilation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from taulab import scalars as sc
from taulab.ncalg import NCPoly, RingSpec, nc_matmul, nc_qexp_matrix, slq2_ring
from taulab.polyalg import MultiPoly, derive, qdiff, qshift
from taulab.scalars import HALF, DomainError, HalfInt, Rational

SYM, NONSYM = sc.SYMMETRIC, sc.NONSYMMETRIC


class GroupElementError(ValueError):
    pass


def _half(lam) -> HalfInt:
    return lam if isinstance(lam, HalfInt) else HalfInt.of(lam)


# -- Verma module --------------------------------------------------------------

@dataclass(frozen=True)
class VermaModule:
    """Truncated Verma module V_lam spanned by |0>, ..., |N-1>."""

    lam: HalfInt
    N: int
    classical: bool = False

    def qn(self, x) -> object:
        x = HalfInt.of(x)
        return x.value if self.classical else sc.qnum(x, SYM)

    def b(self, n: int):
        """Raising coefficient b_n(lam) = [n][2 lam + 1 - n]."""
        return sc.to_scalar(self.qn(n)) * sc.to_scalar(self.qn(HalfInt(2 * self.lam.twice + 2 - 2 * n)))

    def weight(self, n: int) -> HalfInt:
        return self.lam - HalfInt(2 * n)

    def raise_(self, vec: Mapping[int, object]) -> dict:
        out: dict = {}
        for n, c in vec.items():
            if n >= 1:
                bn = self.b(n)
                if bn != 0:
                    out[n - 1] = out.get(n - 1, Rational(0)) + bn * c
        return {k: v for k, v in out.items() if v != 0}

    def lower(self, vec: Mapping[int, object]) -> dict:
        return {n + 1: c for n, c in vec.items() if n + 1 < self.N}

    def relation_residuals(self) -> list:
        """[T+, T-]|n> - [2 T0]|n> for n < N - 1 (the top state is truncated)."""
        out = []
        for n in range(self.N - 1):
            lhs = self.b(n + 1) - (self.b(n) if n >= 1 else 0)
            rhs = sc.to_scalar(self.qn(HalfInt(2 * self.weight(n).twice)))
            out.append(sc.to_scalar(lhs) - rhs)
        return out

    def matrices(self) -> tuple[list, list, list]:
        """T+, T-, T0 as N x N matrices in the |n> basis (column = input state)."""
        N = self.N
        Tp = [[Rational(0)] * N for _ in range(N)]
        Tm = [[Rational(0)] * N for _ in range(N)]
        T0 = [[Rational(0)] * N for _ in range(N)]
        for n in range(N):
            if n >= 1:
                Tp[n - 1][n] = sc.to_scalar(self.b(n))
            if n + 1 < N:
                Tm[n + 1][n] = Rational(1)
            T0[n][n] = sc.to_scalar(self.weight(n).value)
        return Tp, Tm, T0


def singular_coefficient(lam) -> object:
    """b_{2 lam + 1}(lam); zero for every half-integer lam >= 0."""
    lam = _half(lam)
    return VermaModule(lam, lam.twice + 2).b(lam.twice + 1)


# -- classical group elements ------------------------------------------------------

@dataclass(frozen=True)
class GroupElementSL2:
    a: object
    b: object
    c: object
    d: object

    def det(self):
        return self.a * self.d - self.b * self.c

    @classmethod
    def symbolic(cls) -> "GroupElementSL2":
        a, b, c, d = (MultiPoly.var(x) for x in "abcd")
        return cls(a, b, c, d)

    @classmethod
    def from_abcd(cls, a, b, c, d, check: bool = True) -> "GroupElementSL2":
        g = cls(*(sc.to_scalar(x) if not isinstance(x, MultiPoly) else x for x in (a, b, c, d)))
        if check and not isinstance(g.a, MultiPoly) and g.det() != 1:
            raise GroupElementError(f"ad - bc = {g.det()} != 1")
        return g

    @classmethod
    def from_triple(cls, x_plus, e_half_x0, x_minus) -> "GroupElementSL2":
        """g = e^{x+ T+} e^{x0 T0} e^{x- T-} with D = e^{x0/2} given exactly."""
        xp, D, xm = (sc.to_scalar(x) for x in (x_plus, e_half_x0, x_minus))
        if D == 0:
            raise GroupElementError("e^{x0/2} must be nonzero")
        return cls(D + xp * xm / D, xp / D, xm / D, 1 / D)

    @classmethod
    def from_json(cls, data: dict | str) -> "GroupElementSL2":
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise GroupElementError(f"group element is not JSON: {exc}") from None
        try:
            if {"a", "b", "c", "d"} <= set(data):
                return cls.from_abcd(*(sc.to_scalar(str(data[k])) for k in "abcd"))
            if "x_plus" in data:
                if "e_half_x0" in data:
                    D = sc.to_scalar(str(data["e_half_x0"]))
                else:
                    x0 = sc.to_scalar(str(data.get("x_0", "0")))
                    if x0 != 0:
                        raise GroupElementError("x_0 != 0 is not exact; give e_half_x0 = e^{x_0/2} instead")
                    D = Rational(1)
                return cls.from_triple(sc.to_scalar(str(data["x_plus"])), D,
                                       sc.to_scalar(str(data.get("x_minus", "0"))))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, GroupElementError):
                raise
            raise GroupElementError(f"malformed group element: {exc}") from None
        raise GroupElementError("expected keys a, b, c, d or x_plus, x_0, x_minus")

    def to_json(self) -> dict:
        return {k: sc.format_scalar(getattr(self, k)) for k in "abcd"}


def _as_poly(x) -> MultiPoly:
    return x if isinstance(x, MultiPoly) else MultiPoly.const(x)


def tau_half_linear(g: GroupElementSL2, t: str = "t", tb: str = "tb") -> MultiPoly:
    T, Tb = MultiPoly.var(t), MultiPoly.var(tb)
    return _as_poly(g.a) + _as_poly(g.b) * Tb + _as_poly(g.c) * T + _as_poly(g.d) * T * Tb


def classical_tau_sl2(lam, g: GroupElementSL2 | None = None, t: str = "t", tb: str = "tb") -> MultiPoly:
    """(a + b tb + c t + d t tb)^{2 lam}."""
    lam = _half(lam)
    if lam.twice < 0:
        raise DomainError("spin must be nonnegative")
    g = g or GroupElementSL2.symbolic()
    return tau_half_linear(g, t, tb) ** lam.twice


def _mat_mul(A, B):
    n, m, k = len(A), len(B), len(B[0])
    return [[sum((A[i][l] * B[l][j] for l in range(m) if A[i][l] != 0 and B[l][j] != 0), MultiPoly.zero()) for j in range(k)] for i in range(n)]


def _nilpotent_exp(X, N: int):
    """exp of a nilpotent N x N matrix (finite series)."""
    out = [[MultiPoly.const(int(i == j)) for j in range(N)] for i in range(N)]
    term = out
    for k in range(1, N + 1):
        term = [[x / k for x in row] for row in _mat_mul(term, X)]
        out = [[out[i][j] + term[i][j] for j in range(N)] for i in range(N)]
    return out


def verma_tau_sl2(lam) -> tuple[MultiPoly, dict]:
    """Representation-theoretic route: <0| e^{t T+} g e^{tb T-} |0> in the spin-lam irrep with
    g = e^{x+ T+} e^{x0 T0} e^{x- T-}, e^{x0/2} = D.  Returns the polynomial and the
    matching a, b, c, d as polynomials in xp, xm, D."""
    lam = _half(lam)
    N = lam.twice + 1
    V = VermaModule(lam, N, classical=True)
    Tp, Tm, _ = V.matrices()
    xp, xm, D = MultiPoly.var("xp"), MultiPoly.var("xm"), MultiPoly.var("D")
    t, tb = MultiPoly.var("t"), MultiPoly.var("tb")
    up = _nilpotent_exp([[xp * c for c in row] for row in Tp], N)
    down = _nilpotent_exp([[xm * c for c in row] for row in Tm], N)
    cartan = [[(D ** (lam.twice - 2 * i)) if i == j else MultiPoly.zero() for j in range(N)] for i in range(N)]
    g = _mat_mul(_mat_mul(up, cartan), down)
    left = _nilpotent_exp([[t * c for c in row] for row in Tp], N)[0]  # row <0| e^{t T+}
    right = [row[0] for row in _nilpotent_exp([[tb * c for c in row] for row in Tm], N)]  # column
    tau = MultiPoly.zero()
    for i in range(N):
        for j in range(N):
            if left[i] and right[j] and g[i][j]:
                tau = tau + left[i] * g[i][j] * right[j]
    abcd = {"a": D + xp * xm * D**-1, "b": xp * D**-1, "c": xm * D**-1, "d": D**-1}
    return tau, abcd


def reduce_sl2(p: MultiPoly) -> MultiPoly:
    """Normal form modulo ad - bc - 1: every a^i d^j becomes a^{i-k} d^{j-k} (1 + bc)^k."""
    if "a" not in p.vars or "d" not in p.vars:
        return p
    ia, id_ = p.vars.index("a"), p.vars.index("d")
    one_bc = MultiPoly.const(1) + MultiPoly.var("b") * MultiPoly.var("c")
    out = MultiPoly.zero(p.vars)
    plain: dict = {}
    for m, c in p.terms.items():
        k = min(m[ia], m[id_])
        if k == 0:
            plain[m] = c
            continue
        e = list(m)
        e[ia] -= k
        e[id_] -= k
        out = out + MultiPoly(p.vars, {tuple(e): c}) * one_bc**k
    return out + MultiPoly(p.vars, plain)


def _rename(p: MultiPoly, mapping: Mapping[str, str]) -> MultiPoly:
    return MultiPoly(tuple(mapping.get(v, v) for v in p.vars), p.terms)


def verify_eqA(lam, lam2, g: GroupElementSL2 | None = None) -> MultiPoly:
    """(2lam d_tb' - 2lam' d_tb + (tb' - tb) d_tb d_tb') tau_lam tau'_lam'
    - 4 lam lam' (t' - t) tau_{lam-1/2} tau'_{lam'-1/2}, reduced modulo ad - bc = 1."""
    lam, lam2 = _half(lam), _half(lam2)
    if lam.twice < 1 or lam2.twice < 1:
        raise DomainError("case A needs lam, lam' >= 1/2")
    ren = {"t": "t2", "tb": "tb2"}
    F = classical_tau_sl2(lam, g) * _rename(classical_tau_sl2(lam2, g), ren)
    tb, tb2 = MultiPoly.var("tb"), MultiPoly.var("tb2")
    t, t2 = MultiPoly.var("t"), MultiPoly.var("t2")
    lhs = derive(F, "tb2") * lam.twice - derive(F, "tb") * lam2.twice + (tb2 - tb) * derive(derive(F, "tb"), "tb2")
    rhs = (t2 - t) * (lam.twice * lam2.twice) * classical_tau_sl2(lam - HALF, g) * _rename(classical_tau_sl2(lam2 - HALF, g), ren)
    return reduce_sl2(lhs - rhs)


def verify_eqB(lam, lam2, g: GroupElementSL2 | None = None) -> MultiPoly:
    """[(tb' - tb) d_tb' - 2lam'] tau_lam tau'_lam' - 2lam'/(2lam+1) [(t - t') d_t - 2lam - 1] tau_{lam+1/2} tau'_{lam'-1/2}."""
    lam, lam2 = _half(lam), _half(lam2)
    if lam.twice < 0 or lam2.twice < 0:
        raise DomainError("spins must be nonnegative")
    ren = {"t": "t2", "tb": "tb2"}
    F = classical_tau_sl2(lam, g) * _rename(classical_tau_sl2(lam2, g), ren)
    tb, tb2 = MultiPoly.var("tb"), MultiPoly.var("tb2")
    t, t2 = MultiPoly.var("t"), MultiPoly.var("t2")
    lhs = (tb2 - tb) * derive(F, "tb2") - F * lam2.twice
    if lam2.twice == 0:
        return reduce_sl2(lhs)
    G = classical_tau_sl2(lam + HALF, g) * _rename(classical_tau_sl2(lam2 - HALF, g), ren)
    rhs = ((t - t2) * derive(G, "t") - G * (lam.twice + 1)) * Rational(lam2.twice, lam.twice + 1)
    return reduce_sl2(lhs - rhs)


def expeq_residuals(lam, g: GroupElementSL2 | None = None) -> tuple[MultiPoly, MultiPoly]:
    """Small-shift expansion of case A at lam = lam':
    tau d dbar tau - d tau dbar tau - 2lam tau_{lam-1/2}^2 and 2lam tau dbar^2 tau - (2lam-1)(dbar tau)^2."""
    lam = _half(lam)
    tau = classical_tau_sl2(lam, g)
    dt, db = derive(tau, "t"), derive(tau, "tb")
    first = tau * derive(dt, "tb") - dt * db - classical_tau_sl2(lam - HALF, g) ** 2 * lam.twice
    second = tau * derive(db, "tb") * lam.twice - db * db * (lam.twice - 1)
    return reduce_sl2(first), reduce_sl2(second)


# -- c-number quantum solution ---------------------------------------------------------

def qtau_cnumber(lam, alpha: MultiPoly | object | None = None, t: str = "t", tb: str = "tb") -> MultiPoly:
    """[alpha + alpha^{-1} t tb]_q^{2 lam} = sum_i Gamma_q-ratio alpha^{2lam-2i} (t tb)^i / [i]!."""
    lam = _half(lam)
    if lam.twice < 0:
        raise DomainError("spin must be nonnegative")
    al = MultiPoly.var("alpha") if alpha is None else _as_poly(alpha)
    x = MultiPoly.var(t) * MultiPoly.var(tb)
    out = MultiPoly.zero()
    for i in range(lam.twice + 1):
        coeff = sc.qgamma_ratio(lam, i, SYM) / sc.qfactorial(i, SYM)
        if coeff == 0:
            continue
        out = out + al ** (lam.twice - 2 * i) * x**i * coeff
    return out


def qsol_supporting(lam, alpha=None) -> tuple[MultiPoly, MultiPoly]:
    """Residuals of D_t^(0) tau_lam = alpha^{-1}[2lam] tau_{lam-1/2} tb
    and t D_t^(2lam) tau_lam = -alpha [2lam] tau_{lam-1/2}."""
    lam = _half(lam)
    al = MultiPoly.var("alpha") if alpha is None else _as_poly(alpha)
    tau = qtau_cnumber(lam, al)
    low = qtau_cnumber(lam - HALF, al)
    n2 = sc.qnum(lam.twice, SYM)
    tb, t = MultiPoly.var("tb"), MultiPoly.var("t")
    r1 = qdiff(tau, "t", 0, SYM) - low * tb * al**-1 * n2
    r2 = t * qdiff(tau, "t", HalfInt(2 * lam.twice), SYM) + low * al * n2
    return r1, r2


def _pair(lam, lam2, alpha) -> MultiPoly:
    return qtau_cnumber(lam, alpha) * _rename(qtau_cnumber(lam2, alpha), {"t": "t2", "tb": "tb2"})


def _half_shift(p: MultiPoly, unprimed: str, primed: str) -> MultiPoly:
    """sqrt(M-_x M+_x'): x -> q^{-1/2} x, x' -> q^{1/2} x'."""
    return qshift(qshift(p, unprimed, -1), primed, +1)


def verify_qeqA(lam, lam2, alpha=None) -> MultiPoly:
    """Case-A quantum bilinear identity on c-number solutions; exact zero expected."""
    lam, lam2 = _half(lam), _half(lam2)
    if lam.twice < 1 or lam2.twice < 1:
        raise DomainError("case A needs lam, lam' >= 1/2")
    al = MultiPoly.var("alpha") if alpha is None else _as_poly(alpha)
    F = _pair(lam, lam2, al)
    tb, tb2, t, t2 = (MultiPoly.var(x) for x in ("tb", "tb2", "t", "t2"))
    a2 = HalfInt(2 * lam.twice)
    a2p = HalfInt(2 * lam2.twice)
    term1 = qdiff(tb2 * qdiff(F, "tb2", a2p, SYM), "tb", 0, SYM) * sc.u_pow(lam2.twice)
    term2 = tb * qdiff(qdiff(F, "tb2", 0, SYM), "tb", a2, SYM) * sc.u_pow(-lam.twice)
    lhs = _half_shift(term1 - term2, "tb", "tb2")
    G = _pair(lam - HALF, lam2 - HALF, al)
    coeff = sc.qnum(lam.twice, SYM) * sc.qnum(lam2.twice, SYM)
    rhs = (t2 * sc.u_pow(-(lam.twice + 1)) - t * sc.u_pow(lam2.twice + 1)) * G * coeff
    rhs = _half_shift(rhs, "t", "t2")
    return lhs - rhs


QEQB_READINGS = ("verbatim", "lhs-unprimed", "rhs-primed", "both-swapped")


def verify_qeqB(lam, lam2, reading: str = "verbatim", alpha=None) -> MultiPoly:
    """Case-B quantum identity.  The second LHS term carries D^(0) in tb' (verbatim) or tb,
    the second RHS term D^(0) in t (verbatim) or t'."""
    lam, lam2 = _half(lam), _half(lam2)
    if reading not in QEQB_READINGS:
        raise DomainError(f"unknown reading {reading!r}")
    if lam2.twice < 1:
        raise DomainError("case B needs lam' >= 1/2")
    al = MultiPoly.var("alpha") if alpha is None else _as_poly(alpha)
    lhs_var = "tb" if reading in ("lhs-unprimed", "both-swapped") else "tb2"
    rhs_var = "t2" if reading in ("rhs-primed", "both-swapped") else "t"
    F = _pair(lam, lam2, al)
    tb, tb2, t, t2 = (MultiPoly.var(x) for x in ("tb", "tb2", "t", "t2"))
    lhs = tb2 * qdiff(F, "tb2", HalfInt(2 * lam2.twice), SYM) * sc.u_pow(lam2.twice)
    lhs = lhs - tb * qdiff(F, lhs_var, 0, SYM) * sc.u_pow(lam.twice + 2)
    lhs = _half_shift(lhs, "tb", "tb2")
    G = _pair(lam + HALF, lam2 - HALF, al)
    rhs = t * qdiff(G, "t", HalfInt(2 * (lam.twice + 1)), SYM) * sc.u_pow(lam2.twice)
    rhs = rhs - t2 * qdiff(G, rhs_var, 0, SYM) * sc.u_pow(lam.twice)
    rhs = _half_shift(rhs * (sc.qnum(lam2.twice, SYM) / sc.qnum(lam.twice + 1, SYM)), "t", "t2")
    return lhs - rhs


def qeqB_readings(lam, lam2) -> dict:
    return {r: verify_qeqB(lam, lam2, r).is_zero() for r in QEQB_READINGS}


# -- noncommutative tau --------------------------------------------------------------

_SLQ2: RingSpec | None = None


def slq2() -> RingSpec:
    global _SLQ2
    if _SLQ2 is None:
        _SLQ2 = slq2_ring()
    return _SLQ2


def nc_tau_half(t=None, tbar=None) -> NCPoly:
    """a + b tb + c t + d t tb with central times (symbols ``t``, ``tb`` by default)."""
    R = slq2()
    T = MultiPoly.var("t") if t is None else _as_poly(t)
    Tb = MultiPoly.var("tb") if tbar is None else _as_poly(tbar)
    a, b, c, d = (R.gen(x) for x in "abcd")
    return a + b * Tb + c * T + d * (T * Tb)


def _coeffwise(x: NCPoly, f) -> NCPoly:
    return NCPoly(x.ring, {w: f(c if isinstance(c, MultiPoly) else MultiPoly.const(c)) for w, c in x.terms.items()})


def jackson(x: NCPoly, var: str) -> NCPoly:
    """q^2-Jackson derivative in a central variable."""
    return _coeffwise(x, lambda c: qdiff(c, var, 0, NONSYM))


def dilate(x: NCPoly, var: str, halfpowers: int) -> NCPoly:
    return _coeffwise(x, lambda c: qshift(c, var, halfpowers))


@dataclass
class HirotaReport:
    d_tbar: NCPoly  # D_tb tau - (b + d t)
    d_t: NCPoly  # D_t tau - (c + d tb)
    d_both: NCPoly  # D_t D_tb tau - d
    residual: NCPoly
    printed_residual: NCPoly  # shift placed on t as printed

    @property
    def ok(self) -> bool:
        return all(x.is_zero() for x in (self.d_tbar, self.d_t, self.d_both, self.residual))


def verify_sl2hirota() -> HirotaReport:
    """tau D_t D_tb tau - q (D_tb tau) M-_tb (D_t tau) = 1 in A(SL_q(2))."""
    R = slq2()
    tau = nc_tau_half()
    a, b, c, d = (R.gen(x) for x in "abcd")
    T, Tb = MultiPoly.var("t"), MultiPoly.var("tb")
    Dtb = jackson(tau, "tb")
    Dt = jackson(tau, "t")
    DD = jackson(Dt, "tb")
    q = sc.u_pow(2)
    residual = tau * DD - (Dtb * dilate(Dt, "tb", -2)) * q - 1
    printed = tau * DD - (Dtb * dilate(Dt, "t", -2)) * q - 1
    return HirotaReport(Dtb - (b + d * T), Dt - (c + d * Tb), DD - d, residual, printed)


def verify_kos_trivial(a=None) -> MultiPoly:
    """Trivial representation b = c = 0, d = 1/a: tau D D_b tau - D_b tau D tau - 1."""
    A = MultiPoly.var("a") if a is None else _as_poly(a)
    t, tb = MultiPoly.var("t"), MultiPoly.var("tb")
    tau = A + t * tb * A**-1 if a is None else A + t * tb / sc.to_scalar(a)
    Dt = qdiff(tau, "t", 0, NONSYM)
    Dtb = qdiff(tau, "tb", 0, NONSYM)
    return tau * qdiff(Dt, "tb", 0, NONSYM) - Dtb * Dt - 1


def trivial_representation(x: NCPoly) -> MultiPoly:
    """Image under b = c = 0, d = a^{-1}; a is then central."""
    out = MultiPoly.zero()
    A = MultiPoly.var("a")
    names = x.ring.gens
    for w, c in x.terms.items():
        if any(names[i] in ("b", "c") for i in w):
            continue
        e = sum(1 if names[i] == "a" else -1 for i in w)
        out = out + _as_poly(c) * A**e
    return out


# -- recursive matrix elements and factorization ------------------------------------------

_ME_CACHE: dict = {}


def nc_matrix_element(lam, k: int, n: int) -> NCPoly:
    """<k|g|n>_lam in A(SL_q(2)) from the decomposition of V_lam in V_{lam-1/2} x V_{1/2}:
    q^{-(k+n)/2} (<k|n> a + q^lam [n] <k|n-1> b + q^lam [k] <k-1|n> c + q^{2lam}[k][n] <k-1|n-1> d),
    the bracketed elements taken at spin lam - 1/2."""
    lam = _half(lam)
    if lam.twice < 1:
        raise DomainError("matrix elements need lam >= 1/2")
    if not (0 <= k <= lam.twice and 0 <= n <= lam.twice):
        raise DomainError(f"indices ({k}, {n}) outside 0..{lam.twice}")
    key = (lam.twice, k, n)
    if key in _ME_CACHE:
        return _ME_CACHE[key]
    R = slq2()
    a, b, c, d = (R.gen(x) for x in "abcd")
    if lam.twice == 1:
        res = [[a, b], [c, d]][k][n]
    else:
        low = lam - HALF

        def el(i, j):
            if 0 <= i <= low.twice and 0 <= j <= low.twice:
                return nc_matrix_element(low, i, j)
            return None

        acc = R.zero()
        ql = sc.u_pow(lam.twice)
        parts = [
            (el(k, n), a, Rational(1)),
            (el(k, n - 1), b, ql * sc.qnum(n, SYM)),
            (el(k - 1, n), c, ql * sc.qnum(k, SYM)),
            (el(k - 1, n - 1), d, ql * ql * sc.qnum(k, SYM) * sc.qnum(n, SYM)),
        ]
        for m, gen, coeff in parts:
            if m is not None and coeff != 0:
                acc = acc + (m * gen) * coeff
        res = acc * sc.u_pow(-(k + n))
    _ME_CACHE[key] = res
    return res


def nc_tau(lam, t=None, tbar=None) -> NCPoly:
    """tau_lam = sum_{k,n} <k|g|n>_lam t^k tb^n / ([k]! [n]!)."""
    lam = _half(lam)
    R = slq2()
    if lam.twice == 0:
        return R.one()
    T = MultiPoly.var("t") if t is None else _as_poly(t)
    Tb = MultiPoly.var("tb") if tbar is None else _as_poly(tbar)
    out = R.zero()
    for k in range(lam.twice + 1):
        for n in range(lam.twice + 1):
            w = T**k * Tb**n / (sc.qfactorial(k, SYM) * sc.qfactorial(n, SYM))
            out = out + nc_matrix_element(lam, k, n) * w
    return out


def verify_factorization(lam) -> NCPoly:
    """tau_lam(t, tb) - tau_{lam-1/2}(q^{-1/2} t, q^{-1/2} tb) tau_{1/2}(q^{lam-1/2} t, q^{lam-1/2} tb)."""
    lam = _half(lam)
    if lam.twice < 2:
        raise DomainError("factorization is stated for lam >= 1")
    T, Tb = MultiPoly.var("t"), MultiPoly.var("tb")
    s = sc.u_pow(-1)
    r = sc.u_pow(lam.twice - 1)
    return nc_tau(lam) - nc_tau(lam - HALF, T * s, Tb * s) * nc_tau(HALF, T * r, Tb * r)


def classical_matrix_element(lam, k: int, n: int) -> MultiPoly:
    """Commutative oracle: k! n! times the t^k tb^n coefficient of (a + b tb + c t + d t tb)^{2 lam}."""
    from math import factorial

    tau = classical_tau_sl2(lam)
    it, itb = tau.vars.index("t"), tau.vars.index("tb")
    keep = tuple(v for v in tau.vars if v not in ("t", "tb"))
    terms = {}
    for m, c in tau.terms.items():
        if m[it] == k and m[itb] == n:
            terms[tuple(x for i, x in enumerate(m) if i not in (it, itb))] = c * factorial(k) * factorial(n)
    return MultiPoly(keep, terms)


# -- universal T-operator --------------------------------------------------------------

def borel_ring(s_plus: int = 1, s_minus: int = 1) -> RingSpec:
    """x+, Y = e^{x0/2}, Y^{-1}, x- with Y x+- = u^{s+-} x+- Y and [x+, x-] = 0."""
    up, um = sc.u_pow(s_plus), sc.u_pow(s_minus)
    rel = {
        ("Y", "xp"): [(up, ("xp", "Y"))],
        ("Yi", "xp"): [(1 / up, ("xp", "Yi"))],
        ("xm", "xp"): [(1, ("xp", "xm"))],
        ("xm", "Y"): [(1 / um, ("Y", "xm"))],
        ("xm", "Yi"): [(um, ("Yi", "xm"))],
    }
    return RingSpec.build(f"Borel(u^{s_plus},u^{s_minus})", ["xp", "Y", "Yi", "xm"], rel, inverses=[("Y", "Yi")])


def _irrep_primed(lam: HalfInt):
    """Matrices of T+' = T+ q^{-T0}, T-' = q^{T0} T- and the weights of the spin-lam irrep."""
    N = lam.twice + 1
    V = VermaModule(lam, N)
    Tp, Tm, _ = V.matrices()
    w = [V.weight(n) for n in range(N)]
    qT0 = [sc.u_pow(x.twice) for x in w]  # q^{T0} = u^{2w}
    Tp2 = [[Tp[i][j] * (1 / qT0[j]) for j in range(N)] for i in range(N)]
    Tm2 = [[qT0[i] * Tm[i][j] for j in range(N)] for i in range(N)]
    return Tp2, Tm2, w


def _kron(A, B):
    n, m = len(A), len(B)
    return [[A[i // m][j // m] * B[i % m][j % m] for j in range(n * m)] for i in range(n * m)]


def _diag(v):
    return [[v[i] if i == j else Rational(0) for j in range(len(v))] for i in range(len(v))]


def _x_degree(ring: RingSpec, word) -> int:
    return sum(1 for i in word if ring.gens[i] in ("xp", "xm"))


def _truncate(x: NCPoly, D: int) -> NCPoly:
    return NCPoly(x.ring, {w: c for w, c in x.terms.items() if _x_degree(x.ring, w) <= D})


def universal_T_matrix(ring: RingSpec, Tp, Tm, weights, D: int):
    """T = E_q(x+ T+') e^{x0 T0} E_{1/q}(x- T-') on a representation, entries in ``ring``."""
    Y, Yi = ring.gen("Y"), ring.gen("Yi")
    n = len(Tp)
    cart = []
    for i in range(n):
        row = []
        for j in range(n):
            if i != j:
                row.append(ring.zero())
                continue
            e = weights[i].twice  # e^{x0 w} = Y^{2w}
            row.append(Y**e if e >= 0 else Yi ** (-e))
        cart.append(row)
    up = nc_qexp_matrix(ring, ring.gen("xp"), Tp, 4, D)
    down = nc_qexp_matrix(ring, ring.gen("xm"), Tm, -4, D)
    return nc_matmul(nc_matmul(up, cart, ring), down, ring)


COPRODUCTS = {
    # (alpha, beta, gamma, delta): Delta(T+') = q^{alpha T0/2} x T+' + T+' x q^{beta T0/2},
    # Delta(T-') = q^{gamma T0/2} x T-' + T-' x q^{delta T0/2}
    "adopted": (2, 0, 0, -2),
    "printed": (0, -2, 2, 0),
}


@dataclass
class UniversalTReport:
    degree: int
    reps: tuple
    max_terms: int  # nonzero residual terms in the worst entry (0 means verified to degree D)
    coproduct: str
    s: int

    @property
    def ok(self) -> bool:
        return self.max_terms == 0

    @property
    def status(self) -> str:
        return f"verified to degree {self.degree}" if self.ok else "failed"


def _qpow_diag(weights, k: int):
    """q^{k T0 / 2} on a weight basis, i.e. u^{k * 2w}."""
    return _diag([sc.u_pow(k * w.twice) for w in weights])


def _sum(A, B):
    return [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(A, B)]


def universal_T(
    D: int,
    spins: Sequence = ((HALF, HALF), (HALF, HalfInt(2)), (HalfInt(2), HalfInt(2))),
    coproduct: str = "adopted",
    s: int = 2,
) -> UniversalTReport:
    """Check Delta_U(T) = T x_U T through total x-degree D on tensor products of irreps.

    T = E_q(x+ T+') e^{x0 T0} E_{1/q}(x- T-') with T+' = T+ q^{-T0}, T-' = q^{T0} T-,
    Y = e^{x0/2} satisfying Y x+- = u^s x+- Y, and the product of matrix entries
    taken first factor then second.
    """
    if D < 1:
        raise DomainError("degree must be at least 1")
    al, be, ga, de = COPRODUCTS[coproduct]
    ring = borel_ring(s, s)
    worst = 0
    for l1, l2 in spins:
        l1, l2 = _half(l1), _half(l2)
        Tp1, Tm1, w1 = _irrep_primed(l1)
        Tp2, Tm2, w2 = _irrep_primed(l2)
        n1, n2 = len(Tp1), len(Tp2)
        dTp = _sum(_kron(_qpow_diag(w1, al), Tp2), _kron(Tp1, _qpow_diag(w2, be)))
        dTm = _sum(_kron(_qpow_diag(w1, ga), Tm2), _kron(Tm1, _qpow_diag(w2, de)))
        wsum = [w1[i] + w2[j] for i in range(n1) for j in range(n2)]
        lhs = universal_T_matrix(ring, dTp, dTm, wsum, D)
        T1 = universal_T_matrix(ring, Tp1, Tm1, w1, D)
        T2 = universal_T_matrix(ring, Tp2, Tm2, w2, D)
        for i in range(n1 * n2):
            for j in range(n1 * n2):
                rhs = T1[i // n2][j // n2] * T2[i % n2][j % n2]
                worst = max(worst, len(_truncate(lhs[i][j] - rhs, D).terms))
    return UniversalTReport(D, tuple((str(a), str(b)) for a, b in spins), worst, coproduct, s)


# -- coordinate-ring representation ----------------------------------------------------------

@dataclass
class WoronowiczRep:
    q: float
    theta: complex
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def relation_residuals(self) -> dict:
        """Defining relations restricted to the interior span e_0 .. e_{N-2}."""
        a, b, c, d, q = self.a, self.b, self.c, self.d, self.q
        n = a.shape[0] - 1  # interior columns 0..n-1 = 0..N-2 when a is (N+1)x(N+1)
        cols = slice(0, n - 1 if n > 1 else 1)
        checks = {
            "ab=q ba": a @ b - q * (b @ a),
            "ac=q ca": a @ c - q * (c @ a),
            "bd=q db": b @ d - q * (d @ b),
            "cd=q dc": c @ d - q * (d @ c),
            "bc=cb": b @ c - c @ b,
            "ad-da=(q-1/q)bc": a @ d - d @ a - (q - 1 / q) * (b @ c),
            "ad-q bc=1": a @ d - q * (b @ c) - np.eye(a.shape[0]),
        }
        return {k: float(np.max(np.abs(v[:, cols]))) for k, v in checks.items()}


def woronowicz_rep(N: int, theta: complex, q: float = 0.5) -> WoronowiczRep:
    """(N+1)-dimensional truncation of the action on e_0 .. e_N (0 < q < 1)."""
    if theta == 0:
        raise DomainError("theta must be nonzero")
    if N < 4:
        raise DomainError("need N >= 4")
    if not 0 < q < 1:
        raise DomainError("the implemented convention needs 0 < q < 1")
    dim = N + 1
    a = np.zeros((dim, dim), dtype=complex)
    d = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        if k >= 1:
            a[k - 1, k] = np.sqrt(1 - q ** (2 * k))
        if k + 1 < dim:
            d[k + 1, k] = np.sqrt(1 - q ** (2 * k + 2))
    c = np.diag([theta * q**k for k in range(dim)]).astype(complex)
    b = np.diag([-(q ** (k + 1)) / theta for k in range(dim)]).astype(complex)
    return WoronowiczRep(q, theta, a, b, c, d)
