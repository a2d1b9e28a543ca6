"""Fundamental representations of SL(p) and SL_q(p) and their tau-functions.

Indices of psi_1 .. psi_p and of matrix entries are 1-based; dressed states
<m| of the first fundamental representation are 0-based (<m| ~ psi_{m+1}).

Quantum conventions: Delta(T_{+-i}) = q^{H_i} x T_{+-i} + T_{+-i} x q^{-H_i},
T_{-i} psi_j = delta_ij psi_{i+1}, H_i psi_j = lambda_i^(j) psi_j with
lambda_i^(j) = (delta_ij - delta_{i,j-1}) / 2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from taulab import scalars as sc
from taulab.ncalg import NCPoly, RingSpec, frt_ring, nc_matmul, nc_qexp_matrix, q_antisym_cols, q_antisym_rows, qplane_ring
from taulab.polyalg import MultiPoly, derive, det, qdiff, qshift
from taulab.scalars import DomainError, Rational
from taulab.schur import TimeVector, schur_table


class IndexError_(DomainError):
    """Index lists violating the ordering a minor or identity requires."""


def _increasing(idx: Sequence[int]) -> bool:
    return all(a < b for a, b in zip(idx, idx[1:]))


def _inversions(perm: Sequence[int]) -> int:
    return sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])


# -- classical minors and Pluecker identities -------------------------------------------

def minor_elem(g: Sequence[Sequence], rows: Sequence[int], cols: Sequence[int]):
    """<Psi_rows| g |Psi_cols> = det g^{rows[a]}_{cols[b]} (1-based, strictly increasing)."""
    rows, cols = tuple(rows), tuple(cols)
    p = len(g)
    if len(rows) != len(cols):
        raise IndexError_("row and column lists differ in length")
    if not (_increasing(rows) and _increasing(cols)):
        raise IndexError_("index lists must be strictly increasing")
    if any(not 1 <= i <= p for i in rows + cols):
        raise IndexError_(f"indices must lie in 1..{p}")
    if not rows:
        return Rational(1)
    sub = [[g[i - 1][j - 1] for j in cols] for i in rows]
    return det(sub, one=Rational(1) if not isinstance(g[0][0], MultiPoly) else MultiPoly.const(1))


def _signed_minor(g, rows, cols):
    """det of the submatrix in the given (possibly unsorted) order; 0 on repeats."""
    if len(set(rows)) < len(rows) or len(set(cols)) < len(cols):
        return Rational(0)
    sign = (-1) ** (_inversions(rows) + _inversions(cols))
    return sign * minor_elem(g, sorted(rows), sorted(cols))


@dataclass
class PluckerReport:
    p: int
    k: int
    k2: int
    cases: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.cases > 0


def plucker_classical_residual(g, I, J, I2, J2):
    """Residual of the bilinear minor identity for one index choice.

    LHS: antisymmetrization over j_1..j_{k+1} of g^(k)(I; j_1..j_k) g^(k')(I'; j_{k+1} J').
    RHS: antisymmetrization over i'_1..i'_{k'} of g^(k+1)(I i'; J) g^(k'-1)(I' minus i'; J').
    Both are written as sums over splittings, the unordered sum being redundant.
    """
    k = len(I)
    lhs = Rational(0)
    for a in range(k + 1):
        rest = J[:a] + J[a + 1 :]
        lhs = lhs + (-1) ** (k - a) * _signed_minor(g, I, rest) * _signed_minor(g, I2, (J[a],) + tuple(J2))
    rhs = Rational(0)
    for b in range(len(I2)):
        rest = I2[:b] + I2[b + 1 :]
        rhs = rhs + (-1) ** b * _signed_minor(g, tuple(I) + (I2[b],), J) * _signed_minor(g, rest, J2)
    return lhs - rhs


def verify_plucker_classical(p: int, k: int, k2: int, g: Sequence[Sequence] | None = None, rng=None) -> PluckerReport:
    """All index choices with increasing I, J, I', (j_{k+1}, J') for one exact matrix g."""
    if k + 1 > p or k2 < 1 or k2 > p:
        raise DomainError("need k + 1 <= p and 1 <= k' <= p")
    if g is None:
        import random

        rng = rng or random.Random(0)
        g = [[Rational(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(p)] for _ in range(p)]
    rep = PluckerReport(p, k, k2, 0)
    rng_idx = range(1, p + 1)
    for I in itertools.combinations(rng_idx, k):
        for J in itertools.combinations(rng_idx, k + 1):
            for I2 in itertools.combinations(rng_idx, k2):
                for J2 in itertools.combinations(rng_idx, k2 - 1):
                    rep.cases += 1
                    r = plucker_classical_residual(g, I, J, I2, J2)
                    if r != 0:
                        rep.failures.append((I, J, I2, J2))
    return rep


# -- quantum minors and Pluecker identities --------------------------------------------

def quantum_minor(ring: RingSpec, rows: Sequence[int], cols: Sequence[int]) -> NCPoly:
    """q-minor in A(GL_q(p)): column q-antisymmetrization when the columns increase,
    otherwise row q-antisymmetrization when the rows increase; zero on repeated indices."""
    rows, cols = tuple(rows), tuple(cols)
    if len(rows) != len(cols):
        raise IndexError_("row and column lists differ in length")
    if not rows:
        return ring.one()
    if len(set(rows)) < len(rows) or len(set(cols)) < len(cols):
        return ring.zero()
    if _increasing(cols):
        return q_antisym_cols(ring, rows, cols)
    if _increasing(rows):
        return q_antisym_rows(ring, rows, cols)
    raise IndexError_(f"q-minor needs increasing rows or columns, got {rows} / {cols}")


def plucker_quantum_residual(ring: RingSpec, I, J, I2, J2) -> NCPoly:
    """q-analogue of plucker_classical_residual, signs (-q)^{inversions}.

    Requires I, J, I' and (j_{k+1}, J') strictly increasing.
    """
    I, J, I2, J2 = map(tuple, (I, J, I2, J2))
    k = len(I)
    if len(J) != k + 1 or len(J2) != len(I2) - 1:
        raise IndexError_("shape mismatch")
    for name, idx in (("I", I), ("J", J), ("I'", I2), ("(j_{k+1}, J')", (J[-1],) + J2)):
        if not _increasing(idx):
            raise IndexError_(f"{name} = {idx} must be strictly increasing")
    mq = -sc.u_pow(2)
    lhs = ring.zero()
    for a in range(k + 1):
        rest = J[:a] + J[a + 1 :]
        lhs = lhs + (quantum_minor(ring, I, rest) * quantum_minor(ring, I2, (J[a],) + J2)) * (mq ** (k - a))
    rhs = ring.zero()
    for b in range(len(I2)):
        rest = I2[:b] + I2[b + 1 :]
        rhs = rhs + (quantum_minor(ring, I + (I2[b],), J) * quantum_minor(ring, rest, J2)) * (mq**b)
    return lhs - rhs


def verify_plucker_quantum(p: int, k: int, k2: int) -> PluckerReport:
    """Exhaustive check over admissible index choices in frt_ring(p)."""
    if p > 4:
        raise DomainError("quantum Pluecker checks are limited to p <= 4")
    if (k, k2) not in ((1, 1), (1, 2), (2, 1)):
        raise DomainError("(k, k') must be one of (1,1), (1,2), (2,1)")
    if k + 1 > p:
        raise DomainError("need k + 1 <= p")
    ring = frt_ring(p)
    rep = PluckerReport(p, k, k2, 0)
    rng_idx = range(1, p + 1)
    for I in itertools.combinations(rng_idx, k):
        for J in itertools.combinations(rng_idx, k + 1):
            for I2 in itertools.combinations(rng_idx, k2):
                for J2 in itertools.product(rng_idx, repeat=k2 - 1):
                    if not _increasing((J[-1],) + J2):
                        continue
                    rep.cases += 1
                    if not plucker_quantum_residual(ring, I, J, I2, J2).is_zero():
                        rep.failures.append((I, J, I2, J2))
    return rep


# -- classical tau in the fundamental representations -----------------------------------------

def classical_T(p: int, k: int, sign: int = +1) -> list:
    """T_+^(k) (sign=+1): units on the k-th upper diagonal; T_-^(k): k-th lower diagonal."""
    if not 1 <= k <= p - 1:
        raise DomainError("need 1 <= k <= p - 1")
    return [[Rational(1) if (j - i == k if sign > 0 else i - j == k) else Rational(0) for j in range(p)] for i in range(p)]


def _smat(A, B):
    n = len(A)
    return [[sum((A[i][l] * B[l][j] for l in range(n)), Rational(0)) for j in range(n)] for i in range(n)]


def commutator_residuals(p: int) -> int:
    """Number of nonzero entries over all [T_+^(k), T_+^(l)] and [T_-^(k), T_-^(l)]."""
    bad = 0
    for s in (+1, -1):
        for k in range(1, p):
            for l in range(1, p):
                A, B = classical_T(p, k, s), classical_T(p, l, s)
                AB, BA = _smat(A, B), _smat(B, A)
                bad += sum(1 for i in range(p) for j in range(p) if AB[i][j] != BA[i][j])
    return bad


def _times(t, flavor: str, K: int) -> TimeVector:
    if t is None:
        return TimeVector.symbolic(flavor, K)
    return t if isinstance(t, TimeVector) else TimeVector.of(flavor, t)


def tau1_entry(m: int, mbar: int, g: Sequence[Sequence], t: TimeVector, tbar: TimeVector) -> MultiPoly:
    """tau_1^{m mbar} = sum_{k, kbar} P_k(t) g_{m+k, mbar+kbar} P_kbar(tbar) (0-based states)."""
    p = len(g)
    P = schur_table(t, p)
    Pb = schur_table(tbar, p)
    out = MultiPoly.zero()
    for k in range(p - m):
        for kb in range(p - mbar):
            c = g[m + k][mbar + kb]
            if c != 0 and P[k] and Pb[kb]:
                out = out + P[k] * Pb[kb] * c
    return out


def tau_fund(n: int, g: Sequence[Sequence], t=None, tbar=None) -> MultiPoly:
    """det_{0 <= m, mbar < n} tau_1^{m mbar}; tau_0 = 1."""
    p = len(g)
    if n < 0 or n > p:
        raise DomainError(f"need 0 <= n <= p = {p}")
    t = _times(t, "t", p - 1)
    tbar = _times(tbar, "tbar", p - 1)
    if n == 0:
        return MultiPoly.const(1)
    M = [[tau1_entry(m, mb, g, t, tbar) for mb in range(n)] for m in range(n)]
    return det(M, one=MultiPoly.const(1))


def verify_derivative_property(g, K: int | None = None) -> list:
    """tau_1^{m mbar} - d_{t_m} d_{tb_mbar} tau_1 and - d_{t_1}^m d_{tb_1}^mbar tau_1."""
    p = len(g)
    K = K or max(p - 1, 1)
    t, tb = TimeVector.symbolic("t", K), TimeVector.symbolic("tbar", K)
    tau1 = tau1_entry(0, 0, g, t, tb)
    out = []
    for m in range(p):
        for mb in range(p):
            e = tau1_entry(m, mb, g, t, tb)
            a = tau1 if m == 0 else derive(tau1, f"t{m}")
            a = a if mb == 0 else derive(a, f"tb{mb}")
            b = derive(derive(tau1, "t1", m), "tb1", mb)
            out.append((e - a, e - b))
    return out


def verify_toda_fund(g: Sequence[Sequence], n: int) -> MultiPoly:
    """tau_n d dbar tau_n - d tau_n dbar tau_n - tau_{n+1} tau_{n-1} with d = d/dt_1."""
    p = len(g)
    if not 1 <= n <= p - 1:
        raise DomainError("need 1 <= n <= p - 1")
    K = max(p - 1, 1)
    t, tb = TimeVector.symbolic("t", K), TimeVector.symbolic("tbar", K)
    tn = tau_fund(n, g, t, tb)
    dt, dtb = derive(tn, "t1"), derive(tn, "tb1")
    return tn * derive(dt, "tb1") - dt * dtb - tau_fund(n + 1, g, t, tb) * tau_fund(n - 1, g, t, tb)


# -- U_q(sl_p) fundamental representations -------------------------------------------------

def weight(i: int, j: int) -> Rational:
    """lambda_i^(j) = (delta_ij - delta_{i,j-1}) / 2."""
    return Rational(int(i == j) - int(i == j - 1), 2)


def _qH(i: int, j: int, power: int):
    """Eigenvalue of q^{power H_i} on psi_j: u^{2 power lambda} = u^{power (delta_ij - delta_{i,j-1})}."""
    return sc.u_pow(power * (int(i == j) - int(i == j - 1)))


Vector = dict  # tensor word (tuple of 1-based indices) -> scalar


def _add(acc: dict, key, c) -> None:
    v = acc.get(key, Rational(0)) + c
    if v == 0:
        acc.pop(key, None)
    else:
        acc[key] = v


@dataclass
class FundRep:
    """F^(k) of U_q(sl_p) realized on q-antisymmetrized words in F^{x k}."""

    p: int
    k: int
    quantum: bool = True
    basis: list = field(default_factory=list)  # increasing index tuples
    vectors: dict = field(default_factory=dict)  # index tuple -> Vector

    def q(self):
        return sc.u_pow(2) if self.quantum else Rational(1)

    def qH(self, i: int, j: int, power: int):
        return _qH(i, j, power) if self.quantum else Rational(1)

    def act_simple(self, i: int, word: tuple, sign: int) -> dict:
        """Delta^{k-1}(T_{sign i}) on a tensor word, sum over the acting slot."""
        out: dict = {}
        for m, j in enumerate(word):
            if sign > 0:
                if j != i + 1:
                    continue
                new = i
            else:
                if j != i:
                    continue
                new = i + 1
            if not 1 <= new <= self.p:
                continue
            c = Rational(1)
            for a in word[:m]:
                c = c * self.qH(i, a, +1)
            for a in word[m + 1 :]:
                c = c * self.qH(i, a, -1)
            _add(out, word[:m] + (new,) + word[m + 1 :], c)
        return out

    def act(self, i: int, vec: Vector, sign: int) -> Vector:
        out: dict = {}
        for w, c in vec.items():
            for w2, c2 in self.act_simple(i, w, sign).items():
                _add(out, w2, c * c2)
        return out

    def cartan(self, i: int, vec: Vector) -> Vector:
        """H_i on tensor words (additive in the slots)."""
        out: dict = {}
        for w, c in vec.items():
            _add(out, w, c * sum((weight(i, j) for j in w), Rational(0)))
        return out

    def highest_weight_residual(self) -> int:
        """Number of nonzero components of Delta(T_{+i}) Psi_{1..k} over all i."""
        top = self.vectors[tuple(range(1, self.k + 1))]
        return sum(len(self.act(i, top, +1)) for i in range(1, self.p))

    def closure_residual(self) -> int:
        """Nonzero components of Delta(T_{+-i}) Psi outside the span of the basis."""
        bad = 0
        for idx, vec in self.vectors.items():
            for i in range(1, self.p):
                for s in (+1, -1):
                    img = self.act(i, vec, s)
                    bad += len(_residual_after_projection(img, self))
        return bad

    def lowering_residuals(self) -> int:
        """k = 2: Delta(T_{-l}) Psi_ij = delta_lj Psi_{i,j+1} + delta_li Psi_{i+1,j} (1 - delta_{i+1,j})."""
        if self.k != 2:
            raise DomainError("the lowering pattern is stated for k = 2")
        bad = 0
        for (i, j), vec in self.vectors.items():
            for l in range(1, self.p):
                img = self.act(l, vec, -1)
                expect: dict = {}
                if l == j and j + 1 <= self.p:
                    for w, c in self.vectors[(i, j + 1)].items():
                        _add(expect, w, c)
                if l == i and i + 1 != j:
                    for w, c in self.vectors[(i + 1, j)].items():
                        _add(expect, w, c)
                diff = dict(img)
                for w, c in expect.items():
                    _add(diff, w, -c)
                bad += len(diff)
        return bad

    def weight_residuals(self) -> int:
        """Each Psi_I is an H_i eigenvector with eigenvalue sum_a lambda_i^(I_a)."""
        bad = 0
        for idx, vec in self.vectors.items():
            for i in range(1, self.p):
                lam = sum((weight(i, j) for j in idx), Rational(0))
                img = self.cartan(i, vec)
                for w, c in vec.items():
                    if img.get(w, Rational(0)) != lam * c:
                        bad += 1
        return bad


def _residual_after_projection(img: Vector, rep: FundRep) -> dict:
    """Subtract the basis expansion read off from sorted words; what remains is outside the span."""
    rest = dict(img)
    for idx, vec in rep.vectors.items():
        lead = vec.get(idx)
        coeff = rest.get(idx)
        if coeff is None:
            continue
        f = coeff / lead
        for w, c in vec.items():
            _add(rest, w, -f * c)
    return rest


def uq_fund_basis(p: int, k: int, quantum: bool = True) -> FundRep:
    """Psi_{i_1..i_k} = sum_P (-q)^{inv P} psi_{i_P(1)} x ... x psi_{i_P(k)}, i_1 < ... < i_k."""
    if not 1 <= k <= p - 1:
        raise DomainError("need 1 <= k <= p - 1")
    rep = FundRep(p, k, quantum)
    mq = -rep.q()
    for idx in itertools.combinations(range(1, p + 1), k):
        vec: dict = {}
        for perm in itertools.permutations(range(k)):
            _add(vec, tuple(idx[a] for a in perm), mq ** _inversions(perm))
        rep.basis.append(idx)
        rep.vectors[idx] = vec
    return rep


# -- tau_2 of the second fundamental representation ------------------------------------------------

XI = ("x1", "x2")
XIB = ("xb1", "xb2")


def generic_tau1(copy: str = "") -> MultiPoly:
    """Generic multilinear function of xi_1, xi_2, xibar_1, xibar_2 with 16 formal coefficients."""
    out = MultiPoly.zero()
    for e in itertools.product((0, 1), repeat=4):
        coeff = MultiPoly.var("c" + "".join(map(str, e)))
        mono = MultiPoly.monomial({v + copy: k for v, k in zip(XI + XIB, e) if k})
        out = out + coeff * mono
    return out


def D_xi(f: MultiPoly, var: str) -> MultiPoly:
    """xi^{-1} (M^{+2} - 1)/(q^2 - 1): the q^2-Jackson derivative."""
    return qdiff(f, var, 0, sc.NONSYMMETRIC)


def Dbar_xi(f: MultiPoly, var: str) -> MultiPoly:
    """[(M^{-2} - 1)/(q^{-2} - 1) f] xibar^{-1}: Jackson derivative of base q^{-2}."""
    out = MultiPoly.zero(f.vars)
    if var not in f.vars:
        return out
    i = f.vars.index(var)
    terms = {}
    for m, c in f.terms.items():
        n = m[i]
        if n == 0:
            continue
        e = list(m)
        e[i] -= 1
        terms[tuple(e)] = c * sc.qnum_base(n, -4)
    return MultiPoly(f.vars, terms)


def M(f: MultiPoly, var: str, power: int) -> MultiPoly:
    """M^{+-}: var -> q^{power} var."""
    return qshift(f, var, 2 * power)


def _entry(tau: MultiPoly, m: int, mb: int, copy: str) -> MultiPoly:
    """tau_1^{m mbar} for m, mbar in {0, 1}: D_{xi_1}^m Dbar_{xibar_1}^mbar tau_1."""
    out = tau
    if m:
        out = D_xi(out, "x1" + copy)
    if mb:
        out = Dbar_xi(out, "xb1" + copy)
    return out


def _shift(f: MultiPoly, copy: str, **powers) -> MultiPoly:
    for name, k in powers.items():
        f = M(f, name + copy, k)
    return f


def tau2_four_term(tau_a: MultiPoly, tau_b: MultiPoly) -> MultiPoly:
    """The four-term twisted expansion; tau_a lives in copy 'A', tau_b in copy 'B'."""
    q = sc.u_pow(2)
    A = lambda m, mb, **kw: _shift(_entry(tau_a, m, mb, "A"), "A", **kw)
    B = lambda m, mb, **kw: _shift(_entry(tau_b, m, mb, "B"), "B", **kw)
    return (
        A(0, 0, x1=1, x2=-1) * B(1, 1, xb1=1)
        - A(0, 1, x1=1, x2=-1) * B(1, 0, xb1=-1, xb2=1) * q
        - A(1, 0, x1=-1) * B(0, 1, xb1=1) * q
        + A(1, 1, x1=-1) * B(0, 0, xb1=-1, xb2=1) * (q * q)
    )


# Operators on the pair (slot A, slot B) as lists of per-slot steps applied right to left.
Step = tuple  # ("D" | "Db" | "M", var, power)


def _apply_steps(f: MultiPoly, steps: Sequence[Step], copy: str) -> MultiPoly:
    for kind, var, k in reversed(steps):
        if kind == "D":
            f = D_xi(f, var + copy)
        elif kind == "Db":
            f = Dbar_xi(f, var + copy)
        else:
            f = M(f, var + copy, k)
    return f


def _apply_pair(ops: Sequence[tuple], tau_a: MultiPoly, tau_b: MultiPoly) -> MultiPoly:
    """sum_c coeff_c (opA_c tau_a)(opB_c tau_b), each op a list of steps (leftmost applied last)."""
    out = MultiPoly.zero()
    for coeff, left, right in ops:
        out = out + _apply_steps(tau_a, left, "A") * _apply_steps(tau_b, right, "B") * coeff
    return out


def _compose(X: Sequence[tuple], Y: Sequence[tuple]) -> list:
    """Product of two sums of tensor operators: (X Y) acts as X after Y."""
    return [(cx * cy, list(lx) + list(ly), list(rx) + list(ry)) for cx, lx, rx in X for cy, ly, ry in Y]


def operator_form(variant: str = "adopted") -> list:
    """(calD^R - q calD^L)(calDbar^R - q calDbar^L) as a sum of tensor operators.

    variant 'adopted': calD^L = M1^- D1 x I, calD^R = M1^+ M2^- x D1,
    calDbar^L = Db1 x Mb1^- Mb2^+, calDbar^R = I x Mb1^+ Db1.
    variants 'compact-printed' and 'compact-fixed': prefactor M1^- x Mb1^+ times
    frakD^L = D1 x I, frakD^R = M1^{-+2} M2^{+-1} x D1, frakDbar^L = Db1 x Mb1^{-2} Mb2^{+1}, frakDbar^R = I x Db1,
    with the printed exponent sign -a_i.a_j on frakD^R ('compact-printed') or +a_i.a_j ('compact-fixed').
    """
    q = sc.u_pow(2)
    if variant == "adopted":
        DL = [(Rational(1), [("M", "x1", -1), ("D", "x1", 0)], [])]
        DR = [(Rational(1), [("M", "x1", 1), ("M", "x2", -1)], [("D", "x1", 0)])]
        DbL = [(Rational(1), [("Db", "xb1", 0)], [("M", "xb1", -1), ("M", "xb2", 1)])]
        DbR = [(Rational(1), [], [("M", "xb1", 1), ("Db", "xb1", 0)])]
        pre = [(Rational(1), [], [])]
    elif variant in ("compact-printed", "compact-fixed"):
        s = -1 if variant == "compact-printed" else 1
        DL = [(Rational(1), [("D", "x1", 0)], [])]
        DR = [(Rational(1), [("M", "x1", 2 * s), ("M", "x2", -s)], [("D", "x1", 0)])]
        DbL = [(Rational(1), [("Db", "xb1", 0)], [("M", "xb1", -2), ("M", "xb2", 1)])]
        DbR = [(Rational(1), [], [("Db", "xb1", 0)])]
        pre = [(Rational(1), [("M", "x1", -1)], [("M", "xb1", 1)])]
    else:
        raise DomainError(f"unknown operator variant {variant!r}")
    first = DR + [(-q * c, l, r) for c, l, r in DL]
    second = DbR + [(-q * c, l, r) for c, l, r in DbL]
    return _compose(pre, _compose(first, second))


def _diagonal(f: MultiPoly) -> MultiPoly:
    """Identify both tensor slots: xA, xB -> x."""
    from taulab.polyalg import substitute

    binds = {}
    for v in XI + XIB:
        binds[v + "A"] = MultiPoly.var(v)
        binds[v + "B"] = MultiPoly.var(v)
    return substitute(f, binds)


@dataclass
class Tau2Report:
    operator_residual: MultiPoly  # four-term minus adopted operator form
    compact_fixed_residual: MultiPoly
    compact_printed_residual: MultiPoly
    order_swapped_residual: MultiPoly  # Mb1^+ Db1 replaced by Db1 Mb1^+
    classical_residual: MultiPoly  # u -> 1 against 2 (tau tau^{11} - tau^{10} tau^{01})
    tau2: MultiPoly

    @property
    def ok(self) -> bool:
        return (
            self.operator_residual.is_zero()
            and self.compact_fixed_residual.is_zero()
            and self.classical_residual.is_zero()
            and not self.order_swapped_residual.is_zero()
        )


def verify_tau2_twist(tau1: MultiPoly | None = None) -> Tau2Report:
    """Four-term twisted tau_2 against the difference-operator forms on tau_1 x tau_1."""
    base = tau1 if tau1 is not None else generic_tau1()
    ren = lambda f, c: MultiPoly(tuple(v + c if v in XI + XIB else v for v in f.vars), f.terms)
    ta, tb = ren(base, "A"), ren(base, "B")
    four = _diagonal(tau2_four_term(ta, tb))
    adopted = _diagonal(_apply_pair(operator_form("adopted"), ta, tb))
    fixed = _diagonal(_apply_pair(operator_form("compact-fixed"), ta, tb))
    printed = _diagonal(_apply_pair(operator_form("compact-printed"), ta, tb))
    swapped_ops = []
    for c, l, r in operator_form("adopted"):
        r2 = [("Db", "xb1", 0), ("M", "xb1", 1)] if r == [("M", "xb1", 1), ("Db", "xb1", 0)] else r
        swapped_ops.append((c, l, r2))
    swapped = _diagonal(_apply_pair(swapped_ops, ta, tb))
    t = base
    d1, db1 = derive(t, "x1"), derive(t, "xb1")
    classical = four.at_u1() - (t * derive(d1, "xb1") - d1 * db1).at_u1() * 2
    return Tau2Report(four - adopted, four - fixed, four - printed, four - swapped, classical, four)


# -- co-multiplication rule for the product of tau_1's ------------------------------------------

def _F1(p: int):
    """T_{+i} = E_{i,i+1}, T_{-i} = E_{i+1,i} (0-based matrices over psi_1..psi_p) and q^{2H_i} diagonals."""
    Tp, Tm, q2H = {}, {}, {}
    for i in range(1, p):
        Tp[i] = [[Rational(int(a == i - 1 and b == i)) for b in range(p)] for a in range(p)]
        Tm[i] = [[Rational(int(a == i and b == i - 1)) for b in range(p)] for a in range(p)]
        q2H[i] = [_qH(i, j, 2) for j in range(1, p + 1)]
    return Tp, Tm, q2H


def _kron(A, B):
    n, m = len(A), len(B)
    return [[A[i // m][j // m] * B[i % m][j % m] for j in range(n * m)] for i in range(n * m)]


def _diag(v):
    return [[v[i] if i == j else Rational(0) for j in range(len(v))] for i in range(len(v))]


def _ident(n):
    return _diag([Rational(1)] * n)


def _msum(A, B):
    return [[x + y for x, y in zip(r, s)] for r, s in zip(A, B)]


def xi_ring(p: int, bar_exponent: int = -2) -> RingSpec:
    """xi_i xi_j = q^{-a_i.a_j} xi_j xi_i (i < j); xibar likewise with u^{bar_exponent} per neighbour pair.

    PBW order xi_1 .. xi_r, xibar_1 .. xibar_r; xi and xibar commute.
    """
    r = p - 1
    names = [f"xi{i}" for i in range(1, r + 1)] + [f"xib{i}" for i in range(1, r + 1)]
    ex = {}
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            aij = -1 if j == i + 1 else 0
            # xi_j xi_i = q^{a_i.a_j} xi_i xi_j = u^{2 aij} xi_i xi_j
            ex[(f"xi{i}", f"xi{j}")] = 2 * aij
            ex[(f"xib{i}", f"xib{j}")] = bar_exponent * (-aij)
    return qplane_ring(names, ex)


def _evolution(ring, Tlist, coeffs, base_upow, order):
    """prod_s E(coeff_s X_s) in the given order of s."""
    n = len(Tlist[order[0]])
    out = [[ring.scalar(int(i == j)) for j in range(n)] for i in range(n)]
    for s in order:
        out = nc_matmul(out, nc_qexp_matrix(ring, coeffs[s], Tlist[s], base_upow), ring)
    return out


@dataclass
class CoprodReport:
    p: int
    n: int
    checked: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures and self.checked > 0


def verify_coprod_product(
    p: int = 3, n: int = 2, bar_exponent: int = -2, bar_base: int = -4, g: Sequence[Sequence] | None = None, seed: int = 0
) -> CoprodReport:
    """<j_1 j_2| Delta(U) (g x g) Delta(Ubar) |jb_1 jb_2> against the ordered product of twisted tau_1's.

    U = prod_s E_q(xi_s T_s) (s increasing), Ubar = prod_s E_{Q}(xibar_s T_{-s}) (s decreasing)
    with Q = u**bar_base.  Delta^{n-1}(T_{+i}) = sum_m I..I x T_i x q^{-2H_i}..q^{-2H_i},
    Delta^{n-1}(T_{-i}) = sum_m q^{2H_i}..q^{2H_i} x T_{-i} x I..I.
    Since xi, xibar commute with g, the identity splits entrywise into a U part and a Ubar part,
    which are compared for every external and internal index.
    """
    if n != 2:
        raise DomainError("the co-multiplication check is implemented for n = 2")
    ring = xi_ring(p, bar_exponent)
    Tp, Tm, q2H = _F1(p)
    r = p - 1
    I = _ident(p)
    qm2H = {i: [1 / x for x in q2H[i]] for i in q2H}
    dTp = {i: _msum(_kron(Tp[i], _diag(qm2H[i])), _kron(I, Tp[i])) for i in range(1, r + 1)}
    dTm = {i: _msum(_kron(Tm[i], I), _kron(_diag(q2H[i]), Tm[i])) for i in range(1, r + 1)}
    xi = {i: ring.gen(f"xi{i}") for i in range(1, r + 1)}
    xib = {i: ring.gen(f"xib{i}") for i in range(1, r + 1)}
    up_order = list(range(1, r + 1))
    down_order = list(range(r, 0, -1))
    dU = _evolution(ring, dTp, xi, 4, up_order)
    dUb = _evolution(ring, dTm, xib, bar_base, down_order)
    failures = []
    checked = 0
    # U part: <j1 j2| dU |k1 k2> = A_1 A_2, slot 1 twisted by q^{-2 h_{i, j2}}.
    for j1, j2, k1, k2 in itertools.product(range(p), repeat=4):
        tw1 = {i: xi[i] * _qH(i, j2 + 1, -2) for i in xi}
        A1 = _evolution(ring, Tp, tw1, 4, up_order)[j1][k1]
        A2 = _evolution(ring, Tp, xi, 4, up_order)[j2][k2]
        checked += 1
        if not (dU[j1 * p + j2][k1 * p + k2] - A1 * A2).is_zero():
            failures.append(("U", j1, j2, k1, k2))
    # Ubar part: <kb1 kb2| dUb |jb1 jb2> = B_1 B_2, slot 2 twisted by q^{2 h_{i, jb1}}.
    for kb1, kb2, jb1, jb2 in itertools.product(range(p), repeat=4):
        tw2 = {i: xib[i] * _qH(i, jb1 + 1, 2) for i in xib}
        B1 = _evolution(ring, Tm, xib, bar_base, down_order)[kb1][jb1]
        B2 = _evolution(ring, Tm, tw2, bar_base, down_order)[kb2][jb2]
        checked += 1
        if not (dUb[kb1 * p + kb2][jb1 * p + jb2] - B1 * B2).is_zero():
            failures.append(("Ubar", kb1, kb2, jb1, jb2))
    # Full sandwich with an exact g: sum over internal states against tau_1 x tau_1 in PBW order.
    if g is None:
        import random

        rng = random.Random(seed)
        g = [[Rational(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(p)] for _ in range(p)]
    U1 = {}
    Ub2 = {}
    for j2 in range(p):
        U1[j2] = _evolution(ring, Tp, {i: xi[i] * _qH(i, j2 + 1, -2) for i in xi}, 4, up_order)
    for jb1 in range(p):
        Ub2[jb1] = _evolution(ring, Tm, {i: xib[i] * _qH(i, jb1 + 1, 2) for i in xib}, bar_base, down_order)
    U0 = _evolution(ring, Tp, xi, 4, up_order)
    Ub0 = _evolution(ring, Tm, xib, bar_base, down_order)

    def tau1(Umat, Ubmat, j, jb):
        acc = ring.zero()
        for k in range(p):
            for kb in range(p):
                if g[k][kb] != 0 and Umat[j][k].terms and Ubmat[kb][jb].terms:
                    acc = acc + Umat[j][k] * Ubmat[kb][jb] * g[k][kb]
        return acc

    gg = _kron(g, g)
    for j1, j2, jb1, jb2 in itertools.product(range(p), repeat=4):
        lhs = ring.zero()
        for a in range(p * p):
            if not dU[j1 * p + j2][a].terms:
                continue
            for b in range(p * p):
                if gg[a][b] != 0 and dUb[b][jb1 * p + jb2].terms:
                    lhs = lhs + dU[j1 * p + j2][a] * dUb[b][jb1 * p + jb2] * gg[a][b]
        rhs = tau1(U1[j2], Ub0, j1, jb1) * tau1(U0, Ub2[jb1], j2, jb2)
        checked += 1
        if not (lhs - rhs).is_zero():
            failures.append(("full", j1, j2, jb1, jb2))
    return CoprodReport(p, n, checked, failures)
