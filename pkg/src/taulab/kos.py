"""Difference (KOS) hierarchy: q-Schur determinant tau and its bilinear identities.

Times s, sbar enter through products of q-exponentials (see taulab.schur).
D_s is the nonsymmetric Jackson derivative in s_1, D f = (M f - f) / ((q^2 - 1) s_1)
with M : s_1 -> q^2 s_1, so that D P^(q)_j = P^(q)_{j-1}.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

from taulab import scalars as sc
from taulab.polyalg import MultiPoly, det, qdiff, qshift
from taulab.scalars import DomainError
from taulab.schur import BASE_Q2K, TimeVector, qschur_poly, qschur_table, schur_poly, times_from_s
from taulab.tau_classical import GrassmannianKernel, tau_det

S1, SB1 = "s1", "sb1"
DEFAULT_K = 3
SHIFT_UPOW = 4  # M^+ : s_1 -> q^2 s_1, the shift inside the Jackson derivative


def D(f: MultiPoly, var: str, variant: str = sc.NONSYMMETRIC) -> MultiPoly:
    return qdiff(f, var, 0, variant)


def M_plus(f: MultiPoly, var: str, upow: int = SHIFT_UPOW) -> MultiPoly:
    return qshift(f, var, upow)


@dataclass
class KosTau:
    """Kernel R with q-dressed entries C^k_l(s, sbar) = sum_ij P^(q)_{i-k}(s) R_ij P^(q)_{j-l}(sbar), 1-based."""

    R: GrassmannianKernel
    s: TimeVector
    sbar: TimeVector
    base: str = BASE_Q2K
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def symbolic(cls, R: GrassmannianKernel, K: int = DEFAULT_K, base: str = BASE_Q2K) -> "KosTau":
        return cls(R, TimeVector.symbolic("s", K), TimeVector.symbolic("sbar", K), base)

    def entry(self, k: int, l: int) -> MultiPoly:
        key = (k, l)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        n = self.R.size
        P = qschur_table(self.s, n, self.base)
        Pb = qschur_table(self.sbar, n, self.base)
        out = MultiPoly.zero()
        for i in range(max(k, 1), n + 1):
            row = MultiPoly.zero()
            for j in range(max(l, 1), n + 1):
                c = self.R.R[i - 1][j - 1]
                if c != 0 and Pb[j - l]:
                    row = row + Pb[j - l] * c
            if row and P[i - k]:
                out = out + P[i - k] * row
        self._cache[key] = out
        return out

    def shift_residuals(self, window: int | None = None) -> list:
        """D_s C^k_l - C^{k+1}_l and D_sbar C^k_l - C^k_{l+1} over the window."""
        w = window or self.R.size
        out = []
        for k in range(1, w + 1):
            for l in range(1, w + 1):
                c = self.entry(k, l)
                out.append(D(c, S1) - self.entry(k + 1, l))
                out.append(D(c, SB1) - self.entry(k, l + 1))
        return out

    def tau(self, n: int, form: str = "derivative") -> MultiPoly:
        """det_{1<=k,l<=n} D^{k-1} Dbar^{l-1} C^1_1 (``form='derivative'``) or det C^k_l (``'entries'``)."""
        if n < 0:
            return MultiPoly.zero()
        if n == 0:
            return MultiPoly.const(1)
        if form == "entries":
            return det([[self.entry(k, l) for l in range(1, n + 1)] for k in range(1, n + 1)])
        if form != "derivative":
            raise DomainError(f"unknown form {form!r}")
        rows = []
        col = self.entry(1, 1)
        for k in range(n):
            row, x = [], col
            for l in range(n):
                row.append(x)
                x = D(x, SB1)
            rows.append(row)
            col = D(col, S1)
        return det(rows)


def kos_tau(n: int, R: GrassmannianKernel, s: TimeVector | None = None, sbar: TimeVector | None = None, base: str = BASE_Q2K) -> MultiPoly:
    s = s if s is not None else TimeVector.symbolic("s", DEFAULT_K)
    sbar = sbar if sbar is not None else TimeVector.symbolic("sbar", DEFAULT_K)
    return KosTau(R, s, sbar, base).tau(n)


def keystone_residual(n: int, R: GrassmannianKernel, s: TimeVector | None = None, sbar: TimeVector | None = None) -> MultiPoly:
    """kos_tau(n, R, s, sbar) - tau_det(n, R, t(s), tbar(sbar))."""
    s = s if s is not None else TimeVector.symbolic("s", DEFAULT_K)
    sbar = sbar if sbar is not None else TimeVector.symbolic("sbar", DEFAULT_K)
    K = max(R.size - 1, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        classical = tau_det(n, R, times_from_s(s, K), times_from_s(sbar, K))
    return kos_tau(n, R, s, sbar) - classical


def qschur_keystone(k_max: int = 8, K: int | None = None, base: str = BASE_Q2K) -> list:
    """P^(q)_k(s) - P_k(times_from_s(s)) for k = 0..k_max, symbolic s with K = k_max components."""
    K = K or k_max
    s = TimeVector.symbolic("s", K)
    t = times_from_s(s, max(k_max, 1), base)
    return [qschur_poly(k, s, base) - schur_poly(k, t) for k in range(k_max + 1)]


KOS_FORMS = ("adopted", "printed")


def kos_residual(taus: dict, k: int, form: str = "adopted", upow: int = SHIFT_UPOW) -> MultiPoly:
    """tau_k D Dbar tau_k - D tau_k Dbar tau_k - (shifted product of the neighbours).

    adopted: tau_{k+1} M^+ Mbar^+ tau_{k-1}; printed: tau_{k-1} M^+ Mbar^+ tau_{k+1}.
    """
    tk = taus[k]
    d = D(tk, S1)
    lhs = tk * D(d, SB1) - d * D(tk, SB1)
    if form == "adopted":
        near, far = taus[k + 1], taus[k - 1]
    elif form == "printed":
        near, far = taus[k - 1], taus[k + 1]
    else:
        raise DomainError(f"unknown form {form!r}")
    return lhs - near * M_plus(M_plus(far, S1, upow), SB1, upow)


def verify_kos(R: GrassmannianKernel, n: int, K: int = DEFAULT_K, form: str = "adopted") -> MultiPoly:
    """Residual of the first difference equation at level n (exact zero expected for the adopted form)."""
    if n < 1:
        raise DomainError("the difference equation is checked for n >= 1")
    kt = KosTau.symbolic(R, K)
    taus = {m: kt.tau(m) for m in (n - 1, n, n + 1)}
    return kos_residual(taus, n, form)


# -- determinant shift identity ----------------------------------------------------

def generic_entry(deg: int, prefix: str = "c") -> MultiPoly:
    """sum_{a,b <= deg} c_ab s_1^a sbar_1^b with formal coefficients."""
    out = MultiPoly.zero()
    for a, b in itertools.product(range(deg + 1), repeat=2):
        out = out + MultiPoly.var(f"{prefix}{a}{b}") * MultiPoly.monomial({S1: a, SB1: b})
    return out


def _shift_det(C: MultiPoly, n: int, op) -> MultiPoly:
    rows, col = [], C
    for _ in range(n):
        row, x = [], col
        for _ in range(n):
            row.append(x)
            x = op(x, SB1)
        rows.append(row)
        col = op(col, S1)
    return det(rows)


def det_shift_prefactor(n: int, form: str = "adopted") -> MultiPoly:
    """Factor c_n with det D^i Dbar^j C = c_n det M^i Mbar^j C.

    adopted: ((q^2 - 1)^2 s sbar)^{-n(n-1)/2} q^{-2 n(n-1)(n-2)/3};
    printed: q^{-(n-1)(n-2)} (1 - q)^{n(n-1)} (s sbar)^{n(n-1)/2}.
    """
    m = n * (n - 1) // 2
    if form == "adopted":
        Q = sc.u_pow(4)
        c = (Q - 1) ** (-2 * m) * sc.u_pow(-4 * n * (n - 1) * (n - 2) // 3)
        return MultiPoly.monomial({S1: -m, SB1: -m}, c)
    if form == "printed":
        c = sc.u_pow(-2 * (n - 1) * (n - 2)) * (1 - sc.u_pow(2)) ** (2 * m)
        return MultiPoly.monomial({S1: m, SB1: m}, c)
    raise DomainError(f"unknown form {form!r}")


def verify_det_shift(n: int, C: MultiPoly | None = None, form: str = "adopted") -> MultiPoly:
    """det D^i Dbar^j C - c_n det (M^+)^i (Mbar^+)^j C over 0 <= i, j < n."""
    if n < 1:
        raise DomainError("n must be positive")
    C = C if C is not None else generic_entry(max(n - 1, 1))
    lhs = _shift_det(C, n, D)
    rhs = _shift_det(C, n, M_plus)
    return lhs - det_shift_prefactor(n, form) * rhs


def random_kernels(count: int, size: int, seed: int = 0) -> list:
    import random

    rng = random.Random(seed)
    return [GrassmannianKernel.random(rng, size) for _ in range(count)]

