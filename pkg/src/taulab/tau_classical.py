"""Classical tau-functions of the forced 2D Toda hierarchy from moment data.

The Grassmannian point is given by its moment matrix ``R_km`` (indices
``0..size-1``).  Entries of the determinant are

    C_ij(t, tb) = sum_{k,m} R_km P_{k-i}(t) P_{m-j}(tb),

so ``d/dt_p C_ij = C_{i+p,j}`` and ``d/dtb_p C_ij = C_{i,j+p}``, and the forced
tau-function is ``tau_n = det_{0<=i,j<n} C_ij = det d^i dbar^j C_00`` with
``tau_0 = 1`` and ``tau_n = 0`` for ``n < 0``.
"""

from __future__ import annotations

import json
import math
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from taulab import scalars as sc
from taulab.polyalg import MultiPoly, det, derive
from taulab.scalars import DomainError, Rational
from taulab.schur import TimeVector, schur_table

DEFAULT_K = 3


class KernelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GrassmannianKernel:
    """Finite moment matrix, optionally with a rank-p factorization R = sum_a f^a g^a."""

    R: tuple
    factors: tuple | None = None  # (f, g) with f[a][k], g[a][m]

    def __post_init__(self):
        n = len(self.R)
        if n == 0 or any(len(row) != n for row in self.R):
            raise KernelFormatError("moment matrix must be square and nonempty")
        object.__setattr__(self, "R", tuple(tuple(sc.to_scalar(x) for x in row) for row in self.R))
        if self.factors is not None:
            f, g = self.factors
            if len(f) != len(g) or any(len(v) != n for v in list(f) + list(g)):
                raise KernelFormatError("factor vectors must match the kernel size")
            f = tuple(tuple(sc.to_scalar(x) for x in v) for v in f)
            g = tuple(tuple(sc.to_scalar(x) for x in v) for v in g)
            object.__setattr__(self, "factors", (f, g))
            for k in range(n):
                for m in range(n):
                    if sum((f[a][k] * g[a][m] for a in range(len(f))), Rational(0)) != self.R[k][m]:
                        raise KernelFormatError("factorization does not reproduce R")

    @property
    def size(self) -> int:
        return len(self.R)

    @property
    def rank_bound(self) -> int | None:
        return None if self.factors is None else len(self.factors[0])

    def entry(self, k: int, m: int):
        if 0 <= k < self.size and 0 <= m < self.size:
            return self.R[k][m]
        return Rational(0)

    # -- constructors ---------------------------------------------------------
    @classmethod
    def identity(cls, size: int) -> "GrassmannianKernel":
        return cls(tuple(tuple(int(i == j) for j in range(size)) for i in range(size)))

    @classmethod
    def from_factors(cls, f: Sequence[Sequence], g: Sequence[Sequence]) -> "GrassmannianKernel":
        f = [[sc.to_scalar(x) for x in v] for v in f]
        g = [[sc.to_scalar(x) for x in v] for v in g]
        n = len(f[0])
        R = [[sum((f[a][k] * g[a][m] for a in range(len(f))), Rational(0)) for m in range(n)] for k in range(n)]
        return cls(tuple(map(tuple, R)), (tuple(map(tuple, f)), tuple(map(tuple, g))))

    @classmethod
    def random(cls, rng: random.Random, size: int, spread: int = 3) -> "GrassmannianKernel":
        return cls(tuple(tuple(_small_rational(rng, spread) for _ in range(size)) for _ in range(size)))

    @classmethod
    def random_rank(
        cls, rng: random.Random, size: int, p: int, spread: int = 3, first_moment_only: bool = False
    ) -> "GrassmannianKernel":
        """Random rank-p kernel; ``first_moment_only`` keeps the factors on moments 0 and 1."""
        support = 2 if first_moment_only else size
        f = [[_small_rational(rng, spread) if k < support else 0 for k in range(size)] for _ in range(p)]
        g = [[_small_rational(rng, spread) if k < support else 0 for k in range(size)] for _ in range(p)]
        return cls.from_factors(f, g)

    # -- text form ------------------------------------------------------------
    def to_json(self) -> dict:
        entries = [[k, m, sc.format_scalar(c)] for k, row in enumerate(self.R) for m, c in enumerate(row) if c != 0]
        out = {"size": self.size, "entries": entries}
        if self.factors is not None:
            f, g = self.factors
            out["factors"] = {
                "f": [[sc.format_scalar(x) for x in v] for v in f],
                "g": [[sc.format_scalar(x) for x in v] for v in g],
            }
        return out

    @classmethod
    def from_json(cls, data: dict | str) -> "GrassmannianKernel":
        """Read {"size": n, "entries": [[k, m, "p/q"], ...], "factors": {"f": ..., "g": ...}}.

        ``size`` is the dimension: indices run over 0..size-1.
        """
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise KernelFormatError(f"kernel file is not JSON: {exc}") from None
        try:
            n = int(data["size"])
            if n < 1:
                raise KernelFormatError("size must be positive")
            R = [[Rational(0)] * n for _ in range(n)]
            for k, m, text in data.get("entries", []):
                if not (0 <= k < n and 0 <= m < n):
                    raise KernelFormatError(f"entry ({k}, {m}) outside 0..{n - 1}")
                R[k][m] = sc.to_scalar(str(text))
            factors = data.get("factors")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, KernelFormatError):
                raise
            raise KernelFormatError(f"malformed kernel: {exc}") from None
        if factors:
            kernel = cls.from_factors(factors["f"], factors["g"])
            if kernel.R != tuple(map(tuple, R)) and data.get("entries"):
                raise KernelFormatError("entries disagree with factors")
            return kernel
        return cls(tuple(map(tuple, R)))


def _small_rational(rng: random.Random, spread: int) -> Fraction:
    return Fraction(rng.randint(-spread, spread), rng.randint(1, spread))


def default_times(K: int = DEFAULT_K) -> tuple[TimeVector, TimeVector]:
    return TimeVector.symbolic("t", K), TimeVector.symbolic("tbar", K)


# -- determinant tau ----------------------------------------------------------

def c_entry(R: GrassmannianKernel, i: int, j: int, t: TimeVector, tbar: TimeVector) -> MultiPoly:
    """C_ij = sum_{k,m} R_km P_{k-i}(t) P_{m-j}(tbar); zero outside the kernel support."""
    n = R.size
    if i >= n or j >= n:
        return MultiPoly.zero()
    P = schur_table(t, max(n - 1 - i, 0))
    Pb = schur_table(tbar, max(n - 1 - j, 0))
    out = MultiPoly.zero()
    for k in range(max(i, 0), n):
        row = MultiPoly.zero()
        for m in range(max(j, 0), n):
            c = R.R[k][m]
            if c != 0:
                row = row + Pb[m - j] * c
        if row:
            out = out + P[k - i] * row
    return out


def c_matrix(n: int, R: GrassmannianKernel, t: TimeVector, tbar: TimeVector) -> list[list[MultiPoly]]:
    return [[c_entry(R, i, j, t, tbar) for j in range(n)] for i in range(n)]


def tau_det(n: int, R: GrassmannianKernel, t: TimeVector, tbar: TimeVector, form: str = "entries") -> MultiPoly:
    """Forced tau_n.  ``form='entries'`` uses det C_ij, ``form='derivative'`` det d^i dbar^j C_00."""
    if n < 0:
        return MultiPoly.zero()
    if n == 0:
        return MultiPoly.const(1)
    if n > R.size:
        warnings.warn(f"tau_{n} exceeds kernel support {R.size}; the determinant degenerates to zero", stacklevel=2)
    if form == "entries":
        return det(c_matrix(n, R, t, tbar))
    if form == "derivative":
        c00 = c_entry(R, 0, 0, t, tbar)
        t1, tb1 = t.names[0], tbar.names[0]
        rows = []
        for i in range(n):
            di = derive(c00, t1, i)
            rows.append([derive(di, tb1, j) for j in range(n)])
        return det(rows)
    raise DomainError(f"unknown form {form!r}")


def tau_det_numeric(n: int, R: np.ndarray, t: Sequence[complex], tbar: Sequence[complex]) -> complex:
    """Floating-point tau_n for a numeric moment matrix (used against the Fock oracle)."""
    R = np.asarray(R, dtype=complex)
    if n <= 0:
        return 1.0 + 0j if n == 0 else 0j
    size = R.shape[0]
    P = schur_numeric(t, size)
    Pb = schur_numeric(tbar, size)
    C = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            a = np.array([P[k - i] if k >= i else 0 for k in range(size)])
            b = np.array([Pb[m - j] if m >= j else 0 for m in range(size)])
            C[i, j] = a @ R @ b
    return complex(np.linalg.det(C))


def schur_numeric(t: Sequence[complex], N: int) -> list[complex]:
    """Numeric P_0..P_N from the same recursion as ``schur_table``."""
    P = [1.0 + 0j]
    for k in range(1, N + 1):
        P.append(sum(m * t[m - 1] * P[k - m] for m in range(1, min(k, len(t)) + 1)) / k)
    return P


# -- flows and the Toda equation ----------------------------------------------

@dataclass
class FlowReport:
    p: int
    residuals: list = field(default_factory=list)
    vacuous: bool = False

    @property
    def ok(self) -> bool:
        return all(r.is_zero() for r in self.residuals)


def verify_flow(R: GrassmannianKernel, p: int, t: TimeVector | None = None, tbar: TimeVector | None = None) -> FlowReport:
    """Check d/dt_p C_ij = C_{i+p,j} and d/dtb_p C_ij = C_{i,j+p} on the kernel window."""
    if t is None or tbar is None:
        t, tbar = default_times()
    if p < 1 or p > t.K or p > tbar.K:
        return FlowReport(p, [], vacuous=True)
    report = FlowReport(p)
    tp, tbp = t.names[p - 1], tbar.names[p - 1]
    for i in range(R.size):
        for j in range(R.size):
            c = c_entry(R, i, j, t, tbar)
            report.residuals.append(derive(c, tp) - c_entry(R, i + p, j, t, tbar))
            report.residuals.append(derive(c, tbp) - c_entry(R, i, j + p, t, tbar))
    return report


def hirota_lhs(tau: MultiPoly, x: str, xb: str) -> MultiPoly:
    """tau d dbar tau - d tau dbar tau."""
    dt = derive(tau, x)
    return tau * derive(dt, xb) - dt * derive(tau, xb)


def verify_toda_eq(R: GrassmannianKernel, n: int, t: TimeVector | None = None, tbar: TimeVector | None = None) -> MultiPoly:
    """Residual of tau_n d dbar tau_n - d tau_n dbar tau_n - tau_{n+1} tau_{n-1}."""
    if n < 1:
        raise DomainError("the Toda equation is checked for n >= 1")
    if t is None or tbar is None:
        t, tbar = default_times()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        taus = {m: tau_det(m, R, t, tbar) for m in (n - 1, n, n + 1)}
    return hirota_lhs(taus[n], t.names[0], tbar.names[0]) - taus[n + 1] * taus[n - 1]


# -- Toda molecule --------------------------------------------------------------

def leznov_saveliev(n: int, tau1: MultiPoly, x: str, xb: str) -> MultiPoly:
    """det_{0<=i,j<n} d^i (-dbar)^j tau_1."""
    rows = []
    for i in range(n):
        di = derive(tau1, x, i)
        rows.append([derive(di, xb, j) * (-1) ** j for j in range(n)])
    return det(rows)


def ls_sign(n: int) -> int:
    """tau_n = ls_sign(n) * det d^i (-dbar)^j tau_1 with tau_0 = 1."""
    return -1 if (n * (n - 1) // 2) % 2 else 1


@dataclass
class MoleculeReport:
    p: int
    vanishing: MultiPoly  # tau_{p+1}
    wave: MultiPoly  # tau_p d dbar tau_p - d tau_p dbar tau_p
    rebuild: dict  # n -> residual of the Leznov-Saveliev rebuild
    factorization: MultiPoly | None = None  # p = 1 only
    normalization: str = "tau_0 = 1, tau_n = (-1)^{n(n-1)/2} det d^i (-dbar)^j tau_1"

    @property
    def ok(self) -> bool:
        parts = [self.vanishing, self.wave, *self.rebuild.values()]
        if self.factorization is not None:
            parts.append(self.factorization)
        return all(x.is_zero() for x in parts)


def verify_molecule(p: int, R: GrassmannianKernel, t: TimeVector | None = None, tbar: TimeVector | None = None) -> MoleculeReport:
    if p < 1:
        raise DomainError("molecule rank must be positive")
    if t is None or tbar is None:
        t, tbar = default_times()
    x, xb = t.names[0], tbar.names[0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        taus = [tau_det(m, R, t, tbar) for m in range(p + 2)]
    rebuild = {}
    for m in range(1, p + 2):
        rebuild[m] = leznov_saveliev(m, taus[1], x, xb) * ls_sign(m) - taus[m]
    fact = None
    if p == 1 and R.factors is not None:
        f, g = R.factors
        P = schur_table(t, R.size - 1)
        Pb = schur_table(tbar, R.size - 1)
        chi = sum((P[k] * f[0][k] for k in range(R.size)), MultiPoly.zero())
        chib = sum((Pb[m] * g[0][m] for m in range(R.size)), MultiPoly.zero())
        fact = taus[1] - chi * chib
    return MoleculeReport(p, taus[p + 1], hirota_lhs(taus[p], x, xb), rebuild, fact)


# -- Liouville closed form ---------------------------------------------------------

LIOUVILLE_ADOPTED = "adopted"  # tau d dbar tau - d tau dbar tau = 1
LIOUVILLE_PRINTED = "printed"  # d tau dbar tau - tau d dbar tau = 1


def _liouville_parts(A, B, t: float, tb: float):
    a = np.polynomial.Polynomial(A)
    b = np.polynomial.Polynomial(B)
    a1, b1 = a.deriv()(t), b.deriv()(tb)
    if a1 * b1 <= 0:
        raise DomainError(f"A'(t) B'(tb) must be positive, got {a1 * b1} at ({t}, {tb})")
    a0, b0 = a(t), b(tb)
    a2, b2 = a.deriv(2)(t), b.deriv(2)(tb)
    w = 1 + a0 * b0
    tau = w / math.sqrt(a1 * b1)
    lt = a1 * b0 / w - a2 / (2 * a1)  # d log tau
    lb = a0 * b1 / w - b2 / (2 * b1)  # dbar log tau
    ltb = a1 * b1 / w**2  # d dbar log tau
    return tau, tau * lt, tau * lb, tau * (lt * lb + ltb)


def liouville_tau(A, B, t: float, tb: float) -> float:
    return _liouville_parts(A, B, t, tb)[0]


def liouville_residual(A: Sequence[float], B: Sequence[float], samples: Sequence[tuple[float, float]], sign: str = LIOUVILLE_ADOPTED) -> float:
    """max |Liouville residual| for tau_1 = (1 + A B)(A' B')^{-1/2}, A, B given by coefficient lists.

    The adopted orientation tau d dbar tau - d tau dbar tau = 1 is the n = 1 Toda equation with
    tau_0 = tau_2 = 1; the printed orientation is available for comparison.
    """
    worst = 0.0
    for t, tb in samples:
        tau, dt, db, dtb = _liouville_parts(A, B, t, tb)
        lhs = tau * dtb - dt * db
        if sign == LIOUVILLE_PRINTED:
            lhs = -lhs
        elif sign != LIOUVILLE_ADOPTED:
            raise DomainError(f"unknown sign convention {sign!r}")
        worst = max(worst, abs(lhs - 1))
    return worst


# -- parametrization A --------------------------------------------------------------

def _prefix_products(xi: TimeVector, N: int) -> list[MultiPoly]:
    """s_0 = 1, s_k = xi_1 ... xi_k."""
    s = [MultiPoly.const(1)]
    for k in range(1, N):
        s.append(s[-1] * xi[k])
    return s


def _check_square(g) -> int:
    N = len(g)
    if N == 0 or any(len(row) != N for row in g):
        raise DomainError("g must be a nonempty square matrix")
    return N


def tau_parA_entry(m: int, mbar: int, g, xi: TimeVector, xibar: TimeVector) -> MultiPoly:
    """tau_1^{m mbar} = sum_{k>=m, kb>=mbar} (xi_{m+1}..xi_k) g_{k kb} (xib_{mbar+1}..xib_kb)."""
    N = _check_square(g)
    out = MultiPoly.zero()
    for k in range(m, N):
        left = MultiPoly.const(1)
        for a in range(m + 1, k + 1):
            left = left * xi[a]
        row = MultiPoly.zero()
        for kb in range(mbar, N):
            c = sc.to_scalar(g[k][kb])
            if c == 0:
                continue
            right = MultiPoly.const(c)
            for a in range(mbar + 1, kb + 1):
                right = right * xibar[a]
            row = row + right
        out = out + left * row
    return out


def tau_parA(n: int, g, xi: TimeVector, xibar: TimeVector) -> MultiPoly:
    """tau_n = det_{0<=m,mbar<n} tau_1^{m mbar}; tau_0 = 1, tau_1 = sum s_k g_{k kb} sbar_kb."""
    if n < 0:
        return MultiPoly.zero()
    N = _check_square(g)
    if n > N:
        raise DomainError(f"tau_{n} needs a matrix of size at least {n}")
    return det([[tau_parA_entry(m, mb, g, xi, xibar) for mb in range(n)] for m in range(n)])


def tau_parA_minor_sum(n: int, g, xi: TimeVector, xibar: TimeVector) -> MultiPoly:
    """Independent route: tau_{n+1} = sum_{k,kb>=n} (s_k/s_n)(sb_kb/sb_n) D^(n)_{k kb},
    D the minor of g on rows 0..n-1,k and columns 0..n-1,kb."""
    N = _check_square(g)
    if n + 1 > N:
        raise DomainError(f"tau_{n + 1} needs a matrix of size at least {n + 1}")
    out = MultiPoly.zero()
    head = list(range(n))
    for k in range(n, N):
        left = MultiPoly.const(1)
        for a in range(n + 1, k + 1):
            left = left * xi[a]
        for kb in range(n, N):
            rows, cols = head + [k], head + [kb]
            minor = det([[sc.to_scalar(g[r][c]) for c in cols] for r in rows], one=Rational(1))
            if minor == 0:
                continue
            right = MultiPoly.const(minor)
            for a in range(n + 1, kb + 1):
                right = right * xibar[a]
            out = out + left * right
    return out


def verify_parA_derivative(g, xi: TimeVector, xibar: TimeVector) -> list[MultiPoly]:
    """Residuals of s_{m-1} sb_{mb-1} tau_1^{m mb} = d_{xi_m} d_{xib_mb} tau_1 for 1 <= m, mb < N."""
    N = _check_square(g)
    s = _prefix_products(xi, N)
    sb = _prefix_products(xibar, N)
    tau1 = tau_parA(1, g, xi, xibar)
    out = []
    for m in range(1, N):
        for mb in range(1, N):
            lhs = s[m - 1] * sb[mb - 1] * tau_parA_entry(m, mb, g, xi, xibar)
            rhs = derive(derive(tau1, xi.names[m - 1]), xibar.names[mb - 1])
            out.append(lhs - rhs)
    return out


def random_matrix(rng: random.Random, N: int, spread: int = 3) -> list[list[Fraction]]:
    return [[_small_rational(rng, spread) for _ in range(N)] for _ in range(N)]

