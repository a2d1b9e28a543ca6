"""Schur and q-Schur polynomials, the s -> t time map and Miwa points.

Conventions
-----------
* ``exp(sum_k t_k x^k) = sum_k P_k(t) x^k`` with ``P_k = 0`` for ``k < 0``.
* ``prod_i E_{q^i}(s_i z^i) = sum_j P^{(q)}_j(s) z^j`` where ``E_Q`` is the
  q-exponential built on the nonsymmetric q-number; for ``E_{q^i}`` the base is
  ``Q_i = q^{2i}`` so that ``(n)_{q^i} = (1 - q^{2in}) / (1 - q^{2i})``.
* The time map uses the same bases: ``log E_Q(x) = sum_n (1-Q)^n x^n / (n (1-Q^n))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import flint

from taulab import scalars as sc
from taulab.polyalg import MultiPoly
from taulab.scalars import DomainError, Rational

FLAVOR_PREFIX = {"t": "t", "tbar": "tb", "s": "s", "sbar": "sb", "xi": "xi", "xibar": "xib"}

# Base of E_{q^k} in powers of u: Q_k = u^(4k) = q^(2k).
BASE_Q2K = "q2k"
# Literal reading q_k = q^k, kept for comparison; it breaks the keystone identity.
BASE_QK = "qk"


def base_upow(k: int, base: str = BASE_Q2K) -> int:
    if base == BASE_Q2K:
        return 4 * k
    if base == BASE_QK:
        return 2 * k
    raise DomainError(f"unknown time-map base {base!r}")


@dataclass(frozen=True)
class TimeVector:
    """Times indexed from 1; entries are polynomials (symbolic or constant)."""

    flavor: str
    coeffs: tuple

    @classmethod
    def symbolic(cls, flavor: str, K: int) -> "TimeVector":
        if K < 0:
            raise DomainError("cutoff K must be nonnegative")
        prefix = FLAVOR_PREFIX[flavor]
        return cls(flavor, tuple(MultiPoly.var(f"{prefix}{k}") for k in range(1, K + 1)))

    @classmethod
    def of(cls, flavor: str, values: Sequence) -> "TimeVector":
        return cls(flavor, tuple(MultiPoly.lift(sc.to_scalar(v) if not isinstance(v, MultiPoly) else v) for v in values))

    @property
    def K(self) -> int:
        return len(self.coeffs)

    @property
    def names(self) -> tuple[str, ...]:
        prefix = FLAVOR_PREFIX[self.flavor]
        return tuple(f"{prefix}{k}" for k in range(1, self.K + 1))

    def __getitem__(self, k: int) -> MultiPoly:
        if 1 <= k <= self.K:
            return self.coeffs[k - 1]
        return MultiPoly.zero()

    def key(self):
        return (self.flavor, tuple(str(c) for c in self.coeffs))


_schur_cache: dict = {}
_qschur_cache: dict = {}


def schur_table(t: TimeVector, N: int) -> list[MultiPoly]:
    """[P_0, ..., P_N] via k P_k = sum_m m t_m P_{k-m}."""
    key = (t.key(), N)
    hit = _schur_cache.get(key)
    if hit is not None:
        return hit
    P = [MultiPoly.const(1)]
    for k in range(1, N + 1):
        acc = MultiPoly.zero()
        for m in range(1, min(k, t.K) + 1):
            acc = acc + t[m] * P[k - m] * m
        P.append(acc / k)
    _schur_cache[key] = P
    return P


def schur_poly(k: int, t: TimeVector) -> MultiPoly:
    """Classical Schur polynomial P_k(t); zero for negative k."""
    if k < 0:
        return MultiPoly.zero()
    return schur_table(t, k)[k]


def qschur_table(s: TimeVector, N: int, base: str = BASE_Q2K) -> list[MultiPoly]:
    """[P^(q)_0 .. P^(q)_N] from the product of q-exponentials."""
    key = (s.key(), N, base)
    hit = _qschur_cache.get(key)
    if hit is not None:
        return hit
    series = [MultiPoly.const(1)] + [MultiPoly.zero() for _ in range(N)]
    for i in range(1, min(s.K, N) + 1):
        factor = [MultiPoly.zero() for _ in range(N + 1)]
        power = MultiPoly.const(1)
        for n in range(0, N // i + 1):
            factor[n * i] = power * sc.qexp_coeff(n, sc.E_Q_NONSYM, base_upow(i, base))
            power = power * s[i]
        new = [MultiPoly.zero() for _ in range(N + 1)]
        for a in range(N + 1):
            if not series[a]:
                continue
            for b in range(0, N + 1 - a, i):
                if factor[b]:
                    new[a + b] = new[a + b] + series[a] * factor[b]
        series = new
    _qschur_cache[key] = series
    return series


def qschur_poly(j: int, s: TimeVector, base: str = BASE_Q2K) -> MultiPoly:
    """q-Schur polynomial P^(q)_j(s); zero for negative j."""
    if j < 0:
        return MultiPoly.zero()
    return qschur_table(s, j, base)[j]


def times_from_s(s: TimeVector, K: int, base: str = BASE_Q2K) -> TimeVector:
    """t_m = sum_{n k = m} s_k^n (1 - Q_k)^n / (n (1 - Q_k^n)), Q_k the base of E_{q^k}."""
    if K < 1:
        raise DomainError("K must be at least 1")
    out = []
    for m in range(1, K + 1):
        acc = MultiPoly.zero()
        for k in range(1, m + 1):
            if m % k or k > s.K:
                continue
            n = m // k
            Qk = sc.u_pow(base_upow(k, base))
            c = (1 - Qk) ** n / (n * (1 - Qk**n))
            acc = acc + s[k] ** n * c
        out.append(acc)
    return TimeVector("t" if s.flavor == "s" else "tbar", tuple(out))


# -- Miwa points --------------------------------------------------------------

@dataclass(frozen=True)
class MiwaPoint:
    """The point exp(2 pi i a / k) * mu_k * Q_k^(-l/k), kept symbolic."""

    a: int
    l: int
    k: int

    def __str__(self):
        return f"w{self.k}^{self.a}*mu{self.k}*Q{self.k}^(-{self.l}/{self.k})"


@lru_cache(maxsize=None)
def _orbit_sum(k: int, m: int) -> int:
    """sum_a w^(-a m) for a primitive k-th root w, reduced modulo Phi_k."""
    coeffs = [0] * k
    for a in range(k):
        coeffs[(-a * m) % k] += 1
    rem = flint.fmpz_poly(coeffs) % flint.fmpz_poly.cyclotomic(k)
    if rem.degree() > 0:
        raise ArithmeticError("orbit sum did not reduce to a rational constant")
    return int(rem[0]) if rem.degree() == 0 else 0


@dataclass(frozen=True)
class MiwaSet:
    """Truncated Miwa multiset {w^a mu_k Q_k^(-l/k) : 0 <= a < k, 0 <= l < L}.

    mu_k = ((1 - Q_k) s_k)^(-1/k) and Q_k^(1/k) = q^2.  The induced times use
    negative powers of the points, t_m = (1/m) sum point^(-m), which is the
    orientation that reproduces the time map.
    """

    k: int
    s_k: MultiPoly
    L: int
    base: str = BASE_Q2K

    def points(self) -> list[MiwaPoint]:
        return [MiwaPoint(a, l, self.k) for l in range(self.L) for a in range(self.k)]

    def __len__(self):
        return self.k * self.L

    def power_sum(self, m: int) -> MultiPoly:
        """sum over points of point^(-m), exact."""
        if m < 1:
            raise DomainError("power sums start at m = 1")
        orbit = _orbit_sum(self.k, m)
        if orbit == 0 or self.L == 0:
            return MultiPoly.zero()
        n = m // self.k
        Qk = sc.u_pow(base_upow(self.k, self.base))
        root = base_upow(1, self.base)  # Q_k^(1/k) in powers of u
        radicand = self.s_k * (1 - Qk)
        geo = sum((sc.u_pow(root * l * m) for l in range(self.L)), Rational(0))
        return radicand**n * (orbit * geo)

    def times(self, K: int) -> TimeVector:
        return TimeVector("t", tuple(self.power_sum(m) / m for m in range(1, K + 1)))


def miwa_points(k: int, s_k, L: int, base: str = BASE_Q2K) -> MiwaSet:
    """Miwa multiset generating the k-th q-exponential factor."""
    if k < 1 or L < 0:
        raise DomainError("need k >= 1 and L >= 0")
    sk = s_k if isinstance(s_k, MultiPoly) else MultiPoly.const(s_k)
    if sk.is_zero():
        raise DomainError("s_k = 0 has no Miwa points")
    return MiwaSet(k, sk, L, base)
