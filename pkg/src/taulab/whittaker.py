"""Toda and Liouville quantum mechanics: Whittaker functions and their asymptotics.

Numerical part: Macdonald functions by quadrature, Liouville wave functions and
their Schroedinger residual, Harish-Chandra functions, reflection S-matrix,
Whittaker integrals for SL(2) with contour rotation and for SL(3) as a pattern integral,
root systems of A_{p-1} and Gauss-decomposition minors.

Exact part: the SL(2, R) left and right regular representations in the
coordinates g = [[1,0],[psi,1]] diag(e^phi, e^-phi) [[1,chi],[0,1]], checked on
the polynomial ring extended by E = exp(-2 phi).
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from taulab.polyalg import EXP_BASE, EXP_GENERATOR, MultiPoly, derive
from taulab.scalars import DomainError, Rational


class QuadratureError(ArithmeticError):
    """A quadrature did not reach its tolerance."""


class PoleError(DomainError):
    """A Gamma function argument hit a pole."""


# -- Gamma ------------------------------------------------------------------------

_LANCZOS_G = 7
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _is_pole(z: complex) -> bool:
    return abs(z.imag) < 1e-14 and z.real <= 0 and abs(z.real - round(z.real)) < 1e-14


def gamma(z: complex) -> complex:
    """Complex Gamma by the Lanczos approximation (g = 7), reflection for Re z < 1/2."""
    z = complex(z)
    if _is_pole(z):
        raise PoleError(f"Gamma has a pole at {z}")
    if z.real < 0.5:
        return cmath.pi / (cmath.sin(cmath.pi * z) * gamma(1 - z))
    z -= 1
    x = _LANCZOS[0]
    for k in range(1, _LANCZOS_G + 2):
        x += _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return cmath.sqrt(2 * cmath.pi) * t ** (z + 0.5) * cmath.exp(-t) * x


def rgamma(z: complex) -> complex:
    """1/Gamma(z), zero at the poles."""
    try:
        return 1 / gamma(z)
    except PoleError:
        return 0j


# -- Macdonald function ------------------------------------------------------------------

def _cutoff(nu: complex, z: float, margin: float = 50.0) -> float:
    """U with z (cosh U - 1) - |Re nu| U >= margin (tail below e^-margin relative to e^-z)."""
    a = abs(nu.real)
    U = 1.0
    while z * (math.cosh(U) - 1) - a * U < margin:
        U *= 1.25
        if U > 800:
            raise QuadratureError("cutoff search failed")
    return U


def macdonald_k(nu: complex, z: float, tol: float = 1e-15, max_halvings: int = 14) -> complex:
    """K_nu(z) = (1/2)(z/2)^nu int_0^inf exp(-t - z^2/4t) t^{-nu-1} dt, z > 0.

    With t = (z/2) e^u the integral becomes int_0^inf exp(-z cosh u) cosh(nu u) du,
    whose integrand decays double exponentially; the trapezoidal rule on it is
    refined by step halving until two successive values agree to ``tol``.
    """
    if not z > 0:
        raise DomainError("the Macdonald function is evaluated for z > 0")
    nu = complex(nu)
    U = _cutoff(nu, z)
    scale = math.exp(-z)

    def f(u):
        return np.exp(-z * (np.cosh(u) - 1)) * np.cosh(nu * u)

    h = min(0.5, U / 8)
    n = int(math.ceil(U / h))
    h = U / n
    u = np.arange(n + 1) * h
    vals = f(u)
    total = vals.sum() - 0.5 * vals[0] - 0.5 * vals[-1]
    mass = np.abs(vals).sum()
    prev = h * total
    for _ in range(max_halvings):
        mids = f(u[:-1] + h / 2)
        total = total + mids.sum()
        mass = mass + np.abs(mids).sum()
        h /= 2
        u = np.arange(2 * n + 1) * h
        n *= 2
        cur = h * total
        # rounding floor: with oscillating integrands |cur| can sit far below the summed mass
        if abs(cur - prev) <= max(tol * abs(cur), 4e-16 * h * mass):
            return complex(cur * scale)
        prev = cur
    raise QuadratureError(f"K_{nu}({z}) did not converge")


def macdonald_k_series(nu: complex, z: float, terms: int = 80) -> complex:
    """Independent route: K_nu = pi/(2 sin pi nu) (I_{-nu} - I_nu) from the power series (nu not an integer)."""
    nu = complex(nu)
    s = cmath.sin(cmath.pi * nu)
    if abs(s) < 1e-12:
        raise DomainError("the series route needs non-integer nu")

    def bessel_i(v):
        acc, x = 0j, (z / 2) ** 2
        term = (z / 2) ** v * rgamma(v + 1)
        for k in range(terms):
            acc += term
            term *= x / ((k + 1) * (k + 1 + v))
        return acc

    return cmath.pi / (2 * s) * (bessel_i(-nu) - bessel_i(nu))


def macdonald_k_asymptotic(nu: complex, z: float, terms: int = 12) -> complex:
    """Large-z expansion sqrt(pi/2z) e^-z sum_k a_k(nu) / z^k."""
    mu = 4 * complex(nu) ** 2
    acc, term = 0j, 1 + 0j
    for k in range(terms):
        acc += term
        term *= (mu - (2 * k + 1) ** 2) / ((k + 1) * 8 * z)
    return math.sqrt(math.pi / (2 * z)) * math.exp(-z) * acc


# -- Liouville wave function --------------------------------------------------------------

def _check_mu(*mus: float) -> None:
    for m in mus:
        if not m > 0:
            raise DomainError("cosmological constants mu must be positive")


def liouville_wf(j: complex, mu_L: float, mu_R: float, phi: float) -> complex:
    """Psi(phi) = e^phi F^(j)(phi) = 2 (i sqrt(mu_L/mu_R))^{-(2j+1)} K_{2j+1}(2 sqrt(mu_L mu_R) e^{-phi})."""
    _check_mu(mu_L, mu_R)
    nu = 2 * complex(j) + 1
    pref = 2 * cmath.exp(-nu * (math.log(math.sqrt(mu_L / mu_R)) + 0.5j * math.pi))
    return pref * macdonald_k(nu, 2 * math.sqrt(mu_L * mu_R) * math.exp(-phi))


def schrodinger_terms(j: complex, mu_L: float, mu_R: float, phi: float, h: float = 2e-3):
    """(1/2 Psi'', 2 mu_L mu_R e^{-2 phi} Psi, 2 (j + 1/2)^2 Psi) with a five-point stencil."""
    v = [liouville_wf(j, mu_L, mu_R, phi + k * h) for k in (-2, -1, 0, 1, 2)]
    d2 = (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h)
    psi = v[2]
    return 0.5 * d2, 2 * mu_L * mu_R * math.exp(-2 * phi) * psi, 2 * (complex(j) + 0.5) ** 2 * psi


def schrodinger_residual(j: complex, mu_L: float, mu_R: float, grid: Sequence[float], h: float = 2e-3) -> float:
    """max |1/2 Psi'' - 2 mu mu e^{-2phi} Psi - 2(j+1/2)^2 Psi| over the grid, relative to the largest term."""
    res, scale = 0.0, 0.0
    for phi in grid:
        a, b, c = schrodinger_terms(j, mu_L, mu_R, phi, h)
        res = max(res, abs(a - b - c))
        scale = max(scale, abs(a), abs(b), abs(c))
    return res / scale


# -- Harish-Chandra functions ------------------------------------------------------------

def harish_chandra_sl2(lam: complex) -> tuple[complex, complex]:
    """(c_+, c_-) = (1/Gamma(1 + lam), 1/Gamma(1 - lam))."""
    lam = complex(lam)
    return rgamma(1 + lam), rgamma(1 - lam)


def normalized_wf(lam: complex, mu_L: float, mu_R: float, phi: float) -> complex:
    """(2 sin(pi lam)/pi) K_lam(2 sqrt(mu_L mu_R) e^{-phi}): pole-free normalization of the wave with 2j + 1 = lam."""
    _check_mu(mu_L, mu_R)
    lam = complex(lam)
    return 2 * cmath.sin(cmath.pi * lam) / cmath.pi * macdonald_k(lam, 2 * math.sqrt(mu_L * mu_R) * math.exp(-phi))


@dataclass
class HarishChandraFit:
    lam: complex
    c_plus: complex
    c_minus: complex
    fit_residual: float

    @property
    def ratio(self) -> complex:
        return self.c_plus / self.c_minus

    def to_json(self) -> dict:
        cx = lambda z: [z.real, z.imag]
        return {"lambda": cx(self.lam), "c_plus": cx(self.c_plus), "c_minus": cx(self.c_minus), "ratio": cx(self.ratio), "fit_residual": self.fit_residual}


def fit_harish_chandra(lam: complex, mu_L: float = 1.0, mu_R: float = 1.0, phi0: float = 8.0, periods: float = 1.5, samples: int = 60) -> HarishChandraFit:
    """Fit normalized_wf ~ A e^{lam phi} + B e^{-lam phi} at large phi.

    Since K_lam(x) ~ (1/2)[Gamma(lam)(x/2)^{-lam} + Gamma(-lam)(x/2)^{lam}], the
    normalized wave has A = m^{-lam}/Gamma(1-lam), B = -m^{lam}/Gamma(1+lam) with
    m = sqrt(mu_L mu_R); hence c_- = A m^lam and c_+ = -B m^{-lam}.
    """
    lam = complex(lam)
    if lam == 0:
        raise DomainError("lambda must be nonzero")
    length = periods * 2 * math.pi / abs(lam.imag) if lam.imag else 10.0
    phis = np.linspace(phi0, phi0 + length, samples)
    y = np.array([normalized_wf(lam, mu_L, mu_R, p) for p in phis])
    X = np.stack([np.exp(lam * phis), np.exp(-lam * phis)], axis=1)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    misfit = float(np.linalg.norm(X @ coef - y) / np.linalg.norm(y))
    if not np.all(np.isfinite(coef)) or misfit > 1e-3:
        raise QuadratureError(f"asymptotic fit failed (misfit {misfit:.2e}); widen the window")
    m = math.sqrt(mu_L * mu_R)
    c_minus = complex(coef[0]) * m**lam
    c_plus = -complex(coef[1]) * m ** (-lam)
    return HarishChandraFit(lam, c_plus, c_minus, misfit)


def smatrix_liouville_ft(p: complex, tau: float) -> complex:
    """S(p) = Gamma(1+p) Gamma(1+p/tau) / (Gamma(1-p) Gamma(1-p/tau))."""
    if not tau > 0:
        raise DomainError("tau must be positive")
    p = complex(p)
    for z in (1 + p, 1 + p / tau, 1 - p, 1 - p / tau):
        if _is_pole(z):
            raise PoleError(f"Gamma pole at {z}")
    return gamma(1 + p) * gamma(1 + p / tau) / (gamma(1 - p) * gamma(1 - p / tau))


# -- root systems ------------------------------------------------------------------------

def parse_weyl(text: str, p: int) -> tuple[int, ...]:
    """One-line notation '132' -> (1, 3, 2)."""
    w = tuple(int(ch) for ch in text.strip())
    if sorted(w) != list(range(1, p + 1)):
        raise DomainError(f"{text!r} is not a permutation of 1..{p}")
    return w


@dataclass
class RootSystem:
    """A_{p-1}: simple roots alpha_i = e_{i+1} - e_i, positive roots e_j - e_i (i < j)."""

    p: int
    simple_roots: list = field(default_factory=list)
    positive_roots: list = field(default_factory=list)
    fundamental_weights: list = field(default_factory=list)
    rho: tuple = ()

    @classmethod
    def of(cls, p: int) -> "RootSystem":
        if p < 2:
            raise DomainError("need p >= 2")
        e = lambda k: tuple(Fraction(int(a == k)) for a in range(p))
        sub = lambda x, y: tuple(a - b for a, b in zip(x, y))
        simple = [sub(e(i + 1), e(i)) for i in range(p - 1)]
        positive = [sub(e(j), e(i)) for i in range(p) for j in range(i + 1, p)]
        weights = [tuple(Fraction(-int(a <= i)) + Fraction(i + 1, p) for a in range(p)) for i in range(p - 1)]
        rho = tuple(sum(r[a] for r in positive) / 2 for a in range(p))
        return cls(p, simple, positive, weights, rho)

    def weyl_group(self) -> list:
        return [tuple(w) for w in itertools.permutations(range(1, self.p + 1))]

    def act(self, w: Sequence[int], v: Sequence) -> tuple:
        """(w v)_{w(k)} = v_k."""
        out = [None] * self.p
        for k, wk in enumerate(w):
            out[wk - 1] = v[k]
        return tuple(out)

    def act_inverse(self, w: Sequence[int], v: Sequence) -> tuple:
        return tuple(v[wk - 1] for wk in w)

    def duality_defect(self) -> int:
        """Number of pairs with mu_i . alpha_j != delta_ij."""
        dot = lambda x, y: sum(a * b for a, b in zip(x, y))
        return sum(1 for i, m in enumerate(self.fundamental_weights) for j, a in enumerate(self.simple_roots) if dot(m, a) != int(i == j))

    def vector(self, lam: Sequence[complex]) -> np.ndarray:
        """lam given by simple-root coordinates (length p-1: lam . alpha_i) or as a p-vector."""
        lam = np.asarray(lam, dtype=complex)
        if lam.shape == (self.p - 1,):
            W = np.array([[float(x) for x in m] for m in self.fundamental_weights])
            return lam @ W
        if lam.shape == (self.p,):
            return lam
        raise DomainError(f"lambda must have {self.p - 1} or {self.p} components")


def _dot(x, y) -> complex:
    return complex(sum(complex(a) * complex(b) for a, b in zip(x, y)))


def harish_chandra_slp(p: int, lam: Sequence[complex], w: Sequence[int] | None = None) -> complex:
    """c_w(lam) = prod_{alpha > 0} 1 / Gamma(1 + (w lam) . alpha)."""
    R = RootSystem.of(p)
    w = tuple(w) if w is not None else tuple(range(1, p + 1))
    wl = R.act(w, list(R.vector(lam)))
    out = 1 + 0j
    for a in R.positive_roots:
        z = 1 + _dot(wl, a)
        if _is_pole(z):
            raise PoleError(f"Gamma pole at {z}")
        out *= 1 / gamma(z)
    return out


def harish_chandra_slp_roots(p: int, lam: Sequence[complex], w: Sequence[int]) -> complex:
    """Same product computed on the root side: (w lam) . alpha = lam . (w^{-1} alpha)."""
    R = RootSystem.of(p)
    v = list(R.vector(lam))
    out = 1 + 0j
    for a in R.positive_roots:
        z = 1 + _dot(v, R.act_inverse(w, a))
        if _is_pole(z):
            raise PoleError(f"Gamma pole at {z}")
        out *= 1 / gamma(z)
    return out


# -- Gauss decomposition minors -------------------------------------------------------------

def _det(rows):
    n = len(rows)
    if n == 0:
        return 1
    if all(isinstance(x, (int, Fraction)) for r in rows for x in r):
        M = [[Fraction(x) for x in r] for r in rows]
        d = Fraction(1)
        for c in range(n):
            piv = next((r for r in range(c, n) if M[r][c] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                M[c], M[piv] = M[piv], M[c]
                d = -d
            d *= M[c][c]
            for r in range(c + 1, n):
                f = M[r][c] / M[c][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
        return d
    return complex(np.linalg.det(np.array(rows, dtype=complex)))


def gauss_minors(g: Sequence[Sequence], i: int):
    """(Delta_i, Delta_{i,i+1}, h_i): leading i x i minor, the same minor with columns i, i+1
    exchanged, and h_i = Delta_i / Delta_{i-1} (1-based i)."""
    p = len(g)
    if not 1 <= i <= p:
        raise DomainError(f"need 1 <= i <= {p}")
    lead = lambda k, cols: _det([[g[r][c] for c in cols] for r in range(k)])
    d_i = lead(i, range(i))
    d_prev = lead(i - 1, range(i - 1))
    if d_prev == 0:
        raise DomainError("vanishing leading minor: no Gauss decomposition")
    swapped = lead(i, list(range(i - 1)) + [i]) if i < p else None
    return d_i, swapped, d_i / d_prev


def ldu(g: Sequence[Sequence]):
    """Exact g = L D U with unit triangular L, U (Doolittle without pivoting)."""
    p = len(g)
    A = [[Fraction(x) for x in r] for r in g]
    L = [[Fraction(int(i == j)) for j in range(p)] for i in range(p)]
    D = [Fraction(0)] * p
    U = [[Fraction(int(i == j)) for j in range(p)] for i in range(p)]
    for k in range(p):
        D[k] = A[k][k] - sum(L[k][m] * D[m] * U[m][k] for m in range(k))
        if D[k] == 0:
            raise DomainError("vanishing leading minor: no Gauss decomposition")
        for j in range(k + 1, p):
            U[k][j] = (A[k][j] - sum(L[k][m] * D[m] * U[m][j] for m in range(k))) / D[k]
            L[j][k] = (A[j][k] - sum(L[j][m] * D[m] * U[m][k] for m in range(k))) / D[k]
    return L, D, U


# -- Whittaker integrals ----------------------------------------------------------------------

@dataclass
class WhittakerParams:
    p: int
    lam: tuple  # p-vector with zero sum, or p-1 simple-root coordinates
    mu_L: tuple
    mu_R: tuple
    grid: tuple = ()

    def __post_init__(self):
        if self.p < 2:
            raise DomainError("need p >= 2")
        if len(self.mu_L) != self.p - 1 or len(self.mu_R) != self.p - 1:
            raise DomainError("one mu_L and one mu_R per simple root")
        _check_mu(*self.mu_L, *self.mu_R)
        if not all(math.isfinite(float(x)) for x in np.ravel(np.asarray(self.grid, dtype=float))):
            raise DomainError("grid must be finite")


def _trapezoid_line(f, lo: float, hi: float, tol: float = 1e-13, max_halvings: int = 14) -> complex:
    n = 64
    h = (hi - lo) / n
    x = lo + h * np.arange(n + 1)
    vals = f(x)
    total = vals.sum() - 0.5 * (vals[0] + vals[-1])
    prev = h * total
    for _ in range(max_halvings):
        total = total + f(x[:-1] + h / 2).sum()
        h /= 2
        x = lo + h * np.arange(2 * n + 1)
        n *= 2
        cur = h * total
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return complex(cur)
        prev = cur
    raise QuadratureError("trapezoid refinement did not converge")


def whittaker_integral_sl2(nu: complex, mu_L: float, mu_R: float, s: float, theta: float = math.pi / 4) -> complex:
    """I(s) = int_0^inf x^{-(nu+1)} exp(i mu_R x e^s - i mu_L / x) dx on the ray x = r e^{i theta}.

    For 0 < theta < pi/2 both exponents decay on the ray; the substitution r = e^v
    turns the integral into a doubly exponentially decaying integrand.
    """
    _check_mu(mu_L, mu_R)
    if not 0 < theta < math.pi / 2:
        raise DomainError("contour angle must lie in (0, pi/2)")
    nu = complex(nu)
    rot = cmath.exp(1j * theta)
    A = -1j * mu_R * math.exp(s) * rot  # exponent -A r
    B = 1j * mu_L / rot  # exponent -B / r
    if A.real <= 0 or B.real <= 0:
        raise QuadratureError("rotated exponents do not decay")
    # saddle near r* = sqrt(|B|/|A|); integrate a window in v = log r around it
    c = 0.5 * math.log(abs(B) / abs(A))
    reach = 1.0
    while A.real * math.exp(c + reach) < 60 + abs(nu.real) * reach or B.real * math.exp(-(c - reach)) < 60 + abs(nu.real) * reach:
        reach *= 1.3
    f = lambda v: np.exp(-nu * v - A * np.exp(v) - B * np.exp(-v))
    return cmath.exp(-1j * theta * nu) * _trapezoid_line(f, c - reach, c + reach)


def whittaker_integral(p: int, params: WhittakerParams, phi: Sequence[float], theta: float = math.pi / 4, **kw) -> complex:
    """Toda wave function Psi(phi) for p = 2, 3, normalized only up to a lam-dependent constant.

    Psi solves (Laplacian - 2 sum_i mu^L_i mu^R_i e^{alpha_i.phi}) Psi = lam^2 Psi.

    p = 2: e^{-lam.phi} int x^{-(nu+1)} exp(i mu^R x e^{s} - i mu^L / x) dx with nu = lam.alpha,
    s = alpha.phi (the minors of x S^{-1} are Delta_1 = x, Delta_{1,2} = 1), evaluated on a
    rotated ray by whittaker_integral_sl2.
    p = 3: the Gauss-Givental integral, see givental_integral.  ``theta`` is unused there.
    """
    if p != params.p:
        raise DomainError("p does not match the parameters")
    R = RootSystem.of(p)
    lam = R.vector(params.lam)
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (p,):
        raise DomainError(f"phi must be a {p}-vector")
    alpha = [np.array([float(x) for x in a]) for a in R.simple_roots]
    if p == 2:
        pref = cmath.exp(-complex(lam @ phi))
        nu = complex(lam @ alpha[0])
        return pref * whittaker_integral_sl2(nu, params.mu_L[0], params.mu_R[0], float(alpha[0] @ phi), theta)
    if p == 3:
        return givental_integral(lam, params.mu_L, params.mu_R, phi, **kw)
    raise DomainError("Whittaker integrals are implemented for p = 2, 3")


def sl3_minors(a, b, c):
    """Minors of x S^{-1} for x = [[1,a,c],[0,1,b],[0,0,1]], S_ij = delta_{i+j,4}:
    Delta_1 = c, Delta_2 = c - a b, Delta_{1,2} = a, Delta_{2,3} = -b."""
    return c, c - a * b, a, -b


def givental_integral(lam: Sequence[complex], mu_L: Sequence[float], mu_R: Sequence[float], phi: Sequence[float],
                      h: float = 0.25, pad: float | None = None) -> complex:
    """Toda eigenfunction as an absolutely convergent integral over a Gelfand-Tsetlin pattern (p = 2, 3).

    With k = -i lam and external row x = phi + c, c_{i+1} - c_i = log(mu^L_i mu^R_i):
    psi = int prod dy exp(i sum_k k_k (|row k| - |row k-1|) - sum (e^{y_{k,i} - y_{k+1,i}} + e^{y_{k+1,i+1} - y_{k,i}})).
    The integrand decays double exponentially in every direction, so the trapezoidal rule with
    step ``h`` converges geometrically; the box extends ``pad`` beyond the external row.
    """
    lam = np.asarray(lam, dtype=complex)
    phi = np.asarray(phi, dtype=float)
    p = len(phi)
    if p not in (2, 3) or lam.shape != (p,):
        raise DomainError("the pattern integral is implemented for p = 2, 3")
    if abs(lam.sum()) > 1e-12:
        raise DomainError("lambda must have zero sum")
    _check_mu(*mu_L, *mu_R)
    k = -1j * lam
    x = phi + np.concatenate([[0.0], np.cumsum([math.log(mu_L[i] * mu_R[i]) for i in range(p - 1)])])
    if pad is None:
        pad = 9.0 + 4.0 * float(np.max(np.abs(k.imag)))
    y = np.arange(x.min() - pad, x.max() + pad + h / 2, h)
    if p == 2:
        f = np.exp(1j * k[0] * y + 1j * k[1] * (x.sum() - y) - np.exp(y - x[0]) - np.exp(x[1] - y))
        return complex(f.sum() * h)
    Y21, Y22 = np.meshgrid(y, y, indexing="ij")
    row2 = (1j * (k[1] - k[2]) * (Y21 + Y22) + 1j * k[2] * x.sum()
            - np.exp(Y21 - x[0]) - np.exp(x[1] - Y21) - np.exp(Y22 - x[1]) - np.exp(x[2] - Y22))
    total = 0j
    for y11 in y:
        total += np.exp(row2 + 1j * (k[0] - k[1]) * y11 - np.exp(y11 - Y21) - np.exp(Y22 - y11)).sum()
    if not cmath.isfinite(total):
        raise QuadratureError("pattern integral overflowed; lambda too far from the imaginary axis")
    return complex(total * h**3)


def toda_schrodinger_residual(params: WhittakerParams, points: Sequence[Sequence[float]], h: float = 0.05, **kw) -> float:
    """max |(Laplacian - 2 sum mu^L_i mu^R_i e^{alpha_i.phi} - lam^2) Psi| / max term over the points,
    with Psi = whittaker_integral and a five-point stencil along each coordinate."""
    p = params.p
    R = RootSystem.of(p)
    lam = R.vector(params.lam)
    alpha = [np.array([float(x) for x in a]) for a in R.simple_roots]
    wf = lambda v: whittaker_integral(p, params, v, **kw)
    res, scale = 0.0, 0.0
    for pt in points:
        pt = np.asarray(pt, dtype=float)
        f0 = wf(pt)
        lap = 0j
        for axis in range(p):
            e = np.zeros(p)
            e[axis] = h
            v = [wf(pt + m * e) for m in (-2, -1, 1, 2)]
            lap += (-v[0] + 16 * v[1] - 30 * f0 + 16 * v[2] - v[3]) / (12 * h * h)
        pot = 2 * sum(params.mu_L[i] * params.mu_R[i] * math.exp(float(alpha[i] @ pt)) for i in range(p - 1)) * f0
        eig = complex(lam @ lam) * f0
        res = max(res, abs(lap - pot - eig))
        scale = max(scale, abs(lap), abs(pot), abs(eig))
    return res / scale


# -- exact regular representation of SL(2, R) ----------------------------------------------

PHI, CHI, PSI, E = EXP_BASE, "chi", "psi", EXP_GENERATOR
HALF_R = Rational(1, 2)


def _d(f: MultiPoly, var: str) -> MultiPoly:
    return derive(f, var)


def _mulE(f: MultiPoly) -> MultiPoly:
    return f * MultiPoly.var(E)


def _x(name: str) -> MultiPoly:
    return MultiPoly.var(name)


def right_ops():
    """D_R^+ = d_chi, D_R^0 = -2 chi d_chi + d_phi, D_R^- = e^{-2phi} d_psi + chi d_phi - chi^2 d_chi."""
    chi = _x(CHI)
    return {
        "+": lambda f: _d(f, CHI),
        "0": lambda f: chi * _d(f, CHI) * -2 + _d(f, PHI),
        "-": lambda f: _mulE(_d(f, PSI)) + chi * _d(f, PHI) - chi * chi * _d(f, CHI),
    }


def left_ops():
    """D_L^- = d_psi, D_L^0 = -2 psi d_psi + d_phi, D_L^+ = -psi^2 d_psi + psi d_phi + e^{-2phi} d_chi."""
    psi = _x(PSI)
    return {
        "-": lambda f: _d(f, PSI),
        "0": lambda f: psi * _d(f, PSI) * -2 + _d(f, PHI),
        "+": lambda f: -(psi * psi * _d(f, PSI)) + psi * _d(f, PHI) + _mulE(_d(f, CHI)),
    }


def probe_monomials(max_degree: int = 4) -> list:
    """phi^a chi^b psi^c E^e with a + b + c + |e| <= max_degree, e in -1..1."""
    out = []
    for a, b, c in itertools.product(range(max_degree + 1), repeat=3):
        for e in (-1, 0, 1):
            if a + b + c + abs(e) <= max_degree:
                out.append(MultiPoly.monomial({PHI: a, CHI: b, PSI: c, E: e}))
    return out


def _comm(X, Y, f):
    return X(Y(f)) - Y(X(f))


def _casimir(ops, sign: int):
    """1/2 T0^2 + sign T0 + 2 T- T+; sign = +1 for the right action, -1 for the sign-reversed left one."""
    return lambda f: ops["0"](ops["0"](f)) * HALF_R + ops["0"](f) * sign + ops["-"](ops["+"](f)) * 2


def casimir_coordinate(f: MultiPoly) -> MultiPoly:
    """C = 1/2 d_phi^2 + d_phi + 2 e^{-2phi} d_psi d_chi."""
    return _d(_d(f, PHI), PHI) * HALF_R + _d(f, PHI) + _mulE(_d(_d(f, PSI), CHI)) * 2


@dataclass
class RegularRepReport:
    right_sl2: int  # failures of [D0, D+-] = +-2 D+-, [D+, D-] = D0
    left_antisl2: int  # failures of the sign-reversed relations
    left_right: int  # failures of [D_L^a, D_R^b] = 0
    casimir_right: int
    casimir_left: int
    reduction: int  # failures of the reduced Casimir against H = 1/2 d^2 + d - 2 mu_R mu_L E
    jrep_casimir: int  # failures of 2 T- T+ + T0 + T0^2/2 = 2 j (j+1) on the spin-j representation
    monomials: int

    @property
    def ok(self) -> bool:
        return not any((self.right_sl2, self.left_antisl2, self.left_right, self.casimir_right, self.casimir_left, self.reduction, self.jrep_casimir))


def _reduced_casimir(f: MultiPoly) -> MultiPoly:
    """C on e^{k_R chi + k_L psi} f(phi, E), divided by the exponential; k_R = i mu_R, k_L = i mu_L.

    The product k_L k_R = -mu_L mu_R is encoded exactly by k_R -> muR, k_L -> -muL.
    """
    kR, kL = _x("muR"), -_x("muL")
    dchi = lambda g: _d(g, CHI) + kR * g
    dpsi = lambda g: _d(g, PSI) + kL * g
    return _d(_d(f, PHI), PHI) * HALF_R + _d(f, PHI) + _mulE(dpsi(dchi(f))) * 2


def hamiltonian_HG2(f: MultiPoly) -> MultiPoly:
    """H = 1/2 d_phi^2 + d_phi - 2 mu_R mu_L e^{-2phi}."""
    return _d(_d(f, PHI), PHI) * HALF_R + _d(f, PHI) - _mulE(f) * _x("muR") * _x("muL") * 2


def _jrep_ops():
    """T+ = d_x, T0 = -2x d_x + 2j, T- = -x^2 d_x + 2j x with symbolic spin j."""
    x, j = _x("x"), _x("j")
    return {
        "+": lambda f: _d(f, "x"),
        "0": lambda f: x * _d(f, "x") * -2 + j * f * 2,
        "-": lambda f: -(x * x * _d(f, "x")) + j * x * f * 2,
    }


def verify_regular_rep_sl2(max_degree: int = 4) -> RegularRepReport:
    R, L = right_ops(), left_ops()
    mons = probe_monomials(max_degree)
    rel = lambda ops, s: [
        (lambda f: _comm(ops["0"], ops["+"], f) - ops["+"](f) * (2 * s)),
        (lambda f: _comm(ops["0"], ops["-"], f) + ops["-"](f) * (2 * s)),
        (lambda f: _comm(ops["+"], ops["-"], f) - ops["0"](f) * s),
    ]
    count = lambda checks: sum(1 for chk in checks for f in mons if not chk(f).is_zero())
    right = count(rel(R, 1))
    left = count(rel(L, -1))
    lr = sum(1 for a in L.values() for b in R.values() for f in mons if not _comm(a, b, f).is_zero())
    cR, cL = _casimir(R, 1), _casimir(L, -1)
    cas_r = sum(1 for f in mons if not (cR(f) - casimir_coordinate(f)).is_zero())
    cas_l = sum(1 for f in mons if not (cL(f) - casimir_coordinate(f)).is_zero())
    phis = [m for m in mons if m.degree(CHI) == 0 and m.degree(PSI) == 0]
    red = sum(1 for f in phis if not (_reduced_casimir(f) - hamiltonian_HG2(f)).is_zero())
    J = _jrep_ops()
    cj = _casimir(J, 1)
    jv = _x("j")
    xs = [MultiPoly.monomial({"x": k}) for k in range(max_degree + 1)]
    jrep = sum(1 for f in xs if not (cj(f) - f * jv * (jv + 1) * 2).is_zero())
    return RegularRepReport(right, left, lr, cas_r, cas_l, red, jrep, len(mons))

