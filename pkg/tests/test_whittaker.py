import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from taulab import whittaker as W
from taulab.scalars import DomainError

orders = st.floats(-3, 3, allow_nan=False)
args = st.floats(0.2, 8, allow_nan=False)


# -- Gamma and Macdonald functions -------------------------------------------------------

@given(st.complex_numbers(max_magnitude=6, allow_nan=False, allow_infinity=False).filter(lambda z: abs(z - round(z.real)) > 1e-3))
def test_gamma_matches_mpmath(z):
    ref = complex(mp.gamma(z))
    assert abs(W.gamma(z) - ref) <= 1e-11 * max(1.0, abs(ref))


@pytest.mark.parametrize("z", [0, -1, -4])
def test_gamma_poles(z):
    with pytest.raises(W.PoleError):
        W.gamma(z)
    assert W.rgamma(z) == 0


@pytest.mark.parametrize("z", np.linspace(0.1, 5, 12))
def test_k_half_closed_form(z):
    ref = math.sqrt(math.pi / (2 * z)) * math.exp(-z)
    assert abs(W.macdonald_k(0.5, z) - ref) / ref < 1e-10


@given(orders, args)
def test_k_real_order_matches_scipy(nu, z):
    ref = special.kv(nu, z)
    assert abs(W.macdonald_k(nu, z) - ref) <= 1e-11 * abs(ref)


@settings(max_examples=20)
@given(st.floats(0.05, 3), args)
def test_k_imaginary_order_matches_mpmath(b, z):
    ref = complex(mp.besselk(1j * b, z))
    assert abs(W.macdonald_k(1j * b, z) - ref) <= 1e-10 * max(abs(ref), math.exp(-z) * 1e-3)


@given(orders, args)
def test_k_even_in_order(nu, z):
    a, b = W.macdonald_k(nu, z), W.macdonald_k(-nu, z)
    assert abs(a - b) <= 1e-12 * abs(a)


@given(st.floats(-2, 2), args)
def test_k_recurrence(nu, z):
    # K_{nu+1} - K_{nu-1} = (2 nu / z) K_nu
    lhs = W.macdonald_k(nu + 1, z) - W.macdonald_k(nu - 1, z)
    rhs = 2 * nu / z * W.macdonald_k(nu, z)
    assert abs(lhs - rhs) <= 1e-11 * max(abs(W.macdonald_k(nu + 1, z)), 1e-300)


@pytest.mark.parametrize("nu", [0.3, 0.5j, 1.2 + 0.4j])
def test_series_route(nu):
    for z in (0.3, 1.0, 2.5):
        assert abs(W.macdonald_k_series(nu, z) - W.macdonald_k(nu, z)) < 1e-10 * abs(W.macdonald_k(nu, z))


def test_asymptotic_route():
    for nu in (0.2, 1j):
        assert abs(W.macdonald_k_asymptotic(nu, 30.0) / W.macdonald_k(nu, 30.0) - 1) < 1e-12


def test_k_domain():
    with pytest.raises(DomainError):
        W.macdonald_k(0.5, 0.0)
    with pytest.raises(DomainError):
        W.macdonald_k_series(2, 1.0)


# -- Liouville wave function ---------------------------------------------------------------

@pytest.mark.parametrize("j", [0.25j, 0.5j, -0.5 + 0.3j])
def test_schrodinger_residual(j):
    grid = np.arange(-2.0, 4.0 + 1e-9, 0.1)
    assert W.schrodinger_residual(j, 1.0, 1.0, grid) < 1e-6


def test_schrodinger_residual_detects_wrong_energy():
    a, b, c = W.schrodinger_terms(0.5j, 1.0, 1.0, 0.3)
    assert abs(a - b - c) < 1e-7 * abs(c)
    assert abs(a - b - 1.1 * c) > 1e-3 * abs(c)


def test_wave_function_oracle():
    j, muL, muR, phi = 0.3j, 1.5, 0.6, 0.4
    nu = 2 * j + 1
    ref = 2 * (1j * mp.sqrt(muL / muR)) ** (-nu) * mp.besselk(nu, 2 * mp.sqrt(muL * muR) * mp.e ** (-phi))
    assert abs(W.liouville_wf(j, muL, muR, phi) - complex(ref)) < 1e-12 * abs(complex(ref))


def test_mu_must_be_positive():
    with pytest.raises(DomainError):
        W.liouville_wf(0.5j, 0.0, 1.0, 0.0)


# -- Harish-Chandra functions and the S-matrix ---------------------------------------------

@pytest.mark.parametrize("lam", [0.5j, 1j, 2j])
def test_harish_chandra_fit(lam):
    fit = W.fit_harish_chandra(lam)
    ref = W.gamma(1 - lam) / W.gamma(1 + lam)
    assert abs(fit.ratio - ref) < 1e-3
    cp, cm = W.harish_chandra_sl2(lam)
    assert abs(fit.ratio - cp / cm) < 1e-3
    assert fit.to_json()["fit_residual"] == fit.fit_residual


def test_harish_chandra_fit_rescaled_mu():
    fit = W.fit_harish_chandra(1j, mu_L=2.0, mu_R=0.5)
    assert abs(fit.ratio - W.gamma(1 - 1j) / W.gamma(1 + 1j)) < 1e-3


def test_smatrix_values():
    S = W.smatrix_liouville_ft
    assert abs(S(0, 1.0) - 1) < 1e-12
    assert abs(S(0.5, 1.0) - 0.25) < 1e-10
    with pytest.raises(W.PoleError):
        S(1, 1.0)
    with pytest.raises(DomainError):
        S(0.2, 0.0)


@given(st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False), st.floats(1.0, 4.0))
def test_smatrix_reflection(p, tau):
    S = W.smatrix_liouville_ft
    assert abs(S(p, tau) * S(-p, tau) - 1) < 1e-12


@given(st.floats(-3, 3), st.floats(0.5, 4))
def test_smatrix_unitary_on_imaginary_axis(b, tau):
    assert abs(abs(W.smatrix_liouville_ft(1j * b, tau)) - 1) < 1e-12


def test_smatrix_matches_mpmath():
    p, tau = 0.3 + 0.2j, 1.7
    ref = mp.gamma(1 + p) * mp.gamma(1 + p / tau) / (mp.gamma(1 - p) * mp.gamma(1 - p / tau))
    assert abs(W.smatrix_liouville_ft(p, tau) - complex(ref)) < 1e-12


# -- root systems -------------------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 4, 5])
def test_root_system(p):
    R = W.RootSystem.of(p)
    assert len(R.weyl_group()) == math.factorial(p)
    assert len(R.positive_roots) == p * (p - 1) // 2
    assert R.duality_defect() == 0
    # rho . alpha_i = 1 for simple roots
    assert all(sum(a * b for a, b in zip(R.rho, al)) == 1 for al in R.simple_roots)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_weyl_covariance(p):
    R = W.RootSystem.of(p)
    lam = [0.7j * (k + 1) for k in range(p - 1)]
    for w in R.weyl_group():
        a = W.harish_chandra_slp(p, lam, w)
        b = W.harish_chandra_slp_roots(p, lam, w)
        assert abs(a - b) < 1e-12


def test_harish_chandra_slp_reduces_to_sl2():
    lam = 0.9j
    c = W.harish_chandra_slp(2, [lam])
    assert abs(c - W.rgamma(1 + lam)) < 1e-14


@pytest.mark.parametrize("text,ok", [("132", True), ("123", True), ("112", False), ("1234", False)])
def test_parse_weyl(text, ok):
    if ok:
        assert W.parse_weyl(text, 3) == tuple(int(c) for c in text)
    else:
        with pytest.raises(DomainError):
            W.parse_weyl(text, 3)


# -- Gauss decomposition ---------------------------------------------------------------------

@given(st.lists(st.integers(-4, 4), min_size=9, max_size=9))
def test_ldu_reconstructs(entries):
    g = [entries[0:3], entries[3:6], entries[6:9]]
    try:
        L, D, U = W.ldu(g)
    except DomainError:
        return
    for i in range(3):
        for j in range(3):
            assert sum(L[i][k] * D[k] * U[k][j] for k in range(3)) == g[i][j]
    # pivots are ratios of leading minors
    for i in range(1, 4):
        assert W.gauss_minors(g, i)[2] == D[i - 1]


def test_ldu_needs_nonzero_minors():
    with pytest.raises(DomainError):
        W.ldu([[0, 1], [1, 0]])


# -- Whittaker integrals -----------------------------------------------------------------------

def test_sl2_integral_closed_form():
    nu, a, b = 0.8j, 1.3, 0.7
    I = W.whittaker_integral_sl2(nu, b, 1.0, math.log(a))
    ref = 2 * mp.exp(-nu / 2 * (mp.log(b / a) + 1j * mp.pi)) * mp.besselk(nu, 2 * mp.sqrt(a * b))
    assert abs(I - complex(ref)) < 1e-10


def test_sl2_integral_against_direct_quadrature():
    nu, a, b = 0.4 + 0.3j, 0.9, 1.4
    rot = cmath.exp(1j * math.pi / 4)
    f = lambda r: (r * rot) ** (-(nu + 1)) * mp.exp(1j * a * r * rot - 1j * b / (r * rot)) * rot
    ref = complex(mp.quad(f, [0, 0.1, 1, 10, mp.inf]))
    assert abs(W.whittaker_integral_sl2(nu, b, a, 0.0) - ref) < 1e-10


def test_p2_integral_tracks_wave_function():
    nu = 0.8j
    P = W.WhittakerParams(2, (nu,), (1.0,), (1.0,))
    ratios = []
    for s in np.linspace(0, 2, 9):
        I = W.whittaker_integral(2, P, np.array([-s / 2, s / 2]))
        ratios.append(I / W.macdonald_k(nu, 2 * math.exp(s / 2)))
    assert max(abs(r / ratios[0] - 1) for r in ratios) < 1e-6


@pytest.mark.parametrize("theta", [0.3, math.pi / 4, 1.2])
def test_sl2_integral_contour_independent(theta):
    ref = W.whittaker_integral_sl2(0.6j, 1.1, 0.9, 0.4)
    assert abs(W.whittaker_integral_sl2(0.6j, 1.1, 0.9, 0.4, theta=theta) - ref) < 1e-10 * abs(ref)


@pytest.mark.parametrize("abc", [(1, 2, 3), (-2, 0.5, 1.5), (0.3, -1, 2)])
def test_sl3_minors_match_gauss_minors(abc):
    a, b, c = abc
    x = np.array([[1, a, c], [0, 1, b], [0, 0, 1]], dtype=float)
    S = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=float)
    g = (x @ np.linalg.inv(S)).tolist()
    d1, d2, d12, d23 = W.sl3_minors(a, b, c)
    m1, s1, _ = W.gauss_minors(g, 1)
    m2, s2, _ = W.gauss_minors(g, 2)
    assert np.allclose([m1, m2, s1, s2], [d1, d2, d12, d23])


def test_pattern_integral_p2_is_macdonald():
    lam = np.array([-0.4j, 0.4j])
    ratios = []
    for s in np.linspace(-1, 2, 7):
        phi = np.array([-s / 2, s / 2])
        ratios.append(W.givental_integral(lam, (1.0,), (1.0,), phi) / W.macdonald_k(0.8j, 2 * math.exp(s / 2)))
    assert max(abs(r / ratios[0] - 1) for r in ratios) < 1e-9


def test_pattern_integral_step_converged():
    args = (np.array([0.3j, 0.2j, -0.5j]), (1.0, 2.0), (0.5, 1.0), np.array([0.4, -0.1, 0.2]))
    a = W.givental_integral(*args, h=0.25)
    b = W.givental_integral(*args, h=0.2)
    assert abs(a - b) < 1e-10 * abs(a)


@pytest.mark.parametrize("p,lam,muL,muR", [
    (2, (0.8j,), (1.3,), (0.6,)),
    (3, (0.5j, 0.7j), (1.0, 1.0), (1.0, 1.0)),
    (3, (0.5j, 0.7j), (1.3, 0.8), (0.6, 1.1)),
    (3, (0.2 + 0.9j, -0.1j), (1.0, 1.0), (1.0, 1.0)),
])
def test_toda_schrodinger(p, lam, muL, muR):
    P = W.WhittakerParams(p, lam, muL, muR)
    pts = [np.linspace(0.2, -0.2, p), np.linspace(-0.5, 0.4, p)]
    assert W.toda_schrodinger_residual(P, pts) < 1e-6


def test_p3_asymptotics_follow_harish_chandra():
    """Deep in the free region Psi ~ sum_w sign(w) c_w(lam) e^{(w lam).phi}, as for the normalized p = 2 wave."""
    R = W.RootSystem.of(3)
    lam = (0.8j, 1.1j)
    P = W.WhittakerParams(3, lam, (1.0, 1.0), (1.0, 1.0))
    vec = R.vector(lam)
    rng = np.random.default_rng(0)
    pts, vals = [], []
    for _ in range(14):
        s1, s2 = rng.uniform(-11, -9, 2)
        x = np.array([0.0, s1, s1 + s2])
        x -= x.mean()
        pts.append(x)
        vals.append(W.whittaker_integral(3, P, x))
    group = R.weyl_group()
    X = np.array([[np.exp(np.asarray(R.act(w, vec)) @ x) for w in group] for x in pts])
    coef, *_ = np.linalg.lstsq(X, np.array(vals), rcond=None)
    sign = lambda w: (-1) ** sum(1 for i in range(3) for j in range(i + 1, 3) if w[i] > w[j])
    ref = [sign(w) * W.harish_chandra_slp(3, lam, w) for w in group]
    for c, r in zip(coef, ref):
        assert abs(c / coef[0] - r / ref[0]) < 1e-3


def test_pattern_integral_domain():
    with pytest.raises(DomainError):
        W.givental_integral(np.array([0.1j, 0.2j, 0.3j]), (1, 1), (1, 1), np.zeros(3))
    with pytest.raises(DomainError):
        W.whittaker_integral(4, W.WhittakerParams(4, (0.1j,) * 3, (1,) * 3, (1,) * 3), np.zeros(4))


@pytest.mark.parametrize("kwargs", [
    dict(p=1, lam=(), mu_L=(), mu_R=()),
    dict(p=2, lam=(0.5j,), mu_L=(1.0, 1.0), mu_R=(1.0,)),
    dict(p=2, lam=(0.5j,), mu_L=(-1.0,), mu_R=(1.0,)),
])
def test_params_validation(kwargs):
    with pytest.raises(DomainError):
        W.WhittakerParams(**kwargs)


def test_integral_contour_angle():
    with pytest.raises(DomainError):
        W.whittaker_integral_sl2(0.5j, 1.0, 1.0, 0.0, theta=0.0)


# -- regular representation ----------------------------------------------------------------------

def test_regular_representation():
    rep = W.verify_regular_rep_sl2()
    assert rep.ok
    assert rep.monomials > 0
