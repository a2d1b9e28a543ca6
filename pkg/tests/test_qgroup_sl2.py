import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from taulab import qgroup_sl2 as qg
from taulab import scalars as sc
from taulab.polyalg import MultiPoly, substitute
from taulab.scalars import DomainError, HalfInt

SPINS = [HalfInt(1), HalfInt(2), HalfInt(3)]
PAIRS = list(itertools.product(SPINS, repeat=2))
nonzero_frac = st.fractions(min_value=-5, max_value=5, max_denominator=6).filter(lambda x: x != 0)
frac = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def _u1(x):
    return qg.reduce_sl2(x.at_u1().to_commutative())


# -- Verma module ---------------------------------------------------------------------

@pytest.mark.parametrize("twice", range(0, 7))
def test_singular_coefficient_vanishes(twice):
    assert sc.to_scalar(qg.singular_coefficient(HalfInt(twice))) == 0


@pytest.mark.parametrize("classical", [True, False])
@pytest.mark.parametrize("twice", [1, 2, 3, 5])
def test_verma_relations(twice, classical):
    V = qg.VermaModule(HalfInt(twice), 6, classical)
    assert all(r == 0 for r in V.relation_residuals())


def test_verma_matrices_commutator_matches_cartan():
    V = qg.VermaModule(HalfInt(3), 4, classical=True)
    Tp, Tm, T0 = V.matrices()
    for n in range(3):
        comm = sum(Tp[i][k] * Tm[k][n] - Tm[i][k] * Tp[k][n] for i in [n] for k in range(4))
        assert comm == 2 * T0[n][n]


# -- group elements ---------------------------------------------------------------------

@given(frac, nonzero_frac, frac)
def test_from_triple_has_unit_determinant(xp, D, xm):
    g = qg.GroupElementSL2.from_triple(xp, D, xm)
    assert g.det() == 1


@given(frac, nonzero_frac, frac)
def test_group_element_json_round_trip(xp, D, xm):
    g = qg.GroupElementSL2.from_triple(xp, D, xm)
    back = qg.GroupElementSL2.from_json(json.dumps(g.to_json()))
    assert back == g


@pytest.mark.parametrize("payload", [
    "not json",
    {"a": 2, "b": 0, "c": 0, "d": 1},
    {"x_plus": 1, "x_0": 1},
    {"x_plus": 1, "e_half_x0": 0},
    {"q": 1},
    {"a": "x", "b": 0, "c": 0, "d": 1},
])
def test_group_element_rejects(payload):
    with pytest.raises(qg.GroupElementError):
        qg.GroupElementSL2.from_json(payload if isinstance(payload, str) else json.dumps(payload))


# -- classical tau and its bilinear identities -------------------------------------------

@pytest.mark.parametrize("twice", [1, 2, 3, 4])
def test_verma_route_matches_closed_form(twice):
    """Matrix element in the irrep equals (a + b tb + c t + d t tb)^{2 lam} with a..d from the Gauss factors."""
    tau, abcd = qg.verma_tau_sl2(HalfInt(twice))
    g = qg.GroupElementSL2.from_abcd(*(abcd[k] for k in "abcd"))
    assert (tau - qg.classical_tau_sl2(HalfInt(twice), g)).is_zero()


@pytest.mark.parametrize("lam,lam2", PAIRS)
def test_eqA_symbolic(lam, lam2):
    assert qg.verify_eqA(lam, lam2).is_zero()


@pytest.mark.parametrize("lam,lam2", PAIRS + [(HalfInt(0), HalfInt(1)), (HalfInt(2), HalfInt(0))])
def test_eqB_symbolic(lam, lam2):
    assert qg.verify_eqB(lam, lam2).is_zero()


@given(frac, nonzero_frac, frac)
def test_eqA_numeric_group_elements(xp, D, xm):
    g = qg.GroupElementSL2.from_triple(xp, D, xm)
    assert qg.verify_eqA(HalfInt(1), HalfInt(2), g).is_zero()
    assert qg.verify_eqB(HalfInt(2), HalfInt(1), g).is_zero()


def test_eqA_needs_unit_determinant():
    g = qg.GroupElementSL2.from_abcd(2, 0, 0, 1, check=False)
    assert not qg.verify_eqA(HalfInt(1), HalfInt(1), g).is_zero()


@pytest.mark.parametrize("lam", SPINS)
def test_expansion_identities(lam):
    first, second = qg.expeq_residuals(lam)
    assert first.is_zero() and second.is_zero()


def test_eqA_domain():
    with pytest.raises(DomainError):
        qg.verify_eqA(HalfInt(0), HalfInt(1))


# -- c-number quantum solutions ------------------------------------------------------------

@pytest.mark.parametrize("lam,lam2", PAIRS)
def test_qeqA(lam, lam2):
    assert qg.verify_qeqA(lam, lam2).is_zero()


@pytest.mark.parametrize("lam", SPINS)
def test_qsol_supporting(lam):
    r1, r2 = qg.qsol_supporting(lam)
    assert r1.is_zero() and r2.is_zero()


@pytest.mark.parametrize("lam", SPINS)
def test_qtau_cnumber_classical_limit(lam):
    al = MultiPoly.var("alpha")
    g = qg.GroupElementSL2.from_abcd(al, MultiPoly.zero(), MultiPoly.zero(), al**-1)
    assert (qg.qtau_cnumber(lam).at_u1() - qg.classical_tau_sl2(lam, g)).is_zero()


@pytest.mark.parametrize("lam,lam2", PAIRS)
def test_qeqB_only_verbatim_reading_holds(lam, lam2):
    readings = qg.qeqB_readings(lam, lam2)
    assert set(readings) == set(qg.QEQB_READINGS)
    assert readings["verbatim"]
    assert not any(v for k, v in readings.items() if k != "verbatim")


# -- noncommutative tau -----------------------------------------------------------------------

def test_sl2hirota_report():
    rep = qg.verify_sl2hirota()
    assert rep.ok
    # with the dilation placed on t instead of tb the identity fails
    assert not rep.printed_residual.is_zero()


def test_kos_trivial_symbolic_and_numeric():
    assert qg.verify_kos_trivial().is_zero()
    assert qg.verify_kos_trivial(Fraction(3, 7)).is_zero()


def test_trivial_representation_of_tau_half():
    img = qg.trivial_representation(qg.nc_tau_half())
    a, t, tb = (MultiPoly.var(x) for x in ("a", "t", "tb"))
    assert (img - (a + t * tb * a**-1)).is_zero()


@pytest.mark.parametrize("twice", [2, 3, 4])
def test_factorization(twice):
    assert qg.verify_factorization(HalfInt(twice)).is_zero()


def test_factorization_domain():
    with pytest.raises(DomainError):
        qg.verify_factorization(HalfInt(1))


@pytest.mark.parametrize("twice", [1, 2, 3])
def test_nc_matrix_elements_classical_limit(twice):
    lam = HalfInt(twice)
    for k in range(twice + 1):
        for n in range(twice + 1):
            img = _u1(qg.nc_matrix_element(lam, k, n))
            assert (img - qg.reduce_sl2(qg.classical_matrix_element(lam, k, n))).is_zero()


def test_nc_matrix_element_index_range():
    with pytest.raises(DomainError):
        qg.nc_matrix_element(HalfInt(1), 2, 0)


@pytest.mark.parametrize("twice", [1, 2, 3])
def test_nc_tau_classical_limit(twice):
    lam = HalfInt(twice)
    assert (_u1(qg.nc_tau(lam)) - qg.reduce_sl2(qg.classical_tau_sl2(lam))).is_zero()


@pytest.mark.parametrize("D", [1, 2, 3])
def test_universal_T(D):
    rep = qg.universal_T(D)
    assert rep.ok and rep.max_terms == 0


def test_universal_T_degree():
    with pytest.raises(DomainError):
        qg.universal_T(0)


# -- operator representation -------------------------------------------------------------------

@given(
    st.floats(0.1, 0.9),
    st.complex_numbers(min_magnitude=0.2, max_magnitude=3, allow_nan=False, allow_infinity=False),
    st.integers(4, 12),
)
def test_woronowicz_relations(q, theta, N):
    res = qg.woronowicz_rep(N, theta, q).relation_residuals()
    assert max(res.values()) < 1e-12


@pytest.mark.parametrize("N,theta,q", [(3, 1, 0.5), (6, 0, 0.5), (6, 1, 1.0), (6, 1, 0.0)])
def test_woronowicz_domain(N, theta, q):
    with pytest.raises(DomainError):
        qg.woronowicz_rep(N, theta, q)


def test_identity_group_element_tau():
    # sanity: classical tau at identity group element is 1 + t tb to the 2 lam
    one = qg.GroupElementSL2.from_abcd(1, 0, 0, 1)
    t, tb = MultiPoly.var("t"), MultiPoly.var("tb")
    assert (qg.classical_tau_sl2(HalfInt(3), one) - (1 + t * tb) ** 3).is_zero()
    assert substitute(qg.classical_tau_sl2(HalfInt(1)), {"t": MultiPoly.zero(), "tb": MultiPoly.zero()}) == MultiPoly.var("a")
