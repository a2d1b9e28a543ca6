import itertools
import random

import pytest
import sympy
from hypothesis import given, strategies as st

from taulab import fund_reps as fr
from taulab.ncalg import frt_ring
from taulab.scalars import DomainError, Rational
from taulab.schur import TimeVector
from taulab.tau_classical import GrassmannianKernel, tau_det

small = st.integers(-4, 4)


def matrices(p):
    return st.lists(st.lists(small, min_size=p, max_size=p), min_size=p, max_size=p)


def _rand_matrix(rng, p):
    return [[Rational(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(p)] for _ in range(p)]


# -- classical minors ---------------------------------------------------------------------

@given(matrices(4), st.integers(1, 4), st.data())
def test_minor_matches_sympy(g, k, data):
    rows = data.draw(st.sampled_from(list(itertools.combinations(range(1, 5), k))))
    cols = data.draw(st.sampled_from(list(itertools.combinations(range(1, 5), k))))
    oracle = sympy.Matrix(g).extract([i - 1 for i in rows], [j - 1 for j in cols]).det()
    assert fr.minor_elem([[Rational(x) for x in r] for r in g], rows, cols) == int(oracle)


@pytest.mark.parametrize("rows,cols", [((1, 2), (1,)), ((2, 1), (1, 2)), ((1, 5), (1, 2))])
def test_minor_index_errors(rows, cols):
    g = [[Rational(int(i == j)) for j in range(4)] for i in range(4)]
    with pytest.raises(fr.IndexError_):
        fr.minor_elem(g, rows, cols)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_plucker_classical(p):
    rng = random.Random(p)
    for k in range(1, p):
        for k2 in range(1, p + 1):
            rep = fr.verify_plucker_classical(p, k, k2, rng=rng)
            assert rep.ok, (k, k2, rep.failures[:3])


@given(matrices(3))
def test_plucker_classical_integer_matrices(g):
    rep = fr.verify_plucker_classical(3, 1, 2, g=[[Rational(x) for x in r] for r in g])
    assert rep.ok


def test_plucker_residual_detects_wrong_sign():
    rng = random.Random(5)
    g = _rand_matrix(rng, 3)
    # flipping the sign of the right-hand side breaks the identity for a generic matrix
    I, J, I2, J2 = (1,), (1, 2), (2, 3), (3,)
    lhs_minus_rhs = fr.plucker_classical_residual(g, I, J, I2, J2)
    assert lhs_minus_rhs == 0
    rhs = sum((-1) ** b * fr._signed_minor(g, I + (I2[b],), J) * fr._signed_minor(g, I2[:b] + I2[b + 1:], J2) for b in range(2))
    assert rhs != 0


@pytest.mark.parametrize("p,k,k2", [(2, 1, 1), (3, 1, 1), (3, 1, 2), (3, 2, 1), (4, 1, 1)])
def test_plucker_quantum(p, k, k2):
    rep = fr.verify_plucker_quantum(p, k, k2)
    assert rep.ok, rep.failures[:3]


@pytest.mark.parametrize("p,k,k2", [(5, 1, 1), (3, 2, 2), (2, 2, 1)])
def test_plucker_quantum_domain(p, k, k2):
    with pytest.raises(DomainError):
        fr.verify_plucker_quantum(p, k, k2)


def test_quantum_minor_rules():
    ring = frt_ring(3)
    assert fr.quantum_minor(ring, (1, 1), (1, 2)).is_zero()
    assert fr.quantum_minor(ring, (), ()) == ring.one()
    with pytest.raises(fr.IndexError_):
        fr.quantum_minor(ring, (2, 1), (3, 1))


@pytest.mark.parametrize("p", [2, 3, 4])
def test_quantum_minors_classical_limit(p):
    from taulab.polyalg import MultiPoly

    ring = frt_ring(p)
    names = ring.gens
    g = [[MultiPoly.var(names[i * p + j]) for j in range(p)] for i in range(p)]
    for k in range(1, p + 1):
        for I in itertools.combinations(range(1, p + 1), k):
            for J in itertools.combinations(range(1, p + 1), k):
                q = fr.quantum_minor(ring, I, J).at_u1().to_commutative()
                assert (q - fr.minor_elem(g, I, J)).is_zero()


# -- classical tau in fundamental representations ------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 4])
def test_commuting_flows(p):
    assert fr.commutator_residuals(p) == 0


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("p", [2, 3, 4])
def test_tau_fund_matches_moment_determinant(p, seed):
    g = _rand_matrix(random.Random(seed), p)
    t, tb = TimeVector.symbolic("t", p - 1), TimeVector.symbolic("tbar", p - 1)
    R = GrassmannianKernel(g)
    for n in range(p + 1):
        assert (fr.tau_fund(n, g, t, tb) - tau_det(n, R, t, tb)).is_zero()


@pytest.mark.parametrize("p", [2, 3, 4])
def test_tau_fund_top_level_is_det(p):
    g = _rand_matrix(random.Random(11), p)
    assert fr.tau_fund(p, g).is_zero() is False
    assert (fr.tau_fund(p, g) - fr.minor_elem(g, range(1, p + 1), range(1, p + 1))).is_zero()


@pytest.mark.parametrize("p", [3, 4])
def test_derivative_property(p):
    g = _rand_matrix(random.Random(2), p)
    assert all(a.is_zero() and b.is_zero() for a, b in fr.verify_derivative_property(g))


@pytest.mark.parametrize("p", [2, 3, 4])
def test_toda_fund(p):
    g = _rand_matrix(random.Random(p + 20), p)
    for n in range(1, p):
        assert fr.verify_toda_fund(g, n).is_zero()


def test_tau_fund_domain():
    with pytest.raises(DomainError):
        fr.tau_fund(4, _rand_matrix(random.Random(0), 3))


# -- U_q(sl_p) fundamental representations -----------------------------------------------------

@pytest.mark.parametrize("quantum", [True, False])
@pytest.mark.parametrize("p,k", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_uq_fund_basis(p, k, quantum):
    rep = fr.uq_fund_basis(p, k, quantum)
    assert len(rep.basis) == sympy.binomial(p, k)
    assert rep.highest_weight_residual() == 0
    assert rep.closure_residual() == 0
    assert rep.weight_residuals() == 0
    if k == 2:
        assert rep.lowering_residuals() == 0
    else:
        with pytest.raises(DomainError):
            rep.lowering_residuals()


def test_uq_fund_basis_domain():
    with pytest.raises(DomainError):
        fr.uq_fund_basis(3, 3)


# -- tau_2 and co-multiplication ---------------------------------------------------------------

def test_tau2_twist_report():
    rep = fr.verify_tau2_twist()
    assert rep.ok
    assert rep.operator_residual.is_zero()
    assert rep.compact_fixed_residual.is_zero()
    assert rep.classical_residual.is_zero()
    # the order of shift and derivative matters
    assert not rep.order_swapped_residual.is_zero()


def test_tau2_compact_printed_form_differs():
    rep = fr.verify_tau2_twist()
    assert not rep.compact_printed_residual.is_zero()


@pytest.mark.parametrize("seed", [0, 1])
def test_coprod_product(seed):
    rep = fr.verify_coprod_product(3, 2, seed=seed)
    assert rep.ok and rep.checked == 3 * 3**4


def test_coprod_domain():
    with pytest.raises(DomainError):
        fr.verify_coprod_product(3, 3)
