import random

import pytest
from hypothesis import given, settings, strategies as st

from taulab import kos
from taulab import scalars as sc
from taulab.polyalg import MultiPoly, substitute
from taulab.scalars import DomainError
from taulab.schur import TimeVector
from taulab.tau_classical import GrassmannianKernel, tau_det, verify_toda_eq


def _kernel(seed, size=3):
    return GrassmannianKernel.random(random.Random(seed), size)


def test_jackson_derivative_lowers_powers():
    s = MultiPoly.var("s1")
    # D s^n = [n]_{q^2} s^{n-1} with the nonsymmetric number; at u = 1 it is n s^{n-1}
    for n in range(1, 6):
        d = kos.D(s**n, "s1")
        assert (d.at_u1() - s ** (n - 1) * n).is_zero()


@pytest.mark.parametrize("k", range(9))
def test_qschur_keystone(k):
    assert kos.qschur_keystone(8)[k].is_zero()


@pytest.mark.parametrize("seed", range(4))
def test_shift_residuals(seed):
    kt = kos.KosTau.symbolic(_kernel(seed), kos.DEFAULT_K)
    assert all(r.is_zero() for r in kt.shift_residuals())


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_derivative_and_entry_forms_agree(seed, n):
    kt = kos.KosTau.symbolic(_kernel(seed), kos.DEFAULT_K)
    assert (kt.tau(n, "derivative") - kt.tau(n, "entries")).is_zero()


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("n", [1, 2])
def test_keystone_tau(seed, n):
    assert kos.keystone_residual(n, _kernel(seed)).is_zero()


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("n", [1, 2])
def test_kos_adopted_form(seed, n):
    assert kos.verify_kos(_kernel(seed), n).is_zero()


def test_kos_printed_form_fails():
    R = _kernel(0)
    assert not kos.verify_kos(R, 1, form="printed").is_zero()


@pytest.mark.parametrize("seed", range(3))
def test_kos_classical_limit(seed):
    R = _kernel(seed)
    for n in (1, 2):
        assert kos.verify_kos(R, n).at_u1().is_zero()
        assert verify_toda_eq(R, n).is_zero()


def test_identity_kernel_levels():
    R = GrassmannianKernel.identity(3)
    kt = kos.KosTau.symbolic(R)
    assert kt.tau(0) == MultiPoly.const(1)
    t, tb = TimeVector.symbolic("t", 3), TimeVector.symbolic("tbar", 3)
    for n in (1, 2):
        limit = kt.tau(n).at_u1()
        ren = {v: MultiPoly.var(v.replace("sb", "tb").replace("s", "t")) for v in limit.vars}
        assert (substitute(limit, ren) - tau_det(n, R, t, tb)).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_det_shift_adopted(n):
    assert kos.verify_det_shift(n).is_zero()


@pytest.mark.parametrize("n", [2, 3])
def test_det_shift_printed_factor_fails(n):
    assert not kos.verify_det_shift(n, form="printed").is_zero()


def test_det_shift_prefactor_trivial_at_n1():
    for form in kos.KOS_FORMS:
        assert kos.det_shift_prefactor(1, form) == MultiPoly.const(1)


def test_det_shift_prefactor_has_pole_at_u1():
    with pytest.raises(sc.LimitError):
        kos.det_shift_prefactor(2).at_u1()


@settings(max_examples=15)
@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_det_shift_on_integer_entries(cs):
    s, sb = MultiPoly.var(kos.S1), MultiPoly.var(kos.SB1)
    C = cs[0] + cs[1] * s + cs[2] * sb + cs[3] * s * sb * s
    assert kos.verify_det_shift(2, C).is_zero()


@pytest.mark.parametrize("call", [
    lambda: kos.verify_kos(_kernel(0), 0),
    lambda: kos.verify_det_shift(0),
    lambda: kos.KosTau.symbolic(_kernel(0)).tau(1, "bogus"),
    lambda: kos.kos_residual({m: MultiPoly.const(1) for m in range(3)}, 1, "bogus"),
])
def test_domain_errors(call):
    with pytest.raises(DomainError):
        call()


def test_random_kernels_deterministic():
    a = kos.random_kernels(3, 3, seed=9)
    b = kos.random_kernels(3, 3, seed=9)
    assert [k.R for k in a] == [k.R for k in b]
