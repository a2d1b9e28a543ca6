"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line (also collected for the pytest summary) and
asserts the criterion at its stated tolerance.
"""

import itertools
import math
import random
import time

import numpy as np

from acceptance_log import LINES
from taulab import classical_limit, fock_oracle, fund_reps, kos, qgroup_sl2 as qg, tau_classical, whittaker
from taulab.ncalg import frt_ring, verify_pbw_confluence
from taulab.scalars import HalfInt
from taulab.schur import TimeVector

SPINS = (HalfInt(1), HalfInt(2), HalfInt(3))


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}  {title}: {detail}"
    LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_toda_bilinear():
    rng = random.Random(2024)
    K = 3
    t, tb = TimeVector.symbolic("t", K), TimeVector.symbolic("tbar", K)
    start = time.perf_counter()
    bad, checked = [], 0
    for i in range(20):
        R = tau_classical.GrassmannianKernel.random(rng, 2 + i % 4)
        for n in (1, 2):
            checked += 1
            if not tau_classical.verify_toda_eq(R, n, t, tb).is_zero():
                bad.append((i, n))
    elapsed = time.perf_counter() - start
    record(1, "Toda bilinear identity", not bad and elapsed < 60,
           f"{checked} residuals over 20 kernels (sizes 2..5, K=3), {len(bad)} nonzero, {elapsed:.1f} s")


def test_criterion_02_toda_molecule():
    rng = random.Random(77)
    t, tb = TimeVector.symbolic("t", 3), TimeVector.symbolic("tbar", 3)
    reports = []
    for p in (2, 3):
        for _ in range(5):
            R = tau_classical.GrassmannianKernel.random_rank(rng, p + 2, p)
            reports.append(tau_classical.verify_molecule(p, R, t, tb))
    bad = [r.p for r in reports if not r.ok]
    record(2, "Toda molecule", len(reports) >= 10 and not bad,
           f"{len(reports)} rank-2/3 kernels: tau_(p+1) = 0, wave equation and rebuild exact; {len(bad)} failures")


def _window_times(rng, M, n, K):
    while K > 0 and not fock_oracle.in_safe_window(M, n, K):
        K -= 1
    return list(rng.uniform(-0.3, 0.3, size=K))


def test_criterion_03_fock_oracle():
    M = 4
    F = fock_oracle.build_fock(M)
    rng = np.random.default_rng(11)
    car = fock_oracle.car_residual(F)
    tau_err, bi_err, bi_cases, tau_cases = 0.0, 0.0, 0, 0
    for _ in range(10):
        g = fock_oracle.group_exp(F, fock_oracle.random_bilinear(rng, M))
        for n in (0, 1):
            t, tb = _window_times(rng, M, n, 3), _window_times(rng, M, n, 3)
            tau_err = max(tau_err, abs(fock_oracle.tau_fock(F, n, g, t, tb) - fock_oracle.tau_det_window(F, n, g.R, t, tb)))
            tau_cases += 1
        for n, m in ((0, 0), (1, 0)):
            t, tb, t2, tb2 = (list(rng.uniform(-0.3, 0.3, size=2)) for _ in range(4))
            bi_err = max(bi_err, fock_oracle.verify_bi_fock(F, g, n, m, t, tb, t2, tb2))
            bi_cases += 1
    ok = tau_err < 1e-8 and bi_err < 1e-8 and car < 1e-12 and bi_cases >= 20
    record(3, "Fock oracle", ok,
           f"M=4: tau max err {tau_err:.2e} on {tau_cases} cases, bilinear {bi_err:.2e} on {bi_cases}, CAR {car:.2e}")


def test_criterion_04_sl2_classical():
    bad = []
    for lam, lam2 in itertools.product(SPINS, repeat=2):
        if not qg.verify_eqA(lam, lam2).is_zero():
            bad.append(("A", str(lam), str(lam2)))
        if not qg.verify_eqB(lam, lam2).is_zero():
            bad.append(("B", str(lam), str(lam2)))
    record(4, "SL(2) bilinear identities", not bad, f"18 symbolic checks with ad - bc = 1, failures {bad}")


def test_criterion_05_slq2_cnumber():
    bad = [(str(a), str(b)) for a, b in itertools.product(SPINS, repeat=2) if not qg.verify_qeqA(a, b).is_zero()]
    support = [str(lam) for lam in SPINS if not all(r.is_zero() for r in qg.qsol_supporting(lam))]
    record(5, "SL_q(2) quantum bilinear identity", not bad and not support,
           f"9 pairs with formal u and alpha, failures {bad}; supporting identities failures {support}")


def test_criterion_06_noncommutative_tau():
    hirota = qg.verify_sl2hirota()
    trivial = qg.verify_kos_trivial().is_zero()
    fact = {str(HalfInt(k)): qg.verify_factorization(HalfInt(k)).is_zero() for k in (2, 3)}
    uni = qg.universal_T(3)
    ok = hirota.ok and trivial and all(fact.values()) and uni.ok
    record(6, "noncommutative tau", ok,
           f"hirota {hirota.ok}, trivial rep {trivial}, factorization {fact}, universal T through degree 3 {uni.ok}")


def test_criterion_07_frt_plucker():
    conf = {p: verify_pbw_confluence(frt_ring(p), 3) for p in (2, 3)}
    quantum = {(p, k, k2): fund_reps.verify_plucker_quantum(p, k, k2) for p, k, k2 in ((2, 1, 1), (3, 1, 1), (3, 1, 2))}
    rng = random.Random(5)
    classical = {}
    for p in (2, 3, 4):
        for k in range(1, p):
            for k2 in range(1, p + 1):
                classical[(p, k, k2)] = fund_reps.verify_plucker_classical(p, k, k2, rng=rng)
    ok = all(r.ok for r in conf.values()) and all(r.ok for r in quantum.values()) and all(r.ok for r in classical.values())
    record(7, "FRT confluence and Pluecker identities", ok,
           f"confluence {[(p, r.checked) for p, r in conf.items()]}, quantum {sum(r.cases for r in quantum.values())} cases, "
           f"classical {sum(r.cases for r in classical.values())} cases, all zero: {ok}")


def test_criterion_08_kos():
    keystone = all(r.is_zero() for r in kos.qschur_keystone(8))
    kernels = kos.random_kernels(10, 3, seed=31)
    kos_bad = [(i, n) for i, R in enumerate(kernels) for n in (1, 2) if not kos.verify_kos(R, n).is_zero()]
    shift = {n: kos.verify_det_shift(n).is_zero() for n in (2, 3)}
    ok = keystone and not kos_bad and all(shift.values())
    record(8, "difference hierarchy", ok,
           f"q-Schur keystone k<=8 {keystone}, difference equation on 10 kernels failures {kos_bad}, det shift {shift}")


def test_criterion_09_tau2_coproduct():
    tau2 = fund_reps.verify_tau2_twist()
    cop = fund_reps.verify_coprod_product(3, 2)
    ok = tau2.operator_residual.is_zero() and tau2.compact_fixed_residual.is_zero() and cop.ok
    record(9, "tau_2 twist and co-multiplication", ok,
           f"tau_2 operator residual zero {tau2.operator_residual.is_zero()}, coproduct {cop.checked} entries, "
           f"{len(cop.failures)} failures")


def test_criterion_10_whittaker_numerics():
    start = time.perf_counter()
    errs = {}
    errs["K_1/2"] = max(abs(whittaker.macdonald_k(0.5, z) - math.sqrt(math.pi / (2 * z)) * math.exp(-z))
                        / (math.sqrt(math.pi / (2 * z)) * math.exp(-z)) for z in np.linspace(0.1, 5, 50))
    grid = np.arange(-2.0, 4.0 + 1e-9, 0.1)
    errs["schrodinger"] = max(whittaker.schrodinger_residual(j, 1.0, 1.0, grid) for j in (0.25j, 0.5j))
    errs["hc-fit"] = max(abs(whittaker.fit_harish_chandra(lam).ratio - whittaker.gamma(1 - lam) / whittaker.gamma(1 + lam))
                         for lam in (0.5j, 1.0j, 2.0j))
    P = whittaker.WhittakerParams(2, (0.8j,), (1.0,), (1.0,))
    ratios = [whittaker.whittaker_integral(2, P, np.array([-s / 2, s / 2])) / whittaker.macdonald_k(0.8j, 2 * math.exp(s / 2))
              for s in np.linspace(0, 2, 9)]
    errs["integral-p2"] = max(abs(r / ratios[0] - 1) for r in ratios)
    S = whittaker.smatrix_liouville_ft
    errs["S"] = max(abs(S(0, 1.0) - 1), abs(S(0.3 + 0.2j, 1.7) * S(-0.3 - 0.2j, 1.7) - 1), abs(S(0.7j, 2.0) * S(-0.7j, 2.0) - 1))
    errs["S(1/2)"] = abs(S(0.5, 1.0) - 0.25)
    R = whittaker.RootSystem.of(3)
    lam = (0.7j, 1.3j)
    errs["weyl"] = max(abs(whittaker.harish_chandra_slp(3, lam, w) - whittaker.harish_chandra_slp_roots(3, lam, w))
                       for w in R.weyl_group())
    elapsed = time.perf_counter() - start
    tol = {"K_1/2": 1e-10, "schrodinger": 1e-6, "hc-fit": 1e-3, "integral-p2": 1e-6, "S": 1e-12, "S(1/2)": 1e-10, "weyl": 1e-12}
    ok = all(errs[k] < tol[k] for k in tol) and elapsed < 120
    record(10, "Whittaker numerics", ok, ", ".join(f"{k} {v:.1e}" for k, v in errs.items()) + f", {elapsed:.1f} s")


def test_criterion_11_regular_representation():
    rep = whittaker.verify_regular_rep_sl2()
    record(11, "regular representation", rep.ok,
           f"{rep.monomials} probe monomials; right {rep.right_sl2}, left {rep.left_antisl2}, commute {rep.left_right}, "
           f"Casimir {rep.casimir_right}/{rep.casimir_left}, reduction {rep.reduction} failures")


def test_criterion_12_classical_limit():
    cases = classical_limit.classical_limit_sweep(0)
    bad = [c.id for c in cases if not c.ok]
    record(12, "classical-limit coherence", bool(cases) and not bad, f"{len(cases)} u -> 1 cases, failures {bad}")
