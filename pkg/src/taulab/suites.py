"""Verification suites: named, seeded collections of identity checks.

A case is a callable returning ``(residual, ok)``.  Exact identities report the number
of nonzero terms left in the residual; numeric ones report the measured error.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable

import numpy as np

from taulab import classical_limit, fock_oracle, fund_reps, kos, ncalg, qgroup_sl2, tau_classical, whittaker
from taulab.scalars import DomainError, HalfInt
from taulab.schur import TimeVector

SUITES = ("toda", "molecule", "fock", "sl2", "qsl2", "kos", "plucker", "fund", "whittaker", "limit")


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    seed: int = 0
    cutoff_K: int = 3
    degree_D: int = 3
    fock_M: int = 4
    tol: float | None = None

    def validate(self) -> None:
        if self.cutoff_K < 1:
            raise ConfigError("--cutoff-K must be at least 1")
        if self.degree_D < 1:
            raise ConfigError("--degree-D must be at least 1")
        if not 2 <= self.fock_M <= 6:
            raise ConfigError("--fock-M must lie in 2..6")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("--tol must be positive")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("--seed must be a 64-bit unsigned integer")

    def tolerance(self, default: float) -> float:
        return default if self.tol is None else self.tol


@dataclass
class Case:
    id: str
    eq_tag: str
    run: Callable[[], tuple]


def nonzero_terms(*items) -> int:
    """Total term count over polynomials, noncommutative polynomials or nested lists of them."""
    total = 0
    for x in items:
        if isinstance(x, (list, tuple)):
            total += nonzero_terms(*x)
        else:
            total += len(x.terms)
    return total


def exact(*items) -> tuple:
    n = nonzero_terms(*items)
    return float(n), n == 0


def numeric(err: float, tol: float) -> tuple:
    err = float(err)
    return err, err < tol


def report_flag(failures: int) -> tuple:
    return float(failures), failures == 0


def _rng(cfg: RunConfig, salt: str) -> random.Random:
    return random.Random(f"{cfg.seed}:{salt}")


# -- classical Toda ---------------------------------------------------------------

def toda_cases(cfg: RunConfig) -> list:
    rng = _rng(cfg, "toda")
    t, tb = TimeVector.symbolic("t", cfg.cutoff_K), TimeVector.symbolic("tbar", cfg.cutoff_K)
    out = []
    for i in range(5):
        R = tau_classical.GrassmannianKernel.random(rng, 2 + i % 4)
        for n in (1, 2):
            out.append(Case(f"toda/k{i}/n{n}", "toda-bilinear", lambda R=R, n=n: exact(tau_classical.verify_toda_eq(R, n, t, tb))))
    return out


def molecule_cases(cfg: RunConfig) -> list:
    rng = _rng(cfg, "molecule")
    t, tb = TimeVector.symbolic("t", cfg.cutoff_K), TimeVector.symbolic("tbar", cfg.cutoff_K)
    out = []
    for p in (2, 3):
        for i in range(3):
            R = tau_classical.GrassmannianKernel.random_rank(rng, p + 2, p)

            def run(p=p, R=R):
                rep = tau_classical.verify_molecule(p, R, t, tb)
                return exact(rep.vanishing, rep.wave, list(rep.rebuild.values()))

            out.append(Case(f"molecule/p{p}/k{i}", "toda-molecule", run))
    return out


# -- Fock space oracle -----------------------------------------------------------------

def _times_in_window(rng: np.random.Generator, M: int, n: int, K: int) -> list:
    while K > 0 and not fock_oracle.in_safe_window(M, n, K):
        K -= 1
    return list(rng.uniform(-0.3, 0.3, size=K))


def fock_cases(cfg: RunConfig) -> list:
    M = cfg.fock_M
    tol = cfg.tolerance(1e-8)
    state: dict = {}

    def space():
        if "F" not in state:
            state["F"] = fock_oracle.build_fock(M)
        return state["F"]

    out = [Case(f"fock/M{M}/car", "canonical-anticommutation", lambda: numeric(fock_oracle.car_residual(space()), cfg.tolerance(1e-12)))]
    nrng = np.random.default_rng(cfg.seed)
    for i in range(5):
        Gb = fock_oracle.random_bilinear(nrng, M)
        for n in (0, 1):
            t = _times_in_window(nrng, M, n, cfg.cutoff_K)
            tb = _times_in_window(nrng, M, n, cfg.cutoff_K)

            def run(Gb=Gb, n=n, t=t, tb=tb):
                F = space()
                g = fock_oracle.group_exp(F, Gb)
                return numeric(abs(fock_oracle.tau_fock(F, n, g, t, tb) - fock_oracle.tau_det_window(F, n, g.R, t, tb)), tol)

            out.append(Case(f"fock/M{M}/g{i}/n{n}/tau", "fermionic-tau", run))
        t, tb, t2, tb2 = (list(nrng.uniform(-0.3, 0.3, size=2)) for _ in range(4))

        def run_bi(Gb=Gb, t=t, tb=tb, t2=t2, tb2=tb2):
            F = space()
            return numeric(fock_oracle.verify_bi_fock(F, Gb, 0, 0, t, tb, t2, tb2), tol)

        out.append(Case(f"fock/M{M}/g{i}/bilinear", "fermionic-bilinear", run_bi))
    return out


# -- SL(2) --------------------------------------------------------------------------------

SPINS = (HalfInt(1), HalfInt(2), HalfInt(3))


def sl2_cases(cfg: RunConfig) -> list:
    out = []
    for lam, lam2 in itertools.product(SPINS, repeat=2):
        out.append(Case(f"sl2/A/{lam},{lam2}", "sl2-bilinear-A", lambda a=lam, b=lam2: exact(qgroup_sl2.verify_eqA(a, b))))
        out.append(Case(f"sl2/B/{lam},{lam2}", "sl2-bilinear-B", lambda a=lam, b=lam2: exact(qgroup_sl2.verify_eqB(a, b))))
    for lam in SPINS:
        out.append(Case(f"sl2/exp/{lam}", "sl2-exponential", lambda a=lam: exact(list(qgroup_sl2.expeq_residuals(a)))))
    return out


def qsl2_cases(cfg: RunConfig) -> list:
    out = []
    for lam, lam2 in itertools.product(SPINS, repeat=2):
        out.append(Case(f"qsl2/qA/{lam},{lam2}", "quantum-bilinear-A", lambda a=lam, b=lam2: exact(qgroup_sl2.verify_qeqA(a, b))))
    for lam in SPINS:
        out.append(Case(f"qsl2/support/{lam}", "quantum-solution-support", lambda a=lam: exact(list(qgroup_sl2.qsol_supporting(a)))))
    out.append(Case("qsl2/nc-hirota", "nc-hirota-sl2", lambda: exact(qgroup_sl2.verify_sl2hirota().residual)))
    out.append(Case("qsl2/nc-trivial", "nc-hirota-trivial", lambda: exact(qgroup_sl2.verify_kos_trivial())))
    for lam in (HalfInt(2), HalfInt(3)):
        out.append(Case(f"qsl2/factorization/{lam}", "nc-factorization", lambda a=lam: exact(qgroup_sl2.verify_factorization(a))))
    out.append(Case(f"qsl2/universal-T/D{cfg.degree_D}", "universal-T-coproduct",
                    lambda: report_flag(qgroup_sl2.universal_T(cfg.degree_D).max_terms)))

    def woronowicz():
        rep = qgroup_sl2.woronowicz_rep(12, 0.7 + 0.2j, 0.5)
        return numeric(max(rep.relation_residuals().values()), cfg.tolerance(1e-12))

    out.append(Case("qsl2/woronowicz", "coordinate-ring-relations", woronowicz))
    return out


# -- difference hierarchy ------------------------------------------------------------

def kos_cases(cfg: RunConfig) -> list:
    out = [Case("kos/keystone/q-schur", "q-schur-keystone", lambda: exact(kos.qschur_keystone(8)))]
    rng = _rng(cfg, "kos")
    for i in range(4):
        R = tau_classical.GrassmannianKernel.random(rng, 3 + i % 2)
        for n in (1, 2):
            out.append(Case(f"kos/k{i}/n{n}", "difference-toda", lambda R=R, n=n: exact(kos.verify_kos(R, n, cfg.cutoff_K))))
        out.append(Case(f"kos/k{i}/classical-times", "q-time-change", lambda R=R: exact(kos.keystone_residual(2, R))))
    for n in (1, 2, 3):
        out.append(Case(f"kos/det-shift/n{n}", "determinant-shift", lambda n=n: exact(kos.verify_det_shift(n))))
    return out


# -- FRT and Pluecker ------------------------------------------------------------------

def plucker_cases(cfg: RunConfig) -> list:
    out = []
    for p in (2, 3):
        out.append(Case(f"plucker/confluence/p{p}", "pbw-confluence",
                        lambda p=p: report_flag(len(ncalg.verify_pbw_confluence(ncalg.frt_ring(p), 3).failures))))
    for p, k, k2 in ((2, 1, 1), (3, 1, 1), (3, 1, 2), (3, 2, 1)):
        out.append(Case(f"plucker/quantum/p{p}k{k}k{k2}", "quantum-plucker",
                        lambda p=p, k=k, k2=k2: _plucker(fund_reps.verify_plucker_quantum(p, k, k2))))
    for p in (2, 3, 4):
        for k in range(1, p):
            for k2 in range(1, p - k + 1):
                out.append(Case(f"plucker/classical/p{p}k{k}k{k2}", "classical-plucker",
                                lambda p=p, k=k, k2=k2: _plucker(fund_reps.verify_plucker_classical(p, k, k2, rng=_rng(cfg, "plucker")))))
    return out


def _plucker(rep) -> tuple:
    return float(len(rep.failures)), rep.ok


# -- fundamental representations ----------------------------------------------------------

def fund_cases(cfg: RunConfig) -> list:
    out = []

    def tau2():
        rep = fund_reps.verify_tau2_twist()
        return float(nonzero_terms(rep.operator_residual, rep.compact_fixed_residual, rep.classical_residual)), rep.ok

    out.append(Case("fund/tau2", "tau2-twist", tau2))

    def coprod():
        rep = fund_reps.verify_coprod_product(3, 2, seed=cfg.seed)
        return float(len(rep.failures)), rep.ok

    out.append(Case("fund/coprod/p3n2", "coproduct-product", coprod))
    rng = _rng(cfg, "fund")
    for p in (2, 3):
        g = tau_classical.random_matrix(rng, p)
        R = tau_classical.GrassmannianKernel(tuple(map(tuple, g)))
        t, tb = TimeVector.symbolic("t", p - 1), TimeVector.symbolic("tbar", p - 1)
        for n in range(1, p + 1):
            out.append(Case(f"fund/tau/p{p}n{n}", "fundamental-tau",
                            lambda g=g, R=R, n=n, t=t, tb=tb: exact(fund_reps.tau_fund(n, g, t, tb) - tau_classical.tau_det(n, R, t, tb))))
        for n in range(1, p):
            out.append(Case(f"fund/toda/p{p}n{n}", "toda-bilinear", lambda g=g, n=n: exact(fund_reps.verify_toda_fund(g, n))))
    for p, k in ((3, 1), (3, 2)):
        def basis(p=p, k=k):
            rep = fund_reps.uq_fund_basis(p, k)
            bad = rep.highest_weight_residual() + rep.closure_residual() + rep.weight_residuals()
            bad += rep.lowering_residuals() if k == 2 else 0
            return report_flag(bad)

        out.append(Case(f"fund/uq-basis/p{p}k{k}", "fundamental-module", basis))
    out.append(Case("fund/commutators/p4", "cartan-commutators", lambda: report_flag(fund_reps.commutator_residuals(4))))
    return out


# -- Whittaker numerics ----------------------------------------------------------------

def whittaker_cases(cfg: RunConfig) -> list:
    out = []

    def k_half():
        err = 0.0
        for z in np.linspace(0.1, 5, 50):
            ref = math.sqrt(math.pi / (2 * z)) * math.exp(-z)
            err = max(err, abs(whittaker.macdonald_k(0.5, z) - ref) / ref)
        return numeric(err, cfg.tolerance(1e-10))

    out.append(Case("whittaker/k-half", "macdonald-half", k_half))
    grid = np.arange(-2.0, 4.0 + 1e-9, 0.1)
    for j in (0.25j, 0.5j):
        out.append(Case(f"whittaker/schrodinger/j{j.imag}i", "liouville-schrodinger",
                        lambda j=j: numeric(whittaker.schrodinger_residual(j, 1.0, 1.0, grid), cfg.tolerance(1e-6))))
    for lam in (0.5j, 1.0j, 2.0j):
        def fit(lam=lam):
            f = whittaker.fit_harish_chandra(lam)
            ref = whittaker.gamma(1 - lam) / whittaker.gamma(1 + lam)
            return numeric(abs(f.ratio - ref), cfg.tolerance(1e-3))

        out.append(Case(f"whittaker/hc-fit/lam{lam.imag}i", "harish-chandra-sl2", fit))

    def integral_p2():
        nu = 0.8j
        P = whittaker.WhittakerParams(2, (nu,), (1.0,), (1.0,))
        ratios = []
        for s in np.linspace(0, 2, 9):
            I = whittaker.whittaker_integral(2, P, np.array([-s / 2, s / 2]))
            ratios.append(I / whittaker.macdonald_k(nu, 2 * math.exp(s / 2)))
        return numeric(max(abs(r / ratios[0] - 1) for r in ratios), cfg.tolerance(1e-6))

    out.append(Case("whittaker/integral/p2", "whittaker-integral-sl2", integral_p2))

    def schrodinger_p3():
        P = whittaker.WhittakerParams(3, (0.5j, 0.7j), (1.3, 0.8), (0.6, 1.1))
        pts = [(0.2, 0.0, -0.2), (-0.5, 0.3, 0.4), (1.0, -0.5, 0.2)]
        return numeric(whittaker.toda_schrodinger_residual(P, pts), cfg.tolerance(1e-3))

    out.append(Case("whittaker/schrodinger/p3", "toda-schrodinger-sl3", schrodinger_p3))

    def smatrix():
        S = whittaker.smatrix_liouville_ft
        errs = [abs(S(0, 1.0) - 1), abs(S(0.3 + 0.2j, 1.7) * S(-0.3 - 0.2j, 1.7) - 1), abs(S(0.7j, 2.0) * S(-0.7j, 2.0) - 1)]
        return numeric(max(errs), cfg.tolerance(1e-12))

    out.append(Case("whittaker/smatrix/unitarity", "liouville-smatrix", smatrix))
    out.append(Case("whittaker/smatrix/half", "liouville-smatrix",
                    lambda: numeric(abs(whittaker.smatrix_liouville_ft(0.5, 1.0) - 0.25), cfg.tolerance(1e-10))))

    def weyl():
        R = whittaker.RootSystem.of(3)
        lam = (0.7j, 1.3j)
        err = max(abs(whittaker.harish_chandra_slp(3, lam, w) - whittaker.harish_chandra_slp_roots(3, lam, w)) for w in R.weyl_group())
        return numeric(err, cfg.tolerance(1e-12))

    out.append(Case("whittaker/weyl-covariance/p3", "harish-chandra-weyl", weyl))

    def regular():
        rep = whittaker.verify_regular_rep_sl2()
        bad = rep.right_sl2 + rep.left_antisl2 + rep.left_right + rep.casimir_right + rep.casimir_left + rep.reduction + rep.jrep_casimir
        return report_flag(bad)

    out.append(Case("whittaker/regular-rep", "regular-representation", regular))
    return out


def limit_cases(cfg: RunConfig) -> list:
    parts = {
        "cnumber": (classical_limit.sweep_cnumber, "quantum-bilinear-A"),
        "noncommutative": (classical_limit.sweep_noncommutative, "nc-hirota-sl2"),
        "plucker": (classical_limit.sweep_plucker, "quantum-plucker"),
        "kos": (lambda: classical_limit.sweep_kos(cfg.seed), "difference-toda"),
        "fund": (classical_limit.sweep_fund, "tau2-twist"),
    }
    return [Case(f"limit/{name}", tag, lambda f=f: report_flag(sum(not c.ok for c in f()))) for name, (f, tag) in parts.items()]


BUILDERS = {
    "toda": toda_cases,
    "molecule": molecule_cases,
    "fock": fock_cases,
    "sl2": sl2_cases,
    "qsl2": qsl2_cases,
    "kos": kos_cases,
    "plucker": plucker_cases,
    "fund": fund_cases,
    "whittaker": whittaker_cases,
    "limit": limit_cases,
}


def build_cases(suite: str, cfg: RunConfig) -> list:
    if suite == "all":
        return [c for name in SUITES for c in BUILDERS[name](cfg)]
    if suite not in BUILDERS:
        raise ConfigError(f"unknown suite {suite!r}")
    return BUILDERS[suite](cfg)


def run_case(case: Case) -> tuple:
    """(residual, status); exceptions from the library count as failures."""
    try:
        residual, ok = case.run()
    except (DomainError, ArithmeticError, ValueError) as exc:
        return float("nan"), f"error: {type(exc).__name__}"
    return residual, "pass" if ok else "fail"
