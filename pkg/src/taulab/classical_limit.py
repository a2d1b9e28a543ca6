"""Classical-limit sweep: specialize quantum identities at u = 1 and compare with the classical ones.

Each case checks up to three things: the quantum residual vanishes after u -> 1, the
quantum object itself specializes to the classical object, and the classical identity
holds for that object.  Identities whose normalization has a pole at u = 1 (the
determinant shift factor) or that have no commutative counterpart (universal T) are
not swept.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from taulab import fund_reps as fr
from taulab import kos
from taulab import qgroup_sl2 as qg
from taulab.ncalg import frt_ring
from taulab.polyalg import MultiPoly, derive, substitute
from taulab.scalars import HalfInt
from taulab.schur import TimeVector, qschur_poly, schur_poly
from taulab.tau_classical import GrassmannianKernel, tau_det, verify_toda_eq

SPINS = (HalfInt(1), HalfInt(2), HalfInt(3))


@dataclass
class LimitCase:
    id: str
    eq_tag: str
    ok: bool
    detail: str = ""


def _zero(*polys) -> bool:
    return all(p.is_zero() for p in polys)


def _diag_alpha() -> qg.GroupElementSL2:
    al = MultiPoly.var("alpha")
    return qg.GroupElementSL2.from_abcd(al, MultiPoly.zero(), MultiPoly.zero(), al**-1)


def _s_as_t(p: MultiPoly) -> MultiPoly:
    """Rename s_k -> t_k and sb_k -> tb_k (at u = 1 the times coincide)."""
    ren = {}
    for v in p.vars:
        if v.startswith("sb"):
            ren[v] = MultiPoly.var("tb" + v[2:])
        elif v.startswith("s"):
            ren[v] = MultiPoly.var("t" + v[1:])
    return substitute(p, ren)


def sweep_cnumber() -> list:
    g = _diag_alpha()
    out = []
    for lam, lam2 in itertools.product(SPINS, repeat=2):
        q_res = qg.verify_qeqA(lam, lam2).at_u1()
        same = (qg.qtau_cnumber(lam).at_u1() - qg.classical_tau_sl2(lam, g)).is_zero()
        cl = qg.verify_eqA(lam, lam2, g)
        out.append(LimitCase(f"qeqA-limit/{lam},{lam2}", "quantum-bilinear-A", _zero(q_res, cl) and same,
                             f"tau matches classical: {same}"))
    for lam in SPINS:
        r1, r2 = qg.qsol_supporting(lam)
        out.append(LimitCase(f"qsol-limit/{lam}", "quantum-solution-support", _zero(r1.at_u1(), r2.at_u1())))
    return out


def _classical_hirota_sl2() -> MultiPoly:
    tau = qg.classical_tau_sl2(HalfInt(1))
    lhs = tau * derive(derive(tau, "t"), "tb") - derive(tau, "t") * derive(tau, "tb") - 1
    return qg.reduce_sl2(lhs)


def sweep_noncommutative() -> list:
    out = []
    rep = qg.verify_sl2hirota()
    q_res = qg.reduce_sl2(rep.residual.at_u1().to_commutative())
    out.append(LimitCase("sl2hirota-limit", "nc-hirota-sl2", _zero(q_res, _classical_hirota_sl2())))
    out.append(LimitCase("kos-trivial-limit", "nc-hirota-trivial", qg.verify_kos_trivial().at_u1().is_zero()))
    for lam in SPINS:
        img = qg.reduce_sl2(qg.nc_tau(lam).at_u1().to_commutative())
        same = (img - qg.reduce_sl2(qg.classical_tau_sl2(lam))).is_zero()
        ok = same
        if lam.twice >= 2:
            fac = qg.reduce_sl2(qg.verify_factorization(lam).at_u1().to_commutative())
            cl = qg.classical_tau_sl2(lam) - qg.classical_tau_sl2(lam - HalfInt(1)) * qg.classical_tau_sl2(HalfInt(1))
            ok = ok and _zero(fac, qg.reduce_sl2(cl))
        out.append(LimitCase(f"nc-tau-limit/{lam}", "nc-factorization", ok, f"tau matches classical: {same}"))
    return out


def _symbolic_matrix(p: int) -> list:
    return [[MultiPoly.var(f"A{i}{j}") for j in range(1, p + 1)] for i in range(1, p + 1)]


def sweep_plucker(p: int = 3) -> list:
    ring = frt_ring(p)
    g = _symbolic_matrix(p)
    idx = range(1, p + 1)
    minors_ok = True
    for k in range(1, p + 1):
        for I in itertools.combinations(idx, k):
            for J in itertools.combinations(idx, k):
                qm = fr.quantum_minor(ring, I, J).at_u1().to_commutative()
                if not (qm - fr.minor_elem(g, I, J)).is_zero():
                    minors_ok = False
    out = [LimitCase(f"qminor-limit/p{p}", "quantum-minor", minors_ok)]
    for k, k2 in ((1, 1), (1, 2), (2, 1)):
        ok = True
        for I in itertools.combinations(idx, k):
            for J in itertools.combinations(idx, k + 1):
                for I2 in itertools.combinations(idx, k2):
                    for J2 in itertools.product(idx, repeat=k2 - 1):
                        if not fr._increasing((J[-1],) + J2):
                            continue
                        q_res = fr.plucker_quantum_residual(ring, I, J, I2, J2).at_u1().to_commutative()
                        cl = fr.plucker_classical_residual(g, I, J, I2, J2)
                        if not _zero(q_res, MultiPoly.lift(cl) if not isinstance(cl, MultiPoly) else cl):
                            ok = False
        out.append(LimitCase(f"plucker-limit/p{p}k{k}k{k2}", "quantum-plucker", ok))
    return out


def sweep_kos(seed: int = 0, count: int = 2, size: int = 3) -> list:
    out = []
    s = TimeVector.symbolic("s", 4)
    t = TimeVector.symbolic("t", 4)
    ok = all((_s_as_t(qschur_poly(k, s).at_u1()) - schur_poly(k, t)).is_zero() for k in range(9))
    out.append(LimitCase("qschur-limit", "q-schur", ok))
    rng = random.Random(seed)
    for c in range(count):
        R = GrassmannianKernel.random(rng, size)
        for n in (1, 2):
            q_tau = kos.KosTau.symbolic(R, kos.DEFAULT_K)
            same = (_s_as_t(q_tau.tau(n).at_u1()) - tau_det(n, R, TimeVector.symbolic("t", kos.DEFAULT_K),
                                                            TimeVector.symbolic("tbar", kos.DEFAULT_K))).is_zero()
            q_res = kos.verify_kos(R, n).at_u1()
            cl = verify_toda_eq(R, n)
            out.append(LimitCase(f"kos-limit/k{c}n{n}", "difference-toda", _zero(q_res, cl) and same,
                                 f"tau matches classical: {same}"))
    return out


def sweep_fund() -> list:
    rep = fr.verify_tau2_twist()
    return [LimitCase("tau2-limit", "tau2-twist", rep.classical_residual.is_zero())]


def classical_limit_sweep(seed: int = 0) -> list:
    """All u -> 1 cases, sorted by id."""
    cases = sweep_cnumber() + sweep_noncommutative() + sweep_plucker() + sweep_kos(seed) + sweep_fund()
    return sorted(cases, key=lambda c: c.id)
