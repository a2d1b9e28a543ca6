"""Finite free-fermion Fock space used as a numeric oracle for tau-functions.

Modes run over the window -M..M-1 and are realized by a Jordan-Wigner chain.
``psi_k`` creates a fermion in mode k and ``psis_k`` (psi*) annihilates it, so
{psi_k, psis_m} = delta_km.  The charge-n vacuum |n> has the modes -M..n-1
filled and is built as psi_{n-1} ... psi_{-M} |empty>, which fixes its phase so
that <n| psi_{n-1} |n-1> = 1.  The all-empty state plays the part of |-M>.

Group elements are plain exponentials G = exp(sum_{mn} G_mn psis_m psi_n); on
the modes they act as G psi_k G^{-1} = sum_j psi_j R_jk with R = exp(-G^T).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from taulab.scalars import DomainError
from taulab.tau_classical import tau_det_numeric

STRUCTURE_TOL = 1e-12
COMPARE_TOL = 1e-8
MAX_M = 6


class ConjugationError(ArithmeticError):
    pass


class SingularNormalization(ZeroDivisionError):
    pass


@dataclass
class FockSpace:
    M: int
    psi: list = field(repr=False)  # creation operators, index k + M
    psis: list = field(repr=False)  # annihilation operators
    occupation: np.ndarray = field(repr=False)  # particle number of each basis state

    @property
    def modes(self) -> range:
        return range(-self.M, self.M)

    @property
    def dim(self) -> int:
        return 4**self.M

    def create(self, k: int):
        return self.psi[k + self.M]

    def annihilate(self, k: int):
        return self.psis[k + self.M]

    def vacuum(self, n: int) -> np.ndarray:
        if not -self.M <= n <= self.M:
            raise DomainError(f"charge {n} outside the window -{self.M}..{self.M}")
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        for k in range(-self.M, n):
            v = self.create(k) @ v
        return v

    def sector(self, N: int) -> np.ndarray:
        return np.flatnonzero(self.occupation == N)

    def current(self, k: int):
        """Truncated J_k = sum_i psi_i psi*_{i+k} over the window (k != 0)."""
        J = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for i in self.modes:
            if i + k in self.modes:
                J = J + self.create(i) @ self.annihilate(i + k)
        return J

    @cached_property
    def _currents(self) -> dict:
        return {}

    def J(self, k: int):
        if k not in self._currents:
            self._currents[k] = self.current(k).tocsr()
        return self._currents[k]

    def hamiltonian(self, t: Sequence[complex], sign: int = 1):
        """H(t) = sum_k t_k J_k (sign=+1) or Hbar(tb) = sum_k tb_k J_{-k} (sign=-1)."""
        H = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for k, tk in enumerate(t, start=1):
            if tk != 0 and k < 2 * self.M:
                H = H + tk * self.J(sign * k)
        return H


def build_fock(M: int) -> FockSpace:
    """Jordan-Wigner realization of 2M fermionic modes; CAR checked on construction."""
    if not 1 <= M <= MAX_M:
        raise DomainError(f"M must lie in 1..{MAX_M}")
    L = 2 * M
    Z = sp.csr_matrix(np.diag([1.0, -1.0]).astype(complex))
    I2 = sp.identity(2, dtype=complex, format="csr")
    lower = sp.csr_matrix(np.array([[0, 1], [0, 0]], dtype=complex))  # |1> -> |0>
    psis = []
    for idx in range(L):
        op = sp.identity(1, dtype=complex, format="csr")
        for j in range(L):
            # mode j is bit j (big-endian kron: mode 0 is the most significant factor)
            f = Z if j < idx else (lower if j == idx else I2)
            op = sp.kron(op, f, format="csr")
        psis.append(op)
    psi = [op.conj().T.tocsr() for op in psis]
    states = np.arange(4**M)
    occ = np.array([bin(s).count("1") for s in states])
    F = FockSpace(M, psi, psis, occ)
    res = car_residual(F)
    if res > STRUCTURE_TOL:
        raise ArithmeticError(f"CAR violated: {res}")
    return F


def car_residual(F: FockSpace) -> float:
    """max over mode pairs of the deviation from the canonical anticommutators."""
    worst = 0.0
    eye = sp.identity(F.dim, dtype=complex, format="csr")
    for a in range(2 * F.M):
        for b in range(2 * F.M):
            x = F.psi[a] @ F.psis[b] + F.psis[b] @ F.psi[a] - (eye if a == b else 0)
            y = F.psi[a] @ F.psi[b] + F.psi[b] @ F.psi[a]
            z = F.psis[a] @ F.psis[b] + F.psis[b] @ F.psis[a]
            for m in (x, y, z):
                m = sp.csr_matrix(m)
                if m.nnz:
                    worst = max(worst, float(np.max(np.abs(m.data))))
    return worst


def _block_expm(F: FockSpace, X) -> sp.csr_matrix:
    """exp of a particle-number conserving operator, computed sector by sector."""
    X = sp.csr_matrix(X)
    rows, cols, vals = [], [], []
    for N in range(2 * F.M + 1):
        idx = F.sector(N)
        block = X[idx][:, idx].toarray()
        E = sla.expm(block)
        r, c = np.nonzero(np.abs(E) > 0)
        rows.append(idx[r])
        cols.append(idx[c])
        vals.append(E[r, c])
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(F.dim, F.dim))


def bilinear(F: FockSpace, G_bilinear: np.ndarray):
    """X = sum_{mn} G_mn psi*_m psi_n with rows/columns indexed by mode + M."""
    Gb = np.asarray(G_bilinear, dtype=complex)
    L = 2 * F.M
    if Gb.shape != (L, L):
        raise DomainError(f"bilinear must be {L}x{L} over the window")
    X = sp.csr_matrix((F.dim, F.dim), dtype=complex)
    for m in range(L):
        for n in range(L):
            if Gb[m, n] != 0:
                X = X + Gb[m, n] * (F.psis[m] @ F.psi[n])
    return X


@dataclass
class GroupElement:
    G: sp.csr_matrix
    Ginv: sp.csr_matrix
    R: np.ndarray  # G psi_k G^{-1} = sum_j psi_j R_jk
    conjugation_residual: float
    closed_form_residual: float  # |R - exp(-G^T)|


def group_exp(F: FockSpace, G_bilinear: np.ndarray, tol: float = 1e-10) -> GroupElement:
    """G = exp(X) and the one-body matrix R read off from G psi_k G^{-1}."""
    X = bilinear(F, G_bilinear)
    G = _block_expm(F, X)
    Ginv = _block_expm(F, -X)
    L = 2 * F.M
    R = np.zeros((L, L), dtype=complex)
    worst = 0.0
    for k in range(L):
        conj = (G @ F.psi[k] @ Ginv).tocsr()
        for j in range(L):
            # {psi*_j, G psi_k G^-1} = R_jk * identity
            R[j, k] = (F.psis[j] @ conj + conj @ F.psis[j]).diagonal().mean()
        rebuilt = sum((R[j, k] * F.psi[j] for j in range(L)), sp.csr_matrix((F.dim, F.dim), dtype=complex))
        diff = sp.csr_matrix(conj - rebuilt)
        if diff.nnz:
            worst = max(worst, float(np.max(np.abs(diff.data))))
    closed = float(np.max(np.abs(R - sla.expm(-np.asarray(G_bilinear, dtype=complex).T))))
    if worst > tol:
        raise ConjugationError(f"G psi G^-1 is not linear in psi: residual {worst}")
    if closed > tol:
        raise ConjugationError(f"R differs from exp(-G^T) by {closed}")
    return GroupElement(G, Ginv, R, worst, closed)


def _evolve_bra(F: FockSpace, bra: np.ndarray, t: Sequence[complex]) -> np.ndarray:
    """bra * exp(H(t)) for a row vector ``bra``."""
    H = F.hamiltonian(t, +1)
    if H.nnz == 0:
        return bra
    # (bra e^H)^T = e^{H^T} bra^T
    return sla.expm(H.T.toarray()) @ bra if F.M <= 4 else _expm_apply(H.T, bra)


def _evolve_ket(F: FockSpace, ket: np.ndarray, tb: Sequence[complex]) -> np.ndarray:
    H = F.hamiltonian(tb, -1)
    if H.nnz == 0:
        return ket
    return sla.expm(H.toarray()) @ ket if F.M <= 4 else _expm_apply(H, ket)


def _expm_apply(A, v):
    from scipy.sparse.linalg import expm_multiply

    return expm_multiply(sp.csc_matrix(A), v)


def in_safe_window(M: int, n: int, K: int, D: int = 1) -> bool:
    """Mode transport K*D from charge n keeps at least two modes from either window edge."""
    return -M + 2 <= n - K * D and n + K * D <= M - 2


def correlator(F: FockSpace, g: GroupElement, n: int, t, tb) -> complex:
    """<n| e^{H(t)} G e^{Hbar(tb)} |n>."""
    vac = F.vacuum(n)
    bra = _evolve_bra(F, vac.conj(), t)
    ket = _evolve_ket(F, vac, tb)
    return complex(bra @ (g.G @ ket))


def tau_fock(F: FockSpace, n: int, G_bilinear: np.ndarray | GroupElement, t, tb) -> complex:
    """tau_n = <n|e^H G e^Hbar|n> / <n|G|n>."""
    g = G_bilinear if isinstance(G_bilinear, GroupElement) else group_exp(F, G_bilinear)
    den = correlator(F, g, n, [], [])
    if abs(den) < STRUCTURE_TOL:
        raise SingularNormalization(f"<{n}|G|{n}> vanishes")
    return correlator(F, g, n, t, tb) / den


def tau_det_window(F: FockSpace, n: int, R: np.ndarray, t, tb) -> complex:
    """Determinant tau for the window: charge n is the (n+M)-th forced tau with R re-indexed
    to 0..2M-1, normalized by its value at zero times."""
    N = n + F.M
    num = tau_det_numeric(N, R, t, tb)
    den = tau_det_numeric(N, R, [], [])
    if abs(den) < STRUCTURE_TOL:
        raise SingularNormalization("determinant normalization vanishes")
    return num / den


def verify_bi_fock(F: FockSpace, G_bilinear, n: int, m: int, t, tb, t2, tb2) -> float:
    """|LHS - RHS| of sum_i <n+1|U psi_i G Ub|n><m-1|U' psi*_i G Ub'|m> = (same with G moved left)."""
    g = G_bilinear if isinstance(G_bilinear, GroupElement) else group_exp(F, G_bilinear)
    bra1 = _evolve_bra(F, F.vacuum(n + 1).conj(), t)
    ket1 = _evolve_ket(F, F.vacuum(n), tb)
    bra2 = _evolve_bra(F, F.vacuum(m - 1).conj(), t2)
    ket2 = _evolve_ket(F, F.vacuum(m), tb2)
    Gk1 = g.G @ ket1
    Gk2 = g.G @ ket2
    b1G = g.G.T @ bra1
    b2G = g.G.T @ bra2
    lhs = rhs = 0j
    for i in range(2 * F.M):
        lhs += (bra1 @ (F.psi[i] @ Gk1)) * (bra2 @ (F.psis[i] @ Gk2))
        rhs += (b1G @ (F.psi[i] @ ket1)) * (b2G @ (F.psis[i] @ ket2))
    return float(abs(lhs - rhs))


def miwa_shift(t: Sequence[complex], z: complex, K: int) -> list[complex]:
    """t - eps(z^{-1}) with eps(x)_k = x^k / k, truncated to K times."""
    t = list(t) + [0] * max(0, K - len(t))
    return [t[k - 1] - z ** (-k) / k for k in range(1, K + 1)]


def verify_vertex(F: FockSpace, n: int, t: Sequence[complex], z_samples: Sequence[complex]) -> float:
    """max over z and basis kets of |<n|psi(z) e^{H(t)} - z^{n-1} <n-1| e^{H(t - eps(1/z))}|.

    psi(z) = sum_k psi_k z^k over the window; the shifted times use all 2M-1 currents.
    """
    if not -F.M < n <= F.M:
        raise DomainError("need -M < n <= M so that |n-1> exists")
    K = 2 * F.M - 1
    worst = 0.0
    vac = F.vacuum(n).conj()
    low = F.vacuum(n - 1).conj()
    for z in z_samples:
        # <n| psi(z) as a row vector: (psi(z)^T applied to the bra)
        row = np.zeros(F.dim, dtype=complex)
        for k in F.modes:
            row = row + z**k * (F.create(k).T @ vac)
        lhs = _evolve_bra(F, row, t)
        rhs = z ** (n - 1) * _evolve_bra(F, low, miwa_shift(t, z, K))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def random_bilinear(rng: np.random.Generator, M: int, scale: float = 0.3) -> np.ndarray:
    L = 2 * M
    return scale * (rng.standard_normal((L, L)) + 1j * rng.standard_normal((L, L)))

