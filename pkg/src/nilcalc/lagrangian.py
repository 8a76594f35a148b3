"""Symplectic linear algebra for the gluing data of flat-orbit representations.

The Maslov triple index is computed exactly over the rationals (congruence
diagonalization); the eta-invariant of a Lagrangian pair is numerical, built
from the pair's canonical angles.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _linalg as la
from ._linalg import Mat

DEFAULT_PHASE_TOL = 1e-8


@dataclass(frozen=True)
class SymplecticSpace:
    """(R^{2d}, omega) with a compatible complex structure J.

    omega is exact (rational entries); J is a float matrix with J^2 = -1 and
    g = omega @ J symmetric positive definite. J only enters the numerical
    eta-invariant; Maslov indices use omega alone.
    """

    omega: Mat
    J: np.ndarray

    def __post_init__(self):
        n = len(self.omega)
        if n % 2:
            raise ValueError("symplectic space needs even dimension")
        if la.transpose(self.omega) != tuple(
            tuple(-x for x in row) for row in self.omega
        ):
            raise ValueError("omega must be antisymmetric")
        if la.det(self.omega) == 0:
            raise ValueError("omega must be nondegenerate")
        jj = self.J @ self.J + np.eye(n)
        if np.max(np.abs(jj)) > 1e-9:
            raise ValueError("J^2 must be -1")
        g = self.metric()
        if np.max(np.abs(g - g.T)) > 1e-9 or np.min(np.linalg.eigvalsh(g)) <= 0:
            raise ValueError("omega @ J must be symmetric positive definite")

    @property
    def dim(self) -> int:
        return len(self.omega)

    @property
    def half_dim(self) -> int:
        return len(self.omega) // 2

    def metric(self) -> np.ndarray:
        return self.omega_float() @ self.J

    def omega_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.omega])

    @classmethod
    def standard(cls, d: int) -> "SymplecticSpace":
        """Standard form pairing coordinate i with d+i."""
        omega = [[Fraction(0)] * (2 * d) for _ in range(2 * d)]
        J = np.zeros((2 * d, 2 * d))
        for i in range(d):
            omega[i][d + i] = Fraction(1)
            omega[d + i][i] = Fraction(-1)
            J[d + i, i] = 1.0
            J[i, d + i] = -1.0
        return cls(tuple(tuple(r) for r in omega), J)

    @classmethod
    def from_form(cls, omega) -> "SymplecticSpace":
        """Adapted J = -|omega|^{-1} omega from polar decomposition (numerical)."""
        om = la.mat(omega)
        of = np.array([[float(x) for x in row] for row in om])
        ev, u = np.linalg.eigh(1j * of)
        absm = ((u * np.abs(ev)) @ u.conj().T).real
        J = -np.linalg.solve(absm, of)
        return cls(om, J)


@dataclass(frozen=True)
class Lagrangian:
    """Half-dimensional isotropic subspace, stored as exact column vectors."""

    columns: Mat  # rows of length 2d; len(columns) == d

    @classmethod
    def from_vectors(cls, vectors) -> "Lagrangian":
        return cls(tuple(la.vec(v) for v in vectors))

    @property
    def dim(self) -> int:
        return len(self.columns)


def is_lagrangian(space: SymplecticSpace, L: Lagrangian) -> bool:
    """Exact test: span has dimension d and omega vanishes on it."""
    if len(L.columns) != space.half_dim:
        return False
    if la.rank(L.columns) != space.half_dim:
        return False
    for u in L.columns:
        for v in L.columns:
            if la.dot(u, la.mat_vec(space.omega, v)) != 0:
                return False
    return True


def maslov_triple(
    space: SymplecticSpace, L1: Lagrangian, L2: Lagrangian, L3: Lagrangian
) -> int:
    """Signature of Q(x1,x2,x3) = w(x1,x2) + w(x2,x3) + w(x3,x1) on L1+L2+L3.

    Exact: the symmetric Gram matrix is diagonalized by congruence over Q.
    """
    for L in (L1, L2, L3):
        if not is_lagrangian(space, L):
            raise ValueError("maslov_triple requires Lagrangian subspaces")
    d = space.half_dim
    n = 3 * d
    zero = Fraction(0)
    gram = [[zero] * n for _ in range(n)]

    def pairing(A: Lagrangian, B: Lagrangian) -> Mat:
        return tuple(
            tuple(la.dot(u, la.mat_vec(space.omega, v)) for v in B.columns)
            for u in A.columns
        )

    blocks = {(0, 1): pairing(L1, L2), (1, 2): pairing(L2, L3), (2, 0): pairing(L3, L1)}
    for (bi, bj), blk in blocks.items():
        for a in range(d):
            for b in range(d):
                half = blk[a][b] / 2
                gram[bi * d + a][bj * d + b] += half
                gram[bj * d + b][bi * d + a] += half
    return la.symmetric_signature(tuple(tuple(r) for r in gram))


def _orthonormal_frame(space: SymplecticSpace, L: Lagrangian) -> np.ndarray:
    g = space.metric()
    M = np.array([[float(x) for x in v] for v in L.columns]).T
    for k in range(M.shape[1]):
        for j in range(k):
            M[:, k] -= (M[:, j] @ g @ M[:, k]) * M[:, j]
        nrm = M[:, k] @ g @ M[:, k]
        if nrm <= 0:
            raise ValueError("failed to orthonormalize Lagrangian frame")
        M[:, k] /= np.sqrt(nrm)
    return M


@dataclass(frozen=True)
class EtaResult:
    value: float
    phases: tuple[float, ...]  # pair angles in (-pi/2, pi/2]
    near_degenerate: bool


def _phase_contribution(theta: float) -> float:
    # g(e^{i theta}) with g(1) = g(-1) = 0; pi-periodic by construction
    if theta > 0:
        return 1.0 - 2.0 * theta / np.pi
    return -1.0 - 2.0 * theta / np.pi


def eta_pair(
    space: SymplecticSpace,
    L1: Lagrangian,
    L2: Lagrangian,
    tolerance: float = DEFAULT_PHASE_TOL,
) -> EtaResult:
    """eta(L1, L2) = sum g(e^{i theta_j}) over the pair angles theta_j.

    A unitary A (for the J-Hermitian structure) with A L1 = L2 is built from
    orthonormal frames; the angles are half the phases of A A^T, which is
    independent of the frame choice. A-phases within `tolerance` of 0 or pi
    (angle 0 mod pi, where the phase function jumps) contribute 0 and raise
    the near-degenerate flag.
    """
    for L in (L1, L2):
        if not is_lagrangian(space, L):
            raise ValueError("eta_pair requires Lagrangian subspaces")
    g = space.metric()
    omf = space.omega_float()
    U1 = _orthonormal_frame(space, L1)
    U2 = _orthonormal_frame(space, L2)
    A = (U1.T @ g @ U2) + 1j * (U1.T @ omf @ U2)
    W = A @ A.T
    eigs = np.linalg.eigvals(W)
    phases = []
    total = 0.0
    flagged = False
    for lam in eigs:
        wphase = float(np.angle(lam))  # in (-pi, pi]
        theta = wphase / 2.0
        phases.append(theta)
        if abs(wphase) < 2.0 * tolerance:
            flagged = True
            continue
        total += _phase_contribution(theta)
    return EtaResult(total, tuple(sorted(phases)), flagged)


@dataclass(frozen=True)
class CocycleCheck:
    maslov: int
    eta_12: float
    eta_23: float
    eta_31: float
    residual: float
    near_degenerate: bool


def lion_cocycle_check(
    space: SymplecticSpace,
    L1: Lagrangian,
    L2: Lagrangian,
    L3: Lagrangian,
    tolerance: float = DEFAULT_PHASE_TOL,
) -> CocycleCheck:
    """|Mas(L1,L2,L3) - (eta12 + eta23 + eta31)|; small unless flagged."""
    mas = maslov_triple(space, L1, L2, L3)
    e12 = eta_pair(space, L1, L2, tolerance)
    e23 = eta_pair(space, L2, L3, tolerance)
    e31 = eta_pair(space, L3, L1, tolerance)
    residual = abs(mas - (e12.value + e23.value + e31.value))
    flagged = e12.near_degenerate or e23.near_degenerate or e31.near_degenerate
    return CocycleCheck(mas, e12.value, e23.value, e31.value, residual, flagged)


def darboux_basis(omega: Mat) -> Mat:
    """Exact symplectic Gram-Schmidt: columns u_1..u_d, v_1..v_d with
    omega(u_i, v_j) = delta_ij and all other pairings zero."""
    n = len(omega)
    d = n // 2
    avail = [la.unit_vec(n, i) for i in range(n)]
    us, vs = [], []

    def om(a, b):
        return la.dot(a, la.mat_vec(omega, b))

    for _ in range(d):
        u = avail.pop(0)
        partner = next((w for w in avail if om(u, w) != 0), None)
        if partner is None:
            raise ValueError("omega is degenerate")
        avail.remove(partner)
        v = la.scale(1 / om(u, partner), partner)
        reduced = []
        for w in avail:
            w = la.sub(w, la.scale(om(w, v), u))
            w = la.add(w, la.scale(om(w, u), v))
            reduced.append(w)
        avail = [w for w in reduced if any(x != 0 for x in w)]
        us.append(u)
        vs.append(v)
    return tuple(us + vs)


def _random_fraction(rng: np.random.Generator, span: int = 2) -> Fraction:
    return Fraction(int(rng.integers(-span, span + 1)), int(rng.integers(1, 3)))


def random_lagrangian(space: SymplecticSpace, rng: np.random.Generator) -> Lagrangian:
    """Exact random Lagrangian in the given space.

    In a Darboux frame, rotate a random subset of (u_k, v_k) planes and take
    the graph of a random symmetric rational matrix; the charts obtained this
    way cover the Lagrangian Grassmannian.
    """
    d = space.half_dim
    frame = darboux_basis(space.omega)
    uu = list(frame[:d])
    vv = list(frame[d:])
    for k in range(d):
        if rng.integers(0, 2):
            uu[k], vv[k] = vv[k], la.scale(-1, uu[k])
    S = [[Fraction(0)] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            S[i][j] = S[j][i] = _random_fraction(rng)
    cols = []
    for k in range(d):
        w = uu[k]
        for i in range(d):
            if S[i][k]:
                w = la.add(w, la.scale(S[i][k], vv[i]))
        cols.append(w)
    return Lagrangian(tuple(cols))
