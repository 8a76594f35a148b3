"""Coadjoint-orbit geometry: Kirillov forms, Pfaffians, flat orbits, jump
indices, Vergne polarizations and the central group 2-cocycle.

All verdicts here are exact rank/coefficient decisions over the rationals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import _linalg as la
from ._linalg import Mat, Vec
from ._poly import Poly, pfaffian
from .liealg import (
    GradedNilpotentLieAlgebra,
    JordanHolderFlag,
    LieAlgebraError,
    Subspace,
    bch,
    center,
    is_automorphism,
    jordan_holder_basis,
    step_length,
)


class InvariantViolation(RuntimeError):
    """An internally-verified mathematical invariant failed (a bug, not bad input)."""


@dataclass(frozen=True)
class Covector:
    """Element of g* in the dual of the algebra's basis."""

    coords: Vec

    @classmethod
    def from_coords(cls, coords) -> "Covector":
        return cls(la.vec(coords))

    @classmethod
    def from_center_dual(
        cls, algebra: GradedNilpotentLieAlgebra, flag: JordanHolderFlag, zcoords
    ) -> "Covector":
        """Embed z* into g* via the Jordan-Hoelder basis (zero on the complement)."""
        zc = la.vec(zcoords)
        if len(zc) != flag.center_dim:
            raise ValueError("center-dual coordinate length mismatch")
        out = [Fraction(0)] * algebra.dim
        for l, c in enumerate(zc):
            out[flag.permutation[l]] = c
        return cls(tuple(out))

    def pair(self, v: Vec) -> Fraction:
        return la.dot(self.coords, la.vec(v))

    def restrict_to_center(
        self, algebra: GradedNilpotentLieAlgebra, flag: JordanHolderFlag
    ) -> Vec:
        return tuple(self.coords[flag.permutation[l]] for l in range(flag.center_dim))


def kirillov_form(algebra: GradedNilpotentLieAlgebra, xi: Covector) -> Mat:
    """The antisymmetric matrix with entries xi([X_i, X_j])."""
    n = algebra.dim
    return tuple(
        tuple(xi.pair(algebra.basis_bracket(i, j)) for j in range(n))
        for i in range(n)
    )


def orbit_dimension(algebra: GradedNilpotentLieAlgebra, xi: Covector) -> int:
    return la.rank(kirillov_form(algebra, xi))


def _flag_form(
    algebra: GradedNilpotentLieAlgebra, flag: JordanHolderFlag, xi: Covector
) -> list[list[Fraction]]:
    """Kirillov form in flag coordinates: entry (a, b) is xi([X_pa, X_pb])."""
    perm = flag.permutation
    n = algebra.dim
    out = [[Fraction(0)] * n for _ in range(n)]
    inv = {p: a for a, p in enumerate(perm)}
    for (i, j), row in algebra.brackets.items():
        val = sum((xi.coords[k] * c for k, c in row.items()), Fraction(0))
        if val:
            a, b = inv[i], inv[j]
            out[a][b] = val
            out[b][a] = -val
    return out


def _stab_flag_rows(form, k: int):
    """Nullspace (RREF rows, flag coordinates padded to length k) of the
    leading k x k block of the flag form."""
    rows = [tuple(form[b][a] for a in range(k)) for b in range(k)]
    return la.nullspace(rows, k)


def _flag_rows_to_subspace(rows, flag: JordanHolderFlag, n: int) -> Subspace:
    vectors = []
    for coeffs in rows:
        v = [Fraction(0)] * n
        for a, c in enumerate(coeffs):
            v[flag.permutation[a]] = c
        vectors.append(tuple(v))
    return Subspace.from_vectors(vectors, n)


def stabilizer(
    algebra: GradedNilpotentLieAlgebra,
    xi: Covector,
    flag: JordanHolderFlag | None = None,
    k: int | None = None,
) -> Subspace:
    """stab(xi|_{g_k}) = {X in g_k : xi([X, Y]) = 0 for all Y in g_k}.

    For k = None (or k = n) this is the full stabilizer of xi. The radical is
    computed inside the flag ideal g_k and returned in algebra coordinates.
    """
    n = algebra.dim
    if k is None or k == n:
        idx = tuple(range(n))
        rows = [
            tuple(xi.pair(algebra.basis_bracket(i, j)) for i in idx) for j in idx
        ]
        return Subspace(la.nullspace(rows, n), n)
    if flag is None:
        raise ValueError("a flag is required for partial stabilizers")
    if not 1 <= k <= n:
        raise ValueError("flag level out of range")
    form = _flag_form(algebra, flag, xi)
    return _flag_rows_to_subspace(_stab_flag_rows(form, k), flag, n)


# -- Pfaffian and flat orbits ---------------------------------------------


@dataclass(frozen=True)
class PfaffianPolynomial:
    """Pfaffian of xi([X_a, X_b]) on g/z in the variables of z*.

    The complement basis is ordered by the flag; that fixes the overall sign.
    `odd_codimension` marks the identically-zero answer forced by parity.
    """

    poly: Poly
    odd_codimension: bool

    def __call__(self, point) -> Fraction:
        return self.poly.evaluate(point)

    def is_zero(self) -> bool:
        return self.poly.is_zero()


def pfaffian_on_center_dual(
    algebra: GradedNilpotentLieAlgebra, flag: JordanHolderFlag
) -> PfaffianPolynomial:
    n = algebra.dim
    dz = flag.center_dim
    nvars = dz
    comp = flag.permutation[dz:]
    if len(comp) % 2 == 1:
        return PfaffianPolynomial(Poly(nvars), True)
    entries = []
    for a in comp:
        row = []
        for b in comp:
            br = algebra.basis_bracket(a, b)
            p = Poly(nvars)
            for l in range(dz):
                c = br[flag.permutation[l]]
                if c:
                    p = p + Poly.variable(nvars, l, c)
            row.append(p)
        entries.append(row)
    return PfaffianPolynomial(pfaffian(entries), False)


def det_on_complement(
    algebra: GradedNilpotentLieAlgebra, flag: JordanHolderFlag, xi: Covector
) -> Fraction:
    comp = flag.permutation[flag.center_dim :]
    m = tuple(
        tuple(xi.pair(algebra.basis_bracket(a, b)) for b in comp) for a in comp
    )
    return la.det(m) if comp else Fraction(1)


def _witness_candidates(dz: int, seed: int = 12):
    """Deterministic scan of z* points: small grid, then growing random heights."""
    smalls = [0, 1, -1, 2, -2]
    for pt in itertools.product(smalls, repeat=dz):
        if any(pt):
            yield tuple(Fraction(c) for c in pt)
    state = seed
    for height in range(3, 40):
        for _ in range(25):
            pt = []
            for _ in range(dz):
                state = (state * 6364136223846793005 + 1442695040888963407) % 2**63
                num = state % (2 * height + 1) - height
                state = (state * 6364136223846793005 + 1442695040888963407) % 2**63
                den = state % height + 1
                pt.append(Fraction(num, den))
            if any(pt):
                yield tuple(pt)


def has_flat_orbits(
    algebra: GradedNilpotentLieAlgebra, flag: JordanHolderFlag | None = None
) -> tuple[bool, Covector | None]:
    """Exact flat-orbit decision with a witness covector when one exists.

    Pf != 0 is decided by coefficient inspection, never by sampling; the
    witness search then scans rational points of z*.
    """
    if flag is None:
        flag = jordan_holder_basis(algebra)
    pf = pfaffian_on_center_dual(algebra, flag)
    if pf.odd_codimension or pf.is_zero():
        return False, None
    for pt in _witness_candidates(flag.center_dim):
        if pf(pt) != 0:
            return True, Covector.from_center_dual(algebra, flag, pt)
    raise InvariantViolation("nonzero Pfaffian but no witness found")


def is_flat(algebra: GradedNilpotentLieAlgebra, xi: Covector) -> bool:
    return orbit_dimension(algebra, xi) == algebra.dim - center(algebra).dim


def is_on_gamma_partial(
    algebra: GradedNilpotentLieAlgebra, flag: JordanHolderFlag, xi: Covector
) -> bool:
    """Membership in the dilation transversal: det(omega_xi | g/z) = 1, exact."""
    return det_on_complement(algebra, flag, xi) == 1


# -- fine stratification ----------------------------------------------------


@dataclass(frozen=True)
class JumpProfile:
    """Jump index sets (J^1_xi, ..., J^n_xi); 1-based levels inside each set."""

    sets: tuple[frozenset, ...]

    @property
    def top(self) -> frozenset:
        return self.sets[-1]

    @property
    def orbit_dim(self) -> int:
        return len(self.sets[-1])

    def as_lists(self) -> list[list[int]]:
        return [sorted(s) for s in self.sets]


def _trailing_pivots(rows, width: int) -> set[int]:
    """Columns (1-based) that occur as the last nonzero entry of some vector in
    the span: computed by eliminating from the right."""
    m = [list(r) for r in rows]
    pivots: set[int] = set()
    r = 0
    for c in range(width - 1, -1, -1):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / pv
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.add(c + 1)
        r += 1
        if r == len(m):
            break
    return pivots


def jump_indices(
    algebra: GradedNilpotentLieAlgebra, flag: JordanHolderFlag, xi: Covector
) -> JumpProfile:
    """J^k_xi = { j <= k : g_j not in stab(xi|_{g_k}) + g_{j-1} }, all exact.

    In flag coordinates, g_j lies in stab + g_{j-1} exactly when the stabilizer
    contains a vector whose trailing coordinate is j.
    """
    n = algebra.dim
    form = _flag_form(algebra, flag, xi)
    sets = []
    for k in range(1, n + 1):
        stab_rows = _stab_flag_rows(form, k)
        covered = _trailing_pivots(stab_rows, k)
        sets.append(frozenset(j for j in range(1, k + 1) if j not in covered))
    profile = JumpProfile(tuple(sets))
    if profile.orbit_dim != la.rank(form):
        raise InvariantViolation("jump profile size differs from orbit dimension")
    return profile


def enumerate_strata(
    algebra: GradedNilpotentLieAlgebra,
    flag: JordanHolderFlag,
    samples,
) -> dict[JumpProfile, list[Covector]]:
    """Group sample covectors by jump profile (sampling evidence, not exact).

    The profile of maximal orbit dimension among the samples is the observed
    top stratum.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("empty sample set")
    out: dict[JumpProfile, list[Covector]] = {}
    for xi in samples:
        out.setdefault(jump_indices(algebra, flag, xi), []).append(xi)
    return out


def observed_top_stratum(strata: dict[JumpProfile, list[Covector]]) -> JumpProfile:
    return max(strata, key=lambda p: (p.orbit_dim, sorted(p.top)))


# -- Vergne polarization ------------------------------------------------------


def vergne_polarization(
    algebra: GradedNilpotentLieAlgebra, flag: JordanHolderFlag, xi: Covector
) -> Subspace:
    """h_V(xi) = sum_k stab(xi|_{g_k}); verified subalgebra, isotropic, and of
    codimension rank(omega_xi)/2."""
    n = algebra.dim
    form = _flag_form(algebra, flag, xi)
    rows = []
    for k in range(1, n + 1):
        for coeffs in _stab_flag_rows(form, k):
            rows.append(coeffs + (Fraction(0),) * (n - k))
    flag_span = la.rref(rows)[0]
    h = _flag_rows_to_subspace(flag_span, flag, n)
    for u in h.basis:
        for v in h.basis:
            br = algebra.bracket(u, v)
            if not h.contains(br):
                raise InvariantViolation("Vergne polarization is not a subalgebra")
            if xi.pair(br) != 0:
                raise InvariantViolation("Vergne polarization is not isotropic")
    if 2 * (n - h.dim) != la.rank(form):
        raise InvariantViolation("Vergne polarization has wrong codimension")
    return h


# -- automorphism action on the flat transversal ------------------------------


def aut_action_on_lambda(
    algebra: GradedNilpotentLieAlgebra,
    flag: JordanHolderFlag,
    m: Mat,
    zcoords,
) -> Vec:
    """(phi^* xi)|_z in z*-coordinates for the automorphism with matrix m."""
    if not is_automorphism(algebra, m):
        raise LieAlgebraError("matrix is not a Lie algebra automorphism")
    xi = Covector.from_center_dual(algebra, flag, zcoords)
    pulled = la.mat_vec(la.transpose(la.mat(m)), xi.coords)
    return Covector(pulled).restrict_to_center(algebra, flag)


def coadjoint_move(
    algebra: GradedNilpotentLieAlgebra, x, xi: Covector
) -> Covector:
    """Ad*(exp x) xi, exactly: xi composed with exp(-ad_x) (a finite series)."""
    n = algebra.dim
    xv = la.vec(x)
    cols = []
    for i in range(n):
        # exp(-ad_x) e_i as a finite series (ad_x is nilpotent)
        total = algebra.basis_vector(i)
        power = total
        coeff = Fraction(1)
        for m in range(1, n + 1):
            power = algebra.bracket(xv, power)
            if all(c == 0 for c in power):
                break
            coeff = coeff * Fraction(-1, m)
            total = la.add(total, la.scale(coeff, power))
        cols.append(total)
    new_coords = tuple(la.dot(xi.coords, col) for col in cols)
    return Covector(new_coords)


# -- central 2-cocycle ---------------------------------------------------------


def complement_projection(
    algebra: GradedNilpotentLieAlgebra, flag: JordanHolderFlag, v: Vec
) -> Vec:
    """Kill the z-components in flag coordinates (the splitting tau fixed by
    the flag)."""
    out = list(v)
    for l in range(flag.center_dim):
        out[flag.permutation[l]] = 0
    return tuple(out)


def center_part(
    algebra: GradedNilpotentLieAlgebra, flag: JordanHolderFlag, v: Vec
) -> Vec:
    out = [0] * algebra.dim
    for l in range(flag.center_dim):
        i = flag.permutation[l]
        out[i] = v[i]
    return tuple(out)


def central_cocycle(
    algebra: GradedNilpotentLieAlgebra,
    flag: JordanHolderFlag,
    xbar,
    ybar,
    step: int | None = None,
) -> Vec:
    """omega_Z(xbar, ybar) = tau(x) tau(y) tau(x*y)^{-1} in z, exactly.

    Inputs are taken in the flag complement (their z-parts are projected away).
    Writing bch(x, y) = w' + c with w' its complement part and c central,
    exp(w) exp(-w') = exp(c), so the cocycle is the flag z-part of bch(x, y).
    """
    if step is None:
        step = step_length(algebra)
    x = complement_projection(algebra, flag, la.vec(xbar))
    y = complement_projection(algebra, flag, la.vec(ybar))
    return center_part(algebra, flag, bch(algebra, x, y, step))


def quotient_product(
    algebra: GradedNilpotentLieAlgebra,
    flag: JordanHolderFlag,
    xbar,
    ybar,
    step: int | None = None,
) -> Vec:
    """Product in G/Z in the flag splitting: the complement part of bch."""
    if step is None:
        step = step_length(algebra)
    x = complement_projection(algebra, flag, la.vec(xbar))
    y = complement_projection(algebra, flag, la.vec(ybar))
    return complement_projection(algebra, flag, bch(algebra, x, y, step))
