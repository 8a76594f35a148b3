"""Represented symbols on flat-orbit representations.

The representation coefficients are exact (rationals / polynomials over the
rationals); matrices on the truncated Hermite basis are the only floating
point objects. Convention for ladder matrices: <a| a_j^dag |a - e_j> = sqrt(a_j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _linalg as la
from ._linalg import Vec
from ._poly import Poly
from .coadjoint import (
    Covector,
    InvariantViolation,
    is_flat,
    vergne_polarization,
)
from .liealg import (
    GradedNilpotentLieAlgebra,
    JordanHolderFlag,
    Subspace,
    UnsupportedStepError,
    bch_generic,
    derived_subalgebra,
    step_length,
)


class RepresentationError(ValueError):
    """Unsupported or inconsistent flat-representation request."""


# -- PBW symbols ---------------------------------------------------------------


@dataclass(frozen=True)
class PBWSymbol:
    """Element of U_m(g) (x) End(C^r): sum of coeff (x) X^alpha in PBW order.

    X^alpha means X_1^{a_1} ... X_n^{a_n} with ascending basis index. Every
    monomial must have the same weighted degree sum(a_j w_j) = m.
    """

    algebra: GradedNilpotentLieAlgebra
    degree: int
    rank: int
    terms: tuple  # ((r x r complex ndarray, alpha tuple), ...)

    @classmethod
    def from_terms(cls, algebra, terms, rank=None) -> "PBWSymbol":
        packed = []
        degree = None
        for coeff, alpha in terms:
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != algebra.dim:
                raise ValueError("monomial length must equal the dimension")
            mat = np.atleast_2d(np.asarray(coeff, dtype=complex))
            if mat.shape[0] != mat.shape[1]:
                raise ValueError("coefficients must be square matrices")
            if rank is None:
                rank = mat.shape[0]
            if mat.shape[0] != rank:
                raise ValueError("inconsistent fiber ranks")
            deg = sum(a * w for a, w in zip(alpha, algebra.weights))
            if degree is None:
                degree = deg
            elif deg != degree:
                raise ValueError("symbol is not homogeneous")
            packed.append((mat, alpha))
        if degree is None:
            degree = 0
            if rank is None:
                rank = 1
        return cls(algebra, degree, rank, tuple(packed))

    @classmethod
    def sub_laplacian(cls, algebra) -> "PBWSymbol":
        """-sum X_j^2 over the weight-1 coordinate basis."""
        terms = []
        for j in algebra.weight_indices(1):
            alpha = [0] * algebra.dim
            alpha[j] = 2
            terms.append((np.array([[-1.0 + 0j]]), tuple(alpha)))
        return cls.from_terms(algebra, terms)

    @classmethod
    def zero(cls, algebra, degree: int, rank: int = 1) -> "PBWSymbol":
        return cls(algebra, degree, rank, ())


def dirac_square_symbol(algebra: GradedNilpotentLieAlgebra) -> PBWSymbol:
    """diag(-X^2 - Y^2 + iZ, -X^2 - Y^2 - iZ) on a Heisenberg-type basis
    (X, Y, Z) = first two weight-1 vectors and the bracket direction."""
    ones = algebra.weight_indices(1)
    if len(ones) < 2:
        raise ValueError("need two weight-1 directions")
    x, y = ones[0], ones[1]
    z_comps = algebra.basis_bracket(x, y)
    z = next((k for k, c in enumerate(z_comps) if c != 0), None)
    if z is None:
        raise ValueError("[X, Y] vanishes; no Dirac-square model here")
    eye = np.eye(2, dtype=complex)
    ax = [0] * algebra.dim
    ax[x] = 2
    ay = [0] * algebra.dim
    ay[y] = 2
    az = [0] * algebra.dim
    az[z] = 1
    return PBWSymbol.from_terms(
        algebra,
        [
            (-eye, tuple(ax)),
            (-eye, tuple(ay)),
            (np.diag([1j, -1j]), tuple(az)),
        ],
    )


# -- flat representations -------------------------------------------------------


@dataclass(frozen=True)
class FlatRepresentation:
    """dpi on L^2(R^d) with dpi(X_i) = -sum_k c_k d/dt_k + i p_i(t).

    c-coefficients are exact rationals, p_i are polynomials over the rationals
    (affine for step-2 data, higher degree for the generic-orbit cases). The
    coordinate t_k runs along complement_scales[k] * X_{complement[k]}: the
    power-of-2 scales balance derivative against potential coefficients so
    Hermite truncations converge; they amount to a unitary dilation of L^2.
    """

    algebra: GradedNilpotentLieAlgebra
    flag: JordanHolderFlag
    xi: Covector
    polarization: Subspace
    complement: tuple[int, ...]  # algebra basis indices spanning g/h_V
    complement_scales: tuple  # per coordinate: positive Fraction
    deriv_coeffs: tuple  # per generator: tuple of d Fractions
    potentials: tuple  # per generator: Poly in d variables
    flat: bool

    @property
    def d(self) -> int:
        return len(self.complement)


def _poly_vec_bracket(algebra, u, v):
    n = algebra.dim
    nvars = u[0].nvars
    out = [Poly(nvars) for _ in range(n)]
    for (i, j), row in algebra.brackets.items():
        coef = u[i] * v[j] - u[j] * v[i]
        if not coef.is_zero():
            for k, c in row.items():
                out[k] = out[k] + coef * c
    return tuple(out)


def flat_rep(
    algebra: GradedNilpotentLieAlgebra,
    flag: JordanHolderFlag,
    xi: Covector,
) -> FlatRepresentation:
    """Monomial-coefficient model of the induced representation at xi.

    Works whenever the Vergne polarization h_V(xi) contains [g, g] (all flat
    step-2 data; the Engel-type generic orbits). The Lie-homomorphism property
    of the result is verified exactly.
    """
    n = algebra.dim
    step = step_length(algebra)
    flat = is_flat(algebra, xi)
    if step <= 2 and not flat:
        raise RepresentationError("covector is not flat")
    h = vergne_polarization(algebra, flag, xi)
    comm = derived_subalgebra(algebra)
    if not h.contains_subspace(comm):
        raise UnsupportedStepError(
            "flat representations need [g, g] inside the Vergne polarization; "
            f"unsupported at step {step}"
        )
    # complement levels: g_j not in h + g_{j-1}
    K = []
    for j in range(1, n + 1):
        prev = [algebra.basis_vector(i) for i in flag.prefix_indices(j - 1)]
        total = la.span_union(h.basis, prev)
        if not la.in_span(total, algebra.basis_vector(flag.permutation[j - 1])):
            K.append(flag.permutation[j - 1])
    d = len(K)
    if 2 * d != len(K) + (n - h.dim):
        raise InvariantViolation("complement size mismatch")

    columns = [algebra.basis_vector(i) for i in K] + [tuple(v) for v in h.basis]

    def split_coeffs(vecx: Vec):
        sol = la.solve(columns, vecx)
        if sol is None:
            raise InvariantViolation("complement + polarization do not span")
        return sol[:d]

    def pvec(entries):
        return tuple(entries)

    zero_pair = (
        pvec([Poly(d) for _ in range(n)]),
        pvec([Poly(d) for _ in range(n)]),
    )

    def pair_add(a, b):
        return (
            pvec([x + y for x, y in zip(a[0], b[0])]),
            pvec([x + y for x, y in zip(a[1], b[1])]),
        )

    def pair_scale(c, a):
        return (
            pvec([x * c for x in a[0]]),
            pvec([x * c for x in a[1]]),
        )

    def pair_bracket(a, b):
        main = _poly_vec_bracket(algebra, a[0], b[0])
        first = tuple(
            x + y
            for x, y in zip(
                _poly_vec_bracket(algebra, a[0], b[1]),
                _poly_vec_bracket(algebra, a[1], b[0]),
            )
        )
        return (main, first)

    # r(x) = sum_k t_k X_{K_k}
    r_x_main = [Poly(d) for _ in range(n)]
    for k, idx in enumerate(K):
        r_x_main[idx] = Poly.variable(d, k)
    r_x = (pvec(r_x_main), pvec([Poly(d) for _ in range(n)]))

    deriv_coeffs = []
    potentials = []
    for i in range(n):
        ei = algebra.basis_vector(i)
        c = split_coeffs(ei)
        deriv_coeffs.append(tuple(c))
        # -r(y) where y_k = t_k - s c_k
        neg_ry_main = [-p for p in r_x[0]]
        neg_ry_first = [Poly(d) for _ in range(n)]
        for k, idx in enumerate(K):
            if c[k]:
                neg_ry_first[idx] = Poly.constant(d, c[k])
        neg_ry = (pvec(neg_ry_main), pvec(neg_ry_first))
        # -s X_i
        sxi_first = [Poly(d) for _ in range(n)]
        sxi_first[i] = Poly.constant(d, -1)
        sxi = (pvec([Poly(d) for _ in range(n)]), pvec(sxi_first))
        inner = bch_generic(
            pair_bracket, pair_add, pair_scale, zero_pair, sxi, r_x, step
        )
        logh = bch_generic(
            pair_bracket, pair_add, pair_scale, zero_pair, neg_ry, inner, step
        )
        if any(not p.is_zero() for p in logh[0]):
            raise InvariantViolation("zeroth-order part of log h must vanish")
        bvec = logh[1]
        # every coefficient vector of B must lie in the polarization
        monos = set()
        for p in bvec:
            monos.update(p.terms)
        for mono in monos:
            coeff_vec = tuple(p.terms.get(mono, Fraction(0)) for p in bvec)
            if not h.contains(coeff_vec):
                raise InvariantViolation("log h escaped the polarization")
        p_i = Poly(d)
        for kcoord in range(n):
            cxi = xi.coords[kcoord]
            if cxi:
                p_i = p_i + bvec[kcoord] * (-cxi)
        potentials.append(p_i)

    scales = _balancing_scales(d, deriv_coeffs, potentials)
    if any(s != 1 for s in scales):
        deriv_coeffs = [
            tuple(c / scales[k] for k, c in enumerate(row)) for row in deriv_coeffs
        ]
        potentials = [_rescale_poly(p, scales) for p in potentials]
    rep = FlatRepresentation(
        algebra,
        flag,
        xi,
        h,
        tuple(K),
        tuple(scales),
        tuple(deriv_coeffs),
        tuple(potentials),
        flat,
    )
    _verify_homomorphism(rep)
    return rep


def _rescale_poly(p: Poly, scales) -> Poly:
    out = {}
    for mono, coeff in p.terms.items():
        factor = coeff
        for k, e in enumerate(mono):
            if e:
                factor = factor * scales[k] ** e
        out[mono] = factor
    return Poly(p.nvars, out)


def _balancing_scales(d, deriv_coeffs, potentials):
    """Power-of-2 coordinate scales equalizing derivative and potential sizes.

    Replacing the k-th complement vector by s_k times itself divides every
    c_k by s_k and multiplies t_k-coefficients by s_k; choosing s_k near
    sqrt(max|c_k| / max|dp/dt_k|) keeps the represented quadratic model
    well-conditioned on the Hermite basis.
    """
    scales = []
    for k in range(d):
        cmax = max((abs(row[k]) for row in deriv_coeffs), default=Fraction(0))
        pmax = Fraction(0)
        for p in potentials:
            for mono, coeff in p.terms.items():
                if mono[k]:
                    pmax = max(pmax, abs(coeff))
        if cmax == 0 or pmax == 0:
            scales.append(Fraction(1))
            continue
        exponent = round(0.5 * math.log2(float(cmax / pmax)))
        scales.append(Fraction(2) ** exponent)
    return tuple(scales)


def _verify_homomorphism(rep: FlatRepresentation) -> None:
    """Exact check of [dpi(X_i), dpi(X_j)] = dpi([X_i, X_j]) on all generators."""
    alg = rep.algebra
    n = alg.dim
    d = rep.d

    def directional(c, p: Poly) -> Poly:
        out = Poly(d)
        for k in range(d):
            if c[k]:
                out = out + p.partial(k) * c[k]
        return out

    for i in range(n):
        for j in range(i + 1, n):
            br = alg.basis_bracket(i, j)
            lhs = directional(rep.deriv_coeffs[j], rep.potentials[i]) - directional(
                rep.deriv_coeffs[i], rep.potentials[j]
            )
            rhs_c = [Fraction(0)] * d
            rhs_p = Poly(d)
            for k, c in enumerate(br):
                if c:
                    rhs_p = rhs_p + rep.potentials[k] * c
                    for t in range(d):
                        rhs_c[t] += c * rep.deriv_coeffs[k][t]
            if any(x != 0 for x in rhs_c):
                raise InvariantViolation("bracket has complement component")
            if lhs != rhs_p:
                raise InvariantViolation(
                    f"representation is not a homomorphism on (X_{i+1}, X_{j+1})"
                )


# -- Hermite truncations ---------------------------------------------------------


@lru_cache(maxsize=None)
def hermite_indices(d: int, N: int) -> tuple[tuple[int, ...], ...]:
    """Multi-indices |alpha| <= N in graded lexicographic order."""
    out: list[tuple[int, ...]] = []

    def rec(prefix, rem, slots):
        if slots == 1:
            out.append(prefix + (rem,))
            return
        for v in range(rem + 1):
            rec(prefix + (v,), rem - v, slots - 1)

    for total in range(N + 1):
        rec((), total, d)
    return tuple(out)


@lru_cache(maxsize=None)
def _ladder_matrices(d: int, N: int):
    """Position and derivative matrices (T_k, D_k) on degrees <= N."""
    idx = hermite_indices(d, N)
    pos = {a: i for i, a in enumerate(idx)}
    m = len(idx)
    Ts = [np.zeros((m, m)) for _ in range(d)]
    Ds = [np.zeros((m, m)) for _ in range(d)]
    for a in idx:
        ia = pos[a]
        for k in range(d):
            up = tuple(x + (1 if t == k else 0) for t, x in enumerate(a))
            if up in pos:
                c = np.sqrt((a[k] + 1) / 2.0)
                Ts[k][pos[up], ia] += c
                Ds[k][pos[up], ia] -= c
            if a[k] > 0:
                dn = tuple(x - (1 if t == k else 0) for t, x in enumerate(a))
                c = np.sqrt(a[k] / 2.0)
                Ts[k][pos[dn], ia] += c
                Ds[k][pos[dn], ia] += c
    return idx, tuple(Ts), tuple(Ds)


@dataclass(frozen=True)
class TruncatedOperator:
    """Dense matrix on {Hermite multi-indices |alpha| <= N} x fiber.

    Entries are exact matrix elements of the represented operator: they were
    assembled on a padded space and restricted, so no truncation error enters
    below degree N.
    """

    degree: int
    d: int
    rank: int
    matrix: np.ndarray
    indices: tuple

    def smallest_singular_value(self) -> float:
        return float(np.linalg.svd(self.matrix, compute_uv=False)[-1])

    def hermitian_part_eigenvalues(self) -> np.ndarray:
        h = (self.matrix + self.matrix.conj().T) / 2.0
        return np.linalg.eigvalsh(h)

    def singular_witness(self):
        """(fiber index, hermite multi-index, weight) of the dominant component
        of the smallest right-singular vector."""
        _, _, vh = np.linalg.svd(self.matrix)
        v = vh[-1].conj()
        kbest = int(np.argmax(np.abs(v)))
        hermite = self.indices[kbest // self.rank]
        fiber = kbest % self.rank
        return fiber, hermite, float(abs(v[kbest]))


def _poly_matrix(p: Poly, Ts, m: int) -> np.ndarray:
    out = np.zeros((m, m), dtype=complex)
    for mono, coeff in p.terms.items():
        term = None
        for k, e in enumerate(mono):
            for _ in range(e):
                term = Ts[k].copy() if term is None else term @ Ts[k]
        block = np.eye(m) if term is None else term
        out += float(coeff) * block
    return out


def generator_matrix(rep: FlatRepresentation, i: int, N: int) -> np.ndarray:
    """Matrix of dpi(X_i) on degrees <= N (exact below N - shift)."""
    _, Ts, Ds = _ladder_matrices(rep.d, N)
    m = Ts[0].shape[0] if rep.d else 1
    if rep.d == 0:
        return np.array([[1j * float(rep.potentials[i].evaluate(()))]])
    out = np.zeros((m, m), dtype=complex)
    for k in range(rep.d):
        c = rep.deriv_coeffs[i][k]
        if c:
            out -= float(c) * Ds[k]
    out += 1j * _poly_matrix(rep.potentials[i], Ts, m)
    return out


def _generator_shift(rep: FlatRepresentation, i: int) -> int:
    shift = 1 if any(rep.deriv_coeffs[i]) else 0
    return max(shift, rep.potentials[i].degree())


def symbol_padding(rep: FlatRepresentation, symbol: PBWSymbol) -> int:
    pad = 0
    for _, alpha in symbol.terms:
        pad = max(
            pad,
            sum(a * _generator_shift(rep, i) for i, a in enumerate(alpha) if a),
        )
    return pad


def represent_symbol(
    rep: FlatRepresentation, symbol: PBWSymbol, N: int
) -> TruncatedOperator:
    """Represented symbol on the padded space, restricted to degrees <= N."""
    if symbol.algebra.dim != rep.algebra.dim:
        raise ValueError("symbol and representation algebras differ")
    pad = symbol_padding(rep, symbol)
    npad = N + pad
    idx_pad = hermite_indices(rep.d, npad)
    mpad = len(idx_pad)
    gens = {}
    acc = np.zeros((mpad * symbol.rank, mpad * symbol.rank), dtype=complex)
    for coeff, alpha in symbol.terms:
        word = None
        for i, a in enumerate(alpha):
            if not a:
                continue
            if i not in gens:
                gens[i] = generator_matrix(rep, i, npad)
            for _ in range(a):
                word = gens[i].copy() if word is None else word @ gens[i]
        if word is None:
            word = np.eye(mpad)
        acc += np.kron(word, coeff)
    keep = [
        t * symbol.rank + f
        for t, a in enumerate(idx_pad)
        if sum(a) <= N
        for f in range(symbol.rank)
    ]
    sub = acc[np.ix_(keep, keep)]
    return TruncatedOperator(
        N, rep.d, symbol.rank, sub, tuple(a for a in idx_pad if sum(a) <= N)
    )


# -- oscillators and Fock layers ---------------------------------------------


def _weight_one_metric_frame(algebra, metric):
    ones = algebra.weight_indices(1)
    q = len(ones)
    if metric is None:
        return [
            [1.0 if a == b else 0.0 for b in range(q)] for a in range(q)
        ], ones
    G = np.array([[float(la.parse_fraction(x)) for x in row] for row in metric])
    if G.shape != (q, q):
        raise ValueError("metric must act on the weight-1 layer")
    Lc = np.linalg.cholesky(G)
    U = np.linalg.inv(Lc).T  # columns orthonormal: U^T G U = 1
    return U.T.tolist(), ones


def harmonic_oscillator(
    rep: FlatRepresentation, N: int, metric=None
) -> TruncatedOperator:
    """Truncated -sum dpi(U_j)^2 over an orthonormal basis of the weight-1 layer.

    Requires flat step-2 data; the lowest eigenvalue converges to Tr|omega_xi|/2.
    """
    if step_length(rep.algebra) != 2 or not rep.flat:
        raise RepresentationError("harmonic oscillator needs a flat step-2 datum")
    frames, ones = _weight_one_metric_frame(rep.algebra, metric)
    npad = N + 2
    idx_pad = hermite_indices(rep.d, npad)
    mpad = len(idx_pad)
    gens = [generator_matrix(rep, i, npad) for i in ones]
    H = np.zeros((mpad, mpad), dtype=complex)
    for row in frames:
        M = sum(float(c) * gens[a] for a, c in enumerate(row))
        H -= M @ M
    keep = [t for t, a in enumerate(idx_pad) if sum(a) <= N]
    return TruncatedOperator(
        N, rep.d, 1, H[np.ix_(keep, keep)], tuple(a for a in idx_pad if sum(a) <= N)
    )


def symplectic_spectrum(omega, metric=None) -> np.ndarray:
    """Positive eigenvalues mu_1 <= ... <= mu_d of |omega| relative to the metric."""
    of = np.array([[float(la.parse_fraction(x)) for x in row] for row in omega])
    if metric is not None:
        G = np.array([[float(la.parse_fraction(x)) for x in row] for row in metric])
        ev, U = np.linalg.eigh(G)
        ginvh = (U / np.sqrt(ev)) @ U.T
        of = ginvh @ of @ ginvh
    ev = np.linalg.eigvalsh(1j * of)
    pos = np.sort(ev[ev > 0])
    return pos


def fock_layer_operator(omega, metric, k: int) -> np.ndarray:
    """Hermitian s_k(g_omega) + (Tr|omega|/2) Id on Sym^k of the (1,0)-space.

    Calibrated so that the layer spectra match the oscillator clusters:
    the complex-linear g_omega carries eigenvalues 2 mu_j, and the layer-k
    eigenvalues are sum_j 2 beta_j mu_j + sum_j mu_j over |beta| = k.
    """
    if k < 0:
        raise ValueError("layer index must be nonnegative")
    mus = symplectic_spectrum(omega, metric)
    twod = len(la.mat(omega))
    if len(mus) * 2 != twod:
        raise ValueError("omega is degenerate")
    d = len(mus)
    trace_half = float(np.sum(mus))
    occs = [b for b in hermite_indices(d, k) if sum(b) == k]
    pos = {b: i for i, b in enumerate(occs)}
    m = len(occs)
    out = np.zeros((m, m), dtype=complex)
    C = np.diag(2.0 * mus)
    for b in occs:
        ib = pos[b]
        for q in range(d):
            if b[q] == 0:
                continue
            for p in range(d):
                if C[p, q] == 0:
                    continue
                if p == q:
                    out[ib, ib] += C[p, p] * b[p]
                else:
                    b2 = list(b)
                    b2[q] -= 1
                    b2[p] += 1
                    out[pos[tuple(b2)], ib] += C[p, q] * np.sqrt(b[q] * (b[p] + 1))
    return out + trace_half * np.eye(m)


def gamma_k(omega, metric, gamma_value, k: int) -> np.ndarray:
    """gamma_k = s_k(g_omega) + Tr|omega|/2 + gamma on Sym^k (x) C^r."""
    layer = fock_layer_operator(omega, metric, k)
    gm = np.atleast_2d(np.asarray(gamma_value, dtype=complex))
    r = gm.shape[0]
    return np.kron(layer, np.eye(r)) + np.kron(np.eye(layer.shape[0]), gm)
