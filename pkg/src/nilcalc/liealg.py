"""Exact structure theory of graded nilpotent Lie algebras.

Structure constants are rationals and every operation here is exact: rank and
membership decisions never touch floating point. Basis indices are 0-based
internally; the document format used by the CLI is 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import _linalg as la
from ._linalg import Mat, Vec


class LieAlgebraError(ValueError):
    """Malformed or axiom-violating algebra input."""


class UnsupportedStepError(LieAlgebraError):
    """Operation not available at this nilpotency step."""


MAX_BCH_STEP = 6


@dataclass(frozen=True)
class Subspace:
    """Rational subspace stored in reduced row-echelon form.

    Equality of subspaces is equality of representations.
    """

    basis: Mat
    ambient_dim: int

    @classmethod
    def from_vectors(cls, vectors, ambient_dim: int) -> "Subspace":
        rows = la.rref(tuple(tuple(v) for v in vectors))[0]
        return cls(rows, ambient_dim)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls((), ambient_dim)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _pivots(self) -> tuple[int, ...]:
        return tuple(
            next(i for i, x in enumerate(row) if x != 0) for row in self.basis
        )

    def contains(self, v: Vec) -> bool:
        # basis rows are already in RREF: a single reduction pass decides
        return not any(la.reduce_mod_rref(self.basis, self._pivots(), tuple(v)))

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def sum(self, other: "Subspace") -> "Subspace":
        return Subspace(la.span_union(self.basis, other.basis), self.ambient_dim)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.basis, self.ambient_dim))


@dataclass(frozen=True)
class GradedNilpotentLieAlgebra:
    """A graded nilpotent Lie algebra given by exact structure constants.

    brackets maps (i, j) with i < j to {k: c} meaning [X_i, X_j] = sum c X_k.
    weights[j] is the positive grading weight of X_j (X_j has degree -w_j).
    """

    dim: int
    weights: tuple[int, ...]
    brackets: dict = field(compare=False)
    name: str = ""

    def __post_init__(self):
        if self.dim <= 0:
            raise LieAlgebraError("dimension must be positive")
        object.__setattr__(self, "weights", tuple(self.weights))
        if len(self.weights) != self.dim:
            raise LieAlgebraError("weights length must equal dimension")
        if any(w <= 0 or int(w) != w for w in self.weights):
            raise LieAlgebraError("weights must be positive integers")
        table: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j), row in self.brackets.items():
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise LieAlgebraError(f"bracket index ({i},{j}) out of range")
            if i == j:
                if any(Fraction(c) != 0 for c in row.values()):
                    raise LieAlgebraError(f"[X_{i},X_{i}] must vanish")
                continue
            sign = 1
            if i > j:
                i, j, sign = j, i, -1
            dst = table.setdefault((i, j), {})
            for k, c in row.items():
                if not 0 <= k < self.dim:
                    raise LieAlgebraError(f"bracket target {k} out of range")
                c = sign * la.parse_fraction(c)
                val = dst.get(k, Fraction(0)) + c
                if val == 0:
                    dst.pop(k, None)
                else:
                    # plain ints keep the bch/bracket hot path in integer
                    # arithmetic; they interoperate exactly with Fraction
                    dst[k] = int(val) if val.denominator == 1 else val
        object.__setattr__(
            self, "brackets", {ij: row for ij, row in table.items() if row}
        )
        object.__setattr__(
            self,
            "_bracket_items",
            tuple((i, j, tuple(row.items())) for (i, j), row in self.brackets.items()),
        )

    # -- basic bracket machinery ------------------------------------------

    def basis_bracket(self, i: int, j: int) -> Vec:
        out = [0] * self.dim
        if i == j:
            return tuple(out)
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        for k, c in self.brackets.get((i, j), {}).items():
            out[k] = sign * c
        return tuple(out)

    def bracket(self, u, v) -> Vec:
        """Bilinear bracket; exact for int/Fraction entries (no coercion)."""
        out = [0] * self.dim
        for i, j, row in self._bracket_items:
            coef = u[i] * v[j] - u[j] * v[i]
            if coef:
                for k, c in row:
                    out[k] += coef * c
        return tuple(out)

    def basis_vector(self, i: int) -> Vec:
        return tuple(1 if j == i else 0 for j in range(self.dim))

    def weight_indices(self, w: int) -> list[int]:
        return [j for j in range(self.dim) if self.weights[j] == w]

    @property
    def max_weight(self) -> int:
        return max(self.weights)


# -- validation ------------------------------------------------------------


def validate(algebra: GradedNilpotentLieAlgebra) -> list[str]:
    """Return every violated axiom; an empty list means the algebra is valid.

    Checked axioms: antisymmetry (structural, always holds for the canonical
    table), grading compatibility, Jacobi identity, nilpotency.
    """
    diags: list[str] = []
    n = algebra.dim
    w = algebra.weights
    for (i, j), row in algebra.brackets.items():
        for k, c in row.items():
            if c != 0 and w[k] != w[i] + w[j]:
                diags.append(
                    f"grading: [X_{i+1},X_{j+1}] has component X_{k+1} "
                    f"but {w[i]}+{w[j]} != {w[k]}"
                )
    for a, b, c in combinations(range(n), 3):
        ea, eb, ec = (algebra.basis_vector(t) for t in (a, b, c))
        s = la.add(
            la.add(
                algebra.bracket(algebra.bracket(ea, eb), ec),
                algebra.bracket(algebra.bracket(eb, ec), ea),
            ),
            algebra.bracket(algebra.bracket(ec, ea), eb),
        )
        if any(x != 0 for x in s):
            diags.append(f"jacobi: cyclic sum fails on (X_{a+1},X_{b+1},X_{c+1})")
    try:
        _, step = descending_central_series(algebra)
        if step > algebra.max_weight:
            diags.append(
                f"nilpotency: step {step} exceeds max weight {algebra.max_weight}"
            )
    except LieAlgebraError as exc:
        diags.append(f"nilpotency: {exc}")
    return diags


def center(algebra: GradedNilpotentLieAlgebra) -> Subspace:
    """The center {X : [X, Y] = 0 for all Y}, as the exact adjoint kernel."""
    rows = []
    for j in range(algebra.dim):
        for k in range(algebra.dim):
            rows.append(
                tuple(algebra.basis_bracket(i, j)[k] for i in range(algebra.dim))
            )
    return Subspace(la.nullspace(rows, algebra.dim), algebra.dim)


def descending_central_series(
    algebra: GradedNilpotentLieAlgebra,
) -> tuple[list[Subspace], int]:
    """Chain g >= [g,g] >= ... >= 0 and the step length."""
    n = algebra.dim
    chain = [Subspace(la.identity(n), n)]
    while chain[-1].dim > 0:
        prev = chain[-1]
        gens = [
            algebra.bracket(algebra.basis_vector(i), v)
            for i in range(n)
            for v in prev.basis
        ]
        nxt = Subspace.from_vectors(gens, n)
        if nxt.dim >= prev.dim:
            raise LieAlgebraError("descending central series does not terminate")
        chain.append(nxt)
    return chain, len(chain) - 1


def step_length(algebra: GradedNilpotentLieAlgebra) -> int:
    return descending_central_series(algebra)[1]


def dilation_apply(algebra: GradedNilpotentLieAlgebra, t, v):
    """Apply the grading dilation: component j scales by t**w_j. Exact for
    rational t, floating point otherwise."""
    if isinstance(t, (int, Fraction)) or isinstance(t, str):
        t = la.parse_fraction(t)
        if t <= 0:
            raise ValueError("dilation parameter must be positive")
        return tuple(Fraction(x) * t ** algebra.weights[j] for j, x in enumerate(v))
    tf = float(t)
    if tf <= 0:
        raise ValueError("dilation parameter must be positive")
    return tuple(float(x) * tf ** algebra.weights[j] for j, x in enumerate(v))


# -- Baker-Campbell-Hausdorff ------------------------------------------------


def _dynkin_table(max_len: int) -> list[tuple[Fraction, tuple[int, ...]]]:
    """Dynkin-series words over {0, 1} with exact coefficients.

    Each term is coeff * [w1,[w2,[...,[w_{k-1},wk]...]]] for the listed word.
    Words whose two trailing letters coincide have vanishing nested bracket
    and are dropped.
    """
    terms: list[tuple[Fraction, tuple[int, ...]]] = []
    seqs: list[list[tuple[int, int]]] = []

    def compositions(seq, total):
        if seq:
            seqs.append(list(seq))
        if total >= max_len:
            return
        for p in range(max_len - total + 1):
            for q in range(max_len - total - p + 1):
                if p == q == 0 or total + p + q > max_len:
                    continue
                seq.append((p, q))
                compositions(seq, total + p + q)
                seq.pop()

    compositions([], 0)
    for seq in seqs:
        total = sum(p + q for p, q in seq)
        denom = total
        for p, q in seq:
            denom *= math.factorial(p) * math.factorial(q)
        coeff = Fraction((-1) ** (len(seq) - 1), len(seq)) / denom
        word: list[int] = []
        for p, q in seq:
            word += [0] * p + [1] * q
        if len(word) >= 2 and word[-1] == word[-2]:
            continue
        terms.append((coeff, tuple(word)))
    return terms


_DYNKIN = _dynkin_table(MAX_BCH_STEP)
_DYNKIN_BY_STEP = tuple(
    tuple(term for term in _DYNKIN if len(term[1]) <= s)
    for s in range(MAX_BCH_STEP + 1)
)


def bch_generic(bracket, add, scale, zero, x, y, step: int):
    """Dynkin BCH over any module with the given bracket; exact coefficients.

    Words longer than `step` vanish in a step-`step` nilpotent algebra, so the
    truncation is exact. Supported through step 6. Nested commutators are
    evaluated right to left with the shared suffixes cached.
    """
    if step > MAX_BCH_STEP:
        raise UnsupportedStepError(
            f"BCH coefficients are tabulated through step {MAX_BCH_STEP}; got {step}"
        )
    acc = zero
    letters = (x, y)
    suffix_cache: dict[tuple[int, ...], object] = {(0,): x, (1,): y}

    def is_zero(v):
        try:
            return not any(v)
        except TypeError:
            return False

    for coeff, word in _DYNKIN_BY_STEP[min(step, MAX_BCH_STEP)]:
        suffix = word[-1:]
        val = suffix_cache[suffix]
        dead = False
        for letter in reversed(word[:-1]):
            suffix = (letter,) + suffix
            cached = suffix_cache.get(suffix)
            if cached is None:
                # a vanished suffix kills every extension of the word
                cached = val if is_zero(val) else bracket(letters[letter], val)
                suffix_cache[suffix] = cached
            val = cached
            if is_zero(val):
                dead = True
                break
        if not dead:
            acc = add(acc, scale(coeff, val))
    return acc


def bch(algebra: GradedNilpotentLieAlgebra, x, y, step: int | None = None) -> Vec:
    """Exact Z with exp(Z) = exp(X) exp(Y), via the Dynkin series.

    Inputs must have exact entries (int or Fraction). Specialized vector
    version of bch_generic: shared suffix cache, sparse accumulation.
    """
    if step is None:
        step = step_length(algebra)
    if step > MAX_BCH_STEP:
        raise UnsupportedStepError(
            f"BCH coefficients are tabulated through step {MAX_BCH_STEP}; got {step}"
        )
    bracket = algebra.bracket
    letters = (tuple(x), tuple(y))
    acc = [0] * algebra.dim
    cache: dict[tuple[int, ...], tuple] = {(0,): letters[0], (1,): letters[1]}
    for coeff, word in _DYNKIN_BY_STEP[step]:
        suffix = word[-1:]
        val = cache[suffix]
        dead = False
        for letter in reversed(word[:-1]):
            suffix = (letter,) + suffix
            cached = cache.get(suffix)
            if cached is None:
                cached = val if not any(val) else bracket(letters[letter], val)
                cache[suffix] = cached
            val = cached
            if not any(val):
                dead = True
                break
        if not dead:
            for k, entry in enumerate(val):
                if entry:
                    acc[k] += coeff * entry
    return tuple(acc)


# -- step-2 normal form -------------------------------------------------------


@dataclass(frozen=True)
class Step2NormalForm:
    """Step-2 data (V, W): complement basis and the bracket forms on it.

    The inner product used to pick V is the standard one in the input basis;
    `forms[l]` is the antisymmetric matrix of the l-th bracket form in the
    `complement` basis, targeting `commutator_basis[l]`.
    """

    complement: Mat
    commutator_basis: Mat
    forms: tuple[Mat, ...]


def derived_subalgebra(algebra: GradedNilpotentLieAlgebra) -> Subspace:
    gens = [
        algebra.basis_bracket(i, j)
        for i in range(algebra.dim)
        for j in range(i + 1, algebra.dim)
    ]
    return Subspace.from_vectors(gens, algebra.dim)


def step2_normal_form(algebra: GradedNilpotentLieAlgebra) -> Step2NormalForm:
    if step_length(algebra) > 2:
        raise UnsupportedStepError("normal form requires step length <= 2")
    n = algebra.dim
    comm = derived_subalgebra(algebra)
    # orthogonal complement of C(g) in the standard inner product
    complement = la.nullspace(comm.basis, n) if comm.dim else la.identity(n)
    q = len(complement)
    p = comm.dim
    forms = []
    for l in range(p):
        rows = []
        for a in range(q):
            row = []
            for b in range(q):
                br = algebra.bracket(complement[a], complement[b])
                coeffs = la.solve([tuple(v) for v in comm.basis], br)
                if coeffs is None:
                    raise LieAlgebraError("bracket does not land in [g,g]")
                row.append(coeffs[l])
            rows.append(tuple(row))
        forms.append(tuple(rows))
    if p and la.rank([tuple(x for row in f for x in row) for f in forms]) != p:
        raise LieAlgebraError("bracket forms are not linearly independent")
    return Step2NormalForm(complement, comm.basis, tuple(forms))


# -- automorphisms ------------------------------------------------------------


def is_automorphism(algebra: GradedNilpotentLieAlgebra, m) -> bool:
    """True iff the matrix preserves brackets exactly and is invertible."""
    mm = la.mat(m)
    if len(mm) != algebra.dim or any(len(r) != algebra.dim for r in mm):
        raise LieAlgebraError("matrix dimension mismatch")
    if la.det(mm) == 0:
        return False
    cols = la.transpose(mm)
    for i in range(algebra.dim):
        for j in range(i + 1, algebra.dim):
            lhs = algebra.bracket(cols[i], cols[j])
            rhs = la.mat_vec(mm, algebra.basis_bracket(i, j))
            if lhs != rhs:
                return False
    return True


def is_graded_automorphism(algebra: GradedNilpotentLieAlgebra, m) -> bool:
    """True iff m is an automorphism commuting with the grading decomposition."""
    mm = la.mat(m)
    if len(mm) != algebra.dim or any(len(r) != algebra.dim for r in mm):
        raise LieAlgebraError("matrix dimension mismatch")
    for i in range(algebra.dim):
        for j in range(algebra.dim):
            if mm[i][j] != 0 and algebra.weights[i] != algebra.weights[j]:
                return False
    return is_automorphism(algebra, mm)


def grading_automorphism_matrix(algebra: GradedNilpotentLieAlgebra, t) -> Mat:
    """Matrix of the dilation delta_t in the algebra basis (t rational)."""
    t = la.parse_fraction(t)
    return tuple(
        tuple(
            t ** algebra.weights[i] if i == j else Fraction(0)
            for j in range(algebra.dim)
        )
        for i in range(algebra.dim)
    )


# -- Mohsen modification ------------------------------------------------------


def mohsen_modification(
    algebra: GradedNilpotentLieAlgebra,
) -> GradedNilpotentLieAlgebra:
    """Central extension of g* x| g by the grading-paired symplectic cocycle.

    Output basis: (eta_1..eta_n, X_1..X_n, T) with weights
    (N+1-w_1, .., N+1-w_n, w_1, .., w_n, N+1) for N = max weight. The bracket
    extends the one of g by the coadjoint action and pairs eta_i with X_i into
    the new one-dimensional center R T with coefficient w_i. The output always
    has flat orbits.
    """
    n = algebra.dim
    nmax = algebra.max_weight
    dim = 2 * n + 1
    weights = tuple(
        [nmax + 1 - w for w in algebra.weights]
        + list(algebra.weights)
        + [nmax + 1]
    )
    table: dict[tuple[int, int], dict[int, Fraction]] = {}

    def add_entry(i, j, k, val):
        if val == 0:
            return
        if i > j:
            i, j, val = j, i, -val
        row = table.setdefault((i, j), {})
        row[k] = row.get(k, Fraction(0)) + val
        if row[k] == 0:
            del row[k]

    for (i, j), row in algebra.brackets.items():
        for k, c in row.items():
            add_entry(n + i, n + j, n + k, c)
    for i in range(n):
        for j in range(n):
            # [X_i, eta_j] = -sum_l c_{il}^j eta_l  (coadjoint action)
            for l in range(n):
                c = algebra.basis_bracket(i, l)[j]
                if c:
                    add_entry(n + i, j, l, -c)
            if i == j:
                # symplectic pairing twisted by the grading derivation
                add_entry(n + i, j, dim - 1, Fraction(-algebra.weights[i]))
    name = f"mohsen({algebra.name})" if algebra.name else "mohsen"
    return GradedNilpotentLieAlgebra(dim, weights, table, name=name)


def mohsen_standard_flag(
    original: GradedNilpotentLieAlgebra, modified: GradedNilpotentLieAlgebra
) -> JordanHolderFlag:
    """The flag (T, duals by increasing original weight, g by decreasing weight)
    on a Mohsen modification; along it the Vergne polarization of every flat
    covector is R + g*."""
    n = original.dim
    if modified.dim != 2 * n + 1:
        raise LieAlgebraError("modified algebra does not match the original")
    duals = sorted(range(n), key=lambda j: (original.weights[j], j))
    body = sorted(range(n), key=lambda j: (-original.weights[j], j))
    perm = (2 * n,) + tuple(duals) + tuple(n + j for j in body)
    return flag_from_permutation(modified, perm)


# -- Jordan-Hoelder flags -----------------------------------------------------


@dataclass(frozen=True)
class JordanHolderFlag:
    """A permutation flag: g_k = span of the first k permuted basis vectors.

    Every g_k is an ideal and g_{dim z} equals the center.
    """

    permutation: tuple[int, ...]
    center_dim: int

    def prefix_indices(self, k: int) -> tuple[int, ...]:
        return self.permutation[:k]


def _is_ideal_prefix(algebra, chosen: list[int]) -> bool:
    # coordinate span: membership is a support check plus bracket lookups
    support = set(chosen)
    for i in range(algebra.dim):
        for j in chosen:
            br = algebra.basis_bracket(i, j)
            if any(c and k not in support for k, c in enumerate(br)):
                return False
    return True


def _upper_central_levels(algebra: GradedNilpotentLieAlgebra) -> list[int]:
    """For each basis index, the first upper-central-series member containing it
    (a large sentinel when none does)."""
    n = algebra.dim
    levels = [n + 1] * n
    prev = Subspace.zero(n)
    level = 1
    while prev.dim < n:
        # z_level = preimage of center(g / prev): {v : [v, e_j] in prev for all j},
        # expressed as orthogonality of [v, e_j] against a complement of prev
        comp = la.nullspace(prev.basis, n) if prev.dim else la.identity(n)
        cond_rows = []
        for j in range(n):
            for comp_vec in comp:
                # coefficient of v -> <comp_vec, [v, e_j]> must vanish mod prev;
                # since comp is the orthogonal complement, project exactly
                cond_rows.append(
                    tuple(
                        la.dot(comp_vec, algebra.basis_bracket(i, j))
                        for i in range(n)
                    )
                )
        cur = Subspace(la.nullspace(cond_rows, n), n) if cond_rows else Subspace(
            la.identity(n), n
        )
        if cur.dim == prev.dim:
            raise LieAlgebraError("upper central series stalls; not nilpotent")
        for i in range(n):
            if levels[i] > n and cur.contains(algebra.basis_vector(i)):
                levels[i] = level
        prev = cur
        level += 1
    return levels


def jordan_holder_basis(algebra: GradedNilpotentLieAlgebra) -> JordanHolderFlag:
    """Greedy permutation flag with g_{dim z} = z.

    Candidates are ordered by (upper-central-series level, descending weight,
    index) and added when the extended prefix stays an ideal. Raises when the
    center is not spanned by basis vectors or no permutation flag exists.
    """
    n = algebra.dim
    z = center(algebra)
    central_idx = [i for i in range(n) if z.contains(algebra.basis_vector(i))]
    if len(central_idx) != z.dim:
        raise LieAlgebraError(
            "center is not spanned by basis vectors; no permutation flag"
        )
    levels = _upper_central_levels(algebra)
    order = sorted(range(n), key=lambda i: (levels[i], -algebra.weights[i], i))
    chosen: list[int] = []
    remaining = [i for i in order if i in central_idx] + [
        i for i in order if i not in central_idx
    ]
    while remaining:
        for pos, cand in enumerate(remaining):
            if len(chosen) < len(central_idx) and cand not in central_idx:
                continue
            if _is_ideal_prefix(algebra, chosen + [cand]):
                chosen.append(cand)
                remaining.pop(pos)
                break
        else:
            raise LieAlgebraError("no Jordan-Hoelder permutation flag found")
    return JordanHolderFlag(tuple(chosen), z.dim)


def flag_from_permutation(
    algebra: GradedNilpotentLieAlgebra, permutation
) -> JordanHolderFlag:
    """Validate a user-supplied permutation as a Jordan-Hoelder flag."""
    perm = tuple(int(p) for p in permutation)
    if sorted(perm) != list(range(algebra.dim)):
        raise LieAlgebraError("flag must be a permutation of basis indices")
    z = center(algebra)
    for k in range(1, algebra.dim + 1):
        if not _is_ideal_prefix(algebra, list(perm[:k])):
            raise LieAlgebraError(f"flag prefix of length {k} is not an ideal")
    zspan = Subspace.from_vectors(
        [algebra.basis_vector(i) for i in perm[: z.dim]], algebra.dim
    )
    if zspan != z:
        raise LieAlgebraError("flag does not start with the center")
    return JordanHolderFlag(perm, z.dim)
