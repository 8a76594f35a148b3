"""Exact linear algebra over the rationals.

Vectors are tuples of Fraction, matrices are tuples of row tuples. Everything
here is small and dense; the point is exactness, not speed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def vec(entries: Iterable) -> Vec:
    return tuple(Fraction(e) for e in entries)


def zero_vec(n: int) -> Vec:
    return (ZERO,) * n


def unit_vec(n: int, i: int) -> Vec:
    return tuple(ONE if j == i else ZERO for j in range(n))


def add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v: Vec) -> Vec:
    c = Fraction(c)
    return tuple(c * a for a in v)


def dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), ZERO)


def mat(rows: Iterable[Iterable]) -> Mat:
    return tuple(vec(r) for r in rows)


def identity(n: int) -> Mat:
    return tuple(unit_vec(n, i) for i in range(n))


def transpose(m: Mat) -> Mat:
    return tuple(zip(*m)) if m else ()


def mat_vec(m: Mat, v: Vec) -> Vec:
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def rref(rows: Sequence[Vec]) -> tuple[Mat, list[int]]:
    """Reduced row-echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return (), []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return tuple(tuple(row) for row in m[:r]), pivots


def rank(rows: Sequence[Vec]) -> int:
    return len(rref(rows)[0])


def nullspace(rows: Sequence[Vec], ncols: int) -> Mat:
    """Basis (RREF rows) of {v : M v = 0} for M given by rows."""
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = ONE
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][fc]
        basis.append(tuple(v))
    return rref(basis)[0]


def reduce_mod_rref(rows: Mat, pivots: Sequence[int], v: Vec) -> Vec:
    """Residual of v after elimination against RREF rows (exact)."""
    out = list(v)
    for row, pc in zip(rows, pivots):
        c = out[pc]
        if c:
            for k in range(len(out)):
                if row[k]:
                    out[k] -= c * row[k]
    return tuple(out)


def in_span(rows: Mat, v: Vec) -> bool:
    base, pivots = rref(rows)
    return not any(reduce_mod_rref(base, pivots, v))


def span_union(*row_groups: Sequence[Vec]) -> Mat:
    allrows: list[Vec] = []
    for g in row_groups:
        allrows.extend(g)
    return rref(allrows)[0]


def solve(columns: Sequence[Vec], target: Vec) -> Vec | None:
    """Coefficients x with sum x_j * columns[j] = target, or None."""
    n = len(target)
    k = len(columns)
    aug = [[columns[j][i] for j in range(k)] + [target[i]] for i in range(n)]
    red, pivots = rref(tuple(tuple(r) for r in aug))
    if k in pivots:
        return None
    x = [ZERO] * k
    for i, pc in enumerate(pivots):
        x[pc] = red[i][k]
    # pivoted solve is exact but may be underdetermined; verify
    check = [sum((x[j] * columns[j][i] for j in range(k)), ZERO) for i in range(n)]
    if tuple(check) != tuple(target):
        return None
    return tuple(x)


def det(m: Mat) -> Fraction:
    """Determinant by fraction-free-ish Gaussian elimination (exact)."""
    n = len(m)
    a = [list(r) for r in m]
    result = ONE
    for c in range(n):
        pr = next((i for i in range(c, n) if a[i][c] != 0), None)
        if pr is None:
            return ZERO
        if pr != c:
            a[c], a[pr] = a[pr], a[c]
            result = -result
        pv = a[c][c]
        result *= pv
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / pv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return result


def symmetric_signature(m: Mat) -> int:
    """Signature of an exact symmetric matrix via congruence diagonalization.

    Repeatedly clears a row/column with a nonzero diagonal pivot; when the
    diagonal vanishes but an off-diagonal entry m[i][j] survives, the standard
    hyperbolic-pair move contributes (+1, -1) and removes both indices.
    """
    n = len(m)
    a = [[m[i][j] for j in range(n)] for i in range(n)]
    alive = list(range(n))
    pos = neg = 0
    while alive:
        pivot = next((i for i in alive if a[i][i] != 0), None)
        if pivot is None:
            pair = None
            for i in alive:
                for j in alive:
                    if i < j and a[i][j] != 0:
                        pair = (i, j)
                        break
                if pair:
                    break
            if pair is None:
                break  # remaining block is zero
            i, j = pair
            # congruence by (e_i -> e_i + e_j) makes the diagonal nonzero
            for k in range(n):
                a[i][k] = a[i][k] + a[j][k]
            for k in range(n):
                a[k][i] = a[k][i] + a[k][j]
            continue
        p = a[pivot][pivot]
        if p > 0:
            pos += 1
        else:
            neg += 1
        alive.remove(pivot)
        for i in alive:
            if a[i][pivot] != 0:
                f = a[i][pivot] / p
                for k in range(n):
                    a[i][k] = a[i][k] - f * a[pivot][k]
                for k in range(n):
                    a[k][i] = a[k][i] - f * a[k][pivot]
    return pos - neg


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_fraction(s) -> Fraction:
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s.strip())
    raise TypeError(f"cannot interpret {s!r} as an exact rational")
