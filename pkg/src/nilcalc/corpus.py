"""Bundled algebra families with the standard bracket tables and gradings."""

from __future__ import annotations

from fractions import Fraction

from .liealg import GradedNilpotentLieAlgebra, mohsen_modification

F1 = Fraction(1)


def heisenberg(n: int) -> GradedNilpotentLieAlgebra:
    """h_n on basis (Z, X_1..X_n, Y_1..Y_n) with [X_i, Y_i] = Z."""
    if n < 1:
        raise ValueError("heisenberg needs n >= 1")
    dim = 2 * n + 1
    weights = (2,) + (1,) * (2 * n)
    brackets = {(1 + i, 1 + n + i): {0: F1} for i in range(n)}
    return GradedNilpotentLieAlgebra(dim, weights, brackets, name=f"heisenberg-{n}")


def complex_heisenberg(n: int) -> GradedNilpotentLieAlgebra:
    """h_n (x) C on (Z_1, Z_2, U_1..U_2n, V_1..V_2n): the two bracket forms are
    blockdiag(w, -w) and offdiag(w, w) for the standard symplectic w."""
    if n < 1:
        raise ValueError("complex-heisenberg needs n >= 1")
    q = 2 * n
    dim = 2 + 2 * q
    weights = (2, 2) + (1,) * (2 * q)

    def omega(i, j):  # standard symplectic on R^{2n}: pairs (i, n+i)
        if j == i + n:
            return F1
        if i == j + n:
            return -F1
        return Fraction(0)

    brackets: dict = {}

    def put(a, b, k, c):
        if c:
            brackets.setdefault((a, b), {})[k] = c

    for i in range(q):
        for j in range(q):
            if i < j:
                # omega^1 = diag(w, -w) pairing U with U, V with V
                put(2 + i, 2 + j, 0, omega(i, j))
                put(2 + q + i, 2 + q + j, 0, -omega(i, j))
            # omega^2 = offdiag(w, w): U_i with V_j
            c = omega(i, j)
            if c:
                put(2 + i, 2 + q + j, 1, c)
    return GradedNilpotentLieAlgebra(
        dim, weights, brackets, name=f"complex-heisenberg-{n}"
    )


def heisenberg_product(ns) -> GradedNilpotentLieAlgebra:
    """Direct product of Heisenberg algebras, centers first."""
    ns = tuple(int(v) for v in ns)
    if not ns or any(v < 1 for v in ns):
        raise ValueError("heisenberg-product needs positive factors")
    k = len(ns)
    dim = k + 2 * sum(ns)
    weights = (2,) * k + (1,) * (2 * sum(ns))
    brackets = {}
    offset = k
    for fac, n in enumerate(ns):
        for i in range(n):
            brackets[(offset + i, offset + n + i)] = {fac: F1}
        offset += 2 * n
    label = "x".join(str(v) for v in ns)
    return GradedNilpotentLieAlgebra(
        dim, weights, brackets, name=f"heisenberg-product-{label}"
    )


def quotient_chain(n: int) -> GradedNilpotentLieAlgebra:
    """(2n-1)-dim step-2 chain: [X_i, X_{i+1}] = Y_i, basis (X_1..X_n, Y_1..Y_{n-1})."""
    if n < 2:
        raise ValueError("quotient-chain needs n >= 2")
    dim = 2 * n - 1
    weights = (1,) * n + (2,) * (n - 1)
    brackets = {(i, i + 1): {n + i: F1} for i in range(n - 1)}
    return GradedNilpotentLieAlgebra(dim, weights, brackets, name=f"quotient-chain-{n}")


def free_step2(q: int) -> GradedNilpotentLieAlgebra:
    """Free step-2 algebra on R^q: [e_i, e_j] = E_ij, all so(q) as the center."""
    if q < 2:
        raise ValueError("free-step2 needs q >= 2")
    pairs = [(i, j) for i in range(q) for j in range(i + 1, q)]
    dim = q + len(pairs)
    weights = (1,) * q + (2,) * len(pairs)
    brackets = {(i, j): {q + idx: F1} for idx, (i, j) in enumerate(pairs)}
    return GradedNilpotentLieAlgebra(dim, weights, brackets, name=f"free-step2-{q}")


def engel() -> GradedNilpotentLieAlgebra:
    """4-dim step-3 algebra: [Y_2, Y_4] = Y_1, [Y_3, Y_4] = Y_2; weights 3,2,1,1."""
    return GradedNilpotentLieAlgebra(
        4, (3, 2, 1, 1), {(1, 3): {0: F1}, (2, 3): {1: F1}}, name="engel"
    )


def upper_triangular(n: int) -> GradedNilpotentLieAlgebra:
    """Strictly upper triangular (n+1) x (n+1) matrices; E_ij has weight j - i."""
    if n < 2:
        raise ValueError("upper-triangular needs n >= 2")
    positions = [(i, j) for i in range(n + 1) for j in range(i + 1, n + 1)]
    index = {p: t for t, p in enumerate(positions)}
    dim = len(positions)
    weights = tuple(j - i for i, j in positions)
    brackets: dict = {}
    for a, (i, j) in enumerate(positions):
        for b, (k, l) in enumerate(positions):
            if a >= b:
                continue
            row: dict = {}
            if j == k:
                row[index[(i, l)]] = row.get(index[(i, l)], Fraction(0)) + F1
            if l == i:
                row[index[(k, j)]] = row.get(index[(k, j)], Fraction(0)) - F1
            row = {k2: v for k2, v in row.items() if v}
            if row:
                brackets[(a, b)] = row
    return GradedNilpotentLieAlgebra(
        dim, weights, brackets, name=f"upper-triangular-{n}"
    )


FAMILIES = {
    "heisenberg": (heisenberg, "n >= 1"),
    "complex-heisenberg": (complex_heisenberg, "n >= 1"),
    "heisenberg-product": (heisenberg_product, "comma-separated n_1,..,n_k"),
    "quotient-chain": (quotient_chain, "n >= 2"),
    "free-step2": (free_step2, "q >= 2"),
    "engel": (engel, "no parameter"),
    "upper-triangular": (upper_triangular, "n >= 2"),
}


def generate(family: str, parameter=None) -> GradedNilpotentLieAlgebra:
    """Instantiate a bundled family; `mohsen-of` is handled by the CLI."""
    if family not in FAMILIES:
        raise KeyError(f"unknown family {family!r}")
    func, _ = FAMILIES[family]
    if family == "engel":
        return func()
    if family == "heisenberg-product":
        if parameter is None:
            raise ValueError("heisenberg-product needs parameters n_1,..,n_k")
        if isinstance(parameter, str):
            parameter = [int(p) for p in parameter.split(",")]
        return func(parameter)
    if parameter is None:
        raise ValueError(f"family {family!r} needs a parameter")
    return func(int(parameter))


def mohsen_of(algebra: GradedNilpotentLieAlgebra) -> GradedNilpotentLieAlgebra:
    return mohsen_modification(algebra)
