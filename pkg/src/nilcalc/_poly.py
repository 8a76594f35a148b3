"""Sparse multivariate polynomials over the rationals.

Terms are stored as {exponent tuple: Fraction}. Used for Pfaffians of matrices
of linear forms and for the symbolic side of flat representations.
"""

from __future__ import annotations

from fractions import Fraction

from ._linalg import ZERO, format_fraction


class Poly:
    """Polynomial in `nvars` variables with Fraction coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                c = Fraction(coeff)
                if c != 0:
                    self.terms[tuple(mono)] = c

    @classmethod
    def constant(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: Fraction(c)})

    @classmethod
    def variable(cls, nvars: int, i: int, c=1) -> "Poly":
        mono = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, {mono: Fraction(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, ZERO) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return Poly(self.nvars, out)

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = Fraction(other)
            return Poly(self.nvars, {m: c * v for m, v in self.terms.items()})
        out: dict[tuple[int, ...], Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, ZERO) + c1 * c2
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        return self * Fraction(c)

    def evaluate(self, point) -> Fraction:
        vals = [Fraction(p) for p in point]
        total = ZERO
        for m, c in self.terms.items():
            v = c
            for e, x in zip(m, vals):
                if e:
                    v *= x**e
            total += v
        return total

    def partial(self, i: int) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            if m[i] > 0:
                m2 = tuple(e - 1 if j == i else e for j, e in enumerate(m))
                out[m2] = out.get(m2, ZERO) + c * m[i]
        return Poly(self.nvars, out)

    def is_homogeneous(self, weights=None) -> bool:
        if not self.terms:
            return True
        w = weights or [1] * self.nvars
        degs = {sum(e * wi for e, wi in zip(m, w)) for m in self.terms}
        return len(degs) == 1

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=lambda m: (sum(m), m), reverse=True):
            c = self.terms[mono]
            factors = [
                f"x{i+1}" if e == 1 else f"x{i+1}^{e}"
                for i, e in enumerate(mono)
                if e
            ]
            body = "*".join(factors)
            cs = format_fraction(c)
            if body:
                if cs == "1":
                    parts.append(body)
                elif cs == "-1":
                    parts.append(f"-{body}")
                else:
                    parts.append(f"{cs}*{body}")
            else:
                parts.append(cs)
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    __repr__ = __str__


def pfaffian(entries: list[list[Poly]]) -> Poly:
    """Pfaffian of an even-dimensional antisymmetric matrix of polynomials.

    Recursive first-row expansion with memoization on the surviving index set:
    Pf(M) = sum_j (-1)^j M[i0][ij] Pf(M without i0, ij).
    """
    n = len(entries)
    if n == 0:
        raise ValueError("empty matrix")
    nvars = entries[0][0].nvars
    if n % 2 == 1:
        raise ValueError("Pfaffian needs even dimension")
    cache: dict[tuple[int, ...], Poly] = {}

    def rec(idx: tuple[int, ...]) -> Poly:
        if not idx:
            return Poly.constant(nvars, 1)
        got = cache.get(idx)
        if got is not None:
            return got
        i0 = idx[0]
        acc = Poly(nvars)
        for pos in range(1, len(idx)):
            e = entries[i0][idx[pos]]
            if e.is_zero():
                continue
            rest = idx[1:pos] + idx[pos + 1 :]
            term = e * rec(rest)
            acc = acc + term if pos % 2 == 1 else acc - term
        cache[idx] = acc
        return acc

    return rec(tuple(range(n)))
