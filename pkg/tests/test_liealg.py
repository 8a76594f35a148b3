from __future__ import annotations

from fractions import Fraction

import pytest

from conftest import int_vector, rational_vector
from nilcalc import corpus
from nilcalc import _linalg as la
from nilcalc.liealg import (
    GradedNilpotentLieAlgebra,
    LieAlgebraError,
    UnsupportedStepError,
    bch,
    center,
    descending_central_series,
    dilation_apply,
    is_automorphism,
    is_graded_automorphism,
    jordan_holder_basis,
    mohsen_modification,
    mohsen_standard_flag,
    step2_normal_form,
    step_length,
    validate,
)

F = Fraction


class TestValidate:
    def test_heisenberg_valid(self, h1):
        assert validate(h1) == []

    def test_bad_grading_reported(self):
        alg = GradedNilpotentLieAlgebra(3, (1, 1, 3), {(0, 1): {2: F(1)}})
        diags = validate(alg)
        assert len(diags) == 1 and diags[0].startswith("grading")

    def test_engel_valid(self, engel):
        assert validate(engel) == []

    def test_jacobi_violation_reported(self):
        # [e1,e2]=e4 and [e3,e4]=e5 leave the cyclic sum on (e1,e2,e3) at -e5
        alg = GradedNilpotentLieAlgebra(
            5,
            (1, 1, 1, 2, 3),
            {(0, 1): {3: F(1)}, (2, 3): {4: F(1)}},
        )
        assert any(d.startswith("jacobi") for d in validate(alg))

    def test_malformed_table_rejected(self):
        with pytest.raises(LieAlgebraError):
            GradedNilpotentLieAlgebra(3, (1, 1, 2), {(0, 5): {2: F(1)}})
        with pytest.raises(LieAlgebraError):
            GradedNilpotentLieAlgebra(3, (1, 1), {(0, 1): {2: F(1)}})


class TestStructure:
    def test_center_h1(self, h1):
        assert center(h1).basis == ((F(0), F(0), F(1)),)

    def test_center_type_2_3(self, noflat5):
        z = center(noflat5)
        assert z.dim == 2
        assert z.contains((0, 0, 0, 1, 0)) and z.contains((0, 0, 0, 0, 1))

    def test_center_engel(self, engel):
        assert center(engel).basis == ((F(1), F(0), F(0), F(0)),)

    def test_series_h1(self, h1):
        chain, step = descending_central_series(h1)
        assert [s.dim for s in chain] == [3, 1, 0] and step == 2

    def test_series_engel(self, engel):
        chain, step = descending_central_series(engel)
        assert len(chain) == 4 and step == 3

    def test_series_abelian(self):
        ab = GradedNilpotentLieAlgebra(3, (1, 1, 1), {})
        chain, step = descending_central_series(ab)
        assert [s.dim for s in chain] == [3, 0] and step == 1

    def test_center_is_adjoint_radical(self, engel, chain7):
        # rank-nullity cross-check on the stacked adjoint matrix
        for alg in (engel, chain7):
            rows = []
            for j in range(alg.dim):
                for k in range(alg.dim):
                    rows.append(
                        tuple(
                            alg.basis_bracket(i, j)[k] for i in range(alg.dim)
                        )
                    )
            assert center(alg).dim == alg.dim - la.rank(rows)


class TestDilation:
    def test_weight_scaling(self, h1):
        assert dilation_apply(h1, 2, (1, 0, 0)) == (F(2), F(0), F(0))
        assert dilation_apply(h1, 2, (0, 0, 1)) == (F(0), F(0), F(4))

    def test_nonpositive_rejected(self, h1):
        with pytest.raises(ValueError):
            dilation_apply(h1, 0, (1, 0, 0))
        with pytest.raises(ValueError):
            dilation_apply(h1, F(-1, 2), (1, 0, 0))

    def test_dilation_is_automorphism_on_engel(self, engel, pyrng):
        t = F(3, 2)
        for _ in range(100):
            u = rational_vector(pyrng, 4)
            v = rational_vector(pyrng, 4)
            lhs = dilation_apply(engel, t, engel.bracket(u, v))
            rhs = engel.bracket(
                dilation_apply(engel, t, u), dilation_apply(engel, t, v)
            )
            assert tuple(lhs) == tuple(rhs)

    def test_dilation_group_law(self, engel, pyrng):
        s, t = F(2, 3), F(5, 4)
        for _ in range(20):
            v = rational_vector(pyrng, 4)
            once = dilation_apply(engel, s * t, v)
            twice = dilation_apply(engel, s, dilation_apply(engel, t, v))
            assert tuple(once) == tuple(twice)


class TestBCH:
    def test_step2_closed_form(self, h1):
        assert bch(h1, (1, 0, 0), (0, 1, 0)) == (1, 1, F(1, 2))

    def test_group_inverse(self, engel, pyrng):
        for _ in range(10):
            v = rational_vector(pyrng, 4)
            res = bch(engel, v, tuple(-x for x in v))
            assert all(x == 0 for x in res)

    def test_engel_against_dynkin_oracle(self, engel):
        # hand expansion to order 3: Y4 + Y3 + [Y4,Y3]/2
        #   + ([Y4,[Y4,Y3]] + [Y3,[Y3,Y4]]) / 12
        y4 = (0, 0, 0, 1)
        y3 = (0, 0, 1, 0)
        br = engel.bracket
        first = br(y4, y3)
        cubic1 = br(y4, br(y4, y3))
        cubic2 = br(y3, br(y3, y4))
        expected = tuple(
            a + b + F(c, 2) + F(d + e, 12)
            for a, b, c, d, e in zip(y4, y3, first, cubic1, cubic2)
        )
        assert bch(engel, y4, y3) == expected

    def test_associativity(self, engel, pyrng):
        for _ in range(50):
            a = int_vector(pyrng, 4)
            b = int_vector(pyrng, 4)
            c = int_vector(pyrng, 4)
            left = bch(engel, bch(engel, a, b), c)
            right = bch(engel, a, bch(engel, b, c))
            assert left == right

    def test_step_cap(self):
        alg = GradedNilpotentLieAlgebra(2, (1, 1), {})
        with pytest.raises(UnsupportedStepError):
            bch(alg, (1, 0), (0, 1), step=7)


class TestStep2NormalForm:
    def test_h1_standard_symplectic(self, h1):
        nf = step2_normal_form(h1)
        assert nf.forms == (((F(0), F(1)), (F(-1), F(0))),)

    def test_chain_tridiagonal(self, chain7):
        nf = step2_normal_form(chain7)
        assert len(nf.forms) == 3
        for form in nf.forms:
            for a in range(4):
                for b in range(4):
                    if abs(a - b) > 1:
                        assert form[a][b] == 0

    def test_free_step2_full_so3(self):
        free3 = corpus.free_step2(3)
        nf = step2_normal_form(free3)
        assert len(nf.forms) == 3
        flat = [tuple(x for row in f for x in row) for f in nf.forms]
        assert la.rank(flat) == 3  # spans so(3)

    def test_round_trip(self, chain7):
        nf = step2_normal_form(chain7)
        # rebuild [v_a, v_b] = sum_l forms[l][a][b] * c_l and compare
        for a, va in enumerate(nf.complement):
            for b, vb in enumerate(nf.complement):
                expected = [F(0)] * chain7.dim
                for l, cl in enumerate(nf.commutator_basis):
                    coeff = nf.forms[l][a][b]
                    if coeff:
                        expected = [e + coeff * x for e, x in zip(expected, cl)]
                assert tuple(expected) == tuple(chain7.bracket(va, vb))

    def test_step3_rejected(self, engel):
        with pytest.raises(UnsupportedStepError):
            step2_normal_form(engel)


class TestAutomorphisms:
    def test_identity(self, h1):
        assert is_graded_automorphism(h1, la.identity(3))

    def test_weighted_scaling_true(self, h1):
        assert is_graded_automorphism(h1, [[2, 0, 0], [0, 1, 0], [0, 0, 2]])

    def test_bad_center_scaling_false(self, h1):
        assert not is_graded_automorphism(h1, [[1, 0, 0], [0, 1, 0], [0, 0, 2]])

    def test_singular_is_not_automorphism(self, h1):
        assert not is_automorphism(h1, [[0, 0, 0], [0, 1, 0], [0, 0, 1]])

    def test_weight_mixing_fails_graded(self, h1):
        # swaps a weight-1 and the weight-2 direction
        m = [[0, 0, 1], [0, 1, 0], [1, 0, 0]]
        assert not is_graded_automorphism(h1, m)


class TestMohsen:
    def test_line_gives_heisenberg(self):
        line = GradedNilpotentLieAlgebra(1, (1,), {})
        mod = mohsen_modification(line)
        assert mod.dim == 3 and mod.weights == (1, 1, 2)
        assert mod.bracket((1, 0, 0), (0, 1, 0)) == (0, 0, 1)
        assert validate(mod) == []

    def test_h1_gives_7dim_step3(self, h1):
        mod = mohsen_modification(h1)
        assert mod.dim == 7
        assert validate(mod) == []
        assert step_length(mod) == 3
        assert center(mod).dim == 1

    def test_step_grows_by_one(self, engel, chain7):
        for alg in (engel, chain7):
            mod = mohsen_modification(alg)
            assert validate(mod) == []
            assert step_length(mod) == step_length(alg) + 1
            assert center(mod).dim == 1

    def test_standard_flag_validates(self, engel):
        mod = mohsen_modification(engel)
        flag = mohsen_standard_flag(engel, mod)
        assert flag.center_dim == 1
        assert flag.permutation[0] == mod.dim - 1


class TestJordanHolder:
    def test_prefixes_are_ideals(self, chain7):
        flag = jordan_holder_basis(chain7)
        span = []
        for idx in flag.permutation:
            span.append(chain7.basis_vector(idx))
            sub = la.rref(span)[0]
            for i in range(chain7.dim):
                for v in span:
                    assert la.in_span(sub, chain7.bracket(chain7.basis_vector(i), v))

    def test_center_comes_first(self, chain7):
        flag = jordan_holder_basis(chain7)
        z = center(chain7)
        first = [chain7.basis_vector(i) for i in flag.prefix_indices(z.dim)]
        assert la.rref(first)[0] == z.basis

    def test_non_coordinate_center_rejected(self):
        # [X, Y1] = [X, Y2] = Z makes Y1 - Y2 central, so the center is not
        # spanned by basis vectors and no permutation flag exists
        alg = GradedNilpotentLieAlgebra(
            4, (1, 1, 1, 2), {(0, 1): {3: F(1)}, (0, 2): {3: F(1)}}
        )
        assert center(alg).dim == 2
        with pytest.raises(LieAlgebraError):
            jordan_holder_basis(alg)
