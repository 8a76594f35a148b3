"""Acceptance suite: one test per shipping criterion, each at its stated
tolerance. A one-line PASS/FAIL verdict per criterion is printed by the
reporting hook in conftest.
"""

from __future__ import annotations

import json
import time
from fractions import Fraction

import numpy as np

from nilcalc import cli, corpus
from nilcalc._poly import Poly
from nilcalc.coadjoint import (
    Covector,
    central_cocycle,
    complement_projection,
    has_flat_orbits,
    is_flat,
    pfaffian_on_center_dual,
    quotient_product,
    vergne_polarization,
)
from nilcalc.hellip import (
    ELLIPTIC,
    NOT_ELLIPTIC,
    BvEOperatorSpec,
    RocklandCheckConfig,
    bve_symbol,
    check_bve_sphere,
    check_engel_gamma,
    rockland_bruteforce,
)
from nilcalc.lagrangian import (
    Lagrangian,
    SymplecticSpace,
    lion_cocycle_check,
    random_lagrangian,
)
from nilcalc.liealg import (
    bch,
    center,
    jordan_holder_basis,
    mohsen_modification,
    mohsen_standard_flag,
    step_length,
)
from nilcalc.symbolrep import (
    PBWSymbol,
    dirac_square_symbol,
    flat_rep,
    fock_layer_operator,
    harmonic_oscillator,
    represent_symbol,
)

F = Fraction

BASE_MEMBERS = [
    ("heisenberg-1", corpus.heisenberg, 1),
    ("heisenberg-2", corpus.heisenberg, 2),
    ("heisenberg-3", corpus.heisenberg, 3),
    ("complex-heisenberg-1", corpus.complex_heisenberg, 1),
    ("complex-heisenberg-2", corpus.complex_heisenberg, 2),
    ("heisenberg-product-1x2", corpus.heisenberg_product, (1, 2)),
    ("quotient-chain-3", corpus.quotient_chain, 3),
    ("quotient-chain-4", corpus.quotient_chain, 4),
    ("free-step2-2", corpus.free_step2, 2),
    ("free-step2-3", corpus.free_step2, 3),
    ("engel", corpus.engel, None),
    ("upper-triangular-2", corpus.upper_triangular, 2),
    ("upper-triangular-3", corpus.upper_triangular, 3),
]


def build_member(maker, param):
    if param is None:
        return maker()
    return maker(param)


MOHSEN_MEMBERS = [
    ("heisenberg-1", corpus.heisenberg, 1),
    ("engel", corpus.engel, None),
    ("quotient-chain-3", corpus.quotient_chain, 3),
]


def all_corpus_members():
    """The bundled corpus: the thirteen base families plus the three shipped
    Mohsen modifications (matching the regression expectation table)."""
    members = []
    for name, maker, param in BASE_MEMBERS:
        alg = build_member(maker, param)
        flag = jordan_holder_basis(alg)
        members.append((name, alg, flag))
    for name, maker, param in MOHSEN_MEMBERS:
        base = build_member(maker, param)
        mod = mohsen_modification(base)
        members.append((f"mohsen-of-{name}", mod, mohsen_standard_flag(base, mod)))
    return members


def flat_corpus_members():
    return [
        (name, alg, flag)
        for name, alg, flag in all_corpus_members()
        if has_flat_orbits(alg, flag)[0]
    ]


def sample_flat_covectors(alg, flag, count, seed):
    pf = pfaffian_on_center_dual(alg, flag)
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        pt = tuple(
            F(int(rng.integers(-6, 7)), int(rng.integers(1, 4)))
            for _ in range(flag.center_dim)
        )
        if pf(pt) != 0:
            out.append(Covector.from_center_dual(alg, flag, pt))
    return out


class TestCriterion1FlatOrbitCorpus:
    """Exact flat-orbit verdicts across the corpus; zero tolerance."""

    def test_heisenberg_flat_iff_nonzero(self):
        for n in (1, 2, 3):
            alg = corpus.heisenberg(n)
            flag = jordan_holder_basis(alg)
            start = time.time()
            assert has_flat_orbits(alg, flag)[0]
            for v in (F(1), F(-2), F(7, 3)):
                assert is_flat(alg, Covector.from_center_dual(alg, flag, (v,)))
            assert not is_flat(alg, Covector.from_center_dual(alg, flag, (F(0),)))
            assert time.time() - start < 1.0

    def test_complex_heisenberg_pfaffian_identity(self):
        for n in (1, 2):
            alg = corpus.complex_heisenberg(n)
            flag = jordan_holder_basis(alg)
            start = time.time()
            pf = pfaffian_on_center_dual(alg, flag).poly
            base = Poly(2, {(2, 0): F(1), (0, 2): F(1)})
            expected = Poly.constant(2, 1)
            for _ in range(n):  # exponent dim(V)/2 = n
                expected = expected * base
            assert pf == expected or pf == -expected
            assert time.time() - start < 1.0

    def test_chain4_pfaffian_square(self):
        alg = corpus.quotient_chain(4)
        flag = jordan_holder_basis(alg)
        pf = pfaffian_on_center_dual(alg, flag).poly
        assert pf * pf == Poly(3, {(2, 0, 2): F(1)})  # xi_1^2 xi_3^2

    def test_no_flat_members(self):
        for alg in (
            corpus.quotient_chain(3),
            corpus.engel(),
            corpus.upper_triangular(3),
            corpus.free_step2(3),
        ):
            start = time.time()
            assert has_flat_orbits(alg)[0] is False
            assert time.time() - start < 1.0

    def test_mohsen_of_every_member(self):
        for name, maker, param in BASE_MEMBERS:
            base = build_member(maker, param)
            mod = mohsen_modification(base)
            flag = mohsen_standard_flag(base, mod)
            start = time.time()
            assert center(mod).dim == 1
            assert has_flat_orbits(mod, flag)[0]
            assert time.time() - start < 1.0, name


class TestCriterion2VergneSuite:
    def test_vergne_on_flat_samples(self):
        start = time.time()
        for idx, (name, alg, flag) in enumerate(flat_corpus_members()):
            for xi in sample_flat_covectors(alg, flag, 100, seed=idx + 1):
                # constructor verifies subalgebra, isotropy and codimension
                h = vergne_polarization(alg, flag, xi)
                assert 2 * (alg.dim - h.dim) == alg.dim - flag.center_dim
        assert time.time() - start < 10.0


class TestCriterion3MaslovEta:
    def test_reference_triple_exact(self):
        sp = SymplecticSpace.standard(1)
        chk = lion_cocycle_check(
            sp,
            Lagrangian.from_vectors([(1, 0)]),
            Lagrangian.from_vectors([(0, 1)]),
            Lagrangian.from_vectors([(1, 1)]),
        )
        assert chk.maslov == -1

    def test_cocycle_identity_random_triples(self):
        start = time.time()
        rng = np.random.default_rng(3)
        total = 0
        for d, quota in ((1, 67), (2, 67), (3, 66)):
            sp = SymplecticSpace.standard(d)
            done = 0
            while done < quota:
                Ls = [random_lagrangian(sp, rng) for _ in range(3)]
                chk = lion_cocycle_check(sp, *Ls)
                if chk.near_degenerate:
                    continue
                assert isinstance(chk.maslov, int)
                assert chk.residual < 1e-6
                done += 1
            total += done
        assert total == 200
        assert time.time() - start < 30.0


class TestCriterion4OscillatorSpectrum:
    def test_h1_lowest_six(self):
        start = time.time()
        alg = corpus.heisenberg(1)
        flag = jordan_holder_basis(alg)
        xi = Covector.from_center_dual(alg, flag, (F(1),))
        rep = flat_rep(alg, flag, xi)
        op = represent_symbol(rep, PBWSymbol.sub_laplacian(alg), 20)
        eigs = np.sort(op.hermitian_part_eigenvalues())[:6]
        assert np.max(np.abs(eigs - np.array([1, 3, 5, 7, 9, 11]))) < 1e-6
        assert time.time() - start < 5.0


class TestCriterion5FockCalibration:
    def test_layers_match_oscillator_clusters(self):
        start = time.time()
        rng = np.random.default_rng(11)
        for _ in range(20):
            # random nondegenerate form: a random pairing of the four
            # coordinates with random exact scales and signs (Darboux-type
            # blocks, so the Hermite truncation of the oracle converges)
            perm = list(rng.permutation(4))
            omega = [[F(0)] * 4 for _ in range(4)]
            for a, b in ((perm[0], perm[1]), (perm[2], perm[3])):
                mu = F(int(rng.integers(2, 9)), 4)
                if rng.integers(0, 2):
                    mu = -mu
                omega[a][b] += mu
                omega[b][a] -= mu
            omega = tuple(tuple(r) for r in omega)
            brackets = {}
            for a in range(4):
                for b in range(a + 1, 4):
                    if omega[a][b]:
                        brackets[(1 + a, 1 + b)] = {0: omega[a][b]}
            alg = corpus.GradedNilpotentLieAlgebra(5, (2, 1, 1, 1, 1), brackets)
            flag = jordan_holder_basis(alg)
            xi = Covector.from_center_dual(alg, flag, (F(1),))
            rep = flat_rep(alg, flag, xi)
            osc = np.sort(
                harmonic_oscillator(rep, 32).hermitian_part_eigenvalues()
            )
            for k in range(5):
                layer = np.linalg.eigvalsh(fock_layer_operator(omega, None, k))
                for val in layer:
                    assert np.min(np.abs(osc - val)) < 1e-5
        assert time.time() - start < 60.0


class TestCriterion6OracleAgreement:
    def test_scalar_family(self):
        start = time.time()
        alg = corpus.heisenberg(1)
        flag = jordan_holder_basis(alg)
        config = RocklandCheckConfig(truncation=24)
        singular_set = {1.0, -1.0, 3.0, -3.0, 7.0, -7.0}
        for c in (0.0, 0.5, -0.5, 1.0, -1.0, 2.5, -2.5, 3.0, -3.0, 7.0, -7.0):
            spec = BvEOperatorSpec(alg, ([[complex(c)]],), flag)
            closed = check_bve_sphere(spec, config)
            expect_singular = c in singular_set
            assert (closed.verdict == NOT_ELLIPTIC) == expect_singular
            symbol = bve_symbol(spec)
            brute_singular = False
            for z in (F(1), F(-1)):
                rep = flat_rep(
                    alg, flag, Covector.from_center_dual(alg, flag, (z,))
                )
                res = rockland_bruteforce(rep, symbol, config)
                cls = res.classify(stable_tol=1e-3, decay_tol=1e-6)
                assert cls in ("stable", "singular")
                brute_singular = brute_singular or cls == "singular"
            assert brute_singular == expect_singular
        assert time.time() - start < 120.0


class TestCriterion7DiracFailure:
    def test_ground_state_witness_in_plus_block(self):
        start = time.time()
        alg = corpus.heisenberg(1)
        flag = jordan_holder_basis(alg)
        xi = Covector.from_center_dual(alg, flag, (F(1),))
        rep = flat_rep(alg, flag, xi)
        res = rockland_bruteforce(
            rep, dirac_square_symbol(alg), RocklandCheckConfig(truncation=16)
        )
        assert res.classify() == "singular"
        assert res.witness_fiber == 0  # the +i Z block
        assert res.witness_hermite == (0,)  # ground state
        assert time.time() - start < 5.0


class TestCriterion8EngelCriterion:
    def test_branch_logic(self):
        start = time.time()
        assert check_engel_gamma(np.diag([1j, 1j])).value is True
        assert check_engel_gamma([[0.0]]).value is False
        assert check_engel_gamma([[1.0]]).value is False
        assert time.time() - start < 1.0


class TestCriterion9BchCocycleExactness:
    def test_exact_identities_per_member(self):
        start = time.time()
        rng = np.random.default_rng(5)
        for name, alg, flag in all_corpus_members():
            step = step_length(alg)
            n = alg.dim

            def zpart(v):
                return tuple(v[i] for i in flag.prefix_indices(flag.center_dim))

            for _ in range(500):
                a, b, c = (
                    tuple(int(x) for x in rng.integers(-3, 4, size=n))
                    for _ in range(3)
                )
                # bch associativity, exact
                left = bch(alg, bch(alg, a, b, step), c, step)
                right = bch(alg, a, bch(alg, b, c, step), step)
                assert left == right
                # group 2-cocycle identity for the flag splitting, exact;
                # the cocycle is the z-part and the quotient product the
                # complement part of one shared bch evaluation
                x = complement_projection(alg, flag, a)
                y = complement_projection(alg, flag, b)
                z = complement_projection(alg, flag, c)
                pxy = bch(alg, x, y, step)
                pyz = bch(alg, y, z, step)
                lhs_tail = bch(
                    alg, complement_projection(alg, flag, pxy), z, step
                )
                rhs_tail = bch(
                    alg, x, complement_projection(alg, flag, pyz), step
                )
                lhs = tuple(p + q for p, q in zip(zpart(pxy), zpart(lhs_tail)))
                rhs = tuple(p + q for p, q in zip(zpart(rhs_tail), zpart(pyz)))
                assert lhs == rhs
        assert time.time() - start < 30.0


class TestCriterion10DeterminismRegression:
    def test_corpus_regression_and_byte_identical_reruns(self, tmp_path):
        start = time.time()
        first = tmp_path / "first.json"
        second = tmp_path / "second.json"
        assert cli.main(["corpus-regression", "--json", str(first)]) == 0
        assert cli.main(["corpus-regression", "--json", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
        payload = json.loads(first.read_text())
        assert payload["results"]["failed"] == 0
        assert time.time() - start < 300.0
