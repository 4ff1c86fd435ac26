import numpy as np
import pytest

from nhomog.calculus import eval_star_polynomial
from nhomog.errors import (
    HypothesisViolated,
    NotHermitian,
    PreconditionFailed,
    SamePoint,
    SpectraNotDisjoint,
)
from nhomog.instances import (
    commuting_dominated_family,
    equivariant_target,
    ginibre,
    grouped_function_algebra,
    ordered_psd_pair,
)
from nhomog.matrix_core import DEFAULT_TOL, Ordering, adj, opnorm, psd_order
from nhomog.star_algebra import MatTuple
from nhomog.sw_engine import (
    closure_star_subalgebra,
    constructive_approximate,
    delta2_subspace,
    density_check,
    lattice_join_chain,
    loewner_heinz_check,
    max_spec_classes,
    power_mean_envelope,
    power_mean_exponent,
    spectrally_separates,
    two_point_flatten,
    unit_in_closure,
)

from conftest import SX, SZ, assert_close, rng


def fn(*mats):
    return np.stack([np.asarray(m, dtype=complex) for m in mats])


def all_functions_algebra(points, n):
    gens = []
    for p in range(points):
        for j in range(n):
            for k in range(n):
                e = np.zeros((points, n, n), dtype=complex)
                e[p, j, k] = 1.0
                gens.append(e)
    return closure_star_subalgebra(gens, points=points, n=n)


def matched_pair_algebra(n=2):
    """X = {x, y} with E = {f : f(x) = f(y)}: the diagonal algebra."""
    gens = [fn(SX, SX), fn(SZ, SZ), fn(np.eye(2), np.eye(2))]
    return closure_star_subalgebra(gens)


class TestClosure:
    def test_single_point_pauli_pair(self):
        alg = closure_star_subalgebra([fn(SX), fn(SZ)])
        assert alg.basis.dim == 4

    def test_identity_alone(self):
        alg = closure_star_subalgebra([fn(np.eye(2), np.eye(2))])
        assert alg.basis.dim == 1

    def test_empty_generators(self):
        alg = closure_star_subalgebra([], points=2, n=2)
        assert alg.basis.dim == 0

    def test_products_stay_in_span(self):
        alg = matched_pair_algebra()
        from nhomog.sw_engine import fn_product

        for a in alg.basis.elements():
            for b in alg.basis.elements():
                assert alg.basis.residual(fn_product(a, b)) <= 1e-8


class TestSpectrallySeparates:
    def test_indicator_pair(self):
        gens = [fn(np.zeros((2, 2)), np.eye(2))]
        alg = closure_star_subalgebra(gens)
        verdict = spectrally_separates(alg, 0, 1)
        assert verdict.certified
        w = verdict.witness
        assert opnorm(w[0] @ adj(w[0]) - adj(w[0]) @ w[0]) <= 1e-10

    def test_constant_identity_not_found(self):
        alg = closure_star_subalgebra([fn(np.eye(2), np.eye(2))])
        assert not spectrally_separates(alg, 0, 1).certified

    def test_zero_algebra_not_found(self):
        alg = closure_star_subalgebra([], points=2, n=2)
        assert not spectrally_separates(alg, 0, 1).certified

    def test_same_point_rejected(self):
        alg = matched_pair_algebra()
        with pytest.raises(SamePoint):
            spectrally_separates(alg, 1, 1)


class TestDelta2:
    def test_all_functions(self):
        alg = all_functions_algebra(2, 2)
        assert delta2_subspace(alg).dim == alg.ambient_dim

    def test_matched_pair_is_its_own_delta2(self):
        alg = matched_pair_algebra()
        d2 = delta2_subspace(alg)
        assert d2.dim == alg.basis.dim == 4
        for b in alg.basis.elements():
            assert d2.residual(b) <= 1e-8

    def test_zero_algebra(self):
        alg = closure_star_subalgebra([], points=2, n=2)
        assert delta2_subspace(alg).dim == 0


class TestDensityCheck:
    def test_full_single_point(self):
        report = density_check(all_functions_algebra(1, 2))
        assert report.dense and report.criterion is True and report.consistent

    def test_matched_pair_not_dense(self):
        report = density_check(matched_pair_algebra())
        assert not report.dense
        # equal values mean equal spectra: the pair is never separated
        assert report.not_found == ((0, 1),)

    def test_all_functions_three_points(self):
        report = density_check(all_functions_algebra(3, 2))
        assert report.dense and report.criterion is True
        assert all(f == 4 for f in report.fullness)


class TestUnitInClosure:
    def test_all_functions(self):
        verdict = unit_in_closure(all_functions_algebra(2, 2))
        assert verdict.in_closure
        assert_close(verdict.witness, np.stack([np.eye(2)] * 2), atol=1e-9)

    def test_vanishing_point_blocks_unit(self):
        gens = [fn(SX, np.zeros((2, 2))), fn(SZ, np.zeros((2, 2))), fn(np.eye(2), np.zeros((2, 2)))]
        assert not unit_in_closure(closure_star_subalgebra(gens)).in_closure

    def test_single_invertible_positive_generator(self):
        # span of powers reaches the unit by interpolation on the spectrum
        u = fn(np.diag([1.0, 2.0]), np.diag([3.0, 1.0]))
        verdict = unit_in_closure(closure_star_subalgebra([u]))
        assert verdict.in_closure


class TestPowerMeanEnvelope:
    def test_exponent_examples(self):
        assert power_mean_exponent(1.0, 1.0, 2) == 2
        # ln 10 / ln 1.1 ~ 24.16, so the first exponent that works is 25
        assert power_mean_exponent(0.1, 1.0, 10) == 25

    def test_projection_family_by_hand(self):
        a = np.diag([1.0, 0.0])
        result = power_mean_envelope([a, a], np.eye(2), eps=1.0)
        assert result.n_power == 2
        assert_close(result.env, np.sqrt(2.0) * a, atol=1e-9)
        assert psd_order(a, result.env) in (Ordering.LEQ, Ordering.LT)
        assert psd_order(result.env, 2.0 * np.eye(2)) in (Ordering.LEQ, Ordering.LT)

    def test_precondition_failure_lists_violations(self):
        with pytest.raises(PreconditionFailed) as err:
            power_mean_envelope([np.diag([2.0, 0.0])], np.eye(2), eps=0.5)
        assert "a_0 <= b fails" in str(err.value)

    def test_noncommuting_rejected(self):
        b = np.diag([2.0, 1.0])
        a = SX * 0.1 + 0.5 * np.eye(2)
        with pytest.raises(PreconditionFailed) as err:
            power_mean_envelope([a], b, eps=0.5)
        assert "commute" in str(err.value)

    @pytest.mark.parametrize("seed", range(25))
    def test_random_commuting_families(self, seed):
        r = rng(seed)
        family, b = commuting_dominated_family(r, d=3, k=int(r.integers(1, 5)))
        eps = float(r.uniform(0.05, 1.0))
        result = power_mean_envelope(family, b, eps)
        for a in family:
            assert psd_order(a, result.env) in (Ordering.LEQ, Ordering.LT)
        assert psd_order(result.env, b + eps * np.eye(3)) in (Ordering.LEQ, Ordering.LT)


class TestLatticeJoinChain:
    def test_commuting_diagonals(self):
        h = lattice_join_chain([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        assert_close(h, np.eye(2), atol=1e-9)

    def test_single_function(self):
        g = np.diag([2.0, -1.0])
        assert_close(lattice_join_chain([g]), g)

    def test_equal_inputs(self):
        g = np.diag([1.0, 3.0])
        assert_close(lattice_join_chain([g, g]), g, atol=1e-9)

    def test_dominates_inputs(self):
        r = rng(7)
        gs = [np.stack([(m + adj(m)) / 2 for m in (ginibre(r, 2), ginibre(r, 2))]) for _ in range(4)]
        h = lattice_join_chain(gs)
        for g in gs:
            for z in range(2):
                w = np.linalg.eigvalsh(h[z] - g[z])
                assert w[0] >= -DEFAULT_TOL.psd_slack

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            lattice_join_chain([np.array([[0.0, 1.0], [0.0, 0.0]])])


class TestTwoPointFlatten:
    def test_affine_case(self):
        p = two_point_flatten(np.zeros((2, 2)), np.eye(2), alpha=1.0, beta=0.0)
        # p(z) = 1 - z
        coeffs = {len(word): c for c, word in p.terms}
        assert coeffs[0] == pytest.approx(1.0)
        assert coeffs[1] == pytest.approx(-1.0)

    def test_degree_three_lagrange(self):
        a, b = np.diag([1.0, 2.0]), np.diag([4.0, 5.0])
        p = two_point_flatten(a, b, alpha=1.0, beta=0.0)
        assert max(len(word) for _, word in p.terms) == 3
        assert_close(eval_star_polynomial(p, MatTuple([a])), np.eye(2), atol=1e-8)
        assert opnorm(eval_star_polynomial(p, MatTuple([b]))) <= 1e-8

    def test_zero_targets_give_zero(self):
        p = two_point_flatten(np.zeros((2, 2)), np.eye(2), alpha=0.0, beta=0.0)
        assert p.terms == ()

    def test_flattens_conjugated_values(self):
        # evaluation respects unitary conjugation: p(u a u*) = u p(a) u*
        r = rng(3)
        a, b = np.diag([1.0, 2.0]), np.diag([4.0, 5.0])
        p = two_point_flatten(a, b, alpha=1.0, beta=0.0)
        q, _ = np.linalg.qr(ginibre(r, 2))
        conj = q @ a @ adj(q)
        assert_close(eval_star_polynomial(p, MatTuple([conj])), np.eye(2), atol=1e-8)

    def test_overlapping_spectra_rejected(self):
        with pytest.raises(SpectraNotDisjoint):
            two_point_flatten(SZ, SZ, 1.0, 0.0)


class TestLoewnerHeinz:
    def test_diagonal_hand_computation(self):
        report = loewner_heinz_check(np.diag([1.0, 0.0]), np.diag([2.0, 1.0]), [0.5])
        assert report.minima[0] == pytest.approx(min(np.sqrt(2) - 1, 1.0), abs=1e-9)

    def test_equal_matrices(self):
        a = np.diag([1.0, 2.0])
        report = loewner_heinz_check(a, a, [0.1, 0.5, 0.9])
        assert max(abs(v) for v in report.minima) <= 1e-12

    def test_zero_lower_bound(self):
        b = np.diag([1.0, 3.0])
        report = loewner_heinz_check(np.zeros((2, 2)), b, [0.3])
        assert report.minima[0] >= -1e-12

    def test_rejects_unordered_pair(self):
        with pytest.raises(PreconditionFailed):
            loewner_heinz_check(np.diag([2.0, 0.0]), np.eye(2), [0.5])

    @pytest.mark.parametrize("seed", range(50))
    def test_random_ordered_pairs(self, seed):
        a, b = ordered_psd_pair(rng(seed), 4)
        report = loewner_heinz_check(a, b, [0.1, 0.5, 0.9])
        assert report.passed


class TestMaxSpecClasses:
    def test_grouped_instance(self):
        gens, meta = grouped_function_algebra(
            rng(11), n=2, group_sizes=[2, 1], fibers=["full", "diag"]
        )
        alg = closure_star_subalgebra(gens)
        assert max_spec_classes(alg) == meta["groups"]


class TestConstructiveApproximate:
    def test_full_algebra_any_target(self):
        alg = all_functions_algebra(2, 2)
        r = rng(0)
        f = np.stack([ginibre(r, 2), ginibre(r, 2)])
        result = constructive_approximate(alg, f, eps=0.5, seed=1)
        assert result.certified_error <= 0.5 + DEFAULT_TOL.psd_slack
        assert result.projection_error <= 1e-10

    def test_two_class_instance_certified(self):
        r = rng(5)
        gens, meta = grouped_function_algebra(r, n=2, group_sizes=[2, 1], fibers=["full", "full"])
        alg = closure_star_subalgebra(gens)
        f = equivariant_target(r, meta, 2)
        result = constructive_approximate(alg, f, eps=0.1, seed=2)
        assert result.certified_error <= 0.1 + DEFAULT_TOL.psd_slack
        assert result.projection_error <= result.certified_error + 0.1
        assert result.classes == tuple(tuple(c) for c in meta["groups"])

    def test_scalar_target_uses_power_mean_route(self):
        r = rng(8)
        gens, meta = grouped_function_algebra(r, n=2, group_sizes=[2, 2], fibers=["full", "full"])
        alg = closure_star_subalgebra(gens)
        f = np.zeros((4, 2, 2), dtype=complex)
        for gi, grp in enumerate(meta["groups"]):
            for z in grp:
                f[z] = (0.6 if gi == 0 else -0.2) * np.eye(2)
        result = constructive_approximate(alg, f, eps=0.05, seed=3)
        assert "power-mean" in result.routes
        assert result.certified_error <= 0.05 + DEFAULT_TOL.psd_slack

    def test_non_approximable_target_rejected(self):
        r = rng(9)
        gens, _ = grouped_function_algebra(r, n=2, group_sizes=[2], fibers=["full"])
        alg = closure_star_subalgebra(gens)
        f = np.stack([ginibre(r, 2), ginibre(r, 2)])  # breaks the pair coupling
        with pytest.raises(PreconditionFailed):
            constructive_approximate(alg, f, eps=0.1)

    def test_missing_unit_is_hypothesis_violation(self):
        r = rng(10)
        gens, meta = grouped_function_algebra(
            r, n=2, group_sizes=[1, 1], fibers=["full", "full"], vanish_groups=[1]
        )
        alg = closure_star_subalgebra(gens, points=2, n=2)
        f = equivariant_target(r, meta, 2)
        with pytest.raises(HypothesisViolated):
            constructive_approximate(alg, f, eps=0.1)

    @pytest.mark.parametrize("seed", range(20))
    def test_certified_on_randomized_instances(self, seed):
        r = rng(1000 + seed)
        n = int(r.integers(1, 4))
        group_sizes = [int(r.integers(1, 3)) for _ in range(int(r.integers(1, 3)))]
        gens, meta = grouped_function_algebra(r, n=n, group_sizes=group_sizes)
        alg = closure_star_subalgebra(gens, points=sum(group_sizes), n=n)
        f = equivariant_target(r, meta, n)
        eps = float(r.uniform(0.02, 0.3))
        result = constructive_approximate(alg, f, eps=eps, seed=seed)
        assert result.certified_error <= eps + DEFAULT_TOL.psd_slack
        assert result.projection_error <= result.certified_error + eps
