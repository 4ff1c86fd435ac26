import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nhomog.errors import DimensionMismatch, DomainError, NotHermitian
from nhomog.matrix_core import (
    DEFAULT_TOL,
    Ordering,
    Tolerance,
    herm_abs,
    herm_eig,
    herm_fun,
    max_spec,
    normal_spectra_disjoint,
    opnorm,
    psd_order,
    psd_power,
)

from conftest import SX, SZ, assert_close, rng


def random_hermitian(r, n):
    g = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
    return (g + g.conj().T) / 2


def random_psd(r, n):
    g = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
    return g @ g.conj().T / n


def random_unitary(r, n):
    q, rr = np.linalg.qr(r.standard_normal((n, n)) + 1j * r.standard_normal((n, n)))
    return q * (np.diagonal(rr) / np.abs(np.diagonal(rr)))


class TestTolerance:
    def test_defaults(self):
        t = Tolerance()
        assert t.rank_cut == 1e-9 and t.psd_slack == 1e-8 and t.eq_tol == 1e-8

    @pytest.mark.parametrize("bad", [{"rank_cut": 0.0}, {"psd_slack": -1e-9}, {"eq_tol": 0.5}])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            Tolerance(**bad)


class TestHermEig:
    def test_diagonal(self):
        w, _ = herm_eig(np.diag([3.0, -1.0]))
        assert_close(w, [-1.0, 3.0])

    def test_pauli_x(self):
        # characteristic polynomial lambda^2 - 1
        w, u = herm_eig(SX)
        assert_close(w, [-1.0, 1.0])
        assert_close(u @ np.diag(w) @ u.conj().T, SX, atol=1e-12)

    def test_zero(self):
        w, u = herm_eig(np.zeros((3, 3)))
        assert_close(w, np.zeros(3))
        assert_close(u.conj().T @ u, np.eye(3), atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestHermFun:
    def test_sqrt_diagonal(self):
        assert_close(herm_fun(np.diag([4.0, 9.0]), np.sqrt), np.diag([2.0, 3.0]))

    def test_abs_of_shift(self):
        # A = e12: A*A = diag(0, 1) by hand, so |A| = diag(0, 1)
        a = np.array([[0.0, 1.0], [0.0, 0.0]])
        assert_close(psd_power(a.conj().T @ a, 0.5), np.diag([0.0, 1.0]))
        with pytest.raises(NotHermitian):
            herm_abs(a)

    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_identity_function_is_identity(self, seed):
        a = random_hermitian(rng(seed), 3)
        assert opnorm(herm_fun(a, lambda w: w) - a) <= DEFAULT_TOL.eq_tol * (1 + opnorm(a))

    def test_result_commutes_with_input(self):
        a = random_hermitian(rng(5), 4)
        f = herm_fun(a, np.exp)
        assert opnorm(f @ a - a @ f) <= 1e-10 * (1 + opnorm(a)) * (1 + opnorm(f))

    def test_domain_error(self):
        with pytest.raises(DomainError):
            herm_fun(np.diag([-1.0, 1.0]), np.log)

    @pytest.mark.parametrize("seed", range(100))
    def test_sqrt_squares_back(self, seed):
        a = random_psd(rng(seed), 3)
        root = psd_power(a, 0.5)
        assert opnorm(root @ root - a) <= 1e-7 * (1 + opnorm(a))

    def test_psd_power_clamps_slack_negatives(self):
        a = np.diag([1.0, -0.5e-8])
        out = psd_power(a, 0.5)
        assert_close(out, np.diag([1.0, 0.0]), atol=1e-4)

    def test_psd_power_rejects_indefinite(self):
        with pytest.raises(DomainError):
            psd_power(np.diag([1.0, -1.0]), 0.5)


class TestPsdOrder:
    def test_leq_singular_gap(self):
        assert psd_order(np.diag([1.0, 0.0]), np.eye(2)) is Ordering.LEQ

    def test_lt(self):
        assert psd_order(np.zeros((2, 2)), np.eye(2)) is Ordering.LT

    def test_incomparable(self):
        assert psd_order(np.diag([1.0, -1.0]), np.zeros((2, 2))) is Ordering.INCOMPARABLE

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            psd_order(np.eye(2), np.eye(3))

    @pytest.mark.parametrize("seed", range(40))
    def test_transitive_on_sampled_triples(self, seed):
        r = rng(seed)
        a = random_psd(r, 3)
        b = a + random_psd(r, 3)
        c = b + random_psd(r, 3)
        assert psd_order(a, b) in (Ordering.LEQ, Ordering.LT)
        assert psd_order(b, c) in (Ordering.LEQ, Ordering.LT)
        assert psd_order(a, c) in (Ordering.LEQ, Ordering.LT)


class TestMaxSpec:
    def test_examples(self):
        assert max_spec(np.diag([3.0, -1.0, 2.0])) == pytest.approx(3.0)
        assert max_spec(-np.eye(2)) == pytest.approx(-1.0)
        assert max_spec(SX) == pytest.approx(1.0)

    @pytest.mark.parametrize("seed", range(25))
    def test_conjugation_invariance(self, seed):
        r = rng(seed)
        a = random_hermitian(r, 4)
        u = random_unitary(r, 4)
        assert abs(max_spec(u @ a @ u.conj().T) - max_spec(a)) <= 1e-10


class TestNormalSpectraDisjoint:
    def test_zero_vs_identity(self):
        v = normal_spectra_disjoint(np.zeros((2, 2)), np.eye(2))
        assert v and v.gap == pytest.approx(1.0)

    def test_equal_spectra(self):
        assert not normal_spectra_disjoint(SZ, SZ)

    def test_non_normal_flagged(self):
        nil = np.array([[0.0, 1.0], [0.0, 0.0]])
        v = normal_spectra_disjoint(np.diag([1.0, 2.0]), nil)
        assert not v and v.reason == "NonNormal:b"
