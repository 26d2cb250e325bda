import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boundedladder import dynamics
from boundedladder.dynamics import SeminormSpec
from boundedladder.errors import BadCutoffs, DimensionError, NotDiagonal, ZeroWeight
from boundedladder.fock import op_norm
from boundedladder.ladder import ambient_hamiltonian, hamiltonian_HL, make_A_ambient, make_AL
from boundedladder.weights import make_sequence

from conftest import random_operator

D = 10


@pytest.fixture
def HL(harmonic):
    return hamiltonian_HL(harmonic, 4, D)


class TestEvolve:
    def test_zero_time(self, HL):
        assert np.array_equal(dynamics.evolve(HL, 0.0), np.eye(D))

    @pytest.mark.parametrize("t", np.linspace(-10, 10, 21))
    def test_unitary(self, zoo_sequence, t):
        U = dynamics.evolve(hamiltonian_HL(zoo_sequence, 4, D), t)
        assert op_norm(U @ U.conj().T - np.eye(D)) < 1e-12
        assert op_norm(U @ dynamics.evolve(hamiltonian_HL(zoo_sequence, 4, D), -t) - np.eye(D)) < 1e-12

    def test_matches_series_exponential(self, HL):
        # Taylor series of exp as an independent oracle
        t = 0.3
        term = np.eye(D, dtype=complex)
        total = term.copy()
        for k in range(1, 60):
            term = term @ (1j * t * HL) / k
            total += term
        np.testing.assert_allclose(dynamics.evolve(HL, t), total, atol=1e-12)

    @pytest.mark.parametrize("t", [0.1, 1.7, 10.0])
    def test_decomposition(self, zoo_sequence, t):
        assert dynamics.decomposition_residual(zoo_sequence, 4, D, t) < 1e-12

    def test_not_diagonal(self):
        with pytest.raises(NotDiagonal):
            dynamics.evolve(np.array([[0, 1], [1, 0]], dtype=complex), 1.0)


class TestHeisenberg:
    def test_zero_time(self, HL, rng):
        X = random_operator(rng, D)
        np.testing.assert_allclose(dynamics.heisenberg(X, HL, 0.0), X, atol=0)

    def test_hamiltonian_fixed(self, HL):
        np.testing.assert_allclose(dynamics.heisenberg(HL, HL, 2.3), HL, atol=1e-14)

    @pytest.mark.parametrize("t", [-3.0, 0.4, 7.5])
    def test_automorphism(self, HL, rng, t):
        X, Y = random_operator(rng, D), random_operator(rng, D)
        a = lambda Z: dynamics.heisenberg(Z, HL, t)  # noqa: E731
        assert op_norm(a(X @ Y) - a(X) @ a(Y)) < 1e-10
        assert op_norm(a(X.conj().T) - a(X).conj().T) < 1e-10
        assert abs(op_norm(a(X)) - op_norm(X)) < 1e-10

    def test_group_law(self, HL, rng):
        X = random_operator(rng, D)
        two_steps = dynamics.heisenberg(dynamics.heisenberg(X, HL, 0.7), HL, 1.1)
        assert op_norm(two_steps - dynamics.heisenberg(X, HL, 1.8)) < 1e-12

    def test_matches_matrix_product(self, HL, rng):
        X = random_operator(rng, D)
        U = dynamics.evolve(HL, 0.9)
        np.testing.assert_allclose(dynamics.heisenberg(X, HL, 0.9), U @ X @ U.conj().T, atol=1e-13)

    def test_equation_of_motion(self, HL, rng):
        X = random_operator(rng, D)
        errors = []
        for dt in (1e-2, 5e-3):
            fd = (dynamics.heisenberg(X, HL, dt) - dynamics.heisenberg(X, HL, -dt)) / (2 * dt)
            errors.append(op_norm(fd - dynamics.derivation(X, HL, 1)))
        assert errors[0] < 1e-2
        # second order: halving dt quarters the error
        assert errors[1] / errors[0] == pytest.approx(0.25, rel=0.05)

    def test_shape(self, HL):
        with pytest.raises(DimensionError):
            dynamics.heisenberg(np.eye(3), HL, 1.0)


class TestSeminorm:
    def test_identity(self, harmonic):
        H = ambient_hamiltonian(harmonic, D)
        res = dynamics.seminorm(np.eye(D, dtype=complex), SeminormSpec(), H)
        h = np.diag(H).real
        assert res.direct == pytest.approx(math.exp(-h.min()))

    def test_zero(self, harmonic):
        res = dynamics.seminorm(np.zeros((D, D)), SeminormSpec(2.0, 3), ambient_hamiltonian(harmonic, D))
        assert (res.direct, res.upper_bound) == (0.0, 0.0)

    @pytest.mark.parametrize("k", [0, 1, 3])
    def test_adjoint_symmetry_and_bound(self, zoo_sequence, rng, k):
        H = ambient_hamiltonian(zoo_sequence, D)
        X = random_operator(rng, D)
        spec = SeminormSpec(0.5, k)
        res, res_dag = dynamics.seminorm(X, spec, H), dynamics.seminorm(X.conj().T, spec, H)
        assert res.direct == pytest.approx(res_dag.direct, rel=1e-12)
        assert res.direct <= res.upper_bound + 1e-10

    def test_negative_spectrum(self):
        with pytest.raises(ValueError):
            dynamics.seminorm(np.eye(2), SeminormSpec(), np.diag([0.0, -1.0]))

    @pytest.mark.parametrize("beta,k", [(0.0, 0), (-1.0, 0), (1.0, -1), (1.0, 1.5)])
    def test_bad_spec(self, beta, k):
        with pytest.raises(ValueError):
            SeminormSpec(beta, k)


class TestCauchyGap:
    def test_equal_cutoffs(self, harmonic):
        assert dynamics.cauchy_gap(harmonic, 3, 3, 1.0, SeminormSpec(), D).direct == 0

    @pytest.mark.parametrize("L,M", [(0, 1), (0, 7), (2, 5), (4, 7)])
    @pytest.mark.parametrize("t", [0.3, 2.0, -5.0])
    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_sine_form_and_bound(self, zoo_sequence, L, M, t, k):
        spec = SeminormSpec(1.0, k)
        gap = dynamics.cauchy_gap(zoo_sequence, L, M, t, spec, D)
        assert gap.direct == pytest.approx(dynamics.cauchy_gap_sine_form(zoo_sequence, L, M, t, spec, D),
                                           abs=1e-12)
        assert gap.direct <= gap.bound + 1e-10

    @pytest.mark.parametrize("k", [0, 1])
    @pytest.mark.parametrize("kind,params", [("harmonic", {}), ("quon_first", {"q": 0.5}),
                                             ("quon_second", {"q": 1.3})])
    def test_alt_range_bound_for_small_k(self, kind, params, k):
        # holds when f(x_s) x_s^k is non-increasing, i.e. increasing x with x_1 >= k
        x = make_sequence(kind, params, 20)
        spec = SeminormSpec(1.0, k)
        for L in range(0, 7):
            for M in range(L, 8):
                for t in (0.3, 2.0, 5.0):
                    gap = dynamics.cauchy_gap(x, L, M, t, spec, D + 2)
                    assert gap.direct <= gap.alt_bound + 1e-10

    def test_alt_range_can_fail_for_large_k(self, harmonic):
        # the support of H_M - H_L is s = L+2..M+1, one slot above L+1..M
        gap = dynamics.cauchy_gap(harmonic, 0, 1, math.pi / 2, SeminormSpec(1.0, 3), D)
        assert gap.direct > gap.alt_bound

    def test_decreasing_in_L(self):
        x = make_sequence("harmonic", {}, 40)
        spec = SeminormSpec(1.0, 1)
        bounds = [dynamics.cauchy_gap(x, L, L + 3, 1.0, spec, 40).bound for L in range(2, 30)]
        assert all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))

    def test_hypothesis_flag(self, harmonic):
        assert dynamics.cauchy_gap(harmonic, 1, 2, 1.0, SeminormSpec(), D).hypothesis_ok
        bounded = make_sequence("quon_first", {"q": 0.5}, 20)
        assert not dynamics.cauchy_gap(bounded, 1, 2, 1.0, SeminormSpec(), D).hypothesis_ok

    @pytest.mark.parametrize("L,M", [(3, 2), (-1, 2), (2, 8)])
    def test_bad_cutoffs(self, harmonic, L, M):
        with pytest.raises(BadCutoffs):
            dynamics.cauchy_gap(harmonic, L, M, 1.0, SeminormSpec(), D)


class TestDerivation:
    def test_zero_order(self, HL, rng):
        X = random_operator(rng, D)
        assert np.array_equal(dynamics.derivation(X, HL, 0), X)

    @pytest.mark.parametrize("k", [1, 2, 5])
    def test_hamiltonian_is_fixed_point(self, HL, k):
        assert not np.any(dynamics.derivation(HL, HL, k))

    def test_second_order_expansion(self, HL, rng):
        X = random_operator(rng, D)
        expected = -(HL @ HL @ X - 2 * HL @ X @ HL + X @ HL @ HL)
        np.testing.assert_allclose(dynamics.derivation(X, HL, 2), expected, atol=1e-11)

    def test_entrywise_formula(self, HL, rng):
        X = random_operator(rng, D)
        h = np.diag(HL)
        expected = (1j * (h[:, None] - h[None, :])) ** 3 * X
        np.testing.assert_allclose(dynamics.derivation(X, HL, 3), expected, atol=1e-10)

    def test_negative_order(self, HL):
        with pytest.raises(ValueError):
            dynamics.derivation(HL, HL, -1)


class TestSeries:
    def test_zero_time(self, HL, rng):
        assert dynamics.series_vs_exact(random_operator(rng, D), HL, 0.0, 0).residual == 0

    def test_harmonic_L3(self):
        x = make_sequence("harmonic", {}, 20)
        HL3 = hamiltonian_HL(x, 3, D)
        X = make_A_ambient(x, D)
        res = dynamics.series_vs_exact(X, HL3, 0.5, 40)
        assert res.residual < 1e-10
        assert res.terms_used == 41

    def test_remainder_bound(self, HL, rng):
        X = random_operator(rng, D)
        t = 0.4
        scale = 2 * op_norm(HL) * abs(t)
        for K in (5, 10, 20):
            bound = scale ** (K + 1) / math.factorial(K + 1) * op_norm(X) * math.exp(scale)
            assert dynamics.series_vs_exact(X, HL, t, K).residual <= bound + 1e-13

    def test_monotone_past_scale(self, HL, rng):
        X = random_operator(rng, D)
        t = 0.6
        K0 = math.ceil(op_norm(2 * HL * t))
        res = [dynamics.series_vs_exact(X, HL, t, K).residual for K in range(K0, K0 + 40)]
        assert all(b <= a + 1e-12 for a, b in zip(res, res[1:]))

    def test_negative_K(self, HL):
        with pytest.raises(ValueError):
            dynamics.series_vs_exact(HL, HL, 1.0, -1)


class TestInverseTailNorm:
    def test_harmonic_value(self):
        x = make_sequence("harmonic", {}, 30)
        assert dynamics.inverse_tail_norm(x, 2, 9, 20) == pytest.approx(1e-2, rel=1e-15)

    def test_zero_power(self, harmonic):
        assert dynamics.inverse_tail_norm(harmonic, 0, 3, D) == 1.0

    @pytest.mark.parametrize("l", [1, 2, 3])
    def test_increasing_sequences_exact(self, l):
        for x in (make_sequence("harmonic", {}, 30), make_sequence("quon_first", {"q": 0.5}, 30),
                  make_sequence("quon_second", {"q": 1.3}, 30)):
            values = [dynamics.inverse_tail_norm(x, l, L, 20) for L in range(0, 15)]
            assert values == [x.values[L + 1] ** (-l) for L in range(0, 15)]
            assert all(b <= a for a, b in zip(values, values[1:]))

    def test_matrix_oracle(self, zoo_sequence):
        H = ambient_hamiltonian(zoo_sequence, D).real
        Hinv = np.zeros_like(H)
        Hinv[1:, 1:] = np.linalg.inv(H[1:, 1:])
        L, l = 3, 2
        tail = np.diag([0.0] * (L + 1) + [1.0] * (D - L - 1))
        oracle = np.linalg.norm(np.linalg.matrix_power(Hinv, l) @ tail, 2)
        assert dynamics.inverse_tail_norm(zoo_sequence, l, L, D) == pytest.approx(oracle, rel=1e-12)

    def test_zero_weight(self):
        from boundedladder.weights import WeightSequence
        # WeightSequence refuses zeros, so smuggle one in through a subclass-free copy
        x = make_sequence("harmonic", {}, 10)
        arr = x.values.copy()
        arr.setflags(write=True)
        arr[5] = 0.0
        fake = type("W", (), {"values": arr, "require": lambda self, n: None})()
        with pytest.raises(ZeroWeight):
            dynamics.inverse_tail_norm(fake, 1, 2, 8)


@settings(max_examples=30, deadline=None)
@given(st.floats(-10, 10), st.integers(0, 6))
def test_heisenberg_preserves_norm_property(t, L):
    x = make_sequence("harmonic", {}, 20)
    A = make_AL(x, L, L + 4).A
    H = hamiltonian_HL(x, L, L + 4)
    assert abs(op_norm(dynamics.heisenberg(A, H, t)) - op_norm(A)) < 1e-10
