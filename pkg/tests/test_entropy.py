import math

import numpy as np
import pytest

from entgeo.algebra import AlgebraSpec, HermElem, State, random_state
from entgeo.entropy import (
    ExtReal,
    divergence_to_set,
    omega_divergence,
    pinsker_slack,
    relative_entropy,
    von_neumann_entropy,
)

from conftest import SIGMA1, SIGMA2, diag_state, elem


def qubit_state(x, y, z):
    alg = AlgebraSpec((2,))
    block = 0.5 * (np.eye(2, dtype=complex) + x * SIGMA1 + y * SIGMA2 + z * np.diag([1.0, -1.0]))
    return State(HermElem(alg, [block]))


class TestExtReal:
    def test_infinity_marker(self):
        inf = ExtReal.infinite()
        assert inf.is_infinite
        assert inf == ExtReal.infinite()
        assert float(inf) == math.inf
        assert ExtReal(1.0) < inf

    def test_clamping(self):
        assert float(ExtReal(-5e-10)) == 0.0
        with pytest.raises(ValueError):
            ExtReal(-1e-3)

    def test_addition(self):
        assert float(ExtReal(1.0) + 2.0) == pytest.approx(3.0)
        assert (ExtReal.infinite() + 1.0).is_infinite


class TestVonNeumann:
    def test_pure_state(self):
        assert von_neumann_entropy(diag_state(1.0, 0.0)) == pytest.approx(0.0, abs=1e-12)

    def test_uniform(self):
        for n in (2, 3, 5):
            rho = diag_state(*([1.0 / n] * n))
            assert von_neumann_entropy(rho) == pytest.approx(math.log(n))

    def test_quarter_three_quarters(self):
        expected = -(0.25 * math.log(0.25) + 0.75 * math.log(0.75))
        assert von_neumann_entropy(diag_state(0.25, 0.75)) == pytest.approx(expected)

    @pytest.mark.parametrize("seed", range(5))
    def test_range(self, seed):
        alg = AlgebraSpec((2, 2))
        rho = random_state(alg, seed)
        s = von_neumann_entropy(rho)
        assert 0.0 <= s <= math.log(alg.n) + 1e-12


class TestRelativeEntropy:
    def test_self_divergence(self):
        rho = random_state(AlgebraSpec((2, 1)), 0)
        assert float(relative_entropy(rho, rho)) == pytest.approx(0.0, abs=1e-12)

    def test_support_mismatch_on_a_bit(self):
        rho = diag_state(0.5, 0.5)
        sigma = diag_state(1.0, 0.0)
        assert relative_entropy(rho, sigma).is_infinite
        assert float(relative_entropy(sigma, rho)) == pytest.approx(math.log(2))

    @pytest.mark.parametrize("alpha,expected_inf", [(0.0, False), (math.pi / 2, True)])
    def test_pure_qubit_pair(self, alpha, expected_inf):
        rho = qubit_state(1.0, 0.0, 0.0)
        sigma = qubit_state(math.cos(alpha), math.sin(alpha), 0.0)
        s = relative_entropy(rho, sigma)
        assert s.is_infinite == expected_inf
        if not expected_inf:
            assert float(s) == pytest.approx(0.0, abs=1e-10)

    def test_positivity_and_faithfulness(self):
        rng = np.random.default_rng(5)
        alg = AlgebraSpec((3,))
        for _ in range(10):
            rho = random_state(alg, rng)
            sigma = random_state(alg, rng)
            assert float(relative_entropy(rho, sigma)) > 0

    @pytest.mark.parametrize("seed", range(4))
    def test_unitary_invariance(self, seed):
        rng = np.random.default_rng(seed)
        alg = AlgebraSpec((3,))
        rho, sigma = random_state(alg, rng), random_state(alg, rng)
        g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        u, _ = np.linalg.qr(g)
        rot = lambda s: State(HermElem(alg, [u @ s.elem.data[0] @ u.conj().T]))
        assert float(relative_entropy(rot(rho), rot(sigma))) == pytest.approx(
            float(relative_entropy(rho, sigma)), abs=1e-10
        )

    @pytest.mark.parametrize("seed", range(4))
    def test_joint_convexity_spot_check(self, seed):
        rng = np.random.default_rng(seed + 20)
        alg = AlgebraSpec((2, 1))
        r1, r2 = random_state(alg, rng), random_state(alg, rng)
        s1, s2 = random_state(alg, rng), random_state(alg, rng)
        lam = rng.uniform(0.2, 0.8)
        mix = lambda a, b: State(
            HermElem(alg, [lam * x + (1 - lam) * y for x, y in zip(a.elem.data, b.elem.data)])
        )
        lhs = float(relative_entropy(mix(r1, r2), mix(s1, s2)))
        rhs = lam * float(relative_entropy(r1, s1)) + (1 - lam) * float(
            relative_entropy(r2, s2)
        )
        assert lhs <= rhs + 1e-9


class TestOmegaDivergence:
    def test_swap_definition(self):
        rng = np.random.default_rng(0)
        alg = AlgebraSpec((2,))
        rho, sigma = random_state(alg, rng), random_state(alg, rng)
        assert float(omega_divergence(rho, sigma, "I")) == pytest.approx(
            float(omega_divergence(sigma, rho, "rI"))
        )

    def test_self_zero(self):
        rho = diag_state(0.3, 0.7)
        for omega in ("I", "rI"):
            assert float(omega_divergence(rho, rho, omega)) == pytest.approx(0.0, abs=1e-12)

    def test_bit_forward_infinite(self):
        rho = diag_state(1.0, 0.0)
        for n in (2, 5):
            sigma = diag_state((n - 1) / n, 1 / n)
            assert omega_divergence(rho, sigma, "I").is_infinite

    def test_unknown_omega(self):
        rho = diag_state(1.0, 0.0)
        with pytest.raises(ValueError):
            omega_divergence(rho, rho, "x")


class TestDivergenceToSet:
    def test_member_gives_zero(self):
        rho = diag_state(0.5, 0.5)
        xs = [diag_state(0.3, 0.7), rho, diag_state(0.9, 0.1)]
        assert float(divergence_to_set(rho, xs, "rI")) == pytest.approx(0.0, abs=1e-12)

    def test_incompatible_support(self):
        rho = diag_state(0.5, 0.5)
        xs = [diag_state(1.0, 0.0), diag_state(0.0, 1.0)]
        assert divergence_to_set(rho, xs, "rI").is_infinite

    def test_singleton(self):
        rho, sigma = diag_state(0.5, 0.5), diag_state(0.8, 0.2)
        assert float(divergence_to_set(rho, [sigma], "rI")) == pytest.approx(
            float(relative_entropy(rho, sigma))
        )

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            divergence_to_set(diag_state(1.0, 0.0), [], "rI")


class TestPinsker:
    def test_equal_states(self):
        rho = diag_state(0.4, 0.6)
        assert float(pinsker_slack(rho, rho)) == pytest.approx(0.0, abs=1e-12)

    def test_bit_example(self):
        slack = pinsker_slack(diag_state(1.0, 0.0), diag_state(0.5, 0.5))
        assert float(slack) == pytest.approx(2 * math.log(2) - 1.0)

    @pytest.mark.parametrize("seed", range(10))
    def test_nonnegative(self, seed):
        rng = np.random.default_rng(seed)
        alg = AlgebraSpec((2, 2))
        rho = random_state(alg, rng)
        sigma = random_state(alg, rng)
        assert float(pinsker_slack(rho, sigma)) >= -1e-8
