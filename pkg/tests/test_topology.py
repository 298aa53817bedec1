import math

import numpy as np
import pytest

from entgeo.algebra import AlgebraSpec, HermElem, State, random_state
from entgeo.expfam import e_geodesic_limit, gibbs_state
from entgeo.families import staffelberg
from entgeo.topology import (
    StateSequence,
    closure_infimum_experiment,
    disk_membership,
    implication_suite,
    norm_converges,
    omega_converges,
)

from conftest import SIGMA1, SIGMA2, diag_state


def bit_tail_sequence():
    return StateSequence(lambda i: diag_state(i / (i + 1), 1 / (i + 1)), None)


def qubit_arc_sequence():
    alg = AlgebraSpec((2,))

    def gen(i):
        a = 1.0 / (i + 1)
        block = 0.5 * (
            np.eye(2, dtype=complex) + math.cos(a) * SIGMA1 + math.sin(a) * SIGMA2
        )
        return State(HermElem(alg, [block]))

    return StateSequence(gen, None)


class TestOmegaConverges:
    def test_constant_sequence(self):
        rho = diag_state(0.25, 0.75)
        seq = StateSequence.from_states([rho] * 40)
        for omega in ("I", "rI"):
            rep = omega_converges(seq, rho, omega, 40, 1e-12)
            assert rep.verdict == "converging"

    def test_bit_counterexample(self):
        rho = diag_state(1.0, 0.0)
        seq = bit_tail_sequence()
        assert omega_converges(seq, rho, "rI", 2500, 1e-3).verdict == "converging"
        rep_i = omega_converges(seq, rho, "I", 2500, 1e-3)
        assert rep_i.verdict == "diverging"
        assert all(math.isinf(v) for v in rep_i.trace)

    def test_qubit_counterexample(self):
        alg = AlgebraSpec((2,))
        rho = State(HermElem(alg, [0.5 * (np.eye(2, dtype=complex) + SIGMA1)]))
        seq = qubit_arc_sequence()
        assert omega_converges(seq, rho, "rI", 300, 1e-3).verdict == "diverging"
        assert norm_converges(seq, rho, 2500, 1e-3).verdict == "converging"


class TestImplicationSuite:
    def test_interior_sequence_all_converge(self):
        alg = AlgebraSpec((2, 1))
        target = random_state(alg, 0)
        tau = random_state(alg, 1)

        def gen(i):
            eps = 1.0 / (i**4 + 1)
            return State(
                HermElem(
                    alg,
                    [
                        (1 - eps) * a + eps * b
                        for a, b in zip(target.elem.data, tau.elem.data)
                    ],
                )
            )

        rep = implication_suite(StateSequence(gen, None), target, 24, 1e-3)
        assert rep.i_report.verdict == "converging"
        assert rep.ri_report.verdict == "converging"
        assert rep.norm_report.verdict == "converging"
        assert rep.violations == ()

    def test_bit_pattern_consistent_with_arrows(self):
        # the trace-norm values decay as 2/i, so the window is sized for the
        # norm tail to clear the threshold as well
        rho = diag_state(1.0, 0.0)
        rep = implication_suite(bit_tail_sequence(), rho, 5000, 1e-3)
        assert rep.ri_report.verdict == "converging"
        assert rep.i_report.verdict == "diverging"
        assert rep.norm_report.verdict == "converging"
        assert rep.violations == ()


class TestDisks:
    def test_center_in_every_open_disk(self):
        rho = diag_state(0.5, 0.5)
        assert disk_membership(rho, rho, 1e-9, "rI", "open")
        assert disk_membership(rho, rho, math.inf, "I", "open")

    def test_infinite_forward_disk_is_the_face(self):
        rng = np.random.default_rng(2)
        alg = AlgebraSpec((2, 1))
        from entgeo.spectral import ordered_leq, support_projection

        for _ in range(10):
            ranks = [rng.integers(1, 3), rng.integers(0, 2)]
            if sum(ranks) == 0:
                ranks[0] = 1
            rho = random_state(alg, rng, rank_profile=ranks)
            ranks2 = [rng.integers(1, 3), rng.integers(0, 2)]
            sigma = random_state(alg, rng, rank_profile=ranks2)
            member = disk_membership(rho, sigma, math.inf, "I", "open")
            dominated = ordered_leq(
                support_projection(sigma.elem).elem, support_projection(rho.elem).elem
            )
            assert member == dominated

    def test_orthogonal_pure_states_excluded(self):
        p = diag_state(1.0, 0.0)
        q = diag_state(0.0, 1.0)
        assert not disk_membership(p, q, math.inf, "rI", "open")

    def test_closed_vs_open(self):
        rho = diag_state(0.5, 0.5)
        sigma = diag_state(0.8, 0.2)
        from entgeo.entropy import relative_entropy

        r = float(relative_entropy(rho, sigma))
        assert disk_membership(rho, sigma, r, "rI", "closed")
        assert not disk_membership(rho, sigma, r * (1 - 1e-12), "rI", "open")


class TestClosureInfimum:
    def test_finite_set_equality(self):
        rho = diag_state(0.4, 0.6)
        xs = [diag_state(0.3, 0.7), diag_state(0.6, 0.4)]

        rep = closure_infimum_experiment(
            rho,
            lambda rng, n: xs,
            lambda rng, n: xs,
            "rI",
            budget=2,
        )
        assert rep.monotone_ok
        assert rep.equality_gap == pytest.approx(0.0, abs=1e-12)

    def test_family_with_boundary_points(self):
        spec = staffelberg()
        rho = random_state(spec.algebra, 3)

        def sample_set(rng, n):
            return [gibbs_state(spec.point(rng.normal(size=2) * 4)) for _ in range(n)]

        def sample_closure(rng, n):
            out = sample_set(rng, n // 2)
            for _ in range(n - len(out)):
                u = spec.combination(rng.normal(size=2))
                out.append(e_geodesic_limit(spec.theta0, u)[0])
            return out

        rep = closure_infimum_experiment(
            rho, sample_set, sample_closure, "rI", budget=400, seed=5
        )
        assert rep.monotone_ok

    def test_closure_member_infima_vanish(self):
        spec = staffelberg()
        rho, _ = e_geodesic_limit(spec.theta0, spec.combination([0.0, 1.0]))

        def sample_set(rng, n):
            # ray samples toward the limit plus generic members
            out = []
            for t in np.linspace(1.0, 40.0, n // 2):
                out.append(gibbs_state(spec.point([0.0, t])))
            for _ in range(n - len(out)):
                out.append(gibbs_state(spec.point(rng.normal(size=2))))
            return out

        rep = closure_infimum_experiment(
            rho, sample_set, lambda rng, n: sample_set(rng, n) + [rho], "rI", budget=200
        )
        assert rep.inf_set < 1e-6
        assert rep.inf_closure < 1e-12
        assert rep.monotone_ok


class TestContinuitySecondArgument:
    def test_tail_converges_along_ri_sequence(self):
        # S(rho, sigma_i) -> S(rho, sigma) along an rI-converging sequence
        spec = staffelberg()
        rho = random_state(spec.algebra, 4)
        sigma = gibbs_state(spec.point([0.5, 0.5]))
        from entgeo.entropy import relative_entropy

        target = float(relative_entropy(rho, sigma))
        errs = []
        for i in range(1, 30):
            eps = 2.0 ** (-i)
            sigma_i = State(
                HermElem(
                    spec.algebra,
                    [
                        (1 - eps) * a + eps * b
                        for a, b in zip(
                            sigma.elem.data, gibbs_state(spec.theta0).elem.data
                        )
                    ],
                )
            )
            errs.append(abs(float(relative_entropy(rho, sigma_i)) - target))
        assert errs[-1] < 1e-7
        assert max(errs[-5:]) <= max(errs[:5])
