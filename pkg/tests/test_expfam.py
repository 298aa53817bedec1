import math

import numpy as np
import pytest

from entgeo.algebra import AlgebraSpec, HermElem, State, hs_inner, norm, random_herm, random_state
from entgeo.entropy import relative_entropy
from entgeo.expfam import (
    BudgetExhaustedError,
    ExpFamilySpec,
    OutsideConvexSupportError,
    bkm,
    dF,
    e_geodesic_limit,
    exp_limit_nonpositive,
    free_energy,
    free_energy_asymptote,
    gibbs_state,
    invert_mean_chart,
    mean_value,
    monotone_geodesic_divergence,
)
from entgeo.families import SIGMA2, bloch_point, staffelberg
from entgeo.spectral import eig, support_projection

from conftest import SIGMA1, SIGMA3, elem


class TestGibbs:
    def test_uniform(self, mat2_plus_bit):
        rho = gibbs_state(mat2_plus_bit.zero())
        assert np.allclose(rho.elem.data[0], np.eye(2) / 3)
        assert np.allclose(rho.elem.data[1], [[1 / 3]])

    def test_scalar_evaluation(self, bit):
        rho = gibbs_state(elem(bit, [[1.0]], [[0.0]]))
        z = math.e + 1
        assert rho.elem.data[0][0, 0] == pytest.approx(math.e / z)
        assert rho.elem.data[1][0, 0] == pytest.approx(1 / z)

    @pytest.mark.parametrize("seed", range(4))
    def test_shift_invariance(self, seed):
        alg = AlgebraSpec((2, 2))
        rng = np.random.default_rng(seed)
        theta = random_herm(alg, rng)
        lam = float(rng.normal()) * 3
        shifted = gibbs_state(theta + lam * alg.identity())
        base = gibbs_state(theta)
        assert norm(shifted.elem - base.elem, "trace") < 1e-12

    def test_overflow_guard(self, mat2):
        rho = gibbs_state(elem(mat2, np.diag([900.0, -900.0])))
        assert rho.elem.data[0][0, 0].real == pytest.approx(1.0)


class TestFreeEnergy:
    def test_at_zero(self, mat2_plus_bit):
        assert free_energy(mat2_plus_bit.zero()) == pytest.approx(math.log(3))

    def test_scalar(self, bit):
        assert free_energy(elem(bit, [[1.0]], [[0.0]])) == pytest.approx(
            math.log(math.e + 1)
        )

    @pytest.mark.parametrize("seed", range(4))
    def test_shift_rule(self, seed):
        alg = AlgebraSpec((3,))
        rng = np.random.default_rng(seed)
        theta = random_herm(alg, rng)
        lam = float(rng.normal())
        assert free_energy(theta + lam * alg.identity()) == pytest.approx(
            free_energy(theta) + lam
        )


class TestDerivatives:
    def test_dF_at_zero(self, mat2):
        u = elem(mat2, SIGMA3 + np.eye(2))
        assert dF(mat2.zero(), u) == pytest.approx(u.trace() / 2)

    def test_dF_along_identity(self, mat2_plus_bit):
        theta = random_herm(mat2_plus_bit, 3)
        assert dF(theta, mat2_plus_bit.identity()) == pytest.approx(1.0)

    @pytest.mark.parametrize("seed", range(10))
    def test_dF_matches_finite_difference(self, seed):
        alg = AlgebraSpec((2, 1))
        rng = np.random.default_rng(seed)
        theta, u = random_herm(alg, rng), random_herm(alg, rng)
        h = 1e-5
        fd = (free_energy(theta + h * u) - free_energy(theta + (-h) * u)) / (2 * h)
        val = dF(theta, u)
        assert abs(val - fd) <= 1e-6 * max(1.0, abs(val))

    def test_bkm_identity_degenerate(self, mat2):
        theta = random_herm(mat2, 0)
        v = random_herm(mat2, 1)
        assert bkm(theta, mat2.identity(), v) == pytest.approx(0.0, abs=1e-12)

    def test_bkm_uniform_variance(self, bit):
        u = elem(bit, [[1.0]], [[-1.0]])
        assert bkm(bit.zero(), u, u) == pytest.approx(1.0)

    @pytest.mark.parametrize("seed", range(8))
    def test_bkm_matches_second_difference(self, seed):
        alg = AlgebraSpec((2, 1))
        rng = np.random.default_rng(seed + 7)
        theta = random_herm(alg, rng)
        u, v = random_herm(alg, rng), random_herm(alg, rng)
        h = 1e-4
        fd = (
            free_energy(theta + h * u + h * v)
            - free_energy(theta + h * u - h * v)
            - free_energy(theta - h * u + h * v)
            + free_energy(theta - h * u - h * v)
        ) / (4 * h * h)
        assert abs(bkm(theta, u, v) - fd) <= 1e-5
        assert abs(bkm(theta, u, v) - bkm(theta, v, u)) <= 1e-10


class TestMeanValue:
    def test_uniform_means(self):
        spec = staffelberg()
        rho = gibbs_state(spec.algebra.zero())
        xi = mean_value(rho, spec)
        assert xi.coords[0] == pytest.approx(0.0, abs=1e-12)
        assert xi.coords[1] == pytest.approx(1 / 3)

    def test_half_qubit_zero_bit(self):
        spec = staffelberg()
        rho = State(0.5 * bloch_point(0, 0, 0, 2.0))
        xi = mean_value(rho, spec)
        assert xi.coords == (0.0, 0.0)

    def test_fiber_invariance(self):
        spec = staffelberg()
        rho = random_state(spec.algebra, 0)
        # perturb orthogonally to span(directions, identity) so the state
        # moves along the fiber of the mean value map
        w = random_herm(spec.algebra, 1)
        basis = []
        for v in (*spec.directions, spec.algebra.identity()):
            for b in basis:
                v = v - hs_inner(v, b) * b
            basis.append((1.0 / norm(v, "two")) * v)
        for b in basis:
            w = w - hs_inner(w, b) * b
        for u in spec.directions:
            assert abs(hs_inner(w, u)) < 1e-9
        rho2 = State(rho.elem + 0.01 * w)
        assert mean_value(rho, spec).coords == pytest.approx(
            mean_value(rho2, spec).coords, abs=1e-9
        )


class TestInvertMeanChart:
    def test_barycenter(self):
        spec = staffelberg()
        uniform = gibbs_state(spec.algebra.zero())
        rep = invert_mean_chart(spec, mean_value(uniform, spec))
        assert not rep.diverged
        assert rep.residual <= 1e-9
        assert norm(gibbs_state(rep.theta).elem - uniform.elem, "trace") < 1e-9

    @pytest.mark.parametrize("seed", range(6))
    def test_round_trip(self, seed):
        spec = staffelberg()
        rng = np.random.default_rng(seed)
        lam = rng.normal(size=2)
        lam = lam / max(1.0, np.linalg.norm(lam) / 3.0)  # keep |theta| <= 3
        target = gibbs_state(spec.point(lam))
        rep = invert_mean_chart(spec, mean_value(target, spec))
        assert not rep.diverged
        recovered = gibbs_state(rep.theta)
        assert norm(recovered.elem - target.elem, "trace") < 1e-8

    def test_boundary_probe_diverges(self):
        spec = staffelberg()
        limit, _ = e_geodesic_limit(spec.theta0, spec.combination([0.8, 0.6]))
        rep = invert_mean_chart(spec, mean_value(limit, spec))
        assert rep.diverged
        assert rep.escape_direction is not None
        assert norm(rep.escape_direction, "two") == pytest.approx(1.0)

    def test_outside_raises_with_certificate(self):
        spec = staffelberg()
        with pytest.raises(OutsideConvexSupportError) as err:
            invert_mean_chart(spec, [2.0, 0.0])
        assert err.value.violation > 0.5
        assert len(err.value.coefficients) == 2

    def test_escape_direction_dominates_limit_support(self):
        # the limit state of every diverged run is supported inside the
        # escape direction's widened top projection
        from entgeo.lattice import locate_face
        from entgeo.spectral import max_projection, ordered_leq

        spec = staffelberg()
        for phi in (0.3, 2.0, 4.5):
            xi = [math.cos(phi), math.sin(phi)]
            rep = invert_mean_chart(spec, xi)
            assert rep.diverged
            loc = locate_face(spec, xi)
            scale = max(1.0, norm(rep.escape_direction, "spectral"))
            _, p = max_projection(rep.escape_direction, cluster_tol=0.2 * scale)
            assert ordered_leq(
                support_projection(loc.state.elem).elem, p.elem, tol=1e-6
            )


class TestLimits:
    def test_zero_direction(self, mat2):
        theta = random_herm(mat2, 0)
        limit, comp = e_geodesic_limit(theta, mat2.zero())
        assert norm(limit.elem - gibbs_state(theta).elem, "trace") < 1e-12
        assert comp.projection.rank == 2

    def test_staffelberg_top_limit(self):
        spec = staffelberg()
        limit, comp = e_geodesic_limit(spec.theta0, spec.combination([0.0, 1.0]))
        assert np.allclose(limit.elem.data[0], 0.25 * (np.eye(2) + SIGMA2))
        assert limit.elem.data[1][0, 0] == pytest.approx(0.5)
        assert comp.projection.block_ranks() == (1, 1)

    def test_limit_matches_large_t(self):
        # the ray converges at first order in 1/t, so t must be large
        alg = AlgebraSpec((2, 1))
        rng = np.random.default_rng(11)
        theta, u = random_herm(alg, rng), random_herm(alg, rng)
        sf = eig(u)
        gap = sf.values[0] - sf.values[1]
        t = 1e7 * (1 + norm(theta, "two")) / gap
        limit, _ = e_geodesic_limit(theta, u)
        assert norm(limit.elem - gibbs_state(theta + t * u).elem, "trace") < 1e-6
        f_err = abs(
            free_energy(theta + t * u) - t * sf.values[0] - free_energy_asymptote(theta, u)
        )
        assert f_err < 1e-6

    def test_exp_limit_zero_direction(self, mat2):
        theta = random_herm(mat2, 5)
        out = exp_limit_nonpositive(theta, mat2.zero())
        expected = eig(theta)
        direct = mat2.zero()
        for v, p in zip(expected.values, expected.projections):
            direct = direct + math.exp(v) * p.elem
        assert norm(out - direct, "two") < 1e-10

    def test_exp_limit_scalar(self, bit):
        out = exp_limit_nonpositive(bit.zero(), elem(bit, [[0.0]], [[-1.0]]))
        assert out.data[0][0, 0] == pytest.approx(1.0)
        assert out.data[1][0, 0] == pytest.approx(0.0)

    def test_exp_limit_rejects_positive_top(self, bit):
        with pytest.raises(ValueError):
            exp_limit_nonpositive(bit.zero(), elem(bit, [[1.0]], [[0.0]]))

    def test_exp_limit_complement_projection(self):
        alg = AlgebraSpec((2, 1))
        rng = np.random.default_rng(4)
        theta = random_herm(alg, rng)
        rho = random_state(alg, rng, rank_profile=(1, 1))
        p = support_projection(rho.elem)
        u = -1.0 * (alg.identity() - p.elem)
        out = exp_limit_nonpositive(theta, HermElem(alg, u.data))
        t = 1e7 * (1 + norm(theta, "two"))
        target = theta + t * u
        direct = []
        for block in target.data:
            w, v = np.linalg.eigh(block)
            direct.append((v * np.exp(w)) @ v.conj().T)
        assert norm(out - HermElem(alg, direct), "trace") < 1e-6


class TestMonotoneGeodesic:
    def test_limit_point_decreases_to_zero(self):
        spec = staffelberg()
        u = spec.combination([0.0, 1.0])
        limit, _ = e_geodesic_limit(spec.theta0, u)
        vals = monotone_geodesic_divergence(limit, spec.theta0, u, [0.0, 1.0, 3.0, 8.0])
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] < vals[0]

    def test_violating_support_rejected(self):
        spec = staffelberg()
        u = spec.combination([0.0, 1.0])
        rho = State(bloch_point(1.0, 0.0, 0.0))  # supported off the top face
        with pytest.raises(ValueError):
            monotone_geodesic_divergence(rho, spec.theta0, u, [0.0, 1.0])

    def test_identity_direction_rejected(self, mat2):
        rho = random_state(mat2, 0)
        with pytest.raises(ValueError):
            monotone_geodesic_divergence(
                rho, mat2.zero(), mat2.identity(), [0.0, 1.0]
            )


class TestFamilySpecValidation:
    def test_dependent_directions_rejected(self, mat2):
        u = elem(mat2, SIGMA1)
        with pytest.raises(ValueError):
            ExpFamilySpec(mat2, mat2.zero(), (u, 2.0 * u))
