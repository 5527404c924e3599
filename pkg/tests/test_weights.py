import math

import numpy as np
import pytest
from scipy.integrate import quad

from bmolab import (
    Cube,
    GridFunction,
    Weight,
    ap_constant,
    apq_constant,
    bloom_inequality_check,
    doubling_constant,
    dyadic_family,
    product_weight,
)


def quad_average(a: float, cube: Cube) -> float:
    """Independent quadrature oracle for averages of |x|^a in one dimension."""
    lo, hi = float(cube.lo[0]), float(cube.hi[0])
    pts = [0.0] if lo < 0.0 < hi else None
    val, _ = quad(lambda x: abs(x) ** a, lo, hi, points=pts, limit=200)
    return val / (hi - lo)


class TestWeightForms:
    def test_positive_sampled_required(self):
        g = GridFunction(Cube.interval(0, 1), 4, np.array([1.0, 2.0, 0.0, 1.0]))
        with pytest.raises(ValueError, match="strictly positive"):
            Weight.sampled(g)

    def test_power_evaluation(self):
        w = Weight.power(-0.5)
        assert w(np.array([[4.0]]))[0] == pytest.approx(0.5)

    def test_power_integral_closed_form(self):
        w = Weight.power(-0.5)
        got = w.integral(Cube.interval(0.0, 1.0))
        assert got == pytest.approx(2.0, rel=1e-12)

    def test_divergent_integral_is_inf(self):
        w = Weight.power(-2.0)
        assert w.integral(Cube.interval(-1.0, 1.0)) == math.inf
        assert w.integral(Cube.interval(0.0, 1.0)) == math.inf


class TestApConstant:
    def test_unit_weight_is_one(self):
        fam = dyadic_family(Cube.interval(-1, 1), 4)
        assert ap_constant(Weight.one(), 2.0, fam) == 1.0

    def test_sqrt_singularity_matches_quadrature_oracle(self):
        w = Weight.power(-0.5)
        fam = dyadic_family(Cube.interval(-1, 1), 6)
        got = ap_constant(w, 2.0, fam)
        expected = 0.0
        for cube in fam:
            m1 = quad_average(-0.5, cube)
            m2 = quad_average(0.5, cube)
            expected = max(expected, m1 * m2)
        assert math.isfinite(got)
        assert got == pytest.approx(expected, rel=0.05)

    def test_inverse_square_blows_up(self):
        # closed form: cubes touching the origin diverge outright
        w = Weight.power(-2.0)
        fam = dyadic_family(Cube.interval(-1, 1), 3)
        assert ap_constant(w, 2.0, fam) == math.inf
        # sampled proxy: the constant grows without bound as depth increases
        core = Cube.interval(-1, 1)
        prev = 0.0
        for n, depth in ((2 ** 8, 2), (2 ** 10, 4), (2 ** 12, 6)):
            g = GridFunction.sample(core, n, lambda x: np.abs(x) ** -2.0)
            ws = Weight.sampled(g)
            val = ap_constant(ws, 2.0, dyadic_family(core, depth))
            assert val > 2.0 * prev
            prev = val

    def test_always_at_least_one_and_scale_invariant(self):
        rng = np.random.default_rng(5)
        g = GridFunction(Cube.interval(0, 1), 64, rng.uniform(0.5, 2.0, 64))
        w = Weight.sampled(g)
        fam = dyadic_family(Cube.interval(0, 1), 3)
        c1 = ap_constant(w, 1.5, fam)
        assert c1 > 1.0  # Jensen is strict off constants
        w3 = Weight.sampled(g.with_values(3.0 * g.values))
        assert ap_constant(w3, 1.5, fam) == pytest.approx(c1, rel=1e-12)

    def test_constant_weight_attains_equality(self):
        fam = dyadic_family(Cube.interval(0, 1), 3)
        w = Weight.sampled(GridFunction(Cube.interval(0, 1), 32, np.full(32, 7.0)))
        assert ap_constant(w, 2.0, fam) == pytest.approx(1.0, rel=1e-12)


class TestApqConstant:
    def test_unit_weight(self):
        fam = dyadic_family(Cube.interval(-1, 1), 3)
        assert apq_constant(Weight.one(), 2.0, 2.0, fam) == pytest.approx(1.0)

    def test_quarter_power_finite_and_matches_oracle(self):
        fam = dyadic_family(Cube.interval(-1, 1), 6)
        val = apq_constant(Weight.power(-0.25), 2.0, 2.0, fam)
        assert math.isfinite(val)
        # independent quadrature oracle for the two power averages
        expected = max(
            quad_average(-0.5, c) ** 0.5 * quad_average(0.5, c) ** 0.5
            for c in fam
        )
        assert val == pytest.approx(expected, rel=0.02)

    def test_exponent_rewrite_identity(self):
        # A_{p,p} of w equals the p-th root of A_p of w^p
        w = Weight.power(-0.25)
        p = 2.0
        fam = dyadic_family(Cube.interval(-1, 1), 4)
        lhs = apq_constant(w, p, p, fam)
        rhs = ap_constant(w.pow(p), p, fam) ** (1.0 / p)
        assert lhs == pytest.approx(rhs, rel=1e-10)


class TestDoubling:
    def test_lebesgue_doubles(self):
        fam = dyadic_family(Cube.interval(-1, 1), 3)[1:]
        res = doubling_constant(Weight.one(), fam)
        assert res.constant == pytest.approx(2.0, rel=1e-12)

    def test_sqrt_weight_bounded(self):
        w = Weight.power(-0.5)
        fam = dyadic_family(Cube.interval(-1, 1), 5)[1:]
        res = doubling_constant(w, fam)
        # oracle: independent quadrature of the same ratios
        expected = max(
            quad_average(-0.5, Cube(1, c.center, 2 * c.side)) * 2 * c.side
            / (quad_average(-0.5, c) * c.side)
            for c in fam
        )
        assert res.constant <= 4.0
        assert res.constant == pytest.approx(expected, rel=1e-6)

    def test_gaussian_grows_with_scale(self):
        dom = Cube.interval(-8.0, 8.0)
        g = GridFunction.sample(dom, 2 ** 12, lambda x: np.exp(-x * x))
        w = Weight.sampled(g)
        small = doubling_constant(w, [Cube.interval(-0.5, 0.5)]).constant
        large = doubling_constant(w, [Cube.interval(-4.0, 4.0)]).constant
        # erf oracle
        oracle_small = math.erf(1.0) / math.erf(0.5)
        oracle_large = math.erf(8.0) / math.erf(4.0)
        assert small == pytest.approx(oracle_small, rel=1e-3)
        assert large == pytest.approx(oracle_large, rel=1e-3)
        assert small > large  # mass saturates: ratio falls toward 1 at huge scale

    def test_out_of_domain_pairs_skipped(self):
        g = GridFunction.sample(Cube.interval(-1, 1), 64, lambda x: np.exp(x))
        w = Weight.sampled(g)
        res = doubling_constant(w, [Cube.interval(-0.25, 0.25), Cube.interval(0.5, 1.0)])
        assert len(res.skipped) == 1
        assert len(res.pairs) == 1


class TestProductWeight:
    def test_single_identity(self):
        w = Weight.power(-0.5)
        assert product_weight([w], [1.0]) == w

    def test_halves_recombine(self):
        w = Weight.power(-0.5)
        out = product_weight([w, w], [0.5, 0.5])
        assert out.exponent == pytest.approx(-0.5)

    def test_power_sum_pointwise(self):
        wa, wb = Weight.power(-0.25), Weight.power(0.5)
        out = product_weight([wa, wb], [0.5, 0.5])
        pts = np.array([[0.3], [1.7]])
        expected = wa(pts) ** 0.5 * wb(pts) ** 0.5
        assert out(pts) == pytest.approx(expected, rel=1e-12)

    def test_sampled_grid_mismatch(self):
        g1 = GridFunction(Cube.interval(0, 1), 8, np.ones(8))
        g2 = GridFunction(Cube.interval(0, 1), 16, np.ones(16))
        with pytest.raises(ValueError, match="grid mismatch"):
            product_weight([Weight.sampled(g1), Weight.sampled(g2)], [0.5, 0.5])

    def test_a1_powers_product_stays_ap(self):
        w = product_weight([Weight.power(-0.25), Weight.power(-0.5)], [0.5, 0.5])
        fam = dyadic_family(Cube.interval(-1, 1), 5)
        for p in (1.5, 2.0, 4.0):
            assert math.isfinite(ap_constant(w, p, fam))


class TestBloomInequality:
    def test_unit_weights(self):
        q = Cube.interval(0.0, 2.0)
        lhs, rhs = bloom_inequality_check(Weight.one(), Weight.one(), 2.0, q)
        assert lhs == pytest.approx(q.volume * q.volume ** 0.5, rel=1e-12)
        assert rhs == pytest.approx(lhs, rel=1e-12)

    def test_equal_weights_ratio_one(self):
        w = Weight.power(-0.5)
        q = Cube.interval(0.25, 0.75)
        lhs, rhs = bloom_inequality_check(w, w, 2.0, q)
        assert lhs / rhs == pytest.approx(1.0, rel=1e-9)

    def test_sqrt_vs_unit_bounded_over_family(self):
        # scale invariance of the power pair keeps the ratio at ~sqrt(2)*3/4
        omega, lam = Weight.power(-0.5), Weight.one()
        ratios = []
        for cube in dyadic_family(Cube.interval(-1, 1), 6):
            lhs, rhs = bloom_inequality_check(omega, lam, 2.0, cube)
            ratios.append(lhs / rhs)
        assert max(ratios) <= 2.0
