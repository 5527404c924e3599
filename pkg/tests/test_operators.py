import math

import numpy as np
import pytest

from bmolab import (
    BilinearFractionalSpec,
    Cube,
    GridFunction,
    KernelSpec,
    SphereSymbol,
    apply_I2,
    apply_T,
    bilinear_kernel_oscillation,
    check_first_moments,
    check_mean_zero,
    directional_inf_oscillation,
    kernel_oscillation,
    lebesgue_point_modulus,
    lower_upper_cone,
)


class TestSphereSymbol:
    def test_degree_zero_homogeneity(self):
        sym = SphereSymbol.from_angle_fn(np.cos, m=32)
        pts = np.array([[1.0, 2.0], [-0.3, 0.7]])
        assert sym(pts) == pytest.approx(sym(7.0 * pts), rel=1e-14)

    def test_dim1_sign_values(self):
        sym = SphereSymbol.sign()
        assert sym(np.array([[3.0]]))[0] == 1.0
        assert sym(np.array([[-0.2]]))[0] == -1.0

    def test_table_minimum_size(self):
        with pytest.raises(ValueError):
            SphereSymbol(2, np.ones(4))

    def test_nearest_interpolation(self):
        tab = np.array([0.0, 1.0] * 8)
        sym = SphereSymbol(2, tab, "nearest")
        assert sym.at_angles(np.array([0.01]))[0] == 0.0


class TestMomentChecks:
    def test_mean_zero_sign(self):
        assert check_mean_zero(SphereSymbol.sign()) == 0.0

    def test_mean_one(self):
        assert check_mean_zero(SphereSymbol.constant(1.0, dim=1)) == 1.0

    def test_mean_cosine_table(self):
        sym = SphereSymbol.from_angle_fn(np.cos, m=64)
        assert abs(check_mean_zero(sym)) < 1e-12

    def test_first_moment_constant_dim1(self):
        assert check_first_moments(SphereSymbol.constant(1.0, dim=1))[0] == 0.0

    def test_first_moment_sign_fails(self):
        assert check_first_moments(SphereSymbol.sign())[0] == 1.0

    def test_first_moments_cos2_orthogonal(self):
        sym = SphereSymbol.from_angle_fn(lambda t: np.cos(2 * t), m=64)
        assert np.max(np.abs(check_first_moments(sym))) < 1e-12


class TestKernelSpec:
    def test_mean_zero_required_for_nonpositive_alpha(self):
        with pytest.raises(ValueError, match="mean-zero"):
            KernelSpec(SphereSymbol.constant(1.0, dim=1), 0.0)
        KernelSpec(SphereSymbol.constant(1.0, dim=1), 0.5)  # fine for alpha > 0

    def test_hypersingular_needs_first_moments(self):
        with pytest.raises(ValueError, match="first angular moments"):
            KernelSpec(SphereSymbol.sign(), -1.0)
        KernelSpec(SphereSymbol.from_angle_fn(lambda t: np.cos(2 * t), m=64), -1.0)


class TestApplyT:
    def test_log2_closed_form(self):
        dom = Cube.interval(-1.0, 3.0)
        f = GridFunction.indicator(dom, 4096, Cube.interval(0.0, 1.0))
        k = KernelSpec(SphereSymbol.sign(), 0.0)
        val = apply_T(k, f, np.array([[2.0]]))
        assert val[0] == pytest.approx(math.log(2.0), abs=1e-3)

    def test_zero_symbol_gives_zeros(self):
        dom = Cube.interval(-1.0, 1.0)
        f = GridFunction.sample(dom, 256, lambda x: np.cos(3 * x))
        k = KernelSpec(SphereSymbol.constant(0.0, dim=1), 0.0)
        assert np.all(apply_T(k, f, np.array([[4.0], [8.0]])) == 0.0)

    def test_far_field_fractional_asymptotics(self):
        q = Cube.interval(-0.5, 0.5)
        dom = Cube.interval(-1.0, 1.0)
        f = GridFunction.indicator(dom, 1024, q)
        alpha = 0.5
        k = KernelSpec(SphereSymbol.constant(1.0, dim=1), alpha)
        d = 64.0
        val = apply_T(k, f, np.array([[d]]))[0]
        assert val == pytest.approx(q.volume * d ** (alpha - 1.0), rel=0.02)

    def test_linearity_superposition(self):
        dom = Cube.interval(-1.0, 1.0)
        rng = np.random.default_rng(1)
        fa = GridFunction(dom, 128, rng.normal(size=128))
        fb = GridFunction(dom, 128, rng.normal(size=128))
        k = KernelSpec(SphereSymbol.sign(), 0.0)
        pts = np.array([[3.0], [5.0]])
        combo = apply_T(k, fa.with_values(2.0 * fa.values - 0.5 * fb.values), pts)
        parts = 2.0 * apply_T(k, fa, pts) - 0.5 * apply_T(k, fb, pts)
        assert combo == pytest.approx(parts, rel=1e-12)

    def test_pv_exclusion_preconditions(self):
        dom = Cube.interval(-1.0, 1.0)
        f = GridFunction.sample(dom, 64, lambda x: np.ones_like(x))
        k = KernelSpec(SphereSymbol.sign(), 0.0)
        with pytest.raises(ValueError, match="under-resolved"):
            apply_T(k, f, np.array([[0.1]]), exclusion=0.0)
        k1 = KernelSpec(SphereSymbol.from_angle_fn(lambda t: np.cos(2 * t), m=64), -1.0)
        dom2 = Cube.square((0.0, 0.0), 2.0)
        f2 = GridFunction.sample(dom2, 16, lambda x, y: np.ones_like(x))
        with pytest.raises(ValueError, match="hypersingular"):
            apply_T(k1, f2, np.array([[0.1, 0.1]]))

    def test_far_field_decay_scaling(self):
        # values scale like |x|^(alpha - n) once |x| >> side
        dom = Cube.interval(-1.0, 1.0)
        f = GridFunction.indicator(dom, 1024, Cube.interval(-0.5, 0.5))
        for alpha, sym in ((0.0, SphereSymbol.sign()), (0.5, SphereSymbol.constant(1.0, dim=1))):
            k = KernelSpec(sym, alpha)
            v16, v32 = apply_T(k, f, np.array([[16.0], [32.0]]))
            assert v16 / v32 == pytest.approx(2.0 ** (1.0 - alpha), rel=0.10)


class TestLowerUpperCone:
    def test_sign_symbol(self):
        cone = lower_upper_cone(SphereSymbol.sign())
        assert cone.directions == (1,)
        assert cone.c == cone.C == 1.0

    def test_zero_symbol_none(self):
        assert lower_upper_cone(SphereSymbol.constant(0.0, dim=1)) is None
        assert lower_upper_cone(SphereSymbol.constant(0.0, dim=2)) is None

    def test_cosine_arc(self):
        cone = lower_upper_cone(SphereSymbol.from_angle_fn(np.cos, m=64), threshold=0.5)
        step = 2 * math.pi / 64
        assert cone.sign == 1
        assert abs(cone.theta_center) < 1e-12
        assert abs(cone.half_width - math.pi / 3) <= step
        assert abs(cone.c - 0.5) <= math.sin(math.pi / 3) * step
        assert cone.C == pytest.approx(1.0)


class TestKernelOscillation:
    def test_constant_symbol_exact_zero(self):
        sym = SphereSymbol.constant(2.0, dim=2)
        assert kernel_oscillation(sym, (8.0, 0.0), "Linf", 24) == 0.0

    def test_sign_exact_zero_beyond_two(self):
        sym = SphereSymbol.sign()
        for h in (2.0, 4.0, 8.0, 16.0):
            for mode in ("Linf", "L1"):
                assert kernel_oscillation(sym, h, mode, 64) == 0.0

    def test_shift_must_clear_sqrt_dim(self):
        with pytest.raises(ValueError, match="exceed sqrt"):
            kernel_oscillation(SphereSymbol.sign(), 0.5, "Linf", 16)

    def test_l1_below_linf(self):
        sym = SphereSymbol.from_angle_fn(np.cos, m=64)
        h = (6.0, 1.5)
        linf = kernel_oscillation(sym, h, "Linf", 32)
        l1 = kernel_oscillation(sym, h, "L1", 32)
        assert l1 <= linf + 1e-15

    def test_cosine_halving_decay(self):
        sym = SphereSymbol.from_angle_fn(np.cos, m=64)
        e = lower_upper_cone(sym).central_direction
        v16 = kernel_oscillation(sym, 16.0 * e, "Linf", 40)
        v32 = kernel_oscillation(sym, 32.0 * e, "Linf", 40)
        assert abs(v32 - v16 / 2.0) <= 0.25 * (v16 / 2.0)

    def test_lipschitz_cap_bound(self):
        # table modulus L caps the oscillation at c*L/|h|
        sym = SphereSymbol.from_angle_fn(np.cos, m=64)
        e = lower_upper_cone(sym).central_direction
        lip = 1.0  # |d cos| <= 1
        c_emp = max(
            kernel_oscillation(sym, h * e, "Linf", 40) * h / lip for h in (4.0, 8.0)
        )
        for h in (16.0, 32.0):
            assert kernel_oscillation(sym, h * e, "Linf", 40) <= 1.05 * c_emp * lip / h


class TestLebesguePointModulus:
    def test_constant_zero(self):
        sym = SphereSymbol.constant(3.0, dim=2)
        assert lebesgue_point_modulus(sym, (1.0, 0.0), 0.5) == 0.0

    def test_dim1_caps_are_singletons(self):
        assert lebesgue_point_modulus(SphereSymbol.sign(), 1.0, 0.9) == 0.0

    def test_cosine_lipschitz_cap(self):
        sym = SphereSymbol.from_angle_fn(np.cos, m=256)
        for r in (0.1, 0.3, 0.8):
            assert lebesgue_point_modulus(sym, (1.0, 0.0), r) <= r


class TestDirectionalInfOscillation:
    def test_constant_zero(self):
        sym = SphereSymbol.constant(1.0, dim=2)
        dirs = [(1.0, 0.0), (0.8, 0.6)]
        assert directional_inf_oscillation(sym, 8.0, dirs, n0=24) == 0.0

    def test_sign_zero(self):
        assert directional_inf_oscillation(SphereSymbol.sign(), 4.0, [1.0]) == 0.0

    def test_rough_symbol_decays(self):
        # jump at angle pi; directions hug the jump so small shifts see it
        # and large shifts (narrower window spread) do not
        tab = np.where(np.arange(64) < 32, 1.0, 2.0)
        sym = SphereSymbol(2, tab, "nearest")
        dirs = [(math.cos(t), math.sin(t)) for t in (3.0, 3.05, 3.10)]
        v8 = directional_inf_oscillation(sym, 8.0, dirs, n0=32)
        v32 = directional_inf_oscillation(sym, 32.0, dirs, n0=32)
        assert v8 > 0.0
        assert v32 < v8


class TestApplyI2:
    def test_zero_factor(self):
        dom = Cube.interval(-1.0, 1.0)
        f = GridFunction.sample(dom, 64, lambda x: np.ones_like(x))
        z = GridFunction.sample(dom, 64, lambda x: np.zeros_like(x))
        spec = BilinearFractionalSpec(1, 1.0)
        assert np.all(apply_I2(spec, f, z, np.array([[4.0]])) == 0.0)

    def test_interval_bound_from_kernel_range(self):
        # distances from x=4 to [0,1] lie in [3,4]; bound the radial kernel
        dom = Cube.interval(-1.0, 2.0)
        f = GridFunction.indicator(dom, 768, Cube.interval(0.0, 1.0))
        spec = BilinearFractionalSpec(1, 1.0)
        val = apply_I2(spec, f, f, np.array([[4.0]]))[0]
        assert (2 * 16.0) ** -0.5 <= val <= (2 * 9.0) ** -0.5

    def test_symmetry_in_sources(self):
        dom = Cube.interval(-1.0, 1.0)
        rng = np.random.default_rng(2)
        f1 = GridFunction(dom, 64, rng.uniform(0, 1, 64))
        f2 = GridFunction(dom, 64, rng.uniform(0, 1, 64))
        spec = BilinearFractionalSpec(1, 1.0)
        pts = np.array([[3.0], [6.0]])
        assert apply_I2(spec, f1, f2, pts) == pytest.approx(
            apply_I2(spec, f2, f1, pts), rel=1e-12)

    def test_alpha_zero_interior_rejected(self):
        dom = Cube.interval(-1.0, 1.0)
        f = GridFunction.sample(dom, 32, lambda x: np.ones_like(x))
        spec = BilinearFractionalSpec(1, 0.0)
        with pytest.raises(ValueError, match="off the supports"):
            apply_I2(spec, f, f, np.array([[0.0]]))

    def test_excluded_counts_reported(self):
        dom = Cube.interval(-1.0, 1.0)
        f = GridFunction.sample(dom, 64, lambda x: np.ones_like(x))
        spec = BilinearFractionalSpec(1, 1.0)
        _, counts = apply_I2(spec, f, f, np.array([[0.0]]), return_excluded=True)
        assert counts[0] > 0


class TestBilinearKernelOscillation:
    def test_overlap_rejected(self):
        spec = BilinearFractionalSpec(1, 1.0)
        q = Cube.interval(-0.5, 0.5)
        with pytest.raises(ValueError, match="overlap"):
            bilinear_kernel_oscillation(spec, ((0.0,), (8.0,)), q)

    def test_decay_under_doubling(self):
        spec = BilinearFractionalSpec(1, 1.0)
        q = Cube.interval(-0.5, 0.5)
        v8 = bilinear_kernel_oscillation(spec, ((8.0,), (8.0,)), q, n0=32)
        v16 = bilinear_kernel_oscillation(spec, ((16.0,), (16.0,)), q, n0=32)
        assert v8 / v16 >= 1.5

    def test_decay_near_top_exponent(self):
        spec = BilinearFractionalSpec(1, 1.8)
        q = Cube.interval(-0.5, 0.5)
        v8 = bilinear_kernel_oscillation(spec, ((8.0,), (8.0,)), q, n0=32)
        v16 = bilinear_kernel_oscillation(spec, ((16.0,), (16.0,)), q, n0=32)
        assert v16 < v8
