"""Homogeneous-kernel integral operators and kernel admissibility functionals.

The linear operator has kernel Omega((x-y)') / |x-y|^(n-alpha) with Omega
homogeneous of degree zero on the sphere; the bilinear operator uses the
radial two-source kernel |(x-y1, x-y2)|^(alpha-2n).  Alongside the
operators live the functionals that decide whether a kernel admits the
shifted-cube lower-bound construction: cone detection (two-sided bound on
an open direction set), translation-oscillation decay, the spherical
Lebesgue-point modulus, and their bilinear analogue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from ._kernels import SYM_PAIR, SYM_TABLE_LINEAR, SYM_TABLE_NEAREST, omega_values
from .geometry import Cube, GridFunction, as_points, translate

__all__ = [
    "SphereSymbol",
    "KernelSpec",
    "BilinearFractionalSpec",
    "Cone",
    "KernelAdmissibilityError",
    "check_mean_zero",
    "check_first_moments",
    "apply_T",
    "lower_upper_cone",
    "kernel_oscillation",
    "lebesgue_point_modulus",
    "directional_inf_oscillation",
    "apply_I2",
    "bilinear_kernel_oscillation",
]

_TWO_PI = 2.0 * math.pi

# Symbols sampled on an angle table cannot be meaningfully coarser.
_MIN_TABLE = 8

# Mean-zero / first-moment tolerance for kernel validation; generous
# against table quadrature noise, tight against genuine violations.
_MOMENT_TOL = 1e-8


class KernelAdmissibilityError(ValueError):
    """Raised when a kernel fails the cone or oscillation-decay requirements."""


@dataclass(frozen=True)
class SphereSymbol:
    """Degree-zero homogeneous symbol, stored by its values on the sphere.

    Dimension 1: the two values at the directions +1 and -1.  Dimension 2:
    a table of at least 8 values at equispaced angles with a stated
    interpolation rule ('linear' is periodic piecewise-linear, 'nearest'
    represents rough, merely integrable symbols).
    """

    dim: int
    table: np.ndarray
    interpolation: str = "linear"

    def __post_init__(self):
        tab = np.asarray(self.table, dtype=float)
        if not np.all(np.isfinite(tab)):
            raise ValueError("symbol values must be finite")
        if self.dim == 1:
            if tab.shape != (2,):
                raise ValueError("dim-1 symbol stores exactly (value(+1), value(-1))")
        elif self.dim == 2:
            if tab.ndim != 1 or tab.shape[0] < _MIN_TABLE:
                raise ValueError(f"dim-2 symbol needs a table of at least {_MIN_TABLE} angles")
            if self.interpolation not in ("linear", "nearest"):
                raise ValueError(f"unknown interpolation {self.interpolation!r}")
        else:
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        tab = tab.copy()
        tab.flags.writeable = False
        object.__setattr__(self, "table", tab)

    @classmethod
    def pair(cls, plus: float, minus: float) -> "SphereSymbol":
        return cls(1, np.array([plus, minus]))

    @classmethod
    def sign(cls) -> "SphereSymbol":
        return cls.pair(1.0, -1.0)

    @classmethod
    def constant(cls, value: float, dim: int = 1, m: int = 64) -> "SphereSymbol":
        if dim == 1:
            return cls.pair(value, value)
        return cls(2, np.full(m, float(value)))

    @classmethod
    def from_angle_fn(cls, fn, m: int = 64, interpolation: str = "linear") -> "SphereSymbol":
        angles = _TWO_PI * np.arange(m) / m
        return cls(2, np.asarray(fn(angles), dtype=float), interpolation)

    @property
    def sym_kind(self) -> int:
        if self.dim == 1:
            return SYM_PAIR
        return SYM_TABLE_LINEAR if self.interpolation == "linear" else SYM_TABLE_NEAREST

    def angles(self) -> np.ndarray:
        if self.dim != 2:
            raise ValueError("angle grid only exists in dimension 2")
        return _TWO_PI * np.arange(self.table.shape[0]) / self.table.shape[0]

    def __call__(self, points) -> np.ndarray:
        """Evaluate at any nonzero points; depends only on the direction."""
        pts = as_points(points, self.dim)
        return omega_values(pts, self.table, self.sym_kind)

    def at_angles(self, thetas) -> np.ndarray:
        dirs = np.stack([np.cos(thetas), np.sin(thetas)], axis=-1)
        return omega_values(dirs, self.table, self.sym_kind)


def check_mean_zero(symbol: SphereSymbol) -> float:
    """Spherical mean of the symbol (caller compares against a tolerance).

    Dimension 1 averages the two point values; dimension 2 uses the
    periodic trapezoid rule on the angle table (equal to the table mean),
    which is exact for trigonometric polynomials below the Nyquist order.
    """
    return float(symbol.table.mean())


def check_first_moments(symbol: SphereSymbol) -> np.ndarray:
    """First angular moments (mean of Omega(x') * x'_j), one per axis."""
    if symbol.dim == 1:
        return np.array([0.5 * (symbol.table[0] - symbol.table[1])])
    th = symbol.angles()
    return np.array([
        float(np.mean(symbol.table * np.cos(th))),
        float(np.mean(symbol.table * np.sin(th))),
    ])


@dataclass(frozen=True)
class KernelSpec:
    """Homogeneous kernel Omega((x-y)')/|x-y|^(n-alpha), alpha in [-1, n).

    Nonpositive alpha requires a mean-zero symbol; alpha = -1 additionally
    requires vanishing first angular moments.
    """

    symbol: SphereSymbol
    alpha: float

    def __post_init__(self):
        n = self.symbol.dim
        if not (-1.0 <= self.alpha < n):
            raise ValueError(f"alpha must lie in [-1, {n}), got {self.alpha}")
        if self.alpha <= 0 and abs(check_mean_zero(self.symbol)) > _MOMENT_TOL:
            raise ValueError("alpha <= 0 requires a mean-zero symbol")
        if self.alpha == -1.0:
            moments = check_first_moments(self.symbol)
            if np.max(np.abs(moments)) > _MOMENT_TOL:
                raise ValueError("alpha = -1 requires vanishing first angular moments")

    @property
    def dim(self) -> int:
        return self.symbol.dim


@dataclass(frozen=True)
class BilinearFractionalSpec:
    """Radial two-source kernel |(x-y1, x-y2)|^(alpha-2n) on R^n x R^n.

    alpha = 0 is admitted for far-field use (the two-sided bound and the
    shifted-cube certificates never touch the diagonal); interior
    evaluation requires alpha > 0 for local integrability.  The kernel is
    smooth off the diagonal, so its difference-estimate exponent is 1.
    """

    dim: int
    alpha: float
    smoothness_delta: float = 1.0

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if not (0.0 <= self.alpha < 2 * self.dim):
            raise ValueError(f"alpha must lie in [0, {2 * self.dim}), got {self.alpha}")
        if not self.smoothness_delta > 0:
            raise ValueError("smoothness_delta must be positive")


@dataclass(frozen=True)
class Cone:
    """Open direction set on which the symbol is two-sided bounded away from 0.

    ``c`` and ``C`` are the attained signed bounds (c < C, same sign);
    ``floor`` is min |Omega| over the set.  In dimension 1 the set is a
    subset of {+1, -1}; in dimension 2 an arc (theta_center, half_width).
    """

    dim: int
    sign: int
    c: float
    C: float
    floor: float
    directions: tuple
    theta_center: float | None = None
    half_width: float | None = None

    @property
    def central_direction(self) -> np.ndarray:
        if self.dim == 1:
            return np.array([float(self.directions[0])])
        return np.array([math.cos(self.theta_center), math.sin(self.theta_center)])

    def contains_deviation(self, delta: float) -> bool:
        """Can directions tilted up to ``delta`` radians off center stay inside?"""
        if self.dim == 1:
            # The two-point sphere: a shift keeps its sign as soon as the
            # perturbation cannot flip it, which the |h| > sqrt(n) floor
            # guarantees; deviation checks are vacuous here.
            return True
        return delta <= self.half_width + 1e-12


def lower_upper_cone(symbol: SphereSymbol, threshold: float | None = None) -> Cone | None:
    """Scan the sphere for a maximal one-signed set with |Omega| >= threshold.

    The default threshold is half the peak magnitude.  Returns the
    direction set with its attained bounds, or None when no direction
    clears the threshold (e.g. the zero symbol).
    """
    if symbol.dim == 1:
        vals = symbol.table
        peak = float(np.max(np.abs(vals)))
        if peak == 0.0:
            return None
        thr = peak / 2.0 if threshold is None else threshold
        thr = max(thr, np.finfo(float).tiny)
        candidates = []
        for sign in (1, -1):
            dirs = [d for d, v in zip((1, -1), vals) if sign * v >= thr]
            if dirs:
                sel = np.array([vals[0 if d == 1 else 1] for d in dirs])
                candidates.append((float(np.min(np.abs(sel))), sign, dirs, sel))
        if not candidates:
            return None
        floor, sign, dirs, sel = max(candidates, key=lambda t: (t[0], t[1]))
        return Cone(1, sign, float(sel.min()), float(sel.max()), floor, tuple(dirs))

    vals = symbol.table
    m = vals.shape[0]
    peak = float(np.max(np.abs(vals)))
    if peak == 0.0:
        return None
    thr = peak / 2.0 if threshold is None else threshold
    best = None
    for sign in (1, -1):
        mask = sign * vals >= thr
        if not mask.any():
            continue
        run_start, run_len = _longest_circular_run(mask)
        idx = (run_start + np.arange(run_len)) % m
        sel = vals[idx]
        floor = float(np.min(np.abs(sel)))
        cand = (run_len, floor, sign, run_start)
        # displace only on a materially better run so the positive branch
        # wins exact symmetry ties deterministically
        if best is None or cand[0] > best[0] or (
            cand[0] == best[0] and cand[1] > best[1] * (1.0 + 1e-9)
        ):
            best = cand
    if best is None:
        return None
    run_len, floor, sign, run_start = best
    step = _TWO_PI / m
    theta_first = run_start * step
    theta_center = theta_first + (run_len - 1) * step / 2.0
    theta_center = math.remainder(theta_center, _TWO_PI)
    half_width = (run_len - 1) * step / 2.0
    if run_len == m:
        half_width = math.pi
    idx = (run_start + np.arange(run_len)) % m
    sel = vals[idx]
    return Cone(
        2, sign, float(sel.min()), float(sel.max()), floor,
        directions=(theta_center - half_width, theta_center + half_width),
        theta_center=theta_center, half_width=half_width,
    )


def _longest_circular_run(mask: np.ndarray) -> tuple[int, int]:
    m = mask.shape[0]
    if mask.all():
        return 0, m
    ext = np.concatenate([mask, mask])
    best_start, best_len, cur_start, cur_len = 0, 0, None, 0
    for i, flag in enumerate(ext):
        if flag:
            if cur_start is None:
                cur_start = i
            cur_len += 1
            if cur_len > best_len and cur_start < m:
                best_start, best_len = cur_start, cur_len
        else:
            cur_start, cur_len = None, 0
    return best_start, min(best_len, m)


def apply_T(kernel: KernelSpec, f: GridFunction, points, exclusion: float | None = None) -> np.ndarray:
    """Evaluate the linear operator at points by midpoint summation.

    Off the support of f this is, exactly, the operator's defining
    integral; inside the support the cell exclusion (default: one source
    cell diameter) realizes a symmetric principal-value truncation whose
    validity rests on the mean-zero cancellation of the midpoint nodes.
    """
    pts = as_points(points, f.domain.dim)
    if exclusion is None:
        exclusion = f.cell_diameter
    if f.support_contains(pts):
        if kernel.alpha == -1.0:
            raise ValueError(
                "hypersingular kernel (alpha = -1): bare operator values are "
                "only defined off the support; use the combined commutator form"
            )
        if kernel.alpha <= 0 and exclusion < f.cell_diameter * (1 - 1e-12):
            raise ValueError("PV truncation under-resolved")
    mask = f.values.ravel() != 0.0
    src = f.centers()[mask]
    fvals = f.values.ravel()[mask]
    raw = _kernels.linear_sum(
        pts, src, fvals, None, None, kernel.symbol.table,
        kernel.symbol.sym_kind, kernel.alpha, float(exclusion),
    )
    return raw * f.cell_volume


def kernel_oscillation(symbol: SphereSymbol, h, z_mode: str = "Linf", n0: int = 64) -> float:
    """Translation-oscillation of the symbol over the unit cube, shifted by h.

    Computes the inner integral over y of |Omega(x - y + h) - Omega(x + h)|
    for x, y in the unit cube centered at the origin, then reduces over x
    with an essential sup ('Linf') or an integral ('L1') at resolution n0.
    Decay of this quantity as |h| grows along a cone is exactly what the
    shift search needs.
    """
    h = as_points(h, symbol.dim)[0]
    hmag = float(np.linalg.norm(h))
    if hmag <= math.sqrt(symbol.dim):
        raise ValueError(f"|h| must exceed sqrt(dim) = {math.sqrt(symbol.dim):.3f}, got {hmag:.3f}")
    if z_mode not in ("Linf", "L1"):
        raise ValueError(f"z_mode must be 'Linf' or 'L1', got {z_mode!r}")
    # Midpoint differences x_i - y_j live on a (2*n0-1)-per-axis lattice,
    # so the symbol is evaluated O(n0^dim) times instead of O(n0^(2 dim)).
    diff_axis = np.arange(-(n0 - 1), n0) / n0
    x_axis = (np.arange(n0) + 0.5) / n0 - 0.5
    if symbol.dim == 1:
        diff_pts = diff_axis[:, None] + h[None, :]
        x_pts = x_axis[:, None] + h[None, :]
        diff_tab = omega_values(diff_pts, symbol.table, symbol.sym_kind)
        shift_tab = omega_values(x_pts, symbol.table, symbol.sym_kind)
    else:
        dxx, dyy = np.meshgrid(diff_axis, diff_axis, indexing="ij")
        diff_pts = np.stack([dxx + h[0], dyy + h[1]], axis=-1)
        xx, yy = np.meshgrid(x_axis, x_axis, indexing="ij")
        x_pts = np.stack([xx + h[0], yy + h[1]], axis=-1)
        diff_tab = omega_values(diff_pts, symbol.table, symbol.sym_kind)
        shift_tab = omega_values(x_pts, symbol.table, symbol.sym_kind)
    mode = 0 if z_mode == "Linf" else 1
    raw = _kernels.osc_reduce(np.ascontiguousarray(diff_tab), np.ascontiguousarray(shift_tab), mode)
    cell = (1.0 / n0) ** symbol.dim
    return raw * cell * (cell if mode == 1 else 1.0)


def lebesgue_point_modulus(symbol: SphereSymbol, direction, r: float) -> float:
    """Normalized spherical average of |Omega(z') - Omega(x')| over a cap.

    The cap has chordal radius r around the given unit direction.  In
    dimension 1 caps of radius below 2 are singletons, so the modulus is
    identically zero there; dimension 2 carries the substance.
    """
    if not 0 < r <= 1:
        raise ValueError(f"cap radius must lie in (0, 1], got {r}")
    if symbol.dim == 1:
        return 0.0
    d = as_points(direction, 2)[0]
    theta0 = math.atan2(d[1], d[0])
    half = 2.0 * math.asin(min(r, 2.0) / 2.0)
    k = 512
    thetas = theta0 + half * (2.0 * (np.arange(k) + 0.5) / k - 1.0)
    center_val = symbol.at_angles(np.array([theta0]))[0]
    return float(np.mean(np.abs(symbol.at_angles(thetas) - center_val)))


def directional_inf_oscillation(
    symbol: SphereSymbol, d: float, direction_set: Sequence, n0: int = 64
) -> float:
    """Min over sampled directions of the L1-mode oscillation at radius d.

    The directions must lie inside a detected cone; rough symbols that
    fail sup-mode decay can still certify through this infimum.
    """
    if d <= math.sqrt(symbol.dim):
        raise ValueError(f"d must exceed sqrt(dim), got {d}")
    dirs = [as_points(v, symbol.dim)[0] for v in direction_set]
    if not dirs:
        raise ValueError("direction set must be nonempty")
    cone = lower_upper_cone(symbol)
    if cone is None:
        raise KernelAdmissibilityError("kernel fails condition (1)")
    for v in dirs:
        if symbol.dim == 1:
            if int(np.sign(v[0])) not in cone.directions:
                raise ValueError(f"direction {v} lies outside the detected cone")
        else:
            dtheta = abs(math.remainder(math.atan2(v[1], v[0]) - cone.theta_center, _TWO_PI))
            if not cone.contains_deviation(dtheta):
                raise ValueError(f"direction {v} lies outside the detected cone")
    return min(kernel_oscillation(symbol, d * v / np.linalg.norm(v), "L1", n0) for v in dirs)


def apply_I2(
    spec: BilinearFractionalSpec,
    f1: GridFunction,
    f2: GridFunction,
    points,
    return_excluded: bool = False,
):
    """Evaluate the bilinear fractional operator by double midpoint summation.

    Cell pairs where both source distances fall below one cell diameter
    are excluded (their count, over contributing nonzero-value pairs, is
    available via ``return_excluded``); for alpha > 0 the kernel is
    locally integrable and the excluded mass vanishes under refinement.
    alpha = 0 requires far-field points.
    """
    pts = as_points(points, spec.dim)
    if f1.domain.dim != spec.dim or f2.domain.dim != spec.dim:
        raise ValueError("dimension mismatch between spec and sources")
    excl = max(f1.cell_diameter, f2.cell_diameter)
    if spec.alpha <= 0 and (f1.support_contains(pts) or f2.support_contains(pts)):
        raise ValueError("alpha = 0 bilinear kernel is not locally integrable; "
                         "evaluate off the supports")
    m1 = f1.values.ravel() != 0.0
    m2 = f2.values.ravel() != 0.0
    if not m1.any() or not m2.any():
        zeros = np.zeros(pts.shape[0])
        return (zeros, np.zeros(pts.shape[0], dtype=np.int64)) if return_excluded else zeros
    out, excluded = _kernels.bilinear_sum(
        pts, None,
        f1.centers()[m1], f1.values.ravel()[m1], None,
        f2.centers()[m2], f2.values.ravel()[m2], None,
        spec.alpha, float(excl), 0,
    )
    out = out * (f1.cell_volume * f2.cell_volume)
    if return_excluded:
        return out, excluded
    return out


def bilinear_kernel_oscillation(
    spec: BilinearFractionalSpec, h: tuple, Q: Cube, n0: int = 24
) -> float:
    """Scale-free center-substitution oscillation of the two-source kernel.

    For shifted source cubes Q_j = Q - side * h^j, computes

        |h|^(2n-alpha) / |Q|^(alpha/n) * sup_{x in Q}
            integral over Q_1 x Q_2 of |K(x,y,z) - K(x, c_{Q_1}, z)|,

    the first source argument being replaced by its cube center.  Decay of
    this quantity as |h| grows certifies the bilinear shift construction.
    Both shifted cubes must be disjoint from Q.
    """
    h1 = as_points(h[0], spec.dim)[0]
    h2 = as_points(h[1], spec.dim)[0]
    q1 = translate(Q, -h1, scale=Q.side)
    q2 = translate(Q, -h2, scale=Q.side)
    for qq in (q1, q2):
        if not qq.disjoint_from(Q):
            raise ValueError("shifted source cubes overlap the evaluation cube")
    n = spec.dim
    expo = 0.5 * (spec.alpha - 2.0 * n)
    xs = _cube_grid(Q, n0)
    ys = _cube_grid(q1, n0)
    zs = _cube_grid(q2, n0)
    c1 = np.asarray(q1.center)
    cellvol = (Q.side / n0) ** n
    sup = 0.0
    for x in xs:
        r1sq = np.sum((ys - x) ** 2, axis=-1)
        rcsq = float(np.sum((c1 - x) ** 2))
        r2sq = np.sum((zs - x) ** 2, axis=-1)
        kern = np.power(r1sq[:, None] + r2sq[None, :], expo)
        kern_c = np.power(rcsq + r2sq, expo)
        val = float(np.sum(np.abs(kern - kern_c[None, :]))) * cellvol * cellvol
        sup = max(sup, val)
    hmag = math.hypot(float(np.linalg.norm(h1)), float(np.linalg.norm(h2)))
    return hmag ** (2 * n - spec.alpha) * Q.volume ** (-spec.alpha / n) * sup


def _cube_grid(cube: Cube, n0: int) -> np.ndarray:
    axes = [cube.lo[a] + (np.arange(n0) + 0.5) * (cube.side / n0) for a in range(cube.dim)]
    if cube.dim == 1:
        return axes[0][:, None]
    xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
    return np.stack([xx.ravel(), yy.ravel()], axis=1)
