"""Weight functions with Muckenhoupt / doubling constant estimators.

Weights come in two forms: a closed-form power |x - c|^a and a sampled
positive grid function.  One-dimensional power averages use exact
antiderivatives because the cubes touching the singularity dominate every
Muckenhoupt supremum and need exact treatment; divergent integrals are
reported as ``inf`` rather than silently truncated.  All constants are
certified only on the finite cube family supplied by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import Cube, GridFunction, as_points, dilate

__all__ = [
    "Weight",
    "DoublingResult",
    "ap_constant",
    "apq_constant",
    "doubling_constant",
    "product_weight",
    "bloom_inequality_check",
]

_QUAD_1D = 4096   # midpoint nodes for non-closed-form 1-d integrals
_QUAD_2D = 128    # midpoint nodes per axis in dimension 2


@dataclass(frozen=True)
class Weight:
    """Positive weight: power form |x - center|^exponent, or sampled."""

    form: str
    exponent: float = 0.0
    center: tuple[float, ...] = (0.0,)
    grid: Optional[GridFunction] = None

    def __post_init__(self):
        if self.form not in ("power", "sampled"):
            raise ValueError(f"unknown weight form {self.form!r}")
        if self.form == "sampled":
            if self.grid is None:
                raise ValueError("sampled weight requires a grid function")
            if np.any(self.grid.values <= 0):
                raise ValueError("sampled weight must be strictly positive")
        else:
            object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @classmethod
    def power(cls, exponent: float, center=0.0) -> "Weight":
        c = (center,) if np.isscalar(center) else tuple(center)
        return cls("power", exponent=float(exponent), center=c)

    @classmethod
    def sampled(cls, grid: GridFunction) -> "Weight":
        return cls("sampled", grid=grid)

    @classmethod
    def one(cls, dim: int = 1) -> "Weight":
        return cls.power(0.0, (0.0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.center) if self.form == "power" else self.grid.domain.dim

    def __call__(self, points) -> np.ndarray:
        pts = as_points(points, self.dim)
        if self.form == "sampled":
            return self.grid.values_at(pts)
        r = np.sqrt(np.sum((pts - np.asarray(self.center)) ** 2, axis=-1))
        with np.errstate(divide="ignore"):
            return np.power(r, self.exponent)

    def pow(self, e: float) -> "Weight":
        """Pointwise power of the weight (exact on the power form)."""
        if self.form == "power":
            return Weight.power(self.exponent * e, self.center)
        return Weight.sampled(self.grid.with_values(self.grid.values ** e))

    def integral(self, cube: Cube) -> float:
        """Integral over the cube; ``inf`` when genuinely divergent."""
        if self.form == "sampled":
            sl = self.grid.cells_in(cube)
            return float(self.grid.values[sl].sum()) * self.grid.cell_volume
        a = self.exponent
        if self.dim == 1:
            return _power_integral_1d(a, cube.lo[0] - self.center[0], cube.hi[0] - self.center[0])
        if a <= -2.0 and cube.contains_point(self.center):
            return math.inf
        axes = [cube.lo[k] + (np.arange(_QUAD_2D) + 0.5) * (cube.side / _QUAD_2D)
                for k in range(2)]
        xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
        r = np.hypot(xx - self.center[0], yy - self.center[1])
        with np.errstate(divide="ignore"):
            vals = np.power(r, a)
        return float(vals.sum()) * (cube.side / _QUAD_2D) ** 2

    def average(self, cube: Cube) -> float:
        if self.form == "sampled":
            sl = self.grid.cells_in(cube)
            return float(self.grid.values[sl].mean())
        return self.integral(cube) / cube.volume


def _power_integral_1d(a: float, u1: float, u2: float) -> float:
    """Exact integral of |u|^a over [u1, u2] (u1 < u2)."""
    if u1 > u2:
        u1, u2 = u2, u1
    if a <= -1.0 and u1 <= 0.0 <= u2:
        return math.inf
    if a == -1.0:
        return abs(math.log(abs(u2)) - math.log(abs(u1)))

    def F(u: float) -> float:
        return math.copysign(abs(u) ** (a + 1.0), u) / (a + 1.0)

    return F(u2) - F(u1)


def ap_constant(w: Weight, p: float, family: Sequence[Cube]) -> float:
    """Muckenhoupt A_p constant over a cube family.

    Per cube: (average of w) * (average of w^(1-p'))^(p-1) with
    p' = p/(p-1); the returned value is the family maximum.  Always >= 1
    by Jensen, with equality only for (essentially) constant weights.
    """
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    if not family:
        raise ValueError("cube family must be nonempty")
    p_conj = p / (p - 1.0)
    dual = w.pow(1.0 - p_conj)
    best = 0.0
    for cube in family:
        m1 = w.average(cube)
        m2 = dual.average(cube)
        best = max(best, m1 * m2 ** (p - 1.0))
    return best


def apq_constant(w: Weight, p: float, q: float, family: Sequence[Cube]) -> float:
    """Fractional-exponent weight constant over a cube family.

    Per cube: (average of w^q)^(1/q) * (average of w^(-p'))^(1/p').
    Adopted in the standard two-exponent form (the q-th power of the
    weight averaged against the dual -p' power), consistent with weighted
    fractional-integral boundedness statements.
    """
    if not (1 < p <= q) or math.isinf(q):
        raise ValueError(f"need 1 < p <= q < inf, got p={p}, q={q}")
    p_conj = p / (p - 1.0)
    wq = w.pow(q)
    dual = w.pow(-p_conj)
    best = 0.0
    for cube in family:
        m1 = wq.average(cube) ** (1.0 / q)
        m2 = dual.average(cube) ** (1.0 / p_conj)
        best = max(best, m1 * m2)
    return best


@dataclass(frozen=True)
class DoublingResult:
    """Family doubling constant plus the pairs that could not be tested."""

    constant: float
    pairs: tuple
    skipped: tuple

    def __float__(self) -> float:
        return self.constant


def doubling_constant(w: Weight, family: Sequence[Cube]) -> DoublingResult:
    """Max of w(2Q)/w(Q) over the family, pairing each cube with its double.

    Pairs whose doubled cube exceeds a sampled weight's domain are
    skipped and reported in the result metadata, so every claim stays
    scoped to the certified family.
    """
    pairs = []
    skipped = []
    for cube in family:
        double = dilate(cube, 2.0)
        if w.form == "sampled" and not w.grid.domain.contains_cube(double):
            skipped.append(cube)
            continue
        ratio = w.integral(double) / w.integral(cube)
        pairs.append((cube, ratio))
    if not pairs:
        raise ValueError("no testable doubling pairs in the family")
    constant = max(r for _, r in pairs)
    return DoublingResult(constant, tuple(pairs), tuple(skipped))


def product_weight(weights: Sequence[Weight], exponents: Sequence[float]) -> Weight:
    """Pointwise product of weight powers.

    Same-center power inputs combine exactly into a single power; any
    sampled input forces evaluation on the (single, shared) grid.
    """
    if len(weights) != len(exponents):
        raise ValueError("weights and exponents must have the same length")
    if not weights:
        raise ValueError("need at least one weight")
    if all(w.form == "power" for w in weights):
        centers = {w.center for w in weights}
        if len(centers) == 1:
            a = sum(w.exponent * e for w, e in zip(weights, exponents))
            return Weight.power(a, weights[0].center)
        raise ValueError("power weights with different centers: sample them on a grid first")
    grids = [w.grid for w in weights if w.form == "sampled"]
    ref = grids[0]
    for g in grids[1:]:
        if g.domain != ref.domain or g.n != ref.n:
            raise ValueError("grid mismatch among sampled weights")
    pts = ref.centers()
    vals = np.ones(pts.shape[0])
    for w, e in zip(weights, exponents):
        vals = vals * w(pts) ** e
    return Weight.sampled(ref.with_values(vals.reshape(ref.values.shape)))


def bloom_inequality_check(omega: Weight, lam: Weight, p: float, cube: Cube) -> tuple[float, float]:
    """Two sides of the indicator inequality behind two-weight symbol spaces.

    Returns (lhs, rhs) with lhs = |Q| * omega(Q)^(1/p) and
    rhs = lam(Q)^(1/p) * mu(Q), where mu is the measure of (omega/lam)^(1/p).
    For omega, lam with finite A_p constants the ratio lhs/rhs stays
    bounded over a cube family.
    """
    if not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    lhs = cube.volume * omega.integral(cube) ** (1.0 / p)
    if omega.form == "power" and lam.form == "power" and omega.center == lam.center:
        mu = Weight.power((omega.exponent - lam.exponent) / p, omega.center)
        mu_q = mu.integral(cube)
    else:
        mu_q = _ratio_power_integral(omega, lam, 1.0 / p, cube)
    rhs = lam.integral(cube) ** (1.0 / p) * mu_q
    return lhs, rhs


def _ratio_power_integral(omega: Weight, lam: Weight, e: float, cube: Cube) -> float:
    dim = cube.dim
    k = _QUAD_1D if dim == 1 else _QUAD_2D
    axes = [cube.lo[a] + (np.arange(k) + 0.5) * (cube.side / k) for a in range(dim)]
    if dim == 1:
        pts = axes[0][:, None]
    else:
        xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
        pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
    vals = (omega(pts) / lam(pts)) ** e
    return float(vals.sum()) * (cube.side / k) ** dim
