"""Norms and cube functionals: Lebesgue, weak, Lorentz, Morrey, weighted,
mean-oscillation (BMO-type) seminorms, the Lipschitz modulus, and the
L log L weak-type functional.

Suprema over cubes are always discretized as maxima over an explicit cube
family; evaluation is deterministic (fixed reduction order).  The Lorentz
integral over dt/t is evaluated in closed form on the piecewise-constant
rearrangement profile so it introduces no second quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import Cube, GridFunction
from .weights import Weight

__all__ = [
    "SpaceSpec",
    "MuFunctional",
    "RearrangedProfile",
    "decreasing_rearrangement",
    "norm",
    "indicator_norm",
    "quasi_triangle_constant",
    "mean_oscillation",
    "bmo_mu_norm",
    "lipschitz_seminorm",
    "orlicz_weak_ratio",
]

_KINDS = ("lebesgue", "weak", "lorentz", "morrey", "weighted")


@dataclass(frozen=True)
class SpaceSpec:
    """Tagged description of a function-space norm.

    kinds: lebesgue(p), weak(p) = Lorentz(p, inf), lorentz(p, q),
    morrey(p, lam) with -dim/p <= lam < 0, weighted(p, weight).
    Exponents may be ``inf``; p = q = inf reduces to the essential sup.
    """

    kind: str
    p: float
    q: float | None = None
    lam: float | None = None
    weight: Optional[Weight] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        if not self.p > 0:
            raise ValueError(f"p must be positive, got {self.p}")
        if self.kind == "lorentz":
            if self.q is None or not self.q > 0:
                raise ValueError("lorentz requires q > 0")
            if math.isinf(self.p) and not math.isinf(self.q):
                raise ValueError("Lorentz(inf, q) with finite q is the trivial space")
        if self.kind == "morrey":
            if self.lam is None or not self.lam < 0:
                raise ValueError("morrey requires lam < 0")
        if self.kind == "weighted" and self.weight is None:
            raise ValueError("weighted requires a weight")

    @classmethod
    def lebesgue(cls, p: float) -> "SpaceSpec":
        return cls("lebesgue", float(p))

    @classmethod
    def weak(cls, p: float) -> "SpaceSpec":
        return cls("weak", float(p))

    @classmethod
    def lorentz(cls, p: float, q: float) -> "SpaceSpec":
        return cls("lorentz", float(p), q=float(q))

    @classmethod
    def morrey(cls, p: float, lam: float, dim: int | None = None) -> "SpaceSpec":
        spec = cls("morrey", float(p), lam=float(lam))
        if dim is not None and lam < -dim / p:
            raise ValueError(f"morrey needs -dim/p <= lam < 0, got lam={lam}")
        return spec

    @classmethod
    def weighted(cls, p: float, weight: Weight) -> "SpaceSpec":
        return cls("weighted", float(p), weight=weight)

    def describe(self) -> str:
        if self.kind == "lebesgue":
            return f"L^{self.p:g}"
        if self.kind == "weak":
            return f"L^{self.p:g},inf"
        if self.kind == "lorentz":
            return f"L^{self.p:g},{self.q:g}"
        if self.kind == "morrey":
            return f"M^{self.p:g},{self.lam:g}"
        return f"L^{self.p:g}(w)"


@dataclass(frozen=True)
class MuFunctional:
    """Positive cube functional normalizing the mean oscillation.

    lebesgue: |Q|; lip(beta): |Q|^(1+beta/n); weighted_lip(beta, w):
    (integral of w over Q)^(1+beta/n).  beta = 0 in the weighted form
    gives the plain weight measure used by two-weight symbol spaces.
    """

    kind: str
    beta: float = 0.0
    weight: Optional[Weight] = None

    def __post_init__(self):
        if self.kind not in ("lebesgue", "lip", "weighted_lip"):
            raise ValueError(f"unknown mu kind {self.kind!r}")
        if self.kind == "lip" and not 0 < self.beta <= 1:
            raise ValueError("lip requires beta in (0, 1]")
        if self.kind == "weighted_lip":
            if not 0 <= self.beta <= 1:
                raise ValueError("weighted_lip requires beta in [0, 1]")
            if self.weight is None:
                raise ValueError("weighted_lip requires a weight")

    @classmethod
    def lebesgue(cls) -> "MuFunctional":
        return cls("lebesgue")

    @classmethod
    def lip(cls, beta: float) -> "MuFunctional":
        return cls("lip", beta=float(beta))

    @classmethod
    def weighted_lip(cls, beta: float, weight: Weight) -> "MuFunctional":
        return cls("weighted_lip", beta=float(beta), weight=weight)

    def evaluate(self, cube: Cube, effective_volume: float | None = None) -> float:
        vol = cube.volume if effective_volume is None else effective_volume
        n = cube.dim
        if self.kind == "lebesgue":
            return vol
        if self.kind == "lip":
            return vol ** (1.0 + self.beta / n)
        wq = self.weight.integral(cube)
        return wq ** (1.0 + self.beta / n)


@dataclass(frozen=True)
class RearrangedProfile:
    """Decreasing rearrangement as (value, measure) blocks.

    Values are nonincreasing and each block carries one grid-cell measure;
    total measure equals the domain volume.
    """

    values: np.ndarray
    measures: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        m = np.asarray(self.measures, dtype=float)
        if v.shape != m.shape or v.ndim != 1:
            raise ValueError("values and measures must be matching 1-d arrays")
        if np.any(np.diff(v) > 1e-12 * max(1.0, abs(float(v[0])) if v.size else 1.0)):
            raise ValueError("values must be nonincreasing")
        if np.any(m <= 0):
            raise ValueError("measures must be positive")
        for arr, name in ((v, "values"), (m, "measures")):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def total_measure(self) -> float:
        return float(self.measures.sum())

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.measures)

    def value_at(self, t: float) -> float:
        """f*(t): value of the block containing t (right-continuous at 0)."""
        if t < 0:
            raise ValueError("t must be nonnegative")
        cum = self.cumulative()
        if t >= cum[-1]:
            return 0.0
        idx = int(np.searchsorted(cum, t, side="right"))
        return float(self.values[idx])


def decreasing_rearrangement(f: GridFunction) -> RearrangedProfile:
    """Sort |samples| descending, each block carrying one cell measure."""
    vals = np.sort(np.abs(f.values.ravel()))[::-1]
    measures = np.full(vals.shape, f.cell_volume)
    return RearrangedProfile(vals, measures)


def _lorentz_from_profile(profile: RearrangedProfile, p: float, q: float) -> float:
    v = profile.values
    if v.size == 0 or v[0] == 0.0:
        return 0.0
    cum = profile.cumulative()
    if math.isinf(p):
        return float(v[0])
    if math.isinf(q):
        # sup over t of t^(1/p) f*(t); attained at right block endpoints
        return float(np.max(v * cum ** (1.0 / p)))
    prev = np.concatenate([[0.0], cum[:-1]])
    expo = q / p
    blocks = np.where(v > 0, v ** q, 0.0) * (p / q) * (cum ** expo - prev ** expo)
    return float(np.sum(blocks) ** (1.0 / q))


def norm(f: GridFunction, spec: SpaceSpec, cube_family: Sequence[Cube] | None = None) -> float:
    """Evaluate the norm of a sampled function under ``spec``.

    Morrey norms need an explicit cube family (the discretized supremum);
    all other kinds ignore it.  Cubes are resolved through the cells whose
    centers they cover, so aligned families evaluate exactly.
    """
    vals = f.values.ravel()
    vol = f.cell_volume
    if spec.kind == "lebesgue":
        if math.isinf(spec.p):
            return float(np.max(np.abs(vals))) if vals.size else 0.0
        return float(np.sum(np.abs(vals) ** spec.p) * vol) ** (1.0 / spec.p)
    if spec.kind == "weighted":
        w = spec.weight(f.centers())
        if math.isinf(spec.p):
            return float(np.max(np.abs(vals)))
        return float(np.sum(np.abs(vals) ** spec.p * w) * vol) ** (1.0 / spec.p)
    if spec.kind in ("weak", "lorentz"):
        q = math.inf if spec.kind == "weak" else spec.q
        return _lorentz_from_profile(decreasing_rearrangement(f), spec.p, q)
    # Morrey
    if not cube_family:
        raise ValueError("cube family required")
    n = f.domain.dim
    best = 0.0
    for cube in cube_family:
        sl = f.cells_in(cube)
        sub = np.abs(f.values[sl])
        measure = sub.size * vol
        if math.isinf(spec.p):
            local = float(sub.max()) if sub.size else 0.0
        else:
            local = float(np.mean(sub ** spec.p)) ** (1.0 / spec.p)
        best = max(best, measure ** (-spec.lam / n) * local)
    return best


def indicator_norm(spec: SpaceSpec, cube: Cube) -> float:
    """Closed-form norm of a cube indicator.

    Lebesgue/weak: |Q|^(1/p); Lorentz: (p/q)^(1/q) |Q|^(1/p);
    Morrey: |Q|^(-lam/n); weighted: (integral of w over Q)^(1/p).
    """
    v = cube.volume
    if spec.kind in ("lebesgue", "weak"):
        return 1.0 if math.isinf(spec.p) else v ** (1.0 / spec.p)
    if spec.kind == "lorentz":
        if math.isinf(spec.p):
            return 1.0
        const = 1.0 if math.isinf(spec.q) else (spec.p / spec.q) ** (1.0 / spec.q)
        return const * v ** (1.0 / spec.p)
    if spec.kind == "morrey":
        return v ** (-spec.lam / cube.dim)
    wq = spec.weight.integral(cube)
    return 1.0 if math.isinf(spec.p) else wq ** (1.0 / spec.p)


def quasi_triangle_constant(spec: SpaceSpec) -> float:
    """Constant K with ||u + v|| <= K (||u|| + ||v||), recorded per kind.

    Lebesgue/weighted/Morrey: max(1, 2^(1/p - 1)).  Lorentz and weak:
    2^(1/p) from the rearrangement halving, times the L^q(dt/t) factor
    when q < 1.  These feed the certificate constant chain.
    """
    p = spec.p
    if spec.kind in ("lebesgue", "weighted", "morrey"):
        return max(1.0, 2.0 ** (1.0 / p - 1.0)) if not math.isinf(p) else 1.0
    q = math.inf if spec.kind == "weak" else spec.q
    base = 1.0 if math.isinf(p) else 2.0 ** (1.0 / p)
    extra = 1.0 if math.isinf(q) or q >= 1 else 2.0 ** (1.0 / q - 1.0)
    return base * extra


def mean_oscillation(b: GridFunction, cube: Cube) -> float:
    """Average deviation from the cube mean: |Q|^-1 * integral of |b - b_Q|.

    The cube must resolve to at least two grid cells per axis.
    """
    sl = b.cells_in(cube)
    for s in sl:
        if s.stop - s.start < 2:
            raise ValueError(f"cube {cube} resolves to fewer than 2 cells per axis")
    sub = b.values[sl]
    return float(np.mean(np.abs(sub - sub.mean())))


def bmo_mu_norm(b: GridFunction, mu: MuFunctional, family: Sequence[Cube]) -> float:
    """Max over the family of (1 / mu(Q)) * integral over Q of |b - b_Q|.

    With the Lebesgue functional this is the discretized BMO norm; with
    lip(beta) it is the mean-oscillation form of the Lipschitz seminorm.
    """
    if not family:
        raise ValueError("cube family must be nonempty")
    vol = b.cell_volume
    best = 0.0
    for cube in family:
        sl = b.cells_in(cube)
        sub = b.values[sl]
        if min(s.stop - s.start for s in sl) < 2:
            continue
        integral = float(np.sum(np.abs(sub - sub.mean()))) * vol
        best = max(best, integral / mu.evaluate(cube, effective_volume=sub.size * vol))
    return best


def lipschitz_seminorm(b: GridFunction, beta: float, max_points: int = 1024) -> float:
    """Direct Hoelder modulus: max |b(x)-b(y)| / |x-y|^beta over sampled pairs.

    The grid is strided down to at most ``max_points`` cells per call, so
    this is a certified lower bound of the full pairwise maximum; it
    cross-checks the mean-oscillation route at a fixed comparability.
    """
    if not 0 < beta <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    pts = b.centers()
    vals = b.values.ravel()
    total = pts.shape[0]
    if total > max_points:
        stride = int(math.ceil(total / max_points))
        pts = pts[::stride]
        vals = vals[::stride]
    diff = np.abs(vals[:, None] - vals[None, :])
    dist = np.sqrt(np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1))
    mask = dist > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(mask, diff / dist ** beta, 0.0)
    return float(ratios.max())


def orlicz_weak_ratio(
    g: GridFunction, f: GridFunction, lam: float, omega: Weight
) -> tuple[float, float]:
    """Level-set mass of g against the L log L modular of f, both w.r.t. omega.

    Returns (lhs, rhs) with lhs = omega-measure of {|g| > lam} and
    rhs = integral of Phi(|f| / lam) omega, Phi(t) = t (1 + log+ t).
    """
    if not lam > 0:
        raise ValueError("level lam must be positive")
    wg = omega(g.centers())
    lhs = float(np.sum(wg[np.abs(g.values.ravel()) > lam]) * g.cell_volume)
    t = np.abs(f.values.ravel()) / lam
    phi = t * (1.0 + np.where(t > 1.0, np.log(np.maximum(t, 1.0)), 0.0))
    rhs = float(np.sum(phi * omega(f.centers())) * f.cell_volume)
    return lhs, rhs
