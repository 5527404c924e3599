"""Cubes, uniform grids, sampled functions, and midpoint-rule integration.

Two carriers feed every other module: an axis-parallel :class:`Cube` and a
:class:`GridFunction` holding samples at the cell centers of a uniform grid
on a cube.  Samples live at cell centers on purpose: the symmetric midpoint
nodes give exact cancellation for odd integrands, which the principal-value
quadrature downstream relies on.

All values are immutable after construction and every operation is a pure
function, so concurrent reads are safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Cube",
    "GridFunction",
    "dyadic_family",
    "enriched_dyadic_family",
    "translate",
    "dilate",
    "integrate",
    "as_points",
]

# Relative slack for "is this point / cube inside" tests; absorbs float
# noise from repeated center/side arithmetic without letting genuinely
# misaligned geometry slip through.
_REL_TOL = 1e-9


def as_points(points, dim: int) -> np.ndarray:
    """Normalize scalars / sequences / arrays to an (P, dim) float array."""
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    if pts.ndim == 1:
        if dim == 1:
            pts = pts[:, None]
        elif pts.shape[0] == dim:
            pts = pts[None, :]
        else:
            raise ValueError(f"cannot interpret shape {pts.shape} as points in dim {dim}")
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise ValueError(f"expected (P, {dim}) points, got shape {pts.shape}")
    return pts


@dataclass(frozen=True)
class Cube:
    """Axis-parallel cube: dimension in {1, 2}, center, positive side length."""

    dim: int
    center: tuple[float, ...]
    side: float

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if not (self.side > 0 and math.isfinite(self.side)):
            raise ValueError(f"side must be a positive finite real, got {self.side}")
        center = tuple(float(c) for c in self.center)
        if len(center) != self.dim:
            raise ValueError(f"center has {len(center)} coordinates, dim is {self.dim}")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "side", float(self.side))

    @classmethod
    def interval(cls, lo: float, hi: float) -> "Cube":
        return cls(1, ((lo + hi) / 2.0,), hi - lo)

    @classmethod
    def square(cls, center: Sequence[float], side: float) -> "Cube":
        return cls(2, tuple(center), side)

    @property
    def volume(self) -> float:
        return self.side ** self.dim

    @property
    def lo(self) -> np.ndarray:
        return np.asarray(self.center) - self.side / 2.0

    @property
    def hi(self) -> np.ndarray:
        return np.asarray(self.center) + self.side / 2.0

    def contains_point(self, point, tol: float | None = None) -> bool:
        p = as_points(point, self.dim)[0]
        t = self.side * _REL_TOL if tol is None else tol
        return bool(np.all(p >= self.lo - t) and np.all(p <= self.hi + t))

    def contains_cube(self, other: "Cube", tol: float | None = None) -> bool:
        t = self.side * _REL_TOL if tol is None else tol
        return bool(np.all(other.lo >= self.lo - t) and np.all(other.hi <= self.hi + t))

    def disjoint_from(self, other: "Cube") -> bool:
        """True when the closed cubes have no interior overlap."""
        t = _REL_TOL * max(self.side, other.side)
        return bool(np.any(self.lo >= other.hi - t) or np.any(self.hi <= other.lo + t))


def translate(cube: Cube, shift, scale: float = 1.0) -> Cube:
    """Cube with the same side, center shifted by ``scale * shift``."""
    h = as_points(shift, cube.dim)[0]
    new_center = tuple(c + scale * hc for c, hc in zip(cube.center, h))
    return Cube(cube.dim, new_center, cube.side)


def dilate(cube: Cube, factor: float) -> Cube:
    """Concentric cube with side ``factor * side``; factor must be positive."""
    if not factor > 0:
        raise ValueError(f"dilation factor must be positive, got {factor}")
    return Cube(cube.dim, cube.center, factor * cube.side)


def dyadic_family(root: Cube, depth: int) -> list[Cube]:
    """All dyadic subcubes of ``root`` down to ``depth`` halvings.

    Level k contributes the 2**(k*dim) congruent subcubes of side
    ``root.side / 2**k``; levels 0..depth are returned in order, so the
    list realizes a supremum over cubes as a finite maximum.
    """
    if depth < 0:
        raise ValueError(f"depth must be nonnegative, got {depth}")
    out: list[Cube] = []
    lo = root.lo
    for k in range(depth + 1):
        m = 2 ** k
        side = root.side / m
        for flat in range(m ** root.dim):
            if root.dim == 1:
                idx = (flat,)
            else:
                idx = (flat // m, flat % m)
            center = tuple(lo[a] + (idx[a] + 0.5) * side for a in range(root.dim))
            out.append(Cube(root.dim, center, side))
    return out


def enriched_dyadic_family(root: Cube, depth: int) -> list[Cube]:
    """Dyadic family plus half-step translates that stay inside the root.

    Suprema over all cubes are discretized as maxima over this family;
    the half-step translates reduce the bias of a purely dyadic mesh.
    """
    out = dyadic_family(root, depth)
    seen = {(c.center, c.side) for c in out}
    for cube in list(out):
        if cube.side == root.side:
            continue
        shifts = [(0.5,)] if root.dim == 1 else [(0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]
        for sh in shifts:
            cand = translate(cube, sh, scale=cube.side)
            key = (cand.center, cand.side)
            if key not in seen and root.contains_cube(cand):
                seen.add(key)
                out.append(cand)
    return out


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Function sampled at cell centers of a uniform grid on a cube.

    ``values`` has shape ``(n,)`` in dimension 1 and ``(n, n)`` in
    dimension 2 (row index = first coordinate).  The array is frozen on
    construction; derive new functions with :meth:`with_values`.
    """

    domain: Cube
    n: int
    values: np.ndarray

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"resolution must be at least 2, got {self.n}")
        vals = np.asarray(self.values, dtype=float)
        expected = (self.n,) * self.domain.dim
        if vals.shape != expected:
            raise ValueError(f"values shape {vals.shape} != {expected}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("all samples must be finite")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    # -- construction -------------------------------------------------

    @classmethod
    def sample(cls, domain: Cube, n: int, fn: Callable) -> "GridFunction":
        """Sample ``fn`` at cell centers; fn takes one coordinate array per axis."""
        axes = [domain.lo[a] + (np.arange(n) + 0.5) * (domain.side / n)
                for a in range(domain.dim)]
        if domain.dim == 1:
            vals = np.asarray(fn(axes[0]), dtype=float)
        else:
            xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
            vals = np.asarray(fn(xx, yy), dtype=float)
        return cls(domain, n, vals)

    @classmethod
    def indicator(cls, domain: Cube, n: int, support: Cube) -> "GridFunction":
        """Indicator of ``support`` sampled on the grid of ``domain``."""
        base = cls(domain, n, np.zeros((n,) * domain.dim))
        sl = base.cells_in(support)
        vals = np.zeros((n,) * domain.dim)
        vals[sl] = 1.0
        return cls(domain, n, vals)

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.domain, self.n, values)

    # -- grid geometry ------------------------------------------------

    @property
    def cell_size(self) -> float:
        return self.domain.side / self.n

    @property
    def cell_volume(self) -> float:
        return self.cell_size ** self.domain.dim

    @property
    def cell_diameter(self) -> float:
        return math.sqrt(self.domain.dim) * self.cell_size

    def axis_centers(self, axis: int = 0) -> np.ndarray:
        return self.domain.lo[axis] + (np.arange(self.n) + 0.5) * self.cell_size

    def centers(self) -> np.ndarray:
        """All cell centers as a (n**dim, dim) array in C (row-major) order."""
        if self.domain.dim == 1:
            return self.axis_centers(0)[:, None]
        xx, yy = np.meshgrid(self.axis_centers(0), self.axis_centers(1), indexing="ij")
        return np.stack([xx.ravel(), yy.ravel()], axis=1)

    def cells_in(self, cube: Cube) -> tuple[slice, ...]:
        """Per-axis slices of the cells whose centers lie in ``cube``.

        The cube need not align with the grid; selection is half-open per
        axis with a relative tolerance so aligned cubes resolve exactly.
        """
        if cube.dim != self.domain.dim:
            raise ValueError("dimension mismatch")
        h = self.cell_size
        tol = _REL_TOL * self.domain.side
        slices = []
        for a in range(self.domain.dim):
            start = int(math.ceil((cube.lo[a] - self.domain.lo[a] - tol) / h - 0.5))
            stop = int(math.ceil((cube.hi[a] - self.domain.lo[a] - tol) / h - 0.5))
            start = max(start, 0)
            stop = min(stop, self.n)
            if stop <= start:
                raise ValueError(f"cube {cube} covers no grid cells along axis {a}")
            slices.append(slice(start, stop))
        return tuple(slices)

    def restrict(self, cube: Cube, min_cells: int = 1) -> "GridFunction":
        """Sub-grid of the cells covered by ``cube``.

        The returned domain is the exact union of the selected cells (it
        equals ``cube`` whenever the cube aligns with the grid).  Requires
        the same cell count per axis, so only square selections restrict.
        """
        sl = self.cells_in(cube)
        counts = [s.stop - s.start for s in sl]
        if min(counts) < min_cells:
            raise ValueError(
                f"cube {cube} resolves to {counts} cells; need at least {min_cells} per axis"
            )
        if len(set(counts)) != 1:
            raise ValueError(f"anisotropic selection {counts}; restrict needs a square cell block")
        m = counts[0]
        h = self.cell_size
        center = tuple(
            self.domain.lo[a] + (sl[a].start + m / 2.0) * h for a in range(self.domain.dim)
        )
        return GridFunction(Cube(self.domain.dim, center, m * h), m, self.values[sl])

    def values_at(self, points) -> np.ndarray:
        """Sample values at arbitrary points by nearest-cell lookup."""
        pts = as_points(points, self.domain.dim)
        tol = _REL_TOL * self.domain.side
        lo, hi = self.domain.lo, self.domain.hi
        if np.any(pts < lo - tol) or np.any(pts > hi + tol):
            raise ValueError(
                "point outside sampled domain "
                f"[{lo}, {hi}]; enlarge the grid to cover {pts.min(axis=0)}..{pts.max(axis=0)}"
            )
        idx = np.clip(((pts - lo) / self.cell_size).astype(int), 0, self.n - 1)
        if self.domain.dim == 1:
            return self.values[idx[:, 0]]
        return self.values[idx[:, 0], idx[:, 1]]

    def integrate(self) -> float:
        return float(self.values.sum() * self.cell_volume)

    def support_contains(self, points) -> bool:
        """True when any point lies in the bounding box of the nonzero cells."""
        mask = self.values != 0.0
        if not mask.any():
            return False
        pts = as_points(points, self.domain.dim)
        idx = np.nonzero(mask)
        h = self.cell_size
        tol = _REL_TOL * self.domain.side
        for a in range(self.domain.dim):
            lo_a = self.domain.lo[a] + idx[a].min() * h
            hi_a = self.domain.lo[a] + (idx[a].max() + 1) * h
            pts = pts[(pts[:, a] >= lo_a - tol) & (pts[:, a] <= hi_a + tol)]
            if pts.shape[0] == 0:
                return False
        return True


def integrate(f: GridFunction) -> float:
    """Midpoint-rule integral: sum of samples times cell volume."""
    return f.integrate()
