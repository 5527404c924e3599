"""Commutators of multiplication symbols with the integral operators.

The combined-kernel form integrates (b(x) - b(y)) against the kernel in
one pass and is the default: the symbol difference tempers the kernel
singularity, so near-field values stay meaningful even where the bare
operator does not exist (hypersingular exponents included).  The
decomposed form b*T(f) - T(b*f) is kept for far-field cross-checks; the
two agree identically off the source support.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels
from .geometry import GridFunction, as_points
from .operators import BilinearFractionalSpec, KernelSpec, apply_T

__all__ = ["CommutatorTask", "commutator_apply", "bilinear_commutator_apply"]


@dataclass(frozen=True)
class CommutatorTask:
    """Symbol, kernel, and evaluation form for one commutator.

    ``slot`` selects which source argument carries the symbol in the
    bilinear case.  The symbol's grid must cover both the source cubes and
    every evaluation point.
    """

    symbol_b: GridFunction
    kernel: Union[KernelSpec, BilinearFractionalSpec]
    slot: int = 1
    form: str = "combined"

    def __post_init__(self):
        if self.form not in ("combined", "decomposed"):
            raise ValueError(f"unknown form {self.form!r}")
        if self.slot not in (1, 2):
            raise ValueError(f"slot must be 1 or 2, got {self.slot}")

    @property
    def is_bilinear(self) -> bool:
        return isinstance(self.kernel, BilinearFractionalSpec)


def commutator_apply(
    task: CommutatorTask, f: GridFunction, points, exclusion: float | None = None
) -> np.ndarray:
    """Pointwise values of the linear commutator at the given points.

    Combined form: midpoint sum of (b(x) - b(y)) Omega((x-y)') |x-y|^(alpha-n) f(y)
    with cells inside the exclusion radius dropped (default: one source
    cell diameter, recorded so resolution studies can replay it).
    Decomposed form requires far-field points whenever alpha <= 0.
    """
    if task.is_bilinear:
        raise ValueError("task holds a bilinear kernel; use bilinear_commutator_apply")
    kernel: KernelSpec = task.kernel
    pts = as_points(points, f.domain.dim)
    b = task.symbol_b
    if exclusion is None:
        exclusion = f.cell_diameter
    if task.form == "decomposed":
        if kernel.alpha <= 0 and f.support_contains(pts):
            raise ValueError(
                "decomposed form is undefined near the support for alpha <= 0; "
                "use the combined-kernel form"
            )
        b_pts = b.values_at(pts)
        b_on_f = b.values_at(f.centers()).reshape(f.values.shape)
        tf = apply_T(kernel, f, pts, exclusion)
        tbf = apply_T(kernel, f.with_values(b_on_f * f.values), pts, exclusion)
        return b_pts * tf - tbf
    mask = f.values.ravel() != 0.0
    src = f.centers()[mask]
    fvals = f.values.ravel()[mask]
    b_pts = b.values_at(pts)
    b_src = b.values_at(src) if src.shape[0] else np.zeros(0)
    raw = _kernels.linear_sum(
        pts, src, fvals, b_pts, b_src, kernel.symbol.table,
        kernel.symbol.sym_kind, kernel.alpha, float(exclusion),
    )
    return raw * f.cell_volume


def bilinear_commutator_apply(
    task: CommutatorTask,
    f1: GridFunction,
    f2: GridFunction,
    points,
    exclusion: float | None = None,
    return_excluded: bool = False,
):
    """Pointwise values of the slot-i bilinear commutator.

    Combined-kernel double sum with factor (b(x) - b(y_i)) against the
    radial kernel; diagonal cell pairs with both distances below one cell
    diameter are dropped and counted, same convention as the bare
    bilinear operator.  Counts refer to contributing (nonzero-value)
    cell pairs.
    """
    if not task.is_bilinear:
        raise ValueError("task holds a linear kernel; use commutator_apply")
    spec: BilinearFractionalSpec = task.kernel
    pts = as_points(points, spec.dim)
    b = task.symbol_b
    if exclusion is None:
        exclusion = max(f1.cell_diameter, f2.cell_diameter)
    b_pts = b.values_at(pts)
    # zero-valued source cells contribute nothing; dropping them keeps the
    # double sum proportional to the actual supports
    m1 = f1.values.ravel() != 0.0
    m2 = f2.values.ravel() != 0.0
    c1 = f1.centers()[m1]
    c2 = f2.centers()[m2]
    v1 = f1.values.ravel()[m1]
    v2 = f2.values.ravel()[m2]
    b1 = b.values_at(c1) if task.slot == 1 and c1.shape[0] else None
    b2 = b.values_at(c2) if task.slot == 2 and c2.shape[0] else None
    if c1.shape[0] == 0 or c2.shape[0] == 0:
        zeros = np.zeros(pts.shape[0])
        return (zeros, np.zeros(pts.shape[0], dtype=np.int64)) if return_excluded else zeros
    out, excluded = _kernels.bilinear_sum(
        pts, b_pts, c1, v1, b1, c2, v2, b2,
        spec.alpha, float(exclusion), task.slot,
    )
    out = out * (f1.cell_volume * f2.cell_volume)
    if return_excluded:
        return out, excluded
    return out
