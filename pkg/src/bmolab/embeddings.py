"""Product-embedding checks for the auxiliary space pairs.

Two pointwise-product inequalities back the norm-level pipeline when the
auxiliary space is L^1: a Lorentz pair (exponents shifted by the harmonic
offset 1/p~ = 1 + 1/p, 1/q~ = 1 + 1/q) and a Morrey pair (lam~ = lam - n).
Both rest on indicator-norm identities, checked here against their closed
forms with the exact Lorentz indicator constant divided out.
"""

from __future__ import annotations

import math
from typing import Sequence

from .geometry import Cube, GridFunction
from .spaces import SpaceSpec, norm

__all__ = ["lorentz_product_check", "morrey_product_check", "indicator_norm_check"]


def _harmonic_shift(p: float) -> float:
    """p~ with 1/p~ = 1 + 1/p (p = inf gives p~ = 1)."""
    return 1.0 if math.isinf(p) else p / (p + 1.0)


def lorentz_product_check(
    f: GridFunction, g: GridFunction, p: float, q: float
) -> tuple[float, float]:
    """(lhs, rhs) of the Lorentz product embedding.

    lhs = ||f g|| in Lorentz(p~, q~); rhs = ||f|| in Lorentz(1, 1) times
    ||g|| in Lorentz(p, q).  The embedding asserts lhs <= C * rhs with C
    independent of the pair.
    """
    if f.domain != g.domain or f.n != g.n:
        raise ValueError("product check requires a common grid")
    pt, qt = _harmonic_shift(p), _harmonic_shift(q)
    product = f.with_values(f.values * g.values)
    lhs = norm(product, SpaceSpec.lorentz(pt, qt))
    rhs = norm(f, SpaceSpec.lorentz(1.0, 1.0)) * norm(g, SpaceSpec.lorentz(p, q))
    return lhs, rhs


def morrey_product_check(
    f: GridFunction,
    g: GridFunction,
    p: float,
    lam: float,
    family: Sequence[Cube],
) -> tuple[float, float]:
    """(lhs, rhs) of the Morrey product embedding over a cube family.

    lhs = ||f g|| in Morrey(p~, lam - n); rhs = ||f|| in Morrey(p, lam)
    times the L^1 norm of g.
    """
    dim = f.domain.dim
    if not (-dim / p <= lam < 0):
        raise ValueError(f"need -dim/p <= lam < 0, got lam={lam} at p={p}")
    if f.domain != g.domain or f.n != g.n:
        raise ValueError("product check requires a common grid")
    pt = _harmonic_shift(p)
    lam_t = lam - dim
    product = f.with_values(f.values * g.values)
    lhs = norm(product, SpaceSpec.morrey(pt, lam_t), family)
    rhs = norm(f, SpaceSpec.morrey(p, lam), family) * norm(g, SpaceSpec.lebesgue(1.0))
    return lhs, rhs


def indicator_norm_check(
    spec: SpaceSpec, cube: Cube, n: int = 1024
) -> tuple[float, float]:
    """Computed indicator norm against its closed form.

    The indicator is sampled on the doubled cube so the zero region
    participates in the rearrangement.  For Lorentz specs the exact
    indicator constant (p/q)^(1/q) is divided out of the computed value,
    so both returned numbers target |Q|^(1/p) (Morrey: |Q|^(-lam/n)).
    """
    if spec.kind == "weighted":
        raise ValueError("indicator check covers unweighted specs only")
    domain = Cube(cube.dim, cube.center, 2.0 * cube.side)
    chi = GridFunction.indicator(domain, n, cube)
    family = [cube] if spec.kind == "morrey" else None
    computed = norm(chi, spec, family)
    if spec.kind == "lorentz" and not math.isinf(spec.p) and not math.isinf(spec.q):
        computed /= (spec.p / spec.q) ** (1.0 / spec.q)
    if spec.kind == "morrey":
        closed = cube.volume ** (-spec.lam / cube.dim)
    else:
        closed = 1.0 if math.isinf(spec.p) else cube.volume ** (1.0 / spec.p)
    return computed, closed
