import numpy as np
import pytest

from bmolab import Cube, GridFunction, KernelSpec, SphereSymbol


@pytest.fixture
def unit_interval():
    return Cube.interval(-1.0, 1.0)


@pytest.fixture
def hilbert_kernel():
    """Odd sign symbol with the Cauchy-type exponent."""
    return KernelSpec(SphereSymbol.sign(), 0.0)


def aligned_domain(q1: Cube, shift_cells: int, cells_per_side: int = 128) -> Cube:
    """Domain covering q1 and its window q1 + shift, cell-aligned to q1.

    Grid cells have size q1.side / cells_per_side; the domain starts one
    q1-side below q1 and extends shift_cells + 2 sides above it, so every
    dyadic object in the tests lands exactly on cell boundaries.
    """
    cell = q1.side / cells_per_side
    n = (shift_cells + 3) * cells_per_side
    lo = q1.lo - q1.side
    if q1.dim == 1:
        return Cube.interval(float(lo[0]), float(lo[0]) + n * cell), n
    return Cube(2, tuple(float(c) + n * cell / 2 for c in lo), n * cell), n


def sample_log_abs(domain: Cube, n: int) -> GridFunction:
    if domain.dim == 1:
        return GridFunction.sample(domain, n, lambda x: np.log(np.abs(x)))
    return GridFunction.sample(domain, n, lambda x, y: 0.5 * np.log(x * x + y * y))
