"""NumPy implementations of the hot inner-loop kernels.

These are the reference semantics; the optional Cython core in
``_core.pyx`` mirrors them exactly and is preferred at import time when
available.  All functions return raw sums over source cells -- callers
apply cell-volume scaling.
"""

from __future__ import annotations

import numpy as np

SYM_PAIR = 0          # dim 1: table = [value at +1, value at -1]
SYM_TABLE_LINEAR = 1  # dim 2: equispaced angle table, periodic linear interp
SYM_TABLE_NEAREST = 2  # dim 2: equispaced angle table, nearest neighbor

_TWO_PI = 2.0 * np.pi

# Chunk sizes keep peak temporaries around a few tens of MB.
_POINT_CHUNK_ELEMS = 4_000_000


def omega_values(dx: np.ndarray, symtab: np.ndarray, sym_kind: int) -> np.ndarray:
    """Evaluate a degree-zero homogeneous symbol at direction(s) ``dx``.

    ``dx`` has shape (..., dim); the value depends only on dx/|dx|.
    """
    if sym_kind == SYM_PAIR:
        x = dx[..., 0]
        plus, minus = float(symtab[0]), float(symtab[1])
        return np.where(x > 0, plus, np.where(x < 0, minus, 0.5 * (plus + minus)))
    theta = np.mod(np.arctan2(dx[..., 1], dx[..., 0]), _TWO_PI)
    m = symtab.shape[0]
    pos = theta * (m / _TWO_PI)
    if sym_kind == SYM_TABLE_NEAREST:
        k = np.rint(pos).astype(np.intp) % m
        return symtab[k]
    k = np.floor(pos).astype(np.intp)
    frac = pos - k
    k %= m
    # one-sided form is exact on constant tables
    left = symtab[k]
    return left + frac * (symtab[(k + 1) % m] - left)


def linear_sum(
    points: np.ndarray,
    src: np.ndarray,
    fvals: np.ndarray,
    bpts: np.ndarray | None,
    bsrc: np.ndarray | None,
    symtab: np.ndarray,
    sym_kind: int,
    alpha: float,
    exclusion: float,
) -> np.ndarray:
    """Direct sums  sum_j Omega((x_i-y_j)') |x_i-y_j|^(alpha-n) [b(x_i)-b(y_j)] f_j.

    The bracketed symbol factor is present only when ``bpts``/``bsrc`` are
    given (commutator form).  Source cells with |x - y| <= exclusion are
    skipped, which realizes the symmetric principal-value truncation.
    """
    points = np.asarray(points, dtype=float)
    src = np.asarray(src, dtype=float)
    n_pts, dim = points.shape
    out = np.zeros(n_pts)
    if src.shape[0] == 0:
        return out
    expo = alpha - dim
    chunk = max(1, _POINT_CHUNK_ELEMS // src.shape[0])
    for s in range(0, n_pts, chunk):
        pc = points[s : s + chunk]
        d = pc[:, None, :] - src[None, :, :]
        r = np.sqrt(np.sum(d * d, axis=-1))
        keep = r > exclusion
        with np.errstate(divide="ignore", invalid="ignore"):
            if expo == -1.0:
                radial = 1.0 / r
            elif expo == -2.0:
                radial = 1.0 / (r * r)
            else:
                radial = np.power(r, expo)
            w = omega_values(d, symtab, sym_kind) * radial
        w = np.where(keep, w, 0.0)
        if bpts is not None:
            w = w * (bpts[s : s + chunk, None] - bsrc[None, :])
        out[s : s + chunk] = w @ fvals
    return out


def bilinear_sum(
    points: np.ndarray,
    bpts: np.ndarray | None,
    y1: np.ndarray,
    f1: np.ndarray,
    b1: np.ndarray | None,
    y2: np.ndarray,
    f2: np.ndarray,
    b2: np.ndarray | None,
    alpha: float,
    exclusion: float,
    slot: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Double sums of the two-source radial kernel, optional symbol slot.

    Kernel: (|x-y1|^2 + |x-y2|^2)^((alpha-2n)/2).  ``slot`` = 0 plain,
    1 or 2 inserts the factor (b(x) - b(y_slot)).  Cell pairs with both
    distances <= exclusion are skipped; per-point skip counts returned.
    """
    points = np.asarray(points, dtype=float)
    n_pts, dim = points.shape
    out = np.zeros(n_pts)
    excluded = np.zeros(n_pts, dtype=np.int64)
    expo = 0.5 * (alpha - 2.0 * dim)
    for i in range(n_pts):
        d1 = y1 - points[i]
        d2 = y2 - points[i]
        r1sq = np.sum(d1 * d1, axis=-1)
        r2sq = np.sum(d2 * d2, axis=-1)
        near1 = r1sq <= exclusion * exclusion
        near2 = r2sq <= exclusion * exclusion
        skip = near1[:, None] & near2[None, :]
        ssum = r1sq[:, None] + r2sq[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            if expo == -0.5:
                kern = 1.0 / np.sqrt(ssum)
            elif expo == -1.0:
                kern = 1.0 / ssum
            else:
                kern = np.power(ssum, expo)
        kern = np.where(skip, 0.0, kern)
        g1 = f1
        g2 = f2
        if slot == 1:
            g1 = f1 * (bpts[i] - b1)
        elif slot == 2:
            g2 = f2 * (bpts[i] - b2)
        out[i] = g1 @ kern @ g2
        excluded[i] = int(np.count_nonzero(skip))
    return out, excluded


def osc_reduce(diff_tab: np.ndarray, shift_tab: np.ndarray, mode: int) -> float:
    """Window reduction behind the kernel-oscillation quadrature.

    ``diff_tab`` holds symbol values on the (2n0-1)-per-axis grid of
    midpoint differences shifted by h; ``shift_tab`` holds values on the
    n0-per-axis grid of shifted evaluation points.  For evaluation index
    i the window is diff_tab[i : i+n0] per axis, and

        S_i = sum over window of |diff_tab - shift_tab[i]|.

    mode 0 returns max_i S_i (sup-norm reduction); mode 1 returns
    sum_i S_i (integral reduction).  Cell-volume scaling is the caller's.
    """
    n0 = shift_tab.shape[0]
    if diff_tab.ndim == 1:
        sums = np.empty(n0)
        for i in range(n0):
            sums[i] = np.sum(np.abs(diff_tab[i : i + n0] - shift_tab[i]))
    else:
        sums = np.empty((n0, n0))
        for i in range(n0):
            block = diff_tab[i : i + n0]
            for j in range(n0):
                sums[i, j] = np.sum(np.abs(block[:, j : j + n0] - shift_tab[i, j]))
    return float(sums.max() if mode == 0 else sums.sum())
