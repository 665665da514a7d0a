"""Half-step difference calculus on the staggered lattices.

`diff` moves a lattice by half a cell along one axis: the value at an output
point p is (u at p + h/2 minus u at p - h/2) / h.  Output points are exactly
those where both reads exist, so the array shrinks by one entry along the
differenced axis; callers pick whatever index sub-ranges they need.  Which
physical points the output occupies follows from the operand's stagger.
"""

from __future__ import annotations

import numpy as np

from .grid import FieldState, GridSpec, lincomb


def diff(u: np.ndarray, axis: int, grid: GridSpec) -> np.ndarray:
    if u.shape[axis] < 2:
        raise ValueError(f"extent {u.shape[axis]} along axis {axis} too small to difference")
    return np.diff(u, axis=axis) / grid.spacing(axis)


def second_diff(u: np.ndarray, axis: int, grid: GridSpec) -> np.ndarray:
    """Composition diff(diff(u)); lands back on the operand's stagger class."""
    return diff(diff(u, axis, grid), axis, grid)


def fused_second_diff(u: np.ndarray, axis: int, grid: GridSpec) -> np.ndarray:
    """Fused 3-point form (u[p+1] - 2 u[p] + u[p-1]) / h^2; equals second_diff."""
    if u.shape[axis] < 3:
        raise ValueError(f"extent {u.shape[axis]} along axis {axis} too small")
    lo = [slice(None)] * u.ndim
    mid = [slice(None)] * u.ndim
    hi = [slice(None)] * u.ndim
    lo[axis] = slice(None, -2)
    mid[axis] = slice(1, -1)
    hi[axis] = slice(2, None)
    h = grid.spacing(axis)
    return (u[tuple(hi)] - 2.0 * u[tuple(mid)] + u[tuple(lo)]) / (h * h)


def time_diff(u_next: FieldState, u_prev: FieldState, span: float) -> FieldState:
    """Componentwise (u_next - u_prev) / span, labeled at the midpoint level."""
    _check_same_shapes(u_next, u_prev)
    mid = 0.5 * (u_next.time_level + u_prev.time_level)
    return lincomb(1.0 / span, u_next, -1.0 / span, u_prev, time_level=mid)


def time_avg(u_next: FieldState, u_prev: FieldState) -> FieldState:
    """Componentwise mean of two states."""
    _check_same_shapes(u_next, u_prev)
    mid = 0.5 * (u_next.time_level + u_prev.time_level)
    return lincomb(0.5, u_next, 0.5, u_prev, time_level=mid)


def _check_same_shapes(a: FieldState, b: FieldState) -> None:
    for (name, x), (_, y) in zip(a.components(), b.components()):
        if x.shape != y.shape:
            raise ValueError(f"component {name!r} shapes differ: {x.shape} vs {y.shape}")


def split_curl_pos(u: tuple[np.ndarray, np.ndarray, np.ndarray],
                   grid: GridSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cyclic half of the discrete curl: (d_y u_z, d_z u_x, d_x u_y).

    Applied to an E-located triple the result lands on H locations and vice
    versa.  The full curl is split_curl_pos(u) - split_curl_neg(u).
    """
    ux, uy, uz = u
    return (diff(uz, 1, grid), diff(ux, 2, grid), diff(uy, 0, grid))


def split_curl_neg(u: tuple[np.ndarray, np.ndarray, np.ndarray],
                   grid: GridSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Anticyclic half of the discrete curl: (d_z u_y, d_x u_z, d_y u_x)."""
    ux, uy, uz = u
    return (diff(uy, 2, grid), diff(uz, 0, grid), diff(ux, 1, grid))
