"""Closed-form cavity eigenmode for initialization and error measurement.

With eps = mu = 1 the fields

    e_x =  (sqrt(3)/4) cos(w t) cos(pi(1-x)) sin(pi(1-y)) sin(pi(1-z))
    e_y =  (sqrt(3)/2) cos(w t) sin(pi(1-x)) cos(pi(1-y)) sin(pi(1-z))
    e_z = -(3 sqrt(3)/4) cos(w t) sin(pi(1-x)) sin(pi(1-y)) cos(pi(1-z))
    h_x = -(5/4) sin(w t) sin(pi(1-x)) cos(pi(1-y)) cos(pi(1-z))
    h_y =        sin(w t) cos(pi(1-x)) sin(pi(1-y)) cos(pi(1-z))
    h_z =  (1/4) sin(w t) cos(pi(1-x)) cos(pi(1-y)) sin(pi(1-z))

with w = sqrt(3) pi solve the curl equations exactly, are divergence free,
satisfy the conducting-wall conditions (tangential e and normal h vanish on
the boundary), and carry the closed-form energies

    int |e|^2 = (21/64) cos^2(w t),   int |h|^2 = (21/64) sin^2(w t).

On a uniform staggered grid the sampled mode has two special discrete
properties used heavily by the tests: the discrete divergence of the sampled
field vanishes identically when the mesh sizes are equal (the three
difference quotients share the common factor 2 sin(pi h / 2) / h, so the
coefficient cancellation 1/4 + 1/2 - 3/4 = 0 survives discretization), and
squared-component lattice sums hit their integrals exactly (uniform trig sums
are alias free), so the discrete L2-type energy equals the constants below to
round-off rather than to O(h^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .grid import FieldState, GridSpec, HALF_OFFSET, Medium, check_extents, extent
from .norms import (electric_norm_sq, energy_h1, energy_l2, format_value, magnetic_norm_sq,
                    _dt_state)

OMEGA = math.sqrt(3.0) * math.pi

# Analytic energy constants of the mode, kept as exact expressions.
ENERGY_TOTAL_SQ = 21.0 / 64.0                          # |e|^2 + |h|^2
ENERGY_TIME_SQ = 63.0 * math.pi**2 / 64.0              # |de/dt|^2 + |dh/dt|^2
ENERGY_GRAD_SQ = 21.0 * math.pi**2 / 64.0              # |de/dx|^2 + |dh/dx|^2
ENERGY_GRAD_TIME_SQ = 63.0 * math.pi**4 / 64.0         # |d2e/dxdt|^2 + |d2h/dxdt|^2

_SQ3 = math.sqrt(3.0)

_AMPLITUDE = {
    "ex": _SQ3 / 4.0,
    "ey": _SQ3 / 2.0,
    "ez": -3.0 * _SQ3 / 4.0,
    "hx": -5.0 / 4.0,
    "hy": 1.0,
    "hz": 0.25,
}

# Spatial profile per axis: True -> cos(pi(1-u)), False -> sin(pi(1-u)).
_PROFILE = {
    "ex": (True, False, False),
    "ey": (False, True, False),
    "ez": (False, False, True),
    "hx": (False, True, True),
    "hy": (True, False, True),
    "hz": (True, True, False),
}


def exact_component(comp: str, t, x, y, z):
    """Evaluate one mode component at arbitrary coordinates (broadcasting)."""
    temporal = np.cos(OMEGA * t) if comp.startswith("e") else np.sin(OMEGA * t)
    out = _AMPLITUDE[comp] * temporal
    for coord, is_cos in zip((x, y, z), _PROFILE[comp]):
        phase = math.pi * (1.0 - np.asarray(coord, dtype=float))
        out = out * (np.cos(phase) if is_cos else np.sin(phase))
    return out


def sample_exact(t: float, grid: GridSpec) -> FieldState:
    """Sample the mode on every staggered lattice at time t.

    Wall entries of tangential e evaluate to sin(pi * 0) and the like, so they
    are zero only to round-off (about 1e-16); run initialization squares that
    away with enforce_pec.
    """
    arrays = []
    for comp in ("ex", "ey", "ez", "hx", "hy", "hz"):
        off = HALF_OFFSET[comp]
        ni, nj, nk = extent(comp, grid)
        xs = ((np.arange(ni) + 0.5 * off[0]) * grid.dx)[:, None, None]
        ys = ((np.arange(nj) + 0.5 * off[1]) * grid.dy)[None, :, None]
        zs = ((np.arange(nk) + 0.5 * off[2]) * grid.dz)[None, None, :]
        arrays.append(exact_component(comp, t, xs, ys, zs))
    return FieldState(*arrays, time_level=t / grid.dt)


def error_state(numeric: FieldState, t: float, grid: GridSpec) -> FieldState:
    """Exact-minus-numeric field state at time t."""
    check_extents(numeric, grid)
    exact = sample_exact(t, grid)
    arrays = [getattr(exact, c) - getattr(numeric, c) for c, _ in numeric.components()]
    return FieldState(*arrays, time_level=numeric.time_level)


@dataclass(frozen=True)
class ErrorMetrics:
    """Relative solution errors and energy-ratio diagnostics at one level.

    eh* are errors of the numeric solution against the sampled mode, scaled by
    the matching analytic energy constant; ratio* compare the numeric
    solution's own energy norms with the analytic constants and sit near 1.
    The t-variants need two consecutive levels and are None on the first.
    """

    time_level: float
    eh0: float
    eh1: float
    eh2: float
    err_e: float
    err_h: float
    ratio1: float
    ratio2: float
    eht1: float | None = None
    eht2: float | None = None
    ratiot1: float | None = None
    ratiot2: float | None = None

    CSV_HEADER = ("time_level,ERR0_n,ERR1_n,ERR2_n,ErrE,ErrH,EH1_n,EH2_n,"
                  "ERRt1_n,ERRt2_n,EHt1_n,EHt2_n")

    def csv_row(self) -> str:
        return ",".join(format_value(getattr(self, f.name)) for f in fields(self))


def metrics(curr: FieldState, prev: FieldState | None, grid: GridSpec, med: Medium) -> ErrorMetrics:
    """Error metrics of `curr` (and of the time difference when `prev` is given)."""
    t = curr.time_level * grid.dt
    err = error_state(curr, t, grid)
    e_sq = electric_norm_sq(err.e_triple(), med.eps, grid)
    h_sq = magnetic_norm_sq(err.h_triple(), med.mu, grid)
    kwargs = {}
    if prev is not None:
        d_err = _dt_state(error_state(prev, prev.time_level * grid.dt, grid), err, grid)
        d_num = _dt_state(prev, curr, grid)
        kwargs = {
            "eht1": math.sqrt(energy_h1(d_err, "x", med, grid)) / math.sqrt(ENERGY_GRAD_TIME_SQ),
            "eht2": math.sqrt(energy_l2(d_err, med, grid)) / math.sqrt(ENERGY_TIME_SQ),
            "ratiot1": math.sqrt(energy_h1(d_num, "x", med, grid) / ENERGY_GRAD_TIME_SQ),
            "ratiot2": math.sqrt(energy_l2(d_num, med, grid) / ENERGY_TIME_SQ),
        }
    return ErrorMetrics(
        time_level=curr.time_level,
        eh0=math.sqrt((e_sq + h_sq) / ENERGY_TOTAL_SQ),
        eh1=math.sqrt(energy_h1(err, "x", med, grid)) / math.sqrt(ENERGY_GRAD_SQ),
        eh2=math.sqrt(energy_l2(err, med, grid)) / math.sqrt(ENERGY_TOTAL_SQ),
        err_e=math.sqrt(e_sq),
        err_h=math.sqrt(h_sq),
        ratio1=math.sqrt(energy_h1(curr, "x", med, grid) / ENERGY_GRAD_SQ),
        ratio2=math.sqrt(energy_l2(curr, med, grid) / ENERGY_TOTAL_SQ),
        **kwargs,
    )


def observed_rate(errors, resolutions) -> float:
    """log(e1/e2) / log(h1/h2) for an (error, resolution) pair of runs."""
    e1, e2 = errors
    h1, h2 = resolutions
    if min(e1, e2) <= 0:
        raise ValueError("errors must be positive")
    if min(h1, h2) <= 0 or h1 == h2:
        raise ValueError("resolutions must be positive and distinct")
    return math.log(e1 / e2) / math.log(h1 / h2)
