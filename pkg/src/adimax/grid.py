"""Staggered Yee grid on the unit cube, field storage, and PEC boundary handling.

The domain is [0,1]^3 split into nx * ny * nz cells.  Each of the six field
components lives on its own staggered lattice; a half offset along an axis
means the sample point sits at the midpoint (l + 1/2) * h, an integer offset
means it sits on the node l * h.  Lattices include the boundary entries, so
tangential E values on the perfectly conducting walls are stored as explicit
zeros and every difference stencil can read them uniformly.

Component placements (index ranges follow from the offsets):

    ex : (i+1/2, j,     k    )   shape (nx,   ny+1, nz+1)
    ey : (i,     j+1/2, k    )   shape (nx+1, ny,   nz+1)
    ez : (i,     j,     k+1/2)   shape (nx+1, ny+1, nz  )
    hx : (i,     j+1/2, k+1/2)   shape (nx+1, ny,   nz  )
    hy : (i+1/2, j,     k+1/2)   shape (nx,   ny+1, nz  )
    hz : (i+1/2, j+1/2, k    )   shape (nx,   ny,   nz+1)
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, replace

import numpy as np

COMPONENTS = ("ex", "ey", "ez", "hx", "hy", "hz")

# Per-axis half offsets (1 = staggered by half a cell along that axis).
HALF_OFFSET = {
    "ex": (1, 0, 0),
    "ey": (0, 1, 0),
    "ez": (0, 0, 1),
    "hx": (0, 1, 1),
    "hy": (1, 0, 1),
    "hz": (1, 1, 0),
}


@dataclass(frozen=True)
class GridSpec:
    """Uniform staggered grid of the unit cube plus the time step.

    Mesh sizes are tied to the cell counts (dx = 1/nx and so on) so that the
    last node lands exactly on 1.  No CFL restriction is imposed on dt; the
    two-stage implicit update is stable for any positive time step.
    """

    nx: int
    ny: int
    nz: int
    dt: float

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or n < 3:
                raise ValueError(f"{name} must be an integer >= 3, got {n!r}")
        if not (isinstance(self.dt, (int, float)) and math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be a positive finite number, got {self.dt!r}")

    @property
    def dx(self) -> float:
        return 1.0 / self.nx

    @property
    def dy(self) -> float:
        return 1.0 / self.ny

    @property
    def dz(self) -> float:
        return 1.0 / self.nz

    @property
    def dv(self) -> float:
        return self.dx * self.dy * self.dz

    @property
    def cells(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    def spacing(self, axis: int) -> float:
        return (self.dx, self.dy, self.dz)[axis]

    def courant(self, eps: float = 1.0, mu: float = 1.0) -> float:
        """Courant number dt * c * sqrt(1/dx^2 + 1/dy^2 + 1/dz^2); informational only."""
        c = 1.0 / math.sqrt(eps * mu)
        return self.dt * c * math.sqrt(self.nx**2 + self.ny**2 + self.nz**2)


def make_grid(nx: int, ny: int, nz: int, dt: float) -> GridSpec:
    """Build a GridSpec, rejecting cell counts below 3 and nonpositive dt."""
    return GridSpec(nx, ny, nz, dt)


@dataclass(frozen=True)
class Medium:
    """Spatially constant permittivity and permeability."""

    eps: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.eps) and self.eps > 0):
            raise ValueError(f"eps must be positive, got {self.eps!r}")
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ValueError(f"mu must be positive, got {self.mu!r}")


def extent(comp: str, grid: GridSpec) -> tuple[int, int, int]:
    """Lattice shape of one component: n along half-offset axes, n+1 along node axes."""
    off = HALF_OFFSET[comp]
    return tuple(n if o else n + 1 for n, o in zip(grid.cells, off))


def location_of(comp: str, i: int, j: int, k: int, grid: GridSpec) -> tuple[float, float, float]:
    """Physical coordinates of lattice entry (i, j, k) of a component."""
    ext = extent(comp, grid)
    for idx, n in zip((i, j, k), ext):
        if not 0 <= idx < n:
            raise IndexError(f"index {(i, j, k)} outside extent {ext} of {comp!r}")
    off = HALF_OFFSET[comp]
    h = (grid.dx, grid.dy, grid.dz)
    return tuple((idx + 0.5 * o) * s for idx, o, s in zip((i, j, k), off, h))


@dataclass
class FieldState:
    """The six component lattices at one time level.

    ``time_level`` counts steps (half-integers label the intermediate level of
    the two-stage update).  A FieldState is a plain value: share it read-only,
    copy before mutating.
    """

    ex: np.ndarray
    ey: np.ndarray
    ez: np.ndarray
    hx: np.ndarray
    hy: np.ndarray
    hz: np.ndarray
    time_level: float = 0.0

    def components(self):
        for name in COMPONENTS:
            yield name, getattr(self, name)

    def e_triple(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.ex, self.ey, self.ez)

    def h_triple(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.hx, self.hy, self.hz)

    def copy(self) -> "FieldState":
        return FieldState(*(getattr(self, c).copy() for c in COMPONENTS), time_level=self.time_level)

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(getattr(self, c)))) for c in COMPONENTS)

    def all_finite(self) -> bool:
        return all(bool(np.isfinite(getattr(self, c)).all()) for c in COMPONENTS)


def zero_state(grid: GridSpec, time_level: float = 0.0) -> FieldState:
    return FieldState(*(np.zeros(extent(c, grid)) for c in COMPONENTS), time_level=time_level)


def check_extents(state: FieldState, grid: GridSpec) -> None:
    for name, arr in state.components():
        if arr.shape != extent(name, grid):
            raise ValueError(
                f"component {name!r} has shape {arr.shape}, expected {extent(name, grid)}"
            )


def lincomb(a: float, s: FieldState, b: float, t: FieldState,
            time_level: float | None = None) -> FieldState:
    """Componentwise a*s + b*t."""
    arrays = [a * getattr(s, c) + b * getattr(t, c) for c in COMPONENTS]
    if time_level is None:
        time_level = s.time_level
    return FieldState(*arrays, time_level=time_level)


def enforce_pec(state: FieldState) -> FieldState:
    """Zero the tangential E entries on the six walls; all other entries untouched.

    ex vanishes on the y and z walls, ey on the x and z walls, ez on the x and
    y walls.  Idempotent.
    """
    out = state.copy()
    ny, nz = out.ex.shape[1] - 1, out.ex.shape[2] - 1
    nx = out.ey.shape[0] - 1
    out.ex[:, 0, :] = 0.0
    out.ex[:, ny, :] = 0.0
    out.ex[:, :, 0] = 0.0
    out.ex[:, :, nz] = 0.0
    out.ey[0, :, :] = 0.0
    out.ey[nx, :, :] = 0.0
    out.ey[:, :, 0] = 0.0
    out.ey[:, :, nz] = 0.0
    out.ez[0, :, :] = 0.0
    out.ez[nx, :, :] = 0.0
    out.ez[:, 0, :] = 0.0
    out.ez[:, ny, :] = 0.0
    return out


def rotate_grid(grid: GridSpec) -> GridSpec:
    """Grid under the cyclic axis map (x, y, z) -> (y, z, x)."""
    return replace(grid, nx=grid.ny, ny=grid.nz, nz=grid.nx)


def rotate_state(state: FieldState) -> FieldState:
    """Relabel fields under the cyclic axis map (x, y, z) -> (y, z, x).

    The new x-component is the old y-component with array axes permuted so
    that index order again follows (x', y', z').  Applying this three times
    returns the original state.  The update scheme and all norms are invariant
    under this relabeling, which is how the y- and z-direction energy
    functionals reduce to the x-direction code path.
    """
    T = lambda a: np.ascontiguousarray(np.transpose(a, (1, 2, 0)))
    return FieldState(
        ex=T(state.ey), ey=T(state.ez), ez=T(state.ex),
        hx=T(state.hy), hy=T(state.hz), hz=T(state.hx),
        time_level=state.time_level,
    )


# ---------------------------------------------------------------------------
# Snapshot I/O: one file per component, CSV or flat binary blob.
# ---------------------------------------------------------------------------

SNAPSHOT_MAGIC = b"ADIM"
SNAPSHOT_VERSION = 1
# magic, version, nx, ny, nz, component tag, reserved, time level; 48 bytes total
_HEADER = struct.Struct("<4sI3I4sId12x")
assert _HEADER.size == 48


def write_component_blob(path, comp: str, values: np.ndarray, grid: GridSpec,
                         time_level: float) -> None:
    """Binary snapshot: 48-byte header then little-endian float64, k fastest."""
    if values.shape != extent(comp, grid):
        raise ValueError(f"shape {values.shape} does not match extent of {comp!r}")
    header = _HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, grid.nx, grid.ny, grid.nz,
                          comp.encode("ascii").ljust(4), 0, float(time_level))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(values, dtype="<f8").tobytes())


def read_component_blob(path) -> tuple[str, np.ndarray, tuple[int, int, int], float]:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        magic, version, nx, ny, nz, tag, _res, time_level = _HEADER.unpack(raw)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"bad snapshot magic {magic!r}")
        if version != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {version}")
        comp = tag.rstrip(b" \x00").decode("ascii")
        if comp not in COMPONENTS:
            raise ValueError(f"unknown component tag {comp!r}")
        shape = tuple(n if o else n + 1 for n, o in zip((nx, ny, nz), HALF_OFFSET[comp]))
        data = np.frombuffer(fh.read(), dtype="<f8").reshape(shape).copy()
    return comp, data, (nx, ny, nz), time_level


def write_component_csv(path, values: np.ndarray) -> None:
    """CSV snapshot with header row i,j,k,value, rows in k-fastest order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "k", "value"])
        ni, nj, nk = values.shape
        for i in range(ni):
            for j in range(nj):
                for k in range(nk):
                    writer.writerow([i, j, k, f"{values[i, j, k]:.17g}"])


def read_component_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["i", "j", "k", "value"]:
            raise ValueError(f"bad snapshot header {header!r}")
        rows = [(int(i), int(j), int(k), float(v)) for i, j, k, v in reader]
    shape = tuple(max(r[d] for r in rows) + 1 for d in range(3))
    out = np.zeros(shape)
    for i, j, k, v in rows:
        out[i, j, k] = v
    return out


def write_snapshot(state: FieldState, grid: GridSpec, directory, fmt: str = "blob") -> list[str]:
    """Dump all six components into `directory`; returns the file names written."""
    check_extents(state, grid)
    names = []
    for comp, values in state.components():
        if fmt == "blob":
            name = f"snapshot_{comp}.bin"
            write_component_blob(directory / name, comp, values, grid, state.time_level)
        elif fmt == "csv":
            name = f"snapshot_{comp}.csv"
            write_component_csv(directory / name, values)
        else:
            raise ValueError(f"unknown snapshot format {fmt!r}")
        names.append(name)
    return names
