"""q-state lattice Monte Carlo on a checkerboard, displayed as voxels.

The L x L spin lattice is split into "white" and "black" halves by
coordinate parity; each half updates in parallel reading only the other.
Visualization assembles the packed halves into a full grid buffer that a
voxel view colors through an indexed colormap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .. import rng
from ..engine import EngineConfig, create_instance_with_config, destroy_instance
from ..errors import InvalidConfig
from ..memory import alloc_linear, write_from_host
from ..render import capture_frame
from ..sync import SyncCounters, display_async, prepare_views, set_target_fps, update_views
from ..views import (
    Domain,
    IndexDescription,
    NumericKind,
    PropertyDescription,
    PropertyType,
    ViewDescription,
    ViewType,
    create_view,
    make_format,
    make_structured_grid,
)

# Nine-state colormap; RGB given on 0-255, normalized here, alpha kept as-is.
_COLORMAP_255 = [
    (153, 153, 153, 1), (228, 26, 28, 1), (55, 126, 184, 1),
    (77, 175, 74, 1), (152, 78, 163, 1), (255, 127, 0, 1),
    (255, 255, 51, 1), (166, 86, 40, 1), (247, 129, 191, 1),
]
POTTS_COLORMAP = np.array(
    [(r / 255.0, g / 255.0, b / 255.0, a) for r, g, b, a in _COLORMAP_255],
    dtype=np.float32,
)

_INIT_STREAM = 0xFFFFFFFFFFFFFFFE


class CellSet(Enum):
    WHITE = 0
    BLACK = 1


def potts_checkerboard_index(row: int, col: int, length: int) -> tuple[CellSet, int]:
    """Map a lattice cell to its parity set and packed array index.

    White holds (row + col) even; packed index is row * (L/2) + col // 2,
    a bijection within each set.
    """
    cell_set = CellSet.WHITE if (row + col) % 2 == 0 else CellSet.BLACK
    return cell_set, row * (length // 2) + col // 2


def potts_write_grid(white: np.ndarray, black: np.ndarray, length: int) -> np.ndarray:
    """Assemble packed halves into the full row-major lattice."""
    half = length // 2
    grid = np.empty(length * length, dtype=white.dtype)
    rows = np.arange(length)[:, None]
    cols = np.arange(length)[None, :]
    packed = rows * half + cols // 2
    is_white = (rows + cols) % 2 == 0
    grid2d = grid.reshape(length, length)
    grid2d[is_white] = white[packed[is_white]]
    grid2d[~is_white] = black[packed[~is_white]]
    return grid


def potts_disassemble_grid(grid: np.ndarray, length: int) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of potts_write_grid."""
    half = length // 2
    grid2d = grid.reshape(length, length)
    white = np.empty(length * half, dtype=grid.dtype)
    black = np.empty(length * half, dtype=grid.dtype)
    rows = np.arange(length)[:, None]
    cols = np.arange(length)[None, :]
    packed = rows * half + cols // 2
    is_white = (rows + cols) % 2 == 0
    white[packed[is_white]] = grid2d[is_white]
    black[packed[~is_white]] = grid2d[~is_white]
    return white, black


@dataclass
class PottsState:
    length: int
    q: int
    temperature: float
    seed: int = 0
    coupling: float = 1.0
    white: np.ndarray = field(init=False)
    black: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.length < 2 or self.length % 2 != 0:
            raise InvalidConfig("lattice side must be even and >= 2")
        if not 1 <= self.q <= len(POTTS_COLORMAP):
            raise InvalidConfig(f"q must lie in 1..{len(POTTS_COLORMAP)}")
        if self.temperature <= 0:
            raise InvalidConfig("temperature must be positive")
        cells = np.arange(self.length * self.length, dtype=np.uint64)
        spins = np.floor(rng.uniform01(self.seed, _INIT_STREAM, cells) * self.q).astype(np.int32)
        self.white, self.black = potts_disassemble_grid(spins, self.length)

    def grid(self) -> np.ndarray:
        return potts_write_grid(self.white, self.black, self.length)


def _unpack_coords(length: int, parity: int) -> tuple[np.ndarray, np.ndarray]:
    half = length // 2
    p = np.arange(length * half)
    row = p // half
    col = 2 * (p % half) + (row + parity) % 2
    return row, col


def potts_update(state: PottsState, cell_set: CellSet, iteration: int) -> np.ndarray:
    """One Metropolis sweep over a parity set; returns the updated packed array.

    Proposals are uniform over [0, Q); the energy change counts matching
    spins among the 4 lattice neighbors (periodic boundaries), all of which
    live in the opposite set. Acceptance uses min(1, exp(-dE / T)).
    """
    length, half = state.length, state.length // 2
    parity = cell_set.value
    own = state.white if cell_set is CellSet.WHITE else state.black
    other = state.black if cell_set is CellSet.WHITE else state.white

    row, col = _unpack_coords(length, parity)
    spins = own

    matches_for = _neighbor_matches(other, row, col, length, half)
    stream = iteration * 2 + parity
    p = np.arange(length * half, dtype=np.uint64)
    u_prop = rng.uniform01(state.seed, stream, p * np.uint64(2))
    u_acc = rng.uniform01(state.seed, stream, p * np.uint64(2) + np.uint64(1))
    proposal = np.floor(u_prop * state.q).astype(spins.dtype)

    delta_e = -state.coupling * (matches_for(proposal) - matches_for(spins))
    accept = u_acc < np.exp(-delta_e / state.temperature)
    return np.where(accept, proposal, spins)


def _neighbor_matches(other: np.ndarray, row: np.ndarray, col: np.ndarray, length: int, half: int):
    """Closure counting, for any candidate spin array, its matching neighbors."""
    neighbor_spins = []
    for drow, dcol in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        nrow = (row + drow) % length
        ncol = (col + dcol) % length
        neighbor_spins.append(other[nrow * half + ncol // 2])
    stacked = np.stack(neighbor_spins)

    def matches(candidate: np.ndarray) -> np.ndarray:
        return (stacked == candidate[None, :]).sum(axis=0).astype(np.float64)

    return matches


@dataclass
class PottsRunResult:
    grid: np.ndarray
    counters: SyncCounters
    live_views: int
    live_allocations: int


def run_potts(
    length: int,
    q: int,
    temperature: float,
    iterations: int,
    *,
    seed: int = 0,
    width: int = 800,
    height: int = 800,
    headless: bool = True,
    target_fps: float = 0.0,
    snapshot=None,
) -> PottsRunResult:
    """Run the lattice sample end to end and return its final grid."""
    state = PottsState(length, q, temperature, seed)
    instance = create_instance_with_config(EngineConfig(
        width=width, height=height, headless=headless, target_fps=target_fps, seed=seed,
    ))
    try:
        grid_region, grid_alloc = alloc_linear(instance, 4 * length * length)
        grid_view = grid_region.view(np.int32)

        _, colormap_alloc = alloc_linear(instance, POTTS_COLORMAP.nbytes)
        write_from_host(colormap_alloc, 0, POTTS_COLORMAP)

        desc = ViewDescription(
            view_type=ViewType.VOXELS,
            domain=Domain.DOMAIN_2D,
            element_count=length * length,
            extent=(length, length, 1),
            default_size=1.0,  # world units: one lattice cell per voxel
            properties={
                PropertyType.POSITION: make_structured_grid(instance, (length, length, 1)),
                PropertyType.COLOR: PropertyDescription(
                    source=colormap_alloc,
                    size=len(POTTS_COLORMAP),
                    format=make_format(NumericKind.FLOAT, 32, 4),
                    indices=IndexDescription(source=grid_alloc, size=length * length, index_size=4),
                ),
            },
        )
        create_view(instance, desc)
        grid_view[:] = state.grid()

        display_async(instance)
        set_target_fps(instance, target_fps)
        for i in range(iterations):
            # Packed halves are not visualized, so their updates may run
            # outside the critical section; only the grid assembly is inside.
            state.white = potts_update(state, CellSet.WHITE, i)
            state.black = potts_update(state, CellSet.BLACK, i)
            prepare_views(instance)
            grid_view[:] = potts_write_grid(state.white, state.black, length)
            update_views(instance)

        if snapshot:
            capture_frame(instance, snapshot)
        return PottsRunResult(
            grid=grid_view.copy(),
            counters=instance.sync.counters,
            live_views=instance.live_views,
            live_allocations=instance.live_allocations,
        )
    finally:
        destroy_instance(instance)
