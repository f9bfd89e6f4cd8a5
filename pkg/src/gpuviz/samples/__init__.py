"""End-to-end sample simulations driving the engine the way user code would."""

from .potts import (
    POTTS_COLORMAP,
    CellSet,
    PottsState,
    potts_checkerboard_index,
    potts_disassemble_grid,
    potts_update,
    potts_write_grid,
    run_potts,
)
from .nbody import NBodyState, nbody_integrate, run_nbody
from .meshes import (
    Mesh,
    asset_path,
    breathe_deform,
    compute_smooth_normals,
    load_obj,
    run_mesh,
    vary_angle,
)

__all__ = [
    "POTTS_COLORMAP", "CellSet", "PottsState", "potts_checkerboard_index", "potts_disassemble_grid",
    "potts_update", "potts_write_grid", "run_potts",
    "NBodyState", "nbody_integrate", "run_nbody",
    "Mesh", "asset_path", "breathe_deform", "compute_smooth_normals", "load_obj",
    "run_mesh", "vary_angle",
]
