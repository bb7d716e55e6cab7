"""Second-order FDTD for 2D TMz scattering off perfect electric conductors.

Conductors are embedded in a uniform grid through a level set; ghost values
inside them come from PDE-based extension, and a back-and-forth error
compensation wrapper lifts a first-order averaged scheme to second order.
"""

from ._backend import NAME as BACKEND
from .boundary import GaussianPulse, NoWave, PlaneSine, PmlParams, incident_eval
from .config import SimConfig, load_config, parse_config, render_config
from .emcore import EMState, Solver, SolverParams, finalize, run, theta_backward, theta_forward
from .errors import (ConfigError, EmptyCollarError, ExtensionDivergenceError,
                     GeometryResolutionError, GridMismatchError, InstabilityError, NumericalError,
                     PecFdtdError, RedistanceError, SnapshotError, ValidationError)
from .extension import ExtensionParams, apply_ghost_conditions, even_extend, odd_extend, transport_extend
from .grid import Grid2D, unit_grid
from .harness import (CollarSpec, collar_mask, convergence_study, cfl_study, l1_collar_error,
                      linf_collar_error, longtime_study, observed_order, restrict)
from .levelset import Disk, Layer, NoShape, Union, Wedge, classify_layers, normals, redistance
from .snapshot import read_snapshot, write_heatmap, write_snapshot

__version__ = "0.1.0"
