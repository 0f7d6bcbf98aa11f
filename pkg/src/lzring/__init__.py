"""Landau-Zener population transfer on a spin ring with first- and
second-neighbour Ising couplings."""

from .dynamics import IntegratorConfig, Trajectory, evolve, initial_state, lz_closed_form, rk4_step
from .errors import (
    CapacityError,
    ConfigError,
    DegenerateGroundStateError,
    GridError,
    IntegrationError,
    LzError,
    NormDriftError,
    NumericalError,
    SweepError,
)
from .model import (
    CouplingParams,
    LzHamiltonian,
    RingTopology,
    brute_force_hamiltonian,
    build_hamiltonian,
    hamiltonian_at,
    ring_topology,
)
from .observables import FtpeResult, ftpe
from .sweep import Axis, GridSpec, Simulation, SweepRow, render_heatmap, run_grid

__version__ = "0.1.0"
