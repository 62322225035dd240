"""Ground states and phase diagrams of the Rabi model with a two-photon coupling."""
from .errors import *  # noqa: F401,F403
from .model import ModelParams, DerivedScales, derive_scales, validate, parse_coupling
from .fockspace import BasisSpec, BandedSymMatrix, build_hamiltonian, build_parity_sector
from .eigensolve import TruncationPolicy, GroundSolution, ground_state, solve_fixed
from .observables import ObservableSet, compute_observables, spin_filtered_displacement
from .wavefunction import WaveGrid, BranchClass, ClassifierConfig, evaluate_wavefunction, classify_branch
from .analytic import (
    boundary_curve,
    boundary_I,
    boundary_II,
    boundary_lowfreq,
    jump_sigma_x,
    jump_sigma_z,
    semiclassical_energy,
)
from .sweep import (
    Axis,
    SweepSpec,
    PhaseDiagram,
    TransitionPoint,
    run_sweep,
    detect_transitions,
    locate_boundary,
    estimate_triple_point,
    classify_solution,
)
from .report import write_csv, read_csv, write_boundary_csv, write_solution_json, render_heatmap_svg

__version__ = "0.1.0"
