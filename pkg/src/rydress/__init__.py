"""Noisy two-photon Rydberg dressing toolkit.

Computes effective pair interactions U(r) and loss rates of laser-dressed
three-level atoms from the dissipative two-atom master equation, extracts and
calibrates the profile features (soft core, inner/outer peaks, well), and
feeds the resulting nonlocal kernels into condensate simulations: a spectral
Gross-Pitaevskii solver, Bogoliubov roton analysis, and Monte-Carlo
soliton-molecule energetics.
"""

__version__ = "0.1.0"

from .params import AtomSpecies, DressingParams, LockMode, c6_from_n, derive_lock_rates
from .operators import (
    DensityMatrix,
    Liouvillian,
    build_single_hamiltonian,
    build_single_liouvillian,
    build_two_atom_liouvillian,
    vdw_potential,
)
from .steady import (
    DegenerateSteadyStateError,
    PairInteraction,
    SteadyStateSolution,
    analytic_lightshift,
    analytic_rho_ge,
    analytic_rho_pe,
    collective_shift_model,
    effective_interaction,
    loss_rate,
    steady_state,
)
from .profiles import (
    CalibrationRangeError,
    FeatureSet,
    InteractionProfile,
    calibrate_omega1,
    default_r_grid,
    extract_features,
    inner_peak_radius_analytic,
    interaction_profile,
    outer_core_radius_analytic,
    outer_peak_radius_analytic,
    softcore_radius_analytic,
    sweep,
)
from .kernels import RadialKernel, synthetic_kernel
from .gpe import (
    ExternalPotential,
    Field,
    Grid,
    GridKernel,
    evolve_imaginary,
    evolve_real,
    initial_two_soliton,
    mean_field,
    observables,
    radial_structure_factor,
    structure_factor,
    tabulate_kernel,
    uniform_field,
)
from .bogoliubov import BogoliubovSpectrum, RotonBand, kernel_fourier, roton_instabilities, spectrum
from .stability import (
    CloudSpec,
    LandscapePoint,
    StabilityReport,
    dressing_energy,
    marsaglia_normals,
    molecule_energy_landscape,
    sample_gaussian_cloud,
    soliton_energy_landscape,
    stability_window,
)
