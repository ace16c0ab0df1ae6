"""Configuration-space spectral solver for nonlocal Schrödinger-type operators.

Computes bound states of H = T + V on a uniform 1D lattice, where T is the
massless (Cauchy) or quasirelativistic jump operator — applied directly in
configuration space through its discretized jump density — or the ordinary
local kinetic term, and V is a harmonic or finite-well confinement.  The
spectrum comes from imaginary-time block iteration of the Strang-split
small-time shift with per-step Gram-Schmidt orthonormalization.
"""

__version__ = "0.1.0"

from .analysis import (
    CAUCHY_OSCILLATOR_LOWEST,
    ELECTRON_COMPTON_M,
    HBARC_EV_M,
    CauchyReferenceTable,
    FitResult,
    UnitScales,
    bound_state_count,
    cauchy_oscillator_asymptotic,
    deep_well_nonrel,
    dimensionless_mass,
    fit_line,
    fit_power,
    infinite_well_asymptotic,
    nonrel_oscillator_energy,
    operator_limit_report,
    oscillator_from_dimensional,
    oscillator_to_dimensional,
    well_unit_scales,
)
from .errors import (
    DegenerateVectorError,
    DomainTooSmallError,
    IncompatibleGridsError,
    InvalidArgumentError,
    InvalidMatrixError,
    LevySpecError,
    MatrixTooLargeError,
    RankDeficientError,
    SingularPointError,
    SpectralBreakdownError,
)
from .grid import Grid, GridFunction, inner_product, make_grid, norm, normalize, trial_basis
from .kernels import (
    KernelSpec,
    KernelTable,
    bessel_k1,
    dump_kernel_csv,
    levy_density,
    load_kernel_csv,
    tabulate_kernel,
)
from .operators import (
    HamiltonianSpec,
    LocalKinetic,
    PotentialSpec,
    apply_hamiltonian,
    apply_local_kinetic,
    apply_nonlocal,
    kernel_table_for,
    potential_values,
)
from .oracle import DenseOperator, assemble_dense, dense_eigensolve
from .propagator import (
    SolverConfig,
    SpectralResult,
    convergence_check,
    count_bound_states,
    energy_estimate,
    gram_schmidt,
    run_spectrum,
    solve_states,
    strang_shift,
)

__all__ = [name for name in dir() if not name.startswith("_")]
