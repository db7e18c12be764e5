"""Plane-wave Galerkin band structures with k-dependent and blow-up-modified
variational spaces, plus the measurement harness built on top of them."""

from .analysis import (
    CellScan,
    ConvergenceStudy,
    GridMismatch,
    NoBasisChangeOnPath,
    RegularityProbe,
    TooFewPoints,
    band_derivative_trace,
    convergence_study,
    energy_vs_cell_parameter,
    fermi_adjusted_band_error,
    make_reference,
    periodicity_report,
    regularity_probe,
)
from .blowup import (
    BlowupFunction,
    BlowupSpec,
    DominationViolated,
    IllPosedSpec,
    OrderTooHigh,
    SingularArgument,
    build_blowup,
)
from .fiber import (
    FiberMatrix,
    Scheme,
    assemble,
    kdependent_scheme,
    modified_scheme,
    project_modified_identity_check,
    uniform_scheme,
)
from .lattice import (
    EmptyBasis,
    KPointSet,
    Lattice,
    SingularLattice,
    basis_cardinality_bounds,
    enumerate_basis,
    kinetic_values,
    kpath,
    lattice_from_dict,
    new_lattice,
    uniform_grid,
)
from .observables import (
    FermiLevel,
    GapInfo,
    OccupationQuery,
    TruncationWarning,
    UnreachableFilling,
    fermi_level,
    idoe,
    idos,
)
from .potential import (
    BrokenHermitianSymmetry,
    FourierPotential,
    SobolevReport,
    evaluate_real,
    load_potential,
    potential_from_coeffs,
    save_potential,
    sobolev_norm,
    synth_power_law,
)
from .spectra import (
    BandCountExceedsBasis,
    BandStructure,
    EigenSolution,
    SolverFailure,
    bands_to_csv,
    compute_bands,
    eigh,
)

__version__ = "0.1.0"
