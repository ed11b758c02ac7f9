//! Compressible LES building blocks: periodic grids and fields, compact
//! differencing and filtering, test filters, eddy-viscosity models, the
//! enstrophy-ratio sensor, a Navier-Stokes solver, canonical flow cases and
//! diagnostics.

pub mod cases;
pub mod compact;
pub mod cvp;
pub mod diagnostics;
pub mod error;
pub(crate) mod fft;
pub mod field;
pub mod filters;
pub mod grid;
pub(crate) mod pencil;
pub mod sgs;
pub mod solver;
pub mod tridiag;

pub use compact::{ddx, gradient, solution_filter, CompactScheme, Differentiator, SolutionFilter};
pub use error::{Error, Result};
pub use field::{
    pairwise_sum, primitive_decode, volume_average, ConservedState, Primitives, ScalarField,
    TensorField, ThermoParams, VectorField,
};
pub use filters::{
    apply_test_filter, int6_transfer_gain, transfer_gain, AxisSet, FilterKind, TestFilter,
    TestFilterSpec, TransferFunction,
};
pub use grid::{Axis, Grid};
pub use tridiag::{solve_cyclic_tridiagonal, CyclicTridiagonalSystem};
pub use cvp::{
    apply_cvp, enstrophy, enstrophy_from_gradient, sensor_f, sensor_value, sigma_eq_integral,
    sigma_eq_quadrature, sigma_eq_sharp, sigma_field, CvpConfig, CvpSensor, InterpolantMode,
    SensorField, SensorStats,
};
pub use sgs::{
    mut_dynamic_smagorinsky, mut_smagorinsky, mut_structure_function, mut_vreman, strain_rate,
    DynamicResult, DynamicSmagorinsky, SgsModel, SgsModelConfig, SgsModelKind, StrainRate,
};
pub use solver::{
    compute_dt, conserved_totals, rk3_step, Closure, ClosureState, FlowSolver, RhsBudget,
    RhsOperator, SolverConfig, StepReport, TimeStepControl,
};
pub use cases::{
    check_helix_convergence, helix_velocity, init_helix, init_tgv, solenoidal_perturbation,
    HelixField, HelixInit, HelixParams, Kernel, TgvParams,
};
pub use diagnostics::{
    dissipation_series, energy_spectrum, growth_rate_fit, kinetic_energy, max_divergence,
    sgs_dissipation, vortex_deviation, vorticity_magnitude, DiagnosticsRecord, GrowthFit,
};
