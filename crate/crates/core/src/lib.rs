//! Core library: spectral fields, norms, exact Gaussian oracles, a
//! split-step integrator for the L²-critical nonlinear Schrödinger
//! equation, the pseudoconformal transform, K-method interpolation,
//! cascade constructions, and the transform pipeline built from them.

pub mod cascade;
pub mod error;
pub mod field;
pub mod gaussian;
pub mod grid;
pub mod interp;
pub mod norms;
pub mod pipeline;
pub mod pseudoconformal;
pub mod quadrature;
pub mod solver;
pub mod snapshot;

pub use cascade::{
    build_schedule, cascade_h0s_norm, linear_cascade_field, linear_divergence_table,
    nls_illposed_demo, schedule_growth_margin_at, schedule_margins, CascadeSchedule,
    DivergenceRow, IllposedDemoReport, ScheduleMargins, CASCADE_GROWTH_CAP,
    CASCADE_MAX_DEMO_WIDTH, CASCADE_MAX_TERMS, CASCADE_T_REF,
};
pub use error::{CoreError, Result};
pub use field::{
    apply_mode_multiplier, fractional_derivative, inverse_spectral_transform, lowpass,
    spectral_transform, Field, Spectrum,
};
pub use gaussian::{
    c_ds, c_prime_ds, free_propagate, gaussian_exact, gaussian_initial, r_width, GaussianParams,
};
pub use grid::Grid;
pub use interp::{
    interp_norm, interp_norm_with_nodes, k_functional, lemma23_bound_check,
    optimal_decomposition, KMode, NormKind, NormPair, INTERP_LAMBDA_MAX, INTERP_LAMBDA_MIN,
    INTERP_LAMBDA_NODES,
};
pub use norms::{
    admissible, balanced_pair, canonical_pairs, energy, h0s_norm, homogeneous_hs_norm, hs_norm,
    l2_norm, lr_norm, mass, spacetime_norm, sobolev_strichartz_norm, strichartz_sup_norm,
    weighted_norm, Exponent, ExponentPair, SpatialWeight, Trajectory,
};
pub use pipeline::{
    f_map, f_map_t_independence, growth_bounds_check, growth_pair_check, heavy_tail_profile,
    hs_propagation_check, hs_propagation_pair_check, regularity_exponent,
    regularized_limit_check, scatter_extract, scattering_profile, FMapRun, GrowthLedger,
    GrowthPairLedger, HsPropagation, LegDiagnostics, RegularizedRow, ScatterReport,
};
pub use pseudoconformal::{
    pc_energy_identity, pc_inverse, pc_inverse_with, pc_solution_check, pc_solution_check_with,
    pc_spacetime_isometry_check, pc_transform, pc_transform_to_grid, pc_transform_to_grid_with,
    pc_transform_with, PcConvention, PcEnergyReport, PC_MIN_SAMPLES_PER_PERIOD, PC_T_MIN,
};
pub use snapshot::{field_from_snapshot_bytes, read_snapshot, snapshot_bytes, write_snapshot};
pub use solver::{
    blowup_diagnostic, duhamel_residual, evolve, lwp_time, strang_step, BlowupReport,
    LwpEstimate, SolverConfig,
};
