//! Experiment runners: one deterministic routine per experiment kind.
//!
//! Each runner validates its `[params]` keys, computes a fixed set of CSV
//! rows (already in declared sort order), and emits named assertions with
//! pinned tolerances. Independent points may be computed in parallel via
//! [`crate::parallel::ordered_map`]; results never depend on the worker
//! count or scheduling.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pcnls_core::{
    balanced_pair, build_schedule, c_ds, energy, evolve, f_map_t_independence, gaussian_exact,
    gaussian_initial, growth_bounds_check, growth_pair_check, heavy_tail_profile,
    hs_propagation_check, hs_propagation_pair_check, interp_norm, interp_norm_with_nodes,
    l2_norm, lemma23_bound_check, linear_divergence_table, mass, nls_illposed_demo,
    pc_energy_identity, pc_solution_check, pc_solution_check_with, pc_spacetime_isometry_check,
    pc_transform, r_width, regularized_limit_check, scatter_extract, strang_step, weighted_norm,
    CoreError, Field, GaussianParams, Grid, NormPair, PcConvention, SolverConfig, SpatialWeight,
    Trajectory, INTERP_LAMBDA_NODES,
};

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{fmt_f64, Assertion, RunReport};
use crate::parallel::ordered_map;

/// Failures while running an experiment: bad parameters are config errors,
/// everything else is a computation error.
#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Core(CoreError),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Core(e) => write!(f, "computation failed: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        RunError::Core(e)
    }
}

type Result<T> = std::result::Result<T, RunError>;

/// Dispatches a validated config to its runner.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    match cfg.name.as_str() {
        "free-oracle" => free_oracle(cfg),
        "mass-conservation" => mass_conservation(cfg),
        "splitting-order" => splitting_order(cfg),
        "pc-involution" => pc_involution(cfg),
        "pc-solution-map" => pc_solution_map(cfg),
        "pc-spacetime-isometry" => pc_spacetime_isometry(cfg),
        "gaussian-weighted-law" => gaussian_weighted_law(cfg),
        "virial-constancy" => virial_constancy(cfg),
        "interp-bounds" => interp_bounds(cfg),
        "transform-regularity-ratio" => transform_regularity_ratio(cfg),
        "illposed-linear-table" => illposed_linear_table(cfg),
        "illposed-nls-demo" => illposed_nls_demo(cfg),
        "pipeline-tindependence" => pipeline_tindependence(cfg),
        "growth-bounds" => growth_bounds(cfg),
        "regularized-limit" => regularized_limit(cfg),
        "scattering-ladder" => scattering_ladder(cfg),
        other => Err(RunError::Config(ConfigError::general(format!(
            "unknown experiment `{other}`; see `pcnls list-presets` for the catalog"
        )))),
    }
}

fn make_grid(cfg: &ExperimentConfig) -> Result<Grid> {
    Ok(Grid::new(cfg.dimension, cfg.points, cfg.half_width)?)
}

fn solver(cfg: &ExperimentConfig) -> Result<SolverConfig> {
    Ok(SolverConfig::new(cfg.lambda, cfg.dt)?.with_dealias(cfg.dealias))
}

fn gaussian_data(cfg: &ExperimentConfig, grid: &Grid) -> Result<Field> {
    let p = GaussianParams::new(cfg.param_f64("amplitude")?, cfg.param_f64("concentration")?)?;
    Ok(gaussian_initial(&p, grid)?)
}

/// Largest consecutive ratio `v[i+1] / v[i]`; below 1 certifies a strictly
/// decreasing sequence.
fn max_consecutive_ratio(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] / w[0]).fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest consecutive ratio; above 1 certifies a strictly increasing one.
fn min_consecutive_ratio(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min)
}

fn collect<T>(results: Vec<std::result::Result<T, CoreError>>) -> Result<Vec<T>> {
    results.into_iter().collect::<std::result::Result<Vec<T>, CoreError>>().map_err(RunError::from)
}

// ---------------------------------------------------------------------------
// solver oracles

fn free_oracle(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&["amplitude", "concentration", "t_end", "tol_rel_l2"])?;
    let t_end = cfg.param_f64_or("t_end", 1.0)?;
    let tol = cfg.param_f64_or("tol_rel_l2", 1e-8)?;
    let grid = make_grid(cfg)?;
    let p = GaussianParams::new(cfg.param_f64("amplitude")?, cfg.param_f64("concentration")?)?;
    let u0 = gaussian_initial(&p, &grid)?;
    let tr = evolve(&u0, t_end, &solver(cfg)?.with_snapshot_stride(usize::MAX))?;
    let numeric = tr.last();
    let exact = gaussian_exact(&p, t_end, &grid)?;
    let rel = l2_norm(&numeric.difference(&exact)?) / l2_norm(&exact);
    let mass_drift = (l2_norm(numeric) - l2_norm(&u0)).abs() / l2_norm(&u0);
    Ok(RunReport {
        columns: vec!["t_end", "rel_l2_error", "mass_drift"],
        rows: vec![vec![fmt_f64(t_end), fmt_f64(rel), fmt_f64(mass_drift)]],
        assertions: vec![Assertion::below("free_oracle_rel_l2", rel, tol)],
        reported: vec![],
        snapshots: vec![("final".into(), numeric.clone()), ("exact".into(), exact)],
    })
}

fn mass_conservation(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&["amplitude", "concentration", "steps", "tol_drift"])?;
    let steps = cfg.param_u64_or("steps", 10_000)? as usize;
    let tol = cfg.param_f64_or("tol_drift", 1e-10)?;
    let grid = make_grid(cfg)?;
    let u0 = gaussian_data(cfg, &grid)?;
    let solver = solver(cfg)?;
    let m0 = mass(&u0);
    let log_every = (steps / 10).max(1);
    let mut f = u0;
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for step in 1..=steps {
        f = strang_step(&f, &solver)?;
        let drift = (mass(&f) - m0).abs() / m0;
        worst = worst.max(drift);
        if step % log_every == 0 || step == steps {
            rows.push(vec![step.to_string(), fmt_f64(f.time()), fmt_f64(drift)]);
        }
    }
    Ok(RunReport {
        columns: vec!["step", "time", "rel_mass_drift"],
        rows,
        assertions: vec![Assertion::below("mass_drift_max", worst, tol)],
        reported: vec![("initial_mass".into(), m0)],
        snapshots: vec![("final".into(), f)],
    })
}

fn splitting_order(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&["amplitude", "concentration", "t_end", "ratio_lo", "ratio_hi"])?;
    let t_end = cfg.param_f64_or("t_end", 0.5)?;
    let lo = cfg.param_f64_or("ratio_lo", 3.0)?;
    let hi = cfg.param_f64_or("ratio_hi", 5.0)?;
    let grid = make_grid(cfg)?;
    let u0 = gaussian_data(cfg, &grid)?;
    let e0 = energy(&u0, cfg.lambda)?;
    let drift = |dt: f64| -> Result<f64> {
        let sc = SolverConfig::new(cfg.lambda, dt)?
            .with_dealias(cfg.dealias)
            .with_snapshot_stride(usize::MAX);
        let tr = evolve(&u0, t_end, &sc)?;
        Ok((energy(tr.last(), cfg.lambda)? - e0).abs())
    };
    let coarse = drift(cfg.dt)?;
    let fine = drift(cfg.dt / 2.0)?;
    let ratio = coarse / fine;
    Ok(RunReport {
        columns: vec!["dt", "energy_drift", "ratio_to_half_step"],
        rows: vec![
            vec![fmt_f64(cfg.dt), fmt_f64(coarse), fmt_f64(ratio)],
            vec![fmt_f64(cfg.dt / 2.0), fmt_f64(fine), String::new()],
        ],
        assertions: vec![
            Assertion::at_least("drift_ratio_lower", ratio, lo),
            Assertion::at_most("drift_ratio_upper", ratio, hi),
        ],
        reported: vec![("initial_energy".into(), e0)],
        snapshots: vec![],
    })
}

// ---------------------------------------------------------------------------
// transform identities

/// Unit-scale complex white noise; the seed alone fixes every sample.
fn noise_field(grid: Grid, time: f64, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Complex64> = (0..grid.total_points())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Field::new(grid, time, samples).expect("sample count matches the grid")
}

fn pc_involution(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&["trials", "times", "tol_isometry", "tol_involution"])?;
    let trials = cfg.param_u64_or("trials", 100)? as usize;
    let times = cfg.param_list_f64_or("times", &[0.5, 1.0, 2.0])?;
    let tol_iso = cfg.param_f64_or("tol_isometry", 1e-10)?;
    let tol_inv = cfg.param_f64_or("tol_involution", 1e-9)?;
    let grid = make_grid(cfg)?;

    struct Trial {
        gaps: Vec<(f64, f64, Option<f64>)>,
    }
    let outcomes = ordered_map(trials, |i| -> std::result::Result<Trial, CoreError> {
        let base = noise_field(grid, 0.0, cfg.seed.wrapping_add(i as u64));
        let norm = l2_norm(&base);
        let mut gaps = Vec::with_capacity(times.len());
        for &t in &times {
            let mut u = base.clone();
            u.set_time(t);
            let v = pc_transform(&u)?;
            let iso = (l2_norm(&v) - norm).abs() / norm;
            // the transform composed with itself is the identity up to a
            // spatial reflection exactly at t = 1
            let inv = if t == 1.0 {
                let w = pc_transform(&v)?;
                Some(l2_norm(&w.difference(&u.reflected())?) / norm)
            } else {
                None
            };
            gaps.push((t, iso, inv));
        }
        Ok(Trial { gaps })
    });
    let outcomes = collect(outcomes)?;

    let mut rows = Vec::new();
    let mut worst_iso: f64 = 0.0;
    let mut worst_inv: f64 = 0.0;
    for (i, trial) in outcomes.iter().enumerate() {
        for &(t, iso, inv) in &trial.gaps {
            worst_iso = worst_iso.max(iso);
            if let Some(g) = inv {
                worst_inv = worst_inv.max(g);
            }
            rows.push(vec![
                i.to_string(),
                fmt_f64(t),
                fmt_f64(iso),
                inv.map(fmt_f64).unwrap_or_default(),
            ]);
        }
    }
    Ok(RunReport {
        columns: vec!["trial", "time", "isometry_gap", "involution_gap"],
        rows,
        assertions: vec![
            Assertion::below("isometry_gap_max", worst_iso, tol_iso),
            Assertion::below("involution_gap_max", worst_inv, tol_inv),
        ],
        reported: vec![],
        snapshots: vec![],
    })
}

fn pc_solution_map(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&[
        "amplitude",
        "concentration",
        "t1",
        "free_t2",
        "free_points",
        "nls_t2",
        "nls_stride",
        "tol_free",
        "tol_nls",
        "control_factor",
    ])?;
    let t1 = cfg.param_f64_or("t1", 1.0)?;
    let free_t2 = cfg.param_f64_or("free_t2", 1.5)?;
    let m = cfg.param_u64_or("free_points", 33)? as usize;
    let nls_t2 = cfg.param_f64_or("nls_t2", 1.5)?;
    let stride = cfg.param_u64_or("nls_stride", 16)? as usize;
    let tol_free = cfg.param_f64_or("tol_free", 1e-6)?;
    let tol_nls = cfg.param_f64_or("tol_nls", 1e-3)?;
    let factor = cfg.param_f64_or("control_factor", 10.0)?;
    let grid = make_grid(cfg)?;
    let p = GaussianParams::new(cfg.param_f64("amplitude")?, cfg.param_f64("concentration")?)?;

    // closed-form free slab: residuals sit at rounding level and the flipped
    // chirp sign destroys them
    if m < 2 {
        return Err(RunError::Config(ConfigError::general("free_points must be at least 2")));
    }
    let fields: std::result::Result<Vec<Field>, CoreError> = (0..m)
        .map(|i| gaussian_exact(&p, t1 + (free_t2 - t1) * i as f64 / (m - 1) as f64, &grid))
        .collect();
    let free_slab = Trajectory::new(fields?)?;
    let residual_free = pc_solution_check(&free_slab, 0.0)?;
    let wrong = PcConvention { phase_sign: 1, ..PcConvention::default() };
    let residual_control = pc_solution_check_with(&free_slab, 0.0, wrong)?;
    let control_ratio = residual_control / residual_free;

    // nonlinear slab: march to the slab start without snapshots, then sample
    let sc = solver(cfg)?;
    let u0 = gaussian_initial(&p, &grid)?;
    let lead = evolve(&u0, t1, &sc.clone().with_snapshot_stride(usize::MAX))?;
    let slab = evolve(lead.last(), nls_t2, &sc.with_snapshot_stride(stride))?;
    let residual_nls = pc_solution_check(&slab, cfg.lambda)?;

    Ok(RunReport {
        columns: vec!["case", "residual"],
        rows: vec![
            vec!["free".into(), fmt_f64(residual_free)],
            vec!["free-wrong-sign".into(), fmt_f64(residual_control)],
            vec!["nls".into(), fmt_f64(residual_nls)],
        ],
        assertions: vec![
            Assertion::below("free_residual", residual_free, tol_free),
            Assertion::below("nls_residual", residual_nls, tol_nls),
            Assertion::at_least("wrong_sign_ratio", control_ratio, factor),
        ],
        reported: vec![("control_ratio".into(), control_ratio)],
        snapshots: vec![],
    })
}

fn exact_slab(p: &GaussianParams, grid: &Grid, t1: f64, t2: f64, m: usize) -> Result<Trajectory> {
    let fields: std::result::Result<Vec<Field>, CoreError> = (0..m)
        .map(|i| gaussian_exact(p, t1 + (t2 - t1) * i as f64 / (m - 1).max(1) as f64, grid))
        .collect();
    Ok(Trajectory::new(fields?)?)
}

fn pc_spacetime_isometry(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&[
        "amplitude",
        "concentration",
        "t1",
        "t2",
        "snapshots",
        "tol_rel",
        "refine_factor",
    ])?;
    let t1 = cfg.param_f64_or("t1", 1.0)?;
    let t2 = cfg.param_f64_or("t2", 2.0)?;
    let m = cfg.param_u64_or("snapshots", 64)? as usize;
    let tol = cfg.param_f64_or("tol_rel", 0.01)?;
    let refine = cfg.param_f64_or("refine_factor", 0.6)?;
    let grid = make_grid(cfg)?;
    let p = GaussianParams::new(cfg.param_f64("amplitude")?, cfg.param_f64("concentration")?)?;
    let pair = balanced_pair(cfg.dimension);

    let coarse = pc_spacetime_isometry_check(&exact_slab(&p, &grid, t1, t2, m)?, &pair)?;
    let fine = pc_spacetime_isometry_check(&exact_slab(&p, &grid, t1, t2, 2 * m)?, &pair)?;
    Ok(RunReport {
        columns: vec!["snapshots", "rel_gap"],
        rows: vec![
            vec![m.to_string(), fmt_f64(coarse)],
            vec![(2 * m).to_string(), fmt_f64(fine)],
        ],
        assertions: vec![
            Assertion::below("spacetime_gap", coarse, tol),
            Assertion::at_most("refinement_gain", fine / coarse, refine),
        ],
        reported: vec![],
        snapshots: vec![],
    })
}

fn gaussian_weighted_law(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&["amplitude", "a_values", "t_values", "s_values", "tol_rel"])?;
    let amplitude = cfg.param_f64("amplitude")?;
    let a_values = cfg.param_list_f64("a_values")?;
    let t_values = cfg.param_list_f64("t_values")?;
    let s_values = cfg.param_list_f64("s_values")?;
    let tol = cfg.param_f64_or("tol_rel", 1e-6)?;
    if a_values.len() != t_values.len() || a_values.len() != s_values.len() {
        return Err(RunError::Config(ConfigError::general(
            "a_values, t_values, and s_values must have equal lengths",
        )));
    }
    let grid = make_grid(cfg)?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..a_values.len() {
        let (a, t, s) = (a_values[i], t_values[i], s_values[i]);
        let p = GaussianParams::new(amplitude, a)?;
        let f = gaussian_exact(&p, t, &grid)?;
        let measured = weighted_norm(&f, s, SpatialWeight::Absolute)?;
        let predicted = c_ds(cfg.dimension, s)? * amplitude * r_width(a, t)?.powf(s);
        let rel = (measured / predicted - 1.0).abs();
        worst = worst.max(rel);
        rows.push(vec![
            fmt_f64(a),
            fmt_f64(t),
            fmt_f64(s),
            fmt_f64(measured),
            fmt_f64(predicted),
            fmt_f64(rel),
        ]);
    }
    Ok(RunReport {
        columns: vec!["a", "t", "s", "measured", "predicted", "rel_error"],
        rows,
        assertions: vec![Assertion::below("weighted_law_rel_error", worst, tol)],
        reported: vec![],
        snapshots: vec![],
    })
}

fn virial_constancy(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&[
        "amplitudes",
        "concentrations",
        "t1",
        "t2",
        "probe_stride",
        "tol_variation",
        "tol_family",
    ])?;
    let amplitudes = cfg.param_list_f64("amplitudes")?;
    let concentrations = cfg.param_list_f64("concentrations")?;
    let t1 = cfg.param_f64_or("t1", 1.0)?;
    let t2 = cfg.param_f64_or("t2", 2.0)?;
    let stride = cfg.param_u64_or("probe_stride", 125)? as usize;
    let tol_var = cfg.param_f64_or("tol_variation", 1e-3)?;
    let tol_family = cfg.param_f64_or("tol_family", 0.01)?;
    if amplitudes.len() != concentrations.len() {
        return Err(RunError::Config(ConfigError::general(
            "amplitudes and concentrations must have equal lengths",
        )));
    }
    let grid = make_grid(cfg)?;
    let sc = solver(cfg)?.with_snapshot_stride(stride);

    let members = ordered_map(amplitudes.len(), |i| -> std::result::Result<_, CoreError> {
        let p = GaussianParams::new(amplitudes[i], concentrations[i])?;
        let u0 = gaussian_initial(&p, &grid)?;
        pc_energy_identity(&u0, cfg.lambda, t1, t2, &sc)
    });
    let members = collect(members)?;

    let mut rows = Vec::new();
    let mut assertions = Vec::new();
    let mut ratios = Vec::new();
    for (i, rep) in members.iter().enumerate() {
        rows.push(vec![
            i.to_string(),
            fmt_f64(amplitudes[i]),
            fmt_f64(concentrations[i]),
            rep.taus.len().to_string(),
            fmt_f64(rep.variation),
            fmt_f64(rep.ratio),
            fmt_f64(rep.x_moment_sq),
        ]);
        assertions.push(Assertion::below(format!("energy_variation_{i}"), rep.variation, tol_var));
        ratios.push(rep.ratio);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = (ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - ratios.iter().copied().fold(f64::INFINITY, f64::min))
        / mean.abs();
    assertions.push(Assertion::below("ratio_family_spread", spread, tol_family));
    Ok(RunReport {
        columns: vec![
            "member",
            "amplitude",
            "concentration",
            "probes",
            "energy_variation",
            "energy_moment_ratio",
            "x_moment_sq",
        ],
        rows,
        assertions,
        // the proportionality constant itself is reported, not asserted
        reported: vec![("energy_moment_ratio_mean".into(), mean)],
        snapshots: vec![],
    })
}

// ---------------------------------------------------------------------------
// norm machinery

/// Small deterministic superposition of modulated bumps.
fn mixture(grid: Grid, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(0.2..1.0),
                rng.gen_range(0.3..2.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    Field::from_fn(grid, 0.0, |x| {
        let r2: f64 = x.iter().map(|xi| xi * xi).sum();
        terms
            .iter()
            .map(|&(c, a, k, phi)| {
                Complex64::from_polar(c * (-a * r2 / 2.0).exp(), k * x[0] + phi)
            })
            .sum()
    })
    .expect("mixture terms are finite")
}

fn interp_bounds(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&[
        "trials",
        "s",
        "bound_factor",
        "equiv_lo",
        "equiv_hi",
        "refine_drift",
    ])?;
    let trials = cfg.param_u64_or("trials", 20)? as usize;
    let s = cfg.param_f64_or("s", 0.5)?;
    let factor = cfg.param_f64_or("bound_factor", 1.05)?;
    let equiv_lo = cfg.param_f64_or("equiv_lo", 0.25)?;
    let equiv_hi = cfg.param_f64_or("equiv_hi", 4.0)?;
    let drift_tol = cfg.param_f64_or("refine_drift", 0.05)?;
    let grid = make_grid(cfg)?;
    let pair = NormPair::l2_weighted();

    struct Row {
        interp: f64,
        product: f64,
        equiv: f64,
        drift: f64,
    }
    let outcomes = ordered_map(trials, |i| -> std::result::Result<Row, CoreError> {
        let f = mixture(grid, cfg.seed.wrapping_add(i as u64));
        let interp = interp_norm(&f, s, &pair)?;
        let n0 = pair.norm0.evaluate(&f)?;
        let n1 = pair.norm1.evaluate(&f)?;
        let product = n0.powf(1.0 - s) * n1.powf(s);
        let direct = weighted_norm(&f, s, SpatialWeight::Bracket)?;
        let refined = interp_norm_with_nodes(&f, s, &pair, 2 * INTERP_LAMBDA_NODES)?;
        Ok(Row {
            interp,
            product,
            equiv: interp / direct,
            drift: (refined / interp - 1.0).abs(),
        })
    });
    let outcomes = collect(outcomes)?;

    let mut rows = Vec::new();
    let (mut worst_bound, mut worst_drift) = (0.0f64, 0.0f64);
    let (mut equiv_min, mut equiv_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, r) in outcomes.iter().enumerate() {
        let bound_ratio = r.interp / r.product;
        worst_bound = worst_bound.max(bound_ratio);
        worst_drift = worst_drift.max(r.drift);
        equiv_min = equiv_min.min(r.equiv);
        equiv_max = equiv_max.max(r.equiv);
        rows.push(vec![
            i.to_string(),
            fmt_f64(r.interp),
            fmt_f64(r.product),
            fmt_f64(bound_ratio),
            fmt_f64(r.equiv),
            fmt_f64(r.drift),
        ]);
    }
    Ok(RunReport {
        columns: vec!["trial", "interp_norm", "product_bound", "bound_ratio", "equiv_ratio", "refine_drift"],
        rows,
        assertions: vec![
            Assertion::at_most("product_bound_ratio", worst_bound, factor),
            Assertion::at_least("equivalence_lower", equiv_min, equiv_lo),
            Assertion::at_most("equivalence_upper", equiv_max, equiv_hi),
            Assertion::at_most("node_refinement_drift", worst_drift, drift_tol),
        ],
        reported: vec![("equiv_ratio_min".into(), equiv_min), ("equiv_ratio_max".into(), equiv_max)],
        snapshots: vec![],
    })
}

fn transform_regularity_ratio(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&[
        "amplitude",
        "concentrations",
        "times",
        "s",
        "q_bound",
        "refine_drift",
    ])?;
    let amplitude = cfg.param_f64_or("amplitude", 1.0)?;
    let concentrations = cfg.param_list_f64("concentrations")?;
    let times = cfg.param_list_f64("times")?;
    let s = cfg.param_f64_or("s", 0.5)?;
    let q_bound = cfg.param_f64_or("q_bound", 5.0)?;
    let drift_tol = cfg.param_f64_or("refine_drift", 0.05)?;
    let base = make_grid(cfg)?;
    let refined = Grid::new(cfg.dimension, cfg.points * 2, cfg.half_width)?;

    let mut rows = Vec::new();
    let (mut sup_base, mut sup_fine, mut worst_q) = (0.0f64, 0.0f64, 0.0f64);
    for &a in &concentrations {
        let p = GaussianParams::new(amplitude, a)?;
        for &t in &times {
            let q = lemma23_bound_check(&gaussian_exact(&p, t, &base)?, s)?;
            let q2 = lemma23_bound_check(&gaussian_exact(&p, t, &refined)?, s)?;
            sup_base = sup_base.max(q);
            sup_fine = sup_fine.max(q2);
            worst_q = worst_q.max(q).max(q2);
            rows.push(vec![fmt_f64(a), fmt_f64(t), fmt_f64(q), fmt_f64(q2)]);
        }
    }
    let drift = (sup_base / sup_fine - 1.0).abs();
    Ok(RunReport {
        columns: vec!["concentration", "time", "ratio", "ratio_refined"],
        rows,
        assertions: vec![
            Assertion::below("ratio_sup", worst_q, q_bound),
            Assertion::at_most("grid_refinement_drift", drift, drift_tol),
        ],
        reported: vec![("ratio_sup_base".into(), sup_base), ("ratio_sup_refined".into(), sup_fine)],
        snapshots: vec![],
    })
}

// ---------------------------------------------------------------------------
// norm-inflation families

fn illposed_linear_table(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&["k_max", "s", "growth_start", "a1", "times"])?;
    let k_max = cfg.param_u64_or("k_max", 4)? as usize;
    let s = cfg.param_f64_or("s", 0.5)?;
    let growth = cfg.param_f64_or("growth_start", 2.0)?;
    let a1 = cfg.param_f64_or("a1", 1.0)?;
    let times = cfg.param_list_f64_or("times", &[0.5, 1.0, 2.0, 4.0])?;

    let schedule = build_schedule(k_max, s, cfg.dimension, growth, a1)?;
    let table = linear_divergence_table(&schedule, &times)?;
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|r| {
            vec![
                r.k_max.to_string(),
                fmt_f64(r.t),
                fmt_f64(r.norm),
                fmt_f64(r.norm_at_zero),
                fmt_f64(r.lower_bound),
            ]
        })
        .collect();

    // divergence in the term count at the unit probe time
    let at_unit: Vec<f64> = table.iter().filter(|r| r.t == 1.0).map(|r| r.norm).collect();
    let growth_measure = if at_unit.len() >= 2 { min_consecutive_ratio(&at_unit) } else { f64::NAN };
    let zero_cap = table.iter().map(|r| r.norm_at_zero).fold(0.0f64, f64::max)
        / table.iter().map(|r| r.norm_at_zero).fold(f64::INFINITY, f64::min);
    Ok(RunReport {
        columns: vec!["k_max", "t", "norm", "norm_at_zero", "lower_bound"],
        rows,
        assertions: vec![Assertion::above("norm_growth_in_k_at_unit_time", growth_measure, 1.0)],
        reported: vec![("norm_at_zero_spread".into(), zero_cap)],
        snapshots: vec![],
    })
}

fn illposed_nls_demo(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&["k_values", "s", "t_probe"])?;
    let k_values = cfg.param_list_f64_or("k_values", &[1.0, 2.0, 3.0, 4.0])?;
    let s = cfg.param_f64_or("s", 0.5)?;
    let t_probe = cfg.param_f64_or("t_probe", 1.0)?;
    let sc = solver(cfg)?;
    let ks: Vec<u32> = k_values
        .iter()
        .map(|&v| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as u32)
            } else {
                Err(RunError::Config(ConfigError::general(format!(
                    "k_values entries must be positive integers, got {v}"
                ))))
            }
        })
        .collect::<Result<_>>()?;

    let reports = ordered_map(ks.len(), |i| nls_illposed_demo(ks[i], s, cfg.dimension, t_probe, &sc));
    let reports = collect(reports)?;

    let mut rows = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        rows.push(vec![
            ks[i].to_string(),
            fmt_f64(r.norm_in),
            fmt_f64(r.norm_out),
            fmt_f64(r.abs_norm_out),
            fmt_f64(r.linear_gap),
            fmt_f64(r.mass),
            r.points_per_axis.to_string(),
            fmt_f64(r.half_width),
        ]);
    }
    let norms_in: Vec<f64> = reports.iter().map(|r| r.norm_in).collect();
    let norms_out: Vec<f64> = reports.iter().map(|r| r.norm_out).collect();
    Ok(RunReport {
        columns: vec![
            "k",
            "norm_in",
            "norm_out",
            "abs_norm_out",
            "linear_gap",
            "mass",
            "points",
            "half_width",
        ],
        rows,
        assertions: vec![
            Assertion::below("input_norms_shrink", max_consecutive_ratio(&norms_in), 1.0),
            Assertion::above("output_norms_grow", min_consecutive_ratio(&norms_out), 1.0),
        ],
        reported: vec![],
        snapshots: vec![],
    })
}

// ---------------------------------------------------------------------------
// composed map

fn pipeline_tindependence(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&["amplitude", "concentration", "t_mids", "t_lwp", "s", "tol_spread"])?;
    let t_mids = cfg.param_list_f64("t_mids")?;
    let t_lwp = cfg.param_f64_or("t_lwp", 1.0)?;
    let s = cfg.param_f64_or("s", 0.5)?;
    let tol = cfg.param_f64_or("tol_spread", 1e-3)?;
    let grid = make_grid(cfg)?;
    let u0 = gaussian_data(cfg, &grid)?;
    let sc = solver(cfg)?.with_snapshot_stride(usize::MAX);
    let spread = f_map_t_independence(&u0, &t_mids, t_lwp, s, &sc)?;
    let mids = t_mids.iter().map(|t| fmt_f64(*t)).collect::<Vec<_>>().join(";");
    Ok(RunReport {
        columns: vec!["t_mids", "t_lwp", "s", "output_spread"],
        rows: vec![vec![mids, fmt_f64(t_lwp), fmt_f64(s), fmt_f64(spread)]],
        assertions: vec![Assertion::below("handoff_spread", spread, tol)],
        reported: vec![],
        snapshots: vec![],
    })
}

fn growth_bounds(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&[
        "amplitude",
        "concentration",
        "perturb_amplitude",
        "perturb_concentration",
        "s",
        "t_end",
        "t_mid",
        "t_lwp",
        "probe_stride",
        "ratio_bound",
    ])?;
    let s = cfg.param_f64_or("s", 0.5)?;
    let t_end = cfg.param_f64_or("t_end", 1.0)?;
    let t_mid = cfg.param_f64_or("t_mid", 0.5)?;
    let t_lwp = cfg.param_f64_or("t_lwp", 1.0)?;
    let stride = cfg.param_u64_or("probe_stride", 50)? as usize;
    let bound = cfg.param_f64_or("ratio_bound", 2.0)?;
    let grid = make_grid(cfg)?;
    let ua = gaussian_data(cfg, &grid)?;
    let perturb = GaussianParams::new(
        cfg.param_f64_or("perturb_amplitude", 0.02)?,
        cfg.param_f64_or("perturb_concentration", 2.0)?,
    )?;
    let ub = ua.sum(&gaussian_initial(&perturb, &grid)?)?;
    let sc = solver(cfg)?.with_snapshot_stride(stride);

    // forward-leg growth of the weighted norm
    let ledger = growth_bounds_check(&ua, s, t_end, &sc)?;
    // propagation across the transformed leg, alone and for a perturbation
    let transformed_leg = |u0: &Field| -> std::result::Result<Trajectory, CoreError> {
        let mid = evolve(u0, t_mid, &sc.clone().with_snapshot_stride(usize::MAX))?;
        let v0 = pc_transform(mid.last())?;
        evolve(&v0, -1.0 / t_lwp, &sc)
    };
    let tra = transformed_leg(&ua)?;
    let trb = transformed_leg(&ub)?;
    let prop = hs_propagation_check(&tra, s)?;
    let pair = hs_propagation_pair_check(&tra, &trb, s)?;
    let pair_ledger = growth_pair_check(&ua, &ub, s, t_end, &sc)?;

    let checks = [
        ("weighted_growth_ratio", ledger.max_hrho_ratio),
        ("transformed_leg_ratio", prop.max_ratio),
        ("perturbation_pair_ratio", pair.max_ratio),
    ];
    let rows = checks
        .iter()
        .map(|(name, v)| vec![(*name).to_string(), fmt_f64(*v)])
        .chain([
            vec!["pair_constant".to_string(), fmt_f64(pair_ledger.max_constant)],
            vec!["weighted_constant".to_string(), fmt_f64(ledger.max_weighted_constant)],
        ])
        .collect();
    Ok(RunReport {
        columns: vec!["check", "value"],
        rows,
        assertions: checks
            .iter()
            .map(|(name, v)| Assertion::below((*name).to_string(), *v, bound))
            .collect(),
        reported: vec![
            ("pair_constant".into(), pair_ledger.max_constant),
            ("pair_size_factor".into(), pair_ledger.size_factor),
            ("weighted_constant".into(), ledger.max_weighted_constant),
        ],
        snapshots: vec![],
    })
}

fn regularized_limit(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&["amplitude", "s", "cutoffs", "t_mid", "t_lwp"])?;
    let amplitude = cfg.param_f64_or("amplitude", 0.3)?;
    let s = cfg.param_f64_or("s", 0.5)?;
    let cutoffs = cfg.param_list_f64("cutoffs")?;
    let t_mid = cfg.param_f64_or("t_mid", 0.5)?;
    let t_lwp = cfg.param_f64_or("t_lwp", 1.0)?;
    let grid = make_grid(cfg)?;
    let u0 = heavy_tail_profile(&grid, s, amplitude)?;
    let sc = solver(cfg)?.with_snapshot_stride(usize::MAX);
    let table = regularized_limit_check(&u0, s, &cutoffs, t_mid, t_lwp, &sc)?;

    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.lam_lo),
                fmt_f64(r.lam_hi),
                fmt_f64(r.input_gap),
                fmt_f64(r.output_gap),
                fmt_f64(r.ratio),
            ]
        })
        .collect();
    // gaps between consecutive cutoffs must shrink as the cutoff grows
    let consecutive: Vec<f64> = cutoffs
        .windows(2)
        .filter_map(|w| {
            table
                .iter()
                .find(|r| r.lam_lo == w[0] && r.lam_hi == w[1])
                .map(|r| r.output_gap)
        })
        .collect();
    let cauchy = if consecutive.len() >= 2 {
        max_consecutive_ratio(&consecutive)
    } else {
        f64::NAN
    };
    let worst_ratio = table.iter().map(|r| r.ratio).fold(0.0f64, f64::max);
    Ok(RunReport {
        columns: vec!["cutoff_lo", "cutoff_hi", "input_gap", "output_gap", "gap_ratio"],
        rows,
        assertions: vec![Assertion::below("cauchy_column_shrinks", cauchy, 1.0)],
        reported: vec![("max_gap_ratio".into(), worst_ratio)],
        snapshots: vec![],
    })
}

fn scattering_ladder(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.check_param_keys(&["amplitude", "concentration", "horizons", "s", "tol_residual"])?;
    let horizons = cfg.param_list_f64("horizons")?;
    let s = cfg.param_f64_or("s", 0.5)?;
    let tol = cfg.param_f64_or("tol_residual", 1e-2)?;
    let grid = make_grid(cfg)?;
    let u0 = gaussian_data(cfg, &grid)?;
    let report = scatter_extract(&u0, &horizons, s, &solver(cfg)?)?;

    let mut rows = Vec::new();
    for (i, &t) in report.horizons.iter().enumerate() {
        rows.push(vec![
            fmt_f64(t),
            fmt_f64(report.extraction_residuals[i]),
            if i == 0 { String::new() } else { fmt_f64(report.cauchy_gaps[i - 1]) },
        ]);
    }
    let final_residual = *report.extraction_residuals.last().unwrap_or(&f64::NAN);
    let mut assertions = vec![
        Assertion::below("final_extraction_residual", final_residual, tol),
        Assertion::below(
            "residuals_shrink",
            max_consecutive_ratio(&report.extraction_residuals),
            1.0,
        ),
    ];
    if report.cauchy_gaps.len() >= 2 {
        assertions.push(Assertion::below(
            "cauchy_gaps_shrink",
            max_consecutive_ratio(&report.cauchy_gaps),
            1.0,
        ));
    }
    Ok(RunReport {
        columns: vec!["horizon", "extraction_residual", "cauchy_gap"],
        rows,
        assertions,
        reported: vec![],
        snapshots: vec![("u-plus".into(), report.u_plus.clone())],
    })
}
