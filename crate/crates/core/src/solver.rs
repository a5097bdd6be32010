//! Split-step spectral integrator for i u_t + Δu = λ|u|^{4/d}u.
//!
//! Strang splitting alternates an exact pointwise nonlinear phase rotation
//! (|u| is invariant under it, so the substep is exact, not iterative) with
//! the exact spectral linear flow; both substeps preserve the L² norm, so
//! mass is conserved to rounding regardless of dt.  Backward evolution uses
//! the conjugation symmetry u(t,x) → conj(u)(−t,x), which inverts the
//! forward stepper exactly, step for step.
//!
//! [`duhamel_residual`] is the solver-independent correctness oracle: it
//! rebuilds the trajectory from the fixed-point integral form using only the
//! exact linear propagator and a trapezoid rule, and reports the worst
//! relative mismatch.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::field::{fft_all_axes, spectral_transform, Field};
use crate::grid::Grid;
use crate::norms::{
    balanced_pair, canonical_pairs, l2_norm, spacetime_norm, stable_sum, strichartz_sup_norm,
    Trajectory,
};

/// Any sample above this magnitude (or non-finite) aborts the evolution.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

/// Largest |lambda| the solver accepts.
pub const LAMBDA_CAP: f64 = 16.0;

/// Horizon cap for [`lwp_time`]; bisection resolves down to T_CAP / 2^10.
pub const LWP_T_CAP: f64 = 8.0;
const LWP_HALVINGS: u32 = 10;

/// Coupling, base step, dealias switch, and snapshot stride for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    lambda: f64,
    dt: f64,
    dealias: bool,
    snapshot_stride: usize,
}

impl SolverConfig {
    pub fn new(lambda: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(CoreError::BadStepSize(dt));
        }
        if !(lambda.is_finite() && lambda.abs() <= LAMBDA_CAP) {
            return Err(CoreError::BadNormParameter(format!(
                "coupling {lambda} outside [-{LAMBDA_CAP}, {LAMBDA_CAP}]"
            )));
        }
        Ok(SolverConfig { lambda, dt, dealias: false, snapshot_stride: 1 })
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn with_snapshot_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride.max(1);
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }

    pub fn snapshot_stride(&self) -> usize {
        self.snapshot_stride
    }
}

// one prepared step: cached linear phase table (with optional 2/3-rule mask)
// and the nonlinear exponent 4/d
struct Stepper {
    grid: Grid,
    lambda: f64,
    half_dt: f64,
    lin_phase: Vec<Complex64>,
    inv_n: f64,
    quartic: bool, // d = 1 uses |u|^4, d = 2 uses |u|^2
}

impl Stepper {
    fn new(grid: Grid, dt: f64, cfg: &SolverConfig) -> Stepper {
        let n = grid.points_per_axis();
        let keep = n / 3; // 2/3-rule: drop |k| > N/3
        let lin_phase = (0..grid.total_points())
            .map(|flat| {
                let phase = Complex64::cis(-grid.frequency_squared(flat) * dt);
                if cfg.dealias && !mode_within(&grid, flat, keep) {
                    Complex64::default()
                } else {
                    phase
                }
            })
            .collect();
        Stepper {
            grid,
            lambda: cfg.lambda,
            half_dt: 0.5 * dt,
            lin_phase,
            inv_n: 1.0 / grid.total_points() as f64,
            quartic: grid.dim() == 1,
        }
    }

    fn nonlinear_half(&self, buf: &mut [Complex64]) {
        if self.lambda == 0.0 {
            return;
        }
        let scale = -self.lambda * self.half_dt;
        for z in buf.iter_mut() {
            let m = z.norm_sqr();
            let m = if self.quartic { m * m } else { m };
            *z *= Complex64::cis(scale * m);
        }
    }

    fn step(&self, buf: &mut [Complex64]) {
        self.nonlinear_half(buf);
        fft_all_axes(buf, &self.grid, true);
        for (c, phase) in buf.iter_mut().zip(&self.lin_phase) {
            *c *= phase * self.inv_n;
        }
        fft_all_axes(buf, &self.grid, false);
        self.nonlinear_half(buf);
    }
}

fn mode_within(grid: &Grid, flat: usize, keep: u32) -> bool {
    let n = grid.points_per_axis() as usize;
    let mut rest = flat;
    for _ in 0..grid.dim() {
        let idx = (rest % n) as u32;
        if grid.mode_number(idx).unsigned_abs() > keep as u64 {
            return false;
        }
        rest /= n;
    }
    true
}

fn check_finite(buf: &[Complex64], step: usize, time: f64) -> Result<()> {
    for z in buf {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm_sqr() > BLOWUP_THRESHOLD * BLOWUP_THRESHOLD
        {
            return Err(CoreError::BlowUp { step, time });
        }
    }
    Ok(())
}

/// One Strang step of size cfg.dt (half nonlinear, full linear, half
/// nonlinear); exactly mass-preserving.
pub fn strang_step(f: &Field, cfg: &SolverConfig) -> Result<Field> {
    let stepper = Stepper::new(*f.grid(), cfg.dt, cfg);
    let mut buf = f.samples().to_vec();
    stepper.step(&mut buf);
    check_finite(&buf, 0, f.time() + cfg.dt)?;
    Field::new(*f.grid(), f.time() + cfg.dt, buf)
}

/// Evolve f to t_target, returning snapshots every `snapshot_stride` steps
/// with both endpoints included.  The step count is chosen so an integer
/// number of steps of size ≤ cfg.dt exactly covers the interval; backward
/// targets run the conjugated system forward.
pub fn evolve(f: &Field, t_target: f64, cfg: &SolverConfig) -> Result<Trajectory> {
    if !t_target.is_finite() {
        return Err(CoreError::BadStepSize(t_target));
    }
    if t_target == f.time() {
        return Trajectory::new(vec![f.clone()]);
    }
    if t_target < f.time() {
        // conjugation symmetry: conj(u)(-t) solves the same equation
        let mut mirror = f.conjugated();
        mirror.set_time(-f.time());
        let run = evolve(&mirror, -t_target, cfg)?;
        let back: Vec<Field> = run
            .fields()
            .iter()
            .map(|g| {
                let mut h = g.conjugated();
                h.set_time(-g.time());
                h
            })
            .collect();
        return Trajectory::new(back);
    }

    let t0 = f.time();
    let span = t_target - t0;
    let n_steps = (span / cfg.dt).ceil().max(1.0) as usize;
    let dt = span / n_steps as f64;
    let stepper = Stepper::new(*f.grid(), dt, cfg);

    let mut buf = f.samples().to_vec();
    let mut snapshots = vec![f.clone()];
    for step in 1..=n_steps {
        stepper.step(&mut buf);
        let time = if step == n_steps { t_target } else { t0 + step as f64 * dt };
        check_finite(&buf, step, time)?;
        if step == n_steps || step % cfg.snapshot_stride == 0 {
            snapshots.push(Field::new(*f.grid(), time, buf.clone())?);
        }
    }
    Trajectory::new(snapshots)
}

/// Worst relative L² mismatch between the trajectory and its Duhamel
/// reconstruction u(t) = e^{i(t-t0)Δ}u0 - iλ ∫ e^{i(t-t')Δ}(|u|^{4/d}u)(t')dt',
/// probed at the quarter points of the trajectory.  Uses only the exact
/// linear propagator and trapezoid quadrature, never the stepper.
pub fn duhamel_residual(tr: &Trajectory, lambda: f64) -> Result<f64> {
    const MIN_SNAPSHOTS: usize = 16;
    if tr.len() < MIN_SNAPSHOTS {
        return Err(CoreError::TooFewSnapshots { need: MIN_SNAPSHOTS, got: tr.len() });
    }
    if !(lambda.is_finite() && lambda.abs() <= LAMBDA_CAP) {
        return Err(CoreError::BadNormParameter(format!("coupling {lambda}")));
    }
    let grid = *tr.first().grid();
    let quartic = grid.dim() == 1;
    let times = tr.times();
    let t0 = times[0];
    let cell = grid.frequency_cell_measure();
    let mass0 = l2_norm(tr.first());
    if mass0 == 0.0 {
        return Err(CoreError::ZeroInput);
    }

    // spectra of every snapshot and of the nonlinearity at every snapshot
    let spectra: Vec<Vec<Complex64>> = tr
        .fields()
        .iter()
        .map(|f| spectral_transform(f).coefficients().to_vec())
        .collect();
    let nonlinear_spectra: Vec<Vec<Complex64>> = tr
        .fields()
        .iter()
        .map(|f| {
            let mut g = f.clone();
            for z in g.samples_mut() {
                let m = z.norm_sqr();
                *z *= if quartic { m * m } else { m };
            }
            spectral_transform(&g).coefficients().to_vec()
        })
        .collect();

    let last = tr.len() - 1;
    let probes: Vec<usize> = [last / 4, last / 2, 3 * last / 4, last]
        .iter()
        .copied()
        .filter(|&p| p > 0)
        .collect();

    let minus_i_lambda = Complex64::new(0.0, -lambda);
    let mut worst = 0.0f64;
    for &p in &probes {
        let tp = times[p];
        // trapezoid weights on the node prefix [t0, tp]
        let mut w = vec![0.0; p + 1];
        for i in 0..=p {
            let lo = if i == 0 { times[0] } else { times[i - 1] };
            let hi = if i == p { times[p] } else { times[i + 1] };
            w[i] = 0.5 * (hi - lo).abs();
        }
        let mut err2 = 0.0;
        let mut mode = vec![Complex64::default(); spectra[0].len()];
        for (flat, slot) in mode.iter_mut().enumerate() {
            let xi2 = grid.frequency_squared(flat);
            let mut acc = Complex64::cis(-xi2 * (tp - t0)) * spectra[0][flat];
            let mut duhamel = Complex64::default();
            for i in 0..=p {
                duhamel += w[i] * Complex64::cis(-xi2 * (tp - times[i])) * nonlinear_spectra[i][flat];
            }
            acc += minus_i_lambda * duhamel;
            *slot = acc - spectra[p][flat];
        }
        err2 += stable_sum(mode.iter().map(|z| z.norm_sqr())) * cell;
        worst = worst.max(err2.sqrt() / mass0);
    }
    Ok(worst)
}

/// Result of the empirical local-existence probe.
#[derive(Debug, Clone, Copy)]
pub struct LwpEstimate {
    pub t_lwp: f64,
    pub delta1: f64,
    pub balanced_norm: f64,
}

/// Largest dyadic horizon T = T_CAP·2^{-j}, j ≤ 10, whose balanced
/// spacetime norm stays ≤ delta1; also asserts the canonical-pair sup norm
/// on that horizon stays within twice the initial mass.
pub fn lwp_time(u0: &Field, delta1: f64, cfg: &SolverConfig) -> Result<LwpEstimate> {
    if !(delta1 > 0.0 && delta1.is_finite()) {
        return Err(CoreError::BadNormParameter(format!("smallness target {delta1}")));
    }
    let mass0 = l2_norm(u0);
    if mass0 == 0.0 {
        return Ok(LwpEstimate { t_lwp: LWP_T_CAP, delta1, balanced_norm: 0.0 });
    }

    // one evolution with snapshots at exactly T_CAP/2^10 spacing, so every
    // dyadic horizon is a snapshot prefix
    let slots = 1usize << LWP_HALVINGS;
    let steps_per_slot =
        ((LWP_T_CAP / slots as f64) / cfg.dt).ceil().max(1.0) as usize;
    let run_cfg = SolverConfig {
        dt: LWP_T_CAP / (slots * steps_per_slot) as f64,
        snapshot_stride: steps_per_slot,
        ..*cfg
    };
    let tr = evolve(u0, u0.time() + LWP_T_CAP, &run_cfg)?;
    debug_assert_eq!(tr.len(), slots + 1);

    let pair = balanced_pair(u0.grid().dim());
    let mut accepted: Option<(f64, f64)> = None;
    for j in 0..=LWP_HALVINGS {
        let end = slots >> j;
        let prefix = tr.prefix(end);
        let norm = spacetime_norm(&prefix, &pair)?;
        if norm <= delta1 {
            accepted = Some((LWP_T_CAP / (1u64 << j) as f64, norm));
            break;
        }
        if j == LWP_HALVINGS {
            return Err(CoreError::NoAdmissibleHorizon { delta: delta1, norm });
        }
    }
    let (t_lwp, balanced_norm) = accepted.expect("loop either accepts or errors");

    let end = (slots as f64 * t_lwp / LWP_T_CAP).round() as usize;
    let sup = strichartz_sup_norm(&tr.prefix(end), &canonical_pairs(u0.grid().dim()))?;
    if sup > 2.0 * mass0 * (1.0 + 1e-9) {
        return Err(CoreError::NormBoundViolated(format!(
            "canonical sup norm {sup:.6e} exceeds twice the initial mass {:.6e}",
            2.0 * mass0
        )));
    }
    Ok(LwpEstimate { t_lwp, delta1, balanced_norm })
}

/// Running spacetime-norm proxy over growing prefixes plus a divergence flag.
#[derive(Debug, Clone)]
pub struct BlowupReport {
    pub horizon_times: Vec<f64>,
    pub proxy_norms: Vec<f64>,
    pub ceiling: f64,
    pub diverged: bool,
}

/// Track the canonical-pair sup norm over growing subintervals of the
/// trajectory and flag if it ever exceeds the ceiling.
pub fn blowup_diagnostic(tr: &Trajectory, ceiling: f64) -> Result<BlowupReport> {
    if !(ceiling > 0.0 && ceiling.is_finite()) {
        return Err(CoreError::BadNormParameter(format!("proxy ceiling {ceiling}")));
    }
    let pairs = canonical_pairs(tr.first().grid().dim());
    let last = tr.len() - 1;
    let horizons: Vec<usize> = (1..=8)
        .map(|k| (k * last).div_euclid(8).max(1))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut horizon_times = Vec::new();
    let mut proxy_norms = Vec::new();
    for end in horizons {
        let prefix = tr.prefix(end);
        horizon_times.push(prefix.last().time());
        proxy_norms.push(strichartz_sup_norm(&prefix, &pairs)?);
    }
    let diverged = proxy_norms.iter().any(|&v| v > ceiling);
    Ok(BlowupReport { horizon_times, proxy_norms, ceiling, diverged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{free_propagate, gaussian_initial, GaussianParams};
    use crate::norms::energy;

    fn small_gaussian(amp: f64, conc: f64, grid: &Grid) -> Field {
        let p = GaussianParams::new(1.0, conc).unwrap();
        gaussian_initial(&p, grid).unwrap().scaled(Complex64::new(amp, 0.0))
    }

    fn grid_1d() -> Grid {
        Grid::new(1, 1024, 40.0).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(1.0, 1e-3).is_ok());
        assert!(SolverConfig::new(1.0, 0.0).is_err());
        assert!(SolverConfig::new(1.0, f64::NAN).is_err());
        assert!(SolverConfig::new(100.0, 1e-3).is_err());
    }

    #[test]
    fn lambda_zero_step_matches_free_propagate() {
        let grid = grid_1d();
        let f = small_gaussian(1.0, 1.0, &grid);
        let cfg = SolverConfig::new(0.0, 0.01).unwrap();
        let stepped = strang_step(&f, &cfg).unwrap();
        let free = free_propagate(&f, 0.01).unwrap();
        let gap = l2_norm(&stepped.difference(&free).unwrap());
        assert!(gap < 1e-14, "gap {gap}");
    }

    #[test]
    fn mass_conserved_over_thousand_steps() {
        let grid = grid_1d();
        let f = small_gaussian(1.0, 1.0, &grid);
        let cfg = SolverConfig::new(1.0, 1e-3).unwrap().with_snapshot_stride(1000);
        let tr = evolve(&f, 1.0, &cfg).unwrap();
        let drift = (l2_norm(tr.last()) - l2_norm(&f)).abs() / l2_norm(&f);
        assert!(drift < 1e-10, "mass drift {drift}");
    }

    #[test]
    fn energy_drift_is_second_order() {
        let grid = grid_1d();
        let f = small_gaussian(0.5, 1.0, &grid);
        let lambda = 1.0;
        let e0 = energy(&f, lambda).unwrap();
        let drift = |dt: f64| {
            let cfg = SolverConfig::new(lambda, dt).unwrap().with_snapshot_stride(1 << 30);
            let tr = evolve(&f, 0.5, &cfg).unwrap();
            (energy(tr.last(), lambda).unwrap() - e0).abs()
        };
        let ratio = drift(0.02) / drift(0.01);
        assert!((3.0..=5.0).contains(&ratio), "drift ratio {ratio}");
    }

    #[test]
    fn endpoint_error_is_second_order() {
        let grid = grid_1d();
        let f = small_gaussian(0.6, 1.0, &grid);
        let endpoint = |dt: f64| {
            let cfg = SolverConfig::new(1.0, dt).unwrap().with_snapshot_stride(1 << 30);
            evolve(&f, 0.5, &cfg).unwrap().last().clone()
        };
        let reference = endpoint(5e-4);
        let err = |dt: f64| l2_norm(&endpoint(dt).difference(&reference).unwrap());
        let ratio = err(8e-3) / err(4e-3);
        assert!(
            (2.0f64.powf(1.8)..=2.0f64.powf(2.2)).contains(&ratio),
            "refinement ratio {ratio}"
        );
    }

    #[test]
    fn backward_evolution_inverts_forward() {
        let grid = grid_1d();
        let f = small_gaussian(0.7, 1.0, &grid);
        let cfg = SolverConfig::new(1.0, 1e-3).unwrap().with_snapshot_stride(1 << 30);
        let fwd = evolve(&f, 0.8, &cfg).unwrap();
        let back = evolve(fwd.last(), 0.0, &cfg).unwrap();
        assert_eq!(back.last().time(), 0.0);
        let gap = l2_norm(&back.last().difference(&f).unwrap()) / l2_norm(&f);
        assert!(gap < 1e-11, "round trip gap {gap}");
    }

    #[test]
    fn singleton_and_snapshot_shapes() {
        let grid = grid_1d();
        let f = small_gaussian(0.5, 1.0, &grid);
        let cfg = SolverConfig::new(1.0, 0.01).unwrap();
        let single = evolve(&f, f.time(), &cfg).unwrap();
        assert_eq!(single.len(), 1);
        // stride 7 over 100 steps: snapshots at 0, 7, ..., 98, 100
        let cfg = SolverConfig::new(1.0, 0.01).unwrap().with_snapshot_stride(7);
        let tr = evolve(&f, 1.0, &cfg).unwrap();
        assert_eq!(tr.len(), 2 + 100 / 7);
        assert_eq!(tr.first().time(), 0.0);
        assert_eq!(tr.last().time(), 1.0);
    }

    #[test]
    fn blowup_detection_trips_on_huge_samples() {
        let grid = Grid::new(1, 64, 10.0).unwrap();
        let mut f = Field::zeros(grid, 0.0);
        f.samples_mut()[10] = Complex64::new(2e8, 0.0);
        let cfg = SolverConfig::new(1.0, 1e-3).unwrap();
        assert!(matches!(strang_step(&f, &cfg), Err(CoreError::BlowUp { .. })));
    }

    #[test]
    fn small_data_stays_near_linear_flow() {
        let grid = grid_1d();
        let eps = 0.01;
        let f = small_gaussian(eps, 1.0, &grid);
        let cfg = SolverConfig::new(1.0, 2e-3).unwrap().with_snapshot_stride(1 << 30);
        let tr = evolve(&f, 1.0, &cfg).unwrap();
        let lin = free_propagate(&f, 1.0).unwrap();
        let gap = l2_norm(&tr.last().difference(&lin).unwrap());
        // quintic smallness: gap of order eps^5, constant measured well under 10
        assert!(gap < 10.0 * eps.powi(5), "gap {gap} vs {}", 10.0 * eps.powi(5));
        assert!(gap > 0.0);
    }

    #[test]
    fn duhamel_residual_vanishes_for_free_flow() {
        let grid = grid_1d();
        let f = small_gaussian(1.0, 1.0, &grid);
        let fields: Vec<Field> = (0..=32)
            .map(|i| free_propagate(&f, i as f64 / 32.0).unwrap())
            .collect();
        let tr = Trajectory::new(fields).unwrap();
        let res = duhamel_residual(&tr, 0.0).unwrap();
        assert!(res < 1e-10, "free-flow residual {res}");
    }

    #[test]
    fn duhamel_residual_small_and_refining_for_nls() {
        let grid = grid_1d();
        let f = small_gaussian(0.5, 1.0, &grid);
        let run = |dt: f64, snaps: usize| {
            let cfg = SolverConfig::new(1.0, dt)
                .unwrap()
                .with_snapshot_stride(((1.0 / dt) as usize) / snaps);
            let tr = evolve(&f, 1.0, &cfg).unwrap();
            duhamel_residual(&tr, 1.0).unwrap()
        };
        let coarse = run(1e-3, 64);
        let fine = run(5e-4, 128);
        assert!(coarse < 1e-4, "coarse residual {coarse}");
        let ratio = coarse / fine;
        assert!(ratio > 2.5, "refinement ratio {ratio}");
    }

    #[test]
    fn duhamel_residual_flags_corruption() {
        let grid = grid_1d();
        let f = small_gaussian(0.5, 1.0, &grid);
        let cfg = SolverConfig::new(1.0, 1e-3).unwrap().with_snapshot_stride(1000 / 64);
        let tr = evolve(&f, 1.0, &cfg).unwrap();
        let baseline = duhamel_residual(&tr, 1.0).unwrap();
        let mut fields = tr.fields().to_vec();
        let mid = fields.len() / 2;
        fields[mid] = fields[mid].scaled(Complex64::new(1.05, 0.0));
        let corrupted = duhamel_residual(&Trajectory::new(fields).unwrap(), 1.0).unwrap();
        assert!(
            corrupted > 10.0 * baseline,
            "corrupted {corrupted} vs baseline {baseline}"
        );
    }

    #[test]
    fn duhamel_needs_enough_snapshots() {
        let grid = grid_1d();
        let f = small_gaussian(1.0, 1.0, &grid);
        let fields: Vec<Field> =
            (0..8).map(|i| free_propagate(&f, i as f64 * 0.1).unwrap()).collect();
        let tr = Trajectory::new(fields).unwrap();
        assert!(matches!(
            duhamel_residual(&tr, 0.0),
            Err(CoreError::TooFewSnapshots { .. })
        ));
    }

    #[test]
    fn lwp_zero_data_reaches_the_cap() {
        let grid = Grid::new(1, 64, 10.0).unwrap();
        let f = Field::zeros(grid, 0.0);
        let cfg = SolverConfig::new(1.0, 0.01).unwrap();
        let est = lwp_time(&f, 0.1, &cfg).unwrap();
        assert_eq!(est.t_lwp, LWP_T_CAP);
        assert_eq!(est.balanced_norm, 0.0);
    }

    #[test]
    fn lwp_scaling_and_monotonicity() {
        let grid = Grid::new(1, 1024, 40.0).unwrap();
        let cfg = SolverConfig::new(1.0, 5e-3).unwrap();
        let base = small_gaussian(0.19, 1.0, &grid);
        let est = lwp_time(&base, 0.1, &cfg).unwrap();
        assert!(est.t_lwp < LWP_T_CAP, "expected an interior horizon");
        assert!(est.balanced_norm <= 0.1 * (1.0 + 1e-6));

        // critical rescale x -> 2x preserves mass and quarters the horizon
        let sharp = small_gaussian(0.19, 4.0, &grid);
        let est4 = lwp_time(&sharp, 0.1, &cfg).unwrap();
        let ratio = est4.t_lwp / est.t_lwp;
        assert!(
            (0.125..=0.5).contains(&ratio),
            "scaling ratio {ratio} (T {} vs {})",
            est4.t_lwp,
            est.t_lwp
        );

        // increasing the mass cannot extend the horizon
        let big = small_gaussian(0.22, 1.0, &grid);
        let est2 = lwp_time(&big, 0.1, &cfg).unwrap();
        assert!(est2.t_lwp <= est.t_lwp);
    }

    #[test]
    fn blowup_diagnostic_reports() {
        let grid = grid_1d();
        let zero = Field::zeros(grid, 0.0);
        let cfg = SolverConfig::new(1.0, 0.01).unwrap().with_snapshot_stride(5);
        let tr = evolve(&zero, 1.0, &cfg).unwrap();
        let report = blowup_diagnostic(&tr, 1.0).unwrap();
        assert!(!report.diverged);
        assert!(report.proxy_norms.iter().all(|&v| v == 0.0));

        let f = small_gaussian(0.5, 1.0, &grid);
        let tr = evolve(&f, 1.0, &cfg).unwrap();
        let report = blowup_diagnostic(&tr, 10.0).unwrap();
        assert!(!report.diverged);
        // proxies are over nested prefixes, so they never decrease
        for w in report.proxy_norms.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        let tight = blowup_diagnostic(&tr, report.proxy_norms[0] * 0.5).unwrap();
        assert!(tight.diverged);
    }
}
