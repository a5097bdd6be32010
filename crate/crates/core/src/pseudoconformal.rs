//! Pseudoconformal change of variables and its numerical certificates.
//!
//! The transform sends a field at time t (|t| >= [`PC_T_MIN`]) to a rescaled,
//! quadratically chirped copy at time -1/t.  On the grid it is an exact
//! relabelling: the output grid is the metadata-rescaled input grid, every
//! output sample is one input sample times a unimodular phase and a constant
//! scale, and no spatial interpolation is ever performed.  Comparisons across
//! different transform times therefore go through norms, or through
//! [`pc_transform_to_grid`], which evaluates the band-limited representative
//! of the source field exactly on a caller-chosen common grid.
//!
//! Certificates in this module check the L^2 isometry, the
//! involution-with-reflection identity, preservation of the evolution
//! equation, the spacetime-norm isometry, and constancy of the energy of the
//! transformed flow.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::field::{spectral_transform, Field};
use crate::grid::Grid;
use crate::norms::{
    admissible, energy, lr_norm, spacetime_norm, weighted_norm, Exponent, ExponentPair,
    SpatialWeight, Trajectory,
};
use crate::solver::{duhamel_residual, SolverConfig};

/// Smallest |t| accepted by the transform.  Below this the rescaled grid
/// over-resolves the data while the quadratic chirp under-resolves near the
/// grid edge.
pub const PC_T_MIN: f64 = 0.25;

/// Minimum number of samples per quadratic-phase period at the grid edge.
pub const PC_MIN_SAMPLES_PER_PERIOD: f64 = 8.0;

/// Sign and reflection convention of the transform.
///
/// The output samples are v(-1/t, y) = |t|^{d/2} e^{phase_sign * i t y^2 / 4}
/// u(t, sigma t y), with sigma = -1 when `reflection` is set.  The default is
/// pinned by requiring the transform to map free solutions to free solutions
/// (see the solution-map tests); the losing sign is kept available as a
/// negative control.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcConvention {
    /// Sign of the quadratic chirp exponent, +1 or -1.
    pub phase_sign: i8,
    /// Whether the spatial argument is reflected.
    pub reflection: bool,
}

impl Default for PcConvention {
    fn default() -> Self {
        PcConvention { phase_sign: -1, reflection: true }
    }
}

impl PcConvention {
    fn validate(&self) -> Result<()> {
        if self.phase_sign != 1 && self.phase_sign != -1 {
            return Err(CoreError::BadNormParameter(format!(
                "chirp sign must be +1 or -1, got {}",
                self.phase_sign
            )));
        }
        Ok(())
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t == 0.0 || t.abs() < PC_T_MIN {
        return Err(CoreError::TimeTooSmall { t, t_min: PC_T_MIN });
    }
    Ok(())
}

// samples per chirp period at the edge of the grid the chirp lives on: the
// local frequency of t y^2 / 4 at |y| = lc is |t| lc / 2, so one period spans
// 4 pi / (|t| lc) while the grid spacing is 2 lc / n
fn check_phase_resolution(n: u32, lc: f64, t_abs: f64) -> Result<()> {
    let spp = 2.0 * std::f64::consts::PI * n as f64 / (t_abs * lc * lc);
    if spp < PC_MIN_SAMPLES_PER_PERIOD {
        return Err(CoreError::PhaseUnderResolved {
            samples_per_period: spp,
            need: PC_MIN_SAMPLES_PER_PERIOD,
        });
    }
    Ok(())
}

fn amplitude_scale(dim: u32, t_abs: f64) -> f64 {
    match dim {
        1 => t_abs.sqrt(),
        _ => t_abs,
    }
}

/// Pseudoconformal transform under the default (pinned) convention.
pub fn pc_transform(f: &Field) -> Result<Field> {
    pc_transform_with(f, PcConvention::default())
}

/// Pseudoconformal transform of a field at time t into a field at time -1/t
/// on the grid rescaled by 1/|t|, under an explicit convention.
pub fn pc_transform_with(f: &Field, conv: PcConvention) -> Result<Field> {
    conv.validate()?;
    let t = f.time();
    check_time(t)?;
    let grid = f.grid();
    let out_grid = grid.rescaled(1.0 / t.abs())?;
    check_phase_resolution(grid.points_per_axis(), out_grid.half_width(), t.abs())?;
    let scale = amplitude_scale(grid.dim(), t.abs());
    // u is read at sigma * t * y, which lands on the grid point of the same
    // flat index when sigma * sign(t) > 0 and on the reflected one otherwise
    let flip = conv.reflection ^ (t < 0.0);
    let ps = conv.phase_sign as f64;
    let src = f.samples();
    let mut out = Vec::with_capacity(src.len());
    for flat in 0..src.len() {
        let y2 = out_grid.radius_squared(flat);
        let s = if flip { src[grid.reflected_index(flat)] } else { src[flat] };
        out.push(scale * Complex64::cis(ps * t * y2 / 4.0) * s);
    }
    Field::new(out_grid, -1.0 / t, out)
}

/// Inverse transform under the default convention.
pub fn pc_inverse(f: &Field) -> Result<Field> {
    pc_inverse_with(f, PcConvention::default())
}

/// Inverse of [`pc_transform_with`] for a field at negative time: applying
/// the transform twice reproduces the input up to spatial reflection, so the
/// inverse is one more transform followed by a reflection.
pub fn pc_inverse_with(f: &Field, conv: PcConvention) -> Result<Field> {
    if !(f.time() < 0.0) {
        return Err(CoreError::BadNormParameter(format!(
            "pseudoconformal inverse expects a negative time stamp, got {}",
            f.time()
        )));
    }
    Ok(pc_transform_with(f, conv)?.reflected())
}

/// Transform onto a caller-supplied grid (same dimension and point count) by
/// exact evaluation of the source field's band-limited representative.
///
/// This is the one sanctioned way to place transformed snapshots from
/// different times onto a common grid.  Target points whose preimage
/// sigma*t*y falls outside the source domain would read the meaningless
/// periodic extension, so they are zeroed; for boundary-decayed data the
/// discarded values are negligible.
pub fn pc_transform_to_grid(f: &Field, target: &Grid) -> Result<Field> {
    pc_transform_to_grid_with(f, target, PcConvention::default())
}

/// [`pc_transform_to_grid`] under an explicit convention.
pub fn pc_transform_to_grid_with(f: &Field, target: &Grid, conv: PcConvention) -> Result<Field> {
    conv.validate()?;
    let t = f.time();
    check_time(t)?;
    let grid = f.grid();
    if target.dim() != grid.dim() || target.points_per_axis() != grid.points_per_axis() {
        return Err(CoreError::GridMismatch);
    }
    check_phase_resolution(target.points_per_axis(), target.half_width(), t.abs())?;
    let dim = grid.dim();
    let n = target.points_per_axis() as usize;
    let sigma = if conv.reflection { -1.0 } else { 1.0 };
    let scale = amplitude_scale(dim, t.abs());
    let ps = conv.phase_sign as f64;
    let spec = spectral_transform(f);
    let pre: Vec<f64> = target.axis_coordinates().iter().map(|y| sigma * t * y).collect();
    let keep: Vec<bool> =
        pre.iter().map(|p| p.abs() <= grid.half_width() * (1.0 + 1e-12)).collect();
    let axis_lists: Vec<&[f64]> = (0..dim as usize).map(|_| pre.as_slice()).collect();
    let vals = spec.evaluate_tensor(&axis_lists)?;
    let mut out = Vec::with_capacity(vals.len());
    for (flat, v) in vals.into_iter().enumerate() {
        let inside = match dim {
            1 => keep[flat],
            _ => keep[flat / n] && keep[flat % n],
        };
        if inside {
            let y2 = target.radius_squared(flat);
            out.push(scale * Complex64::cis(ps * t * y2 / 4.0) * v);
        } else {
            out.push(Complex64::default());
        }
    }
    Field::new(target.clone(), -1.0 / t, out)
}

/// Certifies that the transform maps solutions to solutions: transforms every
/// snapshot of a positive-time slab onto the widest natural grid and returns
/// the Duhamel defect of the transformed trajectory.
pub fn pc_solution_check(tr: &Trajectory, lambda: f64) -> Result<f64> {
    pc_solution_check_with(tr, lambda, PcConvention::default())
}

/// [`pc_solution_check`] under an explicit convention (the wrong chirp sign
/// serves as a negative control).
pub fn pc_solution_check_with(tr: &Trajectory, lambda: f64, conv: PcConvention) -> Result<f64> {
    let times = tr.times();
    let t1 = times[0];
    let t2 = times[times.len() - 1];
    if !(t1 > 0.0 && t2 > t1) {
        return Err(CoreError::BadNormParameter(format!(
            "solution check needs an increasing positive-time slab, got [{t1}, {t2}]"
        )));
    }
    check_time(t1)?;
    // the earliest snapshot has the widest transformed grid; every later one
    // lands inside it
    let common = tr.first().grid().rescaled(1.0 / t1)?;
    let mut v_fields = Vec::with_capacity(tr.len());
    for u in tr.fields() {
        v_fields.push(pc_transform_to_grid_with(u, &common, conv)?);
    }
    duhamel_residual(&Trajectory::new(v_fields)?, lambda)
}

/// Relative difference between the spacetime norm of a positive-time slab and
/// the spacetime norm of its transform.
///
/// Each snapshot is transformed on its own natural grid (the per-snapshot L^r
/// norm is an exact relabelling), so the only discretisation error is the
/// trapezoid rule in t versus the one on the non-uniform ladder -1/t.
pub fn pc_spacetime_isometry_check(tr: &Trajectory, pair: &ExponentPair) -> Result<f64> {
    let dim = tr.first().grid().dim();
    if !admissible(pair, dim) {
        return Err(CoreError::NotAdmissible {
            q: pair.q.to_string(),
            r: pair.r.to_string(),
            dim,
        });
    }
    let times = tr.times();
    if !(times[0] > 0.0 && times[times.len() - 1] > times[0]) {
        return Err(CoreError::BadNormParameter(format!(
            "spacetime isometry check needs an increasing positive-time slab, got [{}, {}]",
            times[0],
            times[times.len() - 1]
        )));
    }
    let nu = spacetime_norm(tr, pair)?;
    if nu == 0.0 {
        return Ok(0.0);
    }
    let r = pair.r.as_f64();
    let mut taus = Vec::with_capacity(tr.len());
    let mut rnorms = Vec::with_capacity(tr.len());
    for u in tr.fields() {
        let v = pc_transform(u)?;
        taus.push(v.time());
        rnorms.push(lr_norm(&v, r)?);
    }
    let nv = match pair.q {
        Exponent::Infinity => rnorms.iter().cloned().fold(0.0, f64::max),
        _ => {
            let q = pair.q.as_f64();
            let m = taus.len();
            let mut total = 0.0;
            for i in 0..m {
                let w = if i == 0 {
                    0.5 * (taus[1] - taus[0])
                } else if i == m - 1 {
                    0.5 * (taus[m - 1] - taus[m - 2])
                } else {
                    0.5 * (taus[i + 1] - taus[i - 1])
                };
                total += w * rnorms[i].powf(q);
            }
            total.powf(1.0 / q)
        }
    };
    Ok((nu - nv).abs() / nu)
}

/// Probe record for the energy of the transformed flow.
#[derive(Debug, Clone)]
pub struct PcEnergyReport {
    /// Probe times of the transformed trajectory, increasing in (-4, 0).
    pub taus: Vec<f64>,
    /// Energy of the transformed field at each probe.
    pub energies: Vec<f64>,
    /// (max - min) / |mean| of the probed energies.
    pub variation: f64,
    /// Mean probed energy divided by the squared |x|-weighted norm of the
    /// data; measured, not asserted, because conventions for the prefactor
    /// differ.
    pub ratio: f64,
    /// Squared |x|-weighted L^2 norm of the initial data.
    pub x_moment_sq: f64,
}

/// Evolves defocusing data across a positive-time slab, transforms the
/// snapshots, and probes the energy of the transformed flow, which the
/// continuum theory makes constant and proportional to the squared
/// |x|-moment of the data.
pub fn pc_energy_identity(
    u0: &Field,
    lambda: f64,
    t1: f64,
    t2: f64,
    cfg: &SolverConfig,
) -> Result<PcEnergyReport> {
    if lambda < 0.0 {
        return Err(CoreError::BadNormParameter(format!(
            "transformed-flow energy identity needs a defocusing coupling, got {lambda}"
        )));
    }
    if cfg.lambda() != lambda {
        return Err(CoreError::BadNormParameter(format!(
            "coupling mismatch: identity asked for {lambda} but the solver config carries {}",
            cfg.lambda()
        )));
    }
    if u0.time() != 0.0 {
        return Err(CoreError::BadNormParameter(format!(
            "initial data must carry time stamp 0, got {}",
            u0.time()
        )));
    }
    check_time(t1)?;
    if !(t2.is_finite() && t2 > t1) {
        return Err(CoreError::BadNormParameter(format!(
            "slab end must exceed slab start, got [{t1}, {t2}]"
        )));
    }
    let xm = weighted_norm(u0, 1.0, SpatialWeight::Absolute)?;
    let x_moment_sq = xm * xm;
    if x_moment_sq == 0.0 {
        return Err(CoreError::ZeroInput);
    }
    // march to the slab without keeping snapshots, then probe across it
    let lead_cfg = cfg.clone().with_snapshot_stride(usize::MAX);
    let lead = crate::solver::evolve(u0, t1, &lead_cfg)?;
    let slab = crate::solver::evolve(lead.last(), t2, cfg)?;
    let mut taus = Vec::with_capacity(slab.len());
    let mut energies = Vec::with_capacity(slab.len());
    for u in slab.fields() {
        let v = pc_transform(u)?;
        taus.push(v.time());
        energies.push(energy(&v, lambda)?);
    }
    let lo = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = energies.iter().sum::<f64>() / energies.len() as f64;
    let variation = if mean == 0.0 { 0.0 } else { (hi - lo) / mean.abs() };
    Ok(PcEnergyReport { taus, energies, variation, ratio: mean / x_moment_sq, x_moment_sq })
}
