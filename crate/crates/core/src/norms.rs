//! Spatial and spacetime norms.
//!
//! Spatial norms are quadratures over the grid (rectangle rule, which is
//! spectrally accurate for smooth periodic data); Sobolev-type norms are
//! Fourier multipliers evaluated on the spectrum.  Spacetime norms combine
//! per-snapshot spatial norms with a trapezoid rule in time over a
//! [`Trajectory`].
//!
//! Exponent pairs are kept as exact rationals so the scaling relation
//! 2/q + d/r = d/2 is decided without rounding.

use num_rational::Ratio;

use crate::error::{CoreError, Result};
use crate::field::{spectral_transform, Field};

// ---------------------------------------------------------------------------
// compensated summation (Neumaier), used so grid sums hold to ~1e-15 relative
// even with half a million terms

pub(crate) fn stable_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

// ---------------------------------------------------------------------------
// exponents and admissibility

/// A Lebesgue exponent in [1, oo], exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exponent {
    Finite(Ratio<i64>),
    Infinity,
}

impl Exponent {
    pub fn from_int(v: i64) -> Self {
        Exponent::Finite(Ratio::from_integer(v))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Exponent::Finite(Ratio::new(num, den))
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Exponent::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    fn reciprocal(&self) -> Ratio<i64> {
        match self {
            Exponent::Finite(r) => r.recip(),
            Exponent::Infinity => Ratio::from_integer(0),
        }
    }

    fn at_least(&self, v: i64) -> bool {
        match self {
            Exponent::Finite(r) => *r >= Ratio::from_integer(v),
            Exponent::Infinity => true,
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// A spacetime exponent pair (q, r).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentPair {
    pub q: Exponent,
    pub r: Exponent,
}

impl ExponentPair {
    pub fn new(q: Exponent, r: Exponent) -> Self {
        ExponentPair { q, r }
    }
}

impl std::fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.q, self.r)
    }
}

/// Exact admissibility check: q, r >= 2, the scaling relation
/// 2/q + d/r = d/2, the d = 2 endpoint exclusion q > 2, and for d >= 3 the
/// range cap r <= 2 + 4/(d - 2).
pub fn admissible(pair: &ExponentPair, dim: u32) -> bool {
    if dim == 0 {
        return false;
    }
    let d = Ratio::from_integer(dim as i64);
    if !pair.q.at_least(2) || !pair.r.at_least(2) {
        return false;
    }
    let scaling =
        Ratio::from_integer(2) * pair.q.reciprocal() + d * pair.r.reciprocal() == d / 2;
    if !scaling {
        return false;
    }
    if dim == 2 && (pair.q == Exponent::from_int(2) || pair.r == Exponent::Infinity) {
        return false;
    }
    if dim >= 3 {
        let cap = Ratio::from_integer(2) + Ratio::new(4, dim as i64 - 2);
        match pair.r {
            Exponent::Finite(r) => {
                if r > cap {
                    return false;
                }
            }
            Exponent::Infinity => return false,
        }
    }
    true
}

/// The symmetric pair q = r = 2(d + 2)/d.
pub fn balanced_pair(dim: u32) -> ExponentPair {
    let q = Exponent::ratio(2 * (dim as i64 + 2), dim as i64);
    ExponentPair { q, r: q }
}

/// Fixed pair list used by sup-style diagnostics: (inf, 2), the balanced
/// pair, and one asymmetric representative per dimension.
pub fn canonical_pairs(dim: u32) -> Vec<ExponentPair> {
    let mut pairs = vec![
        ExponentPair::new(Exponent::Infinity, Exponent::from_int(2)),
        balanced_pair(dim),
    ];
    if dim == 2 {
        pairs.push(ExponentPair::new(Exponent::ratio(8, 3), Exponent::from_int(8)));
    } else {
        pairs.push(ExponentPair::new(Exponent::from_int(8), Exponent::from_int(4)));
    }
    pairs
}

// ---------------------------------------------------------------------------
// spatial norms

/// L^r norm over the grid; r in [1, oo].
pub fn lr_norm(f: &Field, r: f64) -> Result<f64> {
    if r.is_nan() || r < 1.0 {
        return Err(CoreError::BadNormParameter(format!("lebesgue exponent {r}")));
    }
    if r.is_infinite() {
        return Ok(f.max_abs());
    }
    let cell = f.grid().cell_measure();
    let total = if r == 2.0 {
        stable_sum(f.samples().iter().map(|z| z.norm_sqr()))
    } else if r == 4.0 {
        stable_sum(f.samples().iter().map(|z| z.norm_sqr().powi(2)))
    } else if r == 6.0 {
        stable_sum(f.samples().iter().map(|z| z.norm_sqr().powi(3)))
    } else {
        stable_sum(f.samples().iter().map(|z| z.norm().powf(r)))
    };
    Ok((total * cell).powf(1.0 / r))
}

pub fn l2_norm(f: &Field) -> f64 {
    lr_norm(f, 2.0).expect("r = 2 is always valid")
}

/// Squared L^2 norm (the conserved mass).
pub fn mass(f: &Field) -> f64 {
    stable_sum(f.samples().iter().map(|z| z.norm_sqr())) * f.grid().cell_measure()
}

/// Inhomogeneous Sobolev norm via the multiplier (1 + |xi|^2)^(s/2), s >= 0.
pub fn hs_norm(f: &Field, s: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(CoreError::BadNormParameter(format!("sobolev order {s}")));
    }
    let spec = spectral_transform(f);
    let cell = f.grid().frequency_cell_measure();
    let total = stable_sum(
        spec.coefficients()
            .iter()
            .enumerate()
            .map(|(flat, c)| (1.0 + f.grid().frequency_squared(flat)).powf(s) * c.norm_sqr()),
    );
    Ok((total * cell).sqrt())
}

/// Homogeneous Sobolev norm via the multiplier |xi|^s (s >= 0; the zero mode
/// contributes only at s = 0 where the norm reduces to L^2).
pub fn homogeneous_hs_norm(f: &Field, s: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(CoreError::BadNormParameter(format!("homogeneous order {s}")));
    }
    let spec = spectral_transform(f);
    let cell = f.grid().frequency_cell_measure();
    let total = stable_sum(
        spec.coefficients()
            .iter()
            .enumerate()
            .map(|(flat, c)| f.grid().frequency_squared(flat).powf(s) * c.norm_sqr()),
    );
    Ok((total * cell).sqrt())
}

/// Which spatial weight a weighted norm uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialWeight {
    /// (1 + |x|^2)^s — the weighted norm used throughout the decay estimates.
    Bracket,
    /// |x|^(2s) — the homogeneous variant entering the moment laws.
    Absolute,
}

/// Weighted L^2 norm with weight w(x)^s for s in [0, 1].
pub fn weighted_norm(f: &Field, s: f64, weight: SpatialWeight) -> Result<f64> {
    if !(s.is_finite() && (0.0..=1.0).contains(&s)) {
        return Err(CoreError::BadNormParameter(format!("weight order {s} outside [0, 1]")));
    }
    let cell = f.grid().cell_measure();
    let total = stable_sum(f.samples().iter().enumerate().map(|(flat, z)| {
        let r2 = f.grid().radius_squared(flat);
        let w = match weight {
            SpatialWeight::Bracket => (1.0 + r2).powf(s),
            SpatialWeight::Absolute => r2.powf(s),
        };
        w * z.norm_sqr()
    }));
    Ok((total * cell).sqrt())
}

/// The bracket-weighted norm || <x>^s u ||_{L^2}.
pub fn h0s_norm(f: &Field, s: f64) -> Result<f64> {
    weighted_norm(f, s, SpatialWeight::Bracket)
}

/// Hamiltonian energy: (1/2) ||grad u||^2 + lambda d/(2d+4) ||u||_p^p with
/// p = 2 + 4/d.
pub fn energy(f: &Field, lambda: f64) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(CoreError::BadNormParameter(format!("coupling {lambda}")));
    }
    let spec = spectral_transform(f);
    let kinetic = 0.5
        * stable_sum(
            spec.coefficients()
                .iter()
                .enumerate()
                .map(|(flat, c)| f.grid().frequency_squared(flat) * c.norm_sqr()),
        )
        * f.grid().frequency_cell_measure();
    let d = f.grid().dim() as f64;
    let half_p = 1.0 + 2.0 / d; // p/2 with p = 2 + 4/d
    let potential_density = stable_sum(f.samples().iter().map(|z| z.norm_sqr().powf(half_p)))
        * f.grid().cell_measure();
    Ok(kinetic + lambda * d / (2.0 * d + 4.0) * potential_density)
}

// ---------------------------------------------------------------------------
// trajectories and spacetime norms

/// An ordered sequence of fields on one grid with strictly monotone time
/// stamps (increasing or decreasing).
#[derive(Debug, Clone)]
pub struct Trajectory {
    fields: Vec<Field>,
}

impl Trajectory {
    pub fn new(fields: Vec<Field>) -> Result<Self> {
        if fields.is_empty() {
            return Err(CoreError::TooFewSnapshots { need: 1, got: 0 });
        }
        let grid = *fields[0].grid();
        if fields.iter().any(|f| *f.grid() != grid) {
            return Err(CoreError::GridMismatch);
        }
        let increasing = fields.windows(2).all(|w| w[1].time() > w[0].time());
        let decreasing = fields.windows(2).all(|w| w[1].time() < w[0].time());
        if fields.len() > 1 && !increasing && !decreasing {
            return Err(CoreError::NonMonotoneTimes);
        }
        Ok(Trajectory { fields })
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one snapshot
    }

    pub fn first(&self) -> &Field {
        &self.fields[0]
    }

    pub fn last(&self) -> &Field {
        self.fields.last().unwrap()
    }

    pub fn times(&self) -> Vec<f64> {
        self.fields.iter().map(|f| f.time()).collect()
    }

    /// Covered time interval as (earliest, latest).
    pub fn interval(&self) -> (f64, f64) {
        let a = self.first().time();
        let b = self.last().time();
        (a.min(b), a.max(b))
    }

    /// Trapezoid weights |dt| for the time quadrature.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let m = self.fields.len();
        let mut w = vec![0.0; m];
        if m == 1 {
            return w;
        }
        let t: Vec<f64> = self.times();
        w[0] = 0.5 * (t[1] - t[0]).abs();
        w[m - 1] = 0.5 * (t[m - 1] - t[m - 2]).abs();
        for i in 1..m - 1 {
            w[i] = 0.5 * (t[i + 1] - t[i - 1]).abs();
        }
        w
    }

    /// Restriction to the snapshots with index <= end (inclusive).
    pub fn prefix(&self, end: usize) -> Trajectory {
        Trajectory { fields: self.fields[..=end.min(self.fields.len() - 1)].to_vec() }
    }
}

/// Mixed L^q_t L^r_x norm of a trajectory for an admissible pair; the time
/// integral is a trapezoid rule over the snapshot stamps.
pub fn spacetime_norm(tr: &Trajectory, pair: &ExponentPair) -> Result<f64> {
    let dim = tr.first().grid().dim();
    if !admissible(pair, dim) {
        return Err(CoreError::NotAdmissible {
            q: pair.q.to_string(),
            r: pair.r.to_string(),
            dim,
        });
    }
    let r = pair.r.as_f64();
    match pair.q {
        Exponent::Infinity => {
            let mut best: f64 = 0.0;
            for f in tr.fields() {
                best = best.max(lr_norm(f, r)?);
            }
            Ok(best)
        }
        _ => {
            let q = pair.q.as_f64();
            let w = tr.trapezoid_weights();
            let mut total = 0.0;
            for (f, wi) in tr.fields().iter().zip(&w) {
                total += wi * lr_norm(f, r)?.powf(q);
            }
            Ok(total.powf(1.0 / q))
        }
    }
}

/// Largest spacetime norm over a list of admissible pairs.
pub fn strichartz_sup_norm(tr: &Trajectory, pairs: &[ExponentPair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(CoreError::EmptyPairList);
    }
    let mut best: f64 = 0.0;
    for pair in pairs {
        best = best.max(spacetime_norm(tr, pair)?);
    }
    Ok(best)
}

/// Sobolev-Strichartz norm of order s: the sup of the spacetime norms of
/// |D|^sigma u over sigma in {0, s/2, s} and the given pairs.
pub fn sobolev_strichartz_norm(
    tr: &Trajectory,
    s: f64,
    pairs: &[ExponentPair],
) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(CoreError::BadNormParameter(format!("order {s}")));
    }
    let mut sigmas = vec![0.0];
    if s > 0.0 {
        sigmas.push(s / 2.0);
        sigmas.push(s);
    }
    let mut best: f64 = 0.0;
    for sigma in sigmas {
        let derived: Result<Vec<Field>> = tr
            .fields()
            .iter()
            .map(|f| crate::field::fractional_derivative(f, sigma))
            .collect();
        let dtr = Trajectory::new(derived?)?;
        best = best.max(strichartz_sup_norm(&dtr, pairs)?);
    }
    Ok(best)
}
