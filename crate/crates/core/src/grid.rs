//! Uniform periodic grids on [-L, L)^d for d = 1, 2.
//!
//! A grid stores the axis point count N (a power of two), the half width L
//! and the derived spacing 2L/N.  Because N is a power of two the division
//! is exact in binary floating point, so `spacing * N == 2 * L` holds
//! bitwise and metadata round-trips (e.g. rescale by 2 then by 1/2) are
//! lossless.

use crate::error::{CoreError, Result};

pub const MIN_POINTS_PER_AXIS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: u32,
    points_per_axis: u32,
    half_width: f64,
    spacing: f64,
}

impl Grid {
    pub fn new(dim: u32, points_per_axis: u32, half_width: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(CoreError::UnsupportedDimension(dim));
        }
        if points_per_axis < MIN_POINTS_PER_AXIS || !points_per_axis.is_power_of_two() {
            return Err(CoreError::BadPointCount(points_per_axis));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(CoreError::BadHalfWidth(half_width));
        }
        let spacing = 2.0 * half_width / points_per_axis as f64;
        Ok(Grid { dim, points_per_axis, half_width, spacing })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn points_per_axis(&self) -> u32 {
        self.points_per_axis
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Number of samples a field on this grid holds: N^d.
    pub fn total_points(&self) -> usize {
        let n = self.points_per_axis as usize;
        match self.dim {
            1 => n,
            _ => n * n,
        }
    }

    /// Volume of one spatial cell, spacing^d.
    pub fn cell_measure(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// i-th point along one axis: x_i = -L + i * spacing.
    pub fn axis_coordinate(&self, i: u32) -> f64 {
        -self.half_width + self.spacing * i as f64
    }

    /// All axis coordinates in order.
    pub fn axis_coordinates(&self) -> Vec<f64> {
        (0..self.points_per_axis).map(|i| self.axis_coordinate(i)).collect()
    }

    /// Signed integer mode number for FFT bin `i`, in [-N/2, N/2).
    pub fn mode_number(&self, i: u32) -> i64 {
        let n = self.points_per_axis as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Angular frequency of FFT bin `i` along one axis: pi * k / L.
    pub fn axis_frequency(&self, i: u32) -> f64 {
        std::f64::consts::PI * self.mode_number(i) as f64 / self.half_width
    }

    /// Spacing of the frequency lattice along one axis: pi / L.
    pub fn frequency_spacing(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }

    /// Volume of one frequency cell, (pi/L)^d.
    pub fn frequency_cell_measure(&self) -> f64 {
        self.frequency_spacing().powi(self.dim as i32)
    }

    /// |x|^2 at the flat sample index.
    pub fn radius_squared(&self, flat: usize) -> f64 {
        match self.dim {
            1 => {
                let x = self.axis_coordinate(flat as u32);
                x * x
            }
            _ => {
                let n = self.points_per_axis as usize;
                let x = self.axis_coordinate((flat / n) as u32);
                let y = self.axis_coordinate((flat % n) as u32);
                x * x + y * y
            }
        }
    }

    /// |xi|^2 at the flat spectral index.
    pub fn frequency_squared(&self, flat: usize) -> f64 {
        match self.dim {
            1 => {
                let k = self.axis_frequency(flat as u32);
                k * k
            }
            _ => {
                let n = self.points_per_axis as usize;
                let k1 = self.axis_frequency((flat / n) as u32);
                let k2 = self.axis_frequency((flat % n) as u32);
                k1 * k1 + k2 * k2
            }
        }
    }

    /// Same points, half width multiplied by `factor`.  Metadata only: the
    /// caller re-interprets the stored samples on the stretched grid.
    pub fn rescaled(&self, factor: f64) -> Result<Grid> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(CoreError::BadRescaleFactor(factor));
        }
        Grid::new(self.dim, self.points_per_axis, self.half_width * factor)
    }

    /// Flat index of the reflected point x -> -x (periodic wrap at the left
    /// edge, so index 0 maps to itself).
    pub fn reflected_index(&self, flat: usize) -> usize {
        let n = self.points_per_axis as usize;
        let refl = |i: usize| if i == 0 { 0 } else { n - i };
        match self.dim {
            1 => refl(flat),
            _ => refl(flat / n) * n + refl(flat % n),
        }
    }

    /// True if the flat sample index touches the boundary ring: the points
    /// nearest |x| = L along either axis, where the periodic wrap happens.
    pub fn on_boundary(&self, flat: usize) -> bool {
        let n = self.points_per_axis as usize;
        let edge = |i: usize| i == 0 || i == n - 1;
        match self.dim {
            1 => edge(flat),
            _ => edge(flat / n) || edge(flat % n),
        }
    }
}
