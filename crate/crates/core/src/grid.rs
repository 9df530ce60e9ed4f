//! Uniform periodic grid with its wavenumber table and cached FFT plans.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{CoreError, Result};

struct GridInner {
    n: usize,
    length: f64,
    nodes: Vec<f64>,
    /// Wavenumbers in FFT bin order: `k_j = 2π·j̃/L` with the signed index
    /// `j̃ ∈ [-N/2, N/2)`.
    wavenumbers: Vec<f64>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

/// Periodic computational domain `[-L/2, L/2)` sampled at `N` nodes,
/// `x_m = -L/2 + m·L/N`. Cheap to clone (shared interior).
#[derive(Clone)]
pub struct Grid(Arc<GridInner>);

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n_points: usize, length: f64) -> Result<Self> {
        if n_points < Self::MIN_POINTS || !n_points.is_power_of_two() {
            return Err(CoreError::InvalidParameter(format!(
                "n_points must be a power of two ≥ {}, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(CoreError::InvalidParameter(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        let dx = length / n_points as f64;
        let nodes = (0..n_points)
            .map(|m| -0.5 * length + m as f64 * dx)
            .collect();
        let dk = 2.0 * std::f64::consts::PI / length;
        let wavenumbers = (0..n_points)
            .map(|j| {
                let signed = if j < n_points / 2 {
                    j as i64
                } else {
                    j as i64 - n_points as i64
                };
                signed as f64 * dk
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(n_points);
        let fft_inv = planner.plan_fft_inverse(n_points);
        Ok(Grid(Arc::new(GridInner {
            n: n_points,
            length,
            nodes,
            wavenumbers,
            fft_fwd,
            fft_inv,
        })))
    }

    /// Same length, `factor`× the points. Used by refinement oracles.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Grid::new(self.n() * factor, self.length())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.n
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.0.length
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.0.length / self.0.n as f64
    }

    #[inline]
    pub fn nodes(&self) -> &[f64] {
        &self.0.nodes
    }

    #[inline]
    pub fn node(&self, m: usize) -> f64 {
        self.0.nodes[m]
    }

    #[inline]
    pub fn wavenumbers(&self) -> &[f64] {
        &self.0.wavenumbers
    }

    /// Bin index of the Nyquist mode (the one signed index without a mirror).
    #[inline]
    pub fn nyquist_bin(&self) -> usize {
        self.0.n / 2
    }

    /// Signed mode index of FFT bin `j`.
    #[inline]
    pub fn signed_index(&self, j: usize) -> i64 {
        if j < self.0.n / 2 {
            j as i64
        } else {
            j as i64 - self.0.n as i64
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.0.n == other.0.n && self.0.length == other.0.length
    }

    pub(crate) fn fft_forward(&self, buf: &mut [Complex64]) {
        self.0.fft_fwd.process(buf);
    }

    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64]) {
        self.0.fft_inv.process(buf);
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.0.n)
            .field("length", &self.0.length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}
