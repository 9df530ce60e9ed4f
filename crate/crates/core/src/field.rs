//! Real fields on the grid and their Fourier-side representation.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::grid::Grid;

/// Real-valued function sampled on a [`Grid`].
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

/// Fourier coefficients of a real field, in FFT bin order with the
/// amplitude normalization `f(x_m) = Σ_j c_j e^{i k_j x_m}` (so a constant
/// field `c` has the single zero-mode coefficient `c`). Hermitian symmetry
/// holds by construction.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Field {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(CoreError::GridMismatch(format!(
                "expected {} values, got {}",
                grid.n(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(CoreError::NonFinite { index });
        }
        Ok(Field { grid, values })
    }

    pub fn from_fn(grid: &Grid, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Field::from_values(grid.clone(), values)
    }

    pub fn zeros(grid: &Grid) -> Self {
        Field {
            grid: grid.clone(),
            values: vec![0.0; grid.n()],
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &v| a.min(v))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.grid.n() as f64
    }

    /// `∫ f² dx` by the periodic rectangle rule (spectrally accurate).
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.dx() * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    /// `∫ f² w dx` against precomputed weight samples.
    pub fn weighted_l2_sq(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), self.values.len());
        self.grid.dx()
            * self
                .values
                .iter()
                .zip(w)
                .map(|(v, wi)| v * v * wi)
                .sum::<f64>()
    }

    /// Largest |f| in the outer region `|x| > fraction·L`.
    pub fn boundary_magnitude(&self, fraction: f64) -> f64 {
        let cut = fraction * self.grid.length();
        self.grid
            .nodes()
            .iter()
            .zip(&self.values)
            .filter(|(x, _)| x.abs() > cut)
            .fold(0.0, |a, (_, v)| a.max(v.abs()))
    }

    /// Real-line data on the torus must vanish near the seam; errors when
    /// the outer-region magnitude exceeds `tol_rel·max|f|`.
    pub fn check_boundary_decay(&self, fraction: f64, tol_rel: f64) -> Result<()> {
        let scale = self.max_abs();
        if scale == 0.0 {
            return Ok(());
        }
        let magnitude = self.boundary_magnitude(fraction);
        if magnitude > tol_rel * scale {
            return Err(CoreError::BoundaryDecay {
                magnitude,
                fraction,
                tolerance: tol_rel,
            });
        }
        Ok(())
    }

    pub fn to_spectral(&self) -> SpectralField {
        let n = self.grid.n();
        let mut buf: Vec<Complex64> = self
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        self.grid.fft_forward(&mut buf);
        let scale = 1.0 / n as f64;
        for c in &mut buf {
            *c *= scale;
        }
        SpectralField {
            grid: self.grid.clone(),
            coeffs: buf,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, a: f64) -> Field {
        self.map(|v| a * v)
    }

    pub fn add(&self, other: &Field) -> Field {
        assert!(self.grid.same_as(&other.grid), "grid mismatch");
        Field {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Field) -> Field {
        assert!(self.grid.same_as(&other.grid), "grid mismatch");
        Field {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Pointwise product on the grid (aliases; dealias afterwards if needed).
    pub fn mul(&self, other: &Field) -> Field {
        assert!(self.grid.same_as(&other.grid), "grid mismatch");
        Field {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        assert!(self.grid.same_as(&other.grid), "grid mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }
}

impl SpectralField {
    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(CoreError::GridMismatch(format!(
                "expected {} coefficients, got {}",
                grid.n(),
                coeffs.len()
            )));
        }
        Ok(SpectralField { grid, coeffs })
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// `L·Σ|c_j|²`; equals `∫ f² dx` by Parseval.
    pub fn coefficient_energy(&self) -> f64 {
        self.grid.length() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Departure from Hermitian symmetry, relative to the largest coefficient.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.grid.n();
        let scale = self
            .coeffs
            .iter()
            .fold(0.0f64, |a, c| a.max(c.norm()))
            .max(f64::MIN_POSITIVE);
        let mut worst = self.coeffs[0].im.abs().max(self.coeffs[n / 2].im.abs());
        for j in 1..n / 2 {
            let d = self.coeffs[j] - self.coeffs[n - j].conj();
            worst = worst.max(d.norm());
        }
        worst / scale
    }

    pub fn to_physical(&self) -> Field {
        let mut buf = self.coeffs.clone();
        self.grid.fft_inverse(&mut buf);
        Field {
            grid: self.grid.clone(),
            values: buf.iter().map(|c| c.re).collect(),
        }
    }

    /// Fraction of the coefficient energy carried by the top octave
    /// `|j̃| ≥ N/4` (used by the blow-up monitor).
    pub fn tail_energy_fraction(&self) -> f64 {
        let n = self.grid.n();
        let total: f64 = self.coeffs.iter().skip(1).map(|c| c.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let cut = n as i64 / 4;
        let tail: f64 = (0..n)
            .filter(|&j| self.grid.signed_index(j).abs() >= cut)
            .map(|j| self.coeffs[j].norm_sqr())
            .sum();
        tail / total
    }
}
