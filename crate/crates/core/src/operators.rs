//! Fourier-multiplier operators.
//!
//! Sign conventions follow the transport model: the Hilbert transform is the
//! convolution with `1/(π(y-x))`, i.e. the multiplier `+i·sgn(k)`, so that
//! `∂_x H = -Λ`. The fractional Laplacian `Λ^α = (-Δ)^{α/2}` is the
//! multiplier `|k|^α` with the zero mode annihilated.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::field::{Field, SpectralField};
use crate::grid::Grid;

/// Apply a multiplier given per-bin; odd multipliers must zero the Nyquist
/// bin themselves to preserve Hermitian symmetry.
pub fn apply_multiplier(f: &Field, m: impl Fn(f64) -> Complex64) -> Field {
    let mut s = f.to_spectral();
    multiply_in_place(&mut s, m);
    s.to_physical()
}

pub fn multiply_in_place(s: &mut SpectralField, m: impl Fn(f64) -> Complex64) {
    let ks: Vec<f64> = s.grid().wavenumbers().to_vec();
    for (c, &k) in s.coeffs_mut().iter_mut().zip(&ks) {
        *c *= m(k);
    }
}

/// `Hf`, multiplier `i·sgn(k)`; zero mode and Nyquist mapped to 0.
pub fn hilbert_transform(f: &Field) -> Field {
    let nyq = f.grid().nyquist_bin();
    let mut s = f.to_spectral();
    for (j, c) in s.coeffs_mut().iter_mut().enumerate() {
        *c = if j == 0 || j == nyq {
            Complex64::new(0.0, 0.0)
        } else if j < nyq {
            Complex64::new(0.0, 1.0) * *c
        } else {
            Complex64::new(0.0, -1.0) * *c
        };
    }
    s.to_physical()
}

/// `Λ^α f`, multiplier `|k|^α`. The zero mode is annihilated for every α,
/// so `Λ^0` is the identity minus the mean.
pub fn fractional_laplacian(f: &Field, alpha: f64) -> Result<Field> {
    check_alpha(alpha)?;
    let mut s = f.to_spectral();
    fractional_laplacian_spectral(&mut s, alpha);
    Ok(s.to_physical())
}

pub(crate) fn fractional_laplacian_spectral(s: &mut SpectralField, alpha: f64) {
    let ks: Vec<f64> = s.grid().wavenumbers().to_vec();
    for (c, &k) in s.coeffs_mut().iter_mut().zip(&ks) {
        *c *= if k == 0.0 { 0.0 } else { k.abs().powf(alpha) };
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..2.0).contains(&alpha) {
        return Err(CoreError::InvalidParameter(format!(
            "alpha must lie in [0, 2), got {alpha}"
        )));
    }
    Ok(())
}

/// `∂_x f`, multiplier `ik` with the Nyquist bin zeroed.
pub fn derivative(f: &Field) -> Field {
    let nyq = f.grid().nyquist_bin();
    let mut s = f.to_spectral();
    let ks: Vec<f64> = s.grid().wavenumbers().to_vec();
    for (j, (c, &k)) in s.coeffs_mut().iter_mut().zip(&ks).enumerate() {
        *c = if j == nyq {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, k) * *c
        };
    }
    s.to_physical()
}

/// Cutoff index of the 2/3-rule: signed modes with `|j̃| > N/3` are zeroed.
pub fn dealias_cutoff(grid: &Grid) -> i64 {
    grid.n() as i64 / 3
}

/// 2/3-rule projection; idempotent.
pub fn dealias(s: &SpectralField) -> SpectralField {
    let cut = dealias_cutoff(s.grid());
    let mut out = s.clone();
    dealias_in_place(&mut out, cut);
    out
}

pub(crate) fn dealias_in_place(s: &mut SpectralField, cut: i64) {
    let grid = s.grid().clone();
    for (j, c) in s.coeffs_mut().iter_mut().enumerate() {
        if grid.signed_index(j).abs() > cut {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Pointwise product followed by the 2/3-rule projection.
pub fn dealiased_product(f: &Field, g: &Field) -> Field {
    dealias(&f.mul(g).to_spectral()).to_physical()
}
