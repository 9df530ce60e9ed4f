//! Dyadic Littlewood–Paley decomposition, weighted Sobolev norms by two
//! independent routes, Bernstein band ratios and the paraproduct split.
//!
//! The low-pass profile `φ₀` equals 1 on `|ξ| ≤ 1/2`, vanishes on `|ξ| ≥ 1`
//! and decreases smoothly in between; the band profile is
//! `ψ₀(ξ) = φ₀(ξ/2) - φ₀(ξ)`, supported on the annulus `1/2 ≤ |ξ| ≤ 2`.
//! Projections are `S_j f = φ₀(2^{-j}·)f̂` and `Δ_j f = ψ₀(2^{-j}·)f̂`, and
//! the telescoping identity `S_K f + Σ_{j=K}^{J} Δ_j f = S_{J+1} f` makes the
//! reconstruction exact on every mode below `2^J`.

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::weights::Weight;

/// Regularity of the transition region of `φ₀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmoothstepOrder {
    /// C¹ cubic `3t² - 2t³`.
    Cubic,
    /// C² quintic `t³(10 - 15t + 6t²)`.
    Quintic,
}

fn smoothstep(order: SmoothstepOrder, t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    match order {
        SmoothstepOrder::Cubic => t * t * (3.0 - 2.0 * t),
        SmoothstepOrder::Quintic => t * t * t * (10.0 + t * (-15.0 + 6.0 * t)),
    }
}

/// `φ₀(ξ)`: radial plateau/support profile of the decomposition.
pub fn low_pass_profile(order: SmoothstepOrder, xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 0.5 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        1.0 - smoothstep(order, 2.0 * a - 1.0)
    }
}

/// `ψ₀(ξ) = φ₀(ξ/2) - φ₀(ξ)`, supported on `1/2 ≤ |ξ| ≤ 2`.
pub fn band_profile(order: SmoothstepOrder, xi: f64) -> f64 {
    low_pass_profile(order, 0.5 * xi) - low_pass_profile(order, xi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionKind {
    /// `Δ_j`
    Band,
    /// `S_j`
    LowPass,
}

/// Dyadic filter bank sampled on the grid's wavenumber table.
#[derive(Clone, Debug)]
pub struct FilterBank {
    grid: Grid,
    j_min: i32,
    j_max: i32,
    order: SmoothstepOrder,
    /// `ψ₀(2^{-j} k)` per band `j ∈ [j_min, j_max]`.
    bands: Vec<Vec<f64>>,
    /// `φ₀(2^{-j} k)` for `j ∈ [j_min, j_max + 1]`.
    low_passes: Vec<Vec<f64>>,
}

pub const PARTITION_TOL: f64 = 1e-12;

/// Build a bank for `j ∈ [j_min, j_max]` and verify the partition of unity
/// on every wavenumber below the top band.
pub fn build_filter_bank(
    grid: &Grid,
    j_min: i32,
    j_max: i32,
    order: SmoothstepOrder,
) -> Result<FilterBank> {
    if j_min > j_max {
        return Err(CoreError::InvalidParameter(format!(
            "j_min = {j_min} exceeds j_max = {j_max}"
        )));
    }
    let k_nyq = std::f64::consts::PI * grid.n() as f64 / grid.length();
    if 2.0f64.powi(j_max + 1) > k_nyq {
        return Err(CoreError::InvalidParameter(format!(
            "top band 2^{} = {} exceeds the Nyquist wavenumber {k_nyq:.3}",
            j_max + 1,
            2.0f64.powi(j_max + 1)
        )));
    }
    let bands = (j_min..=j_max)
        .map(|j| {
            let scale = 2.0f64.powi(-j);
            grid.wavenumbers()
                .iter()
                .map(|&k| band_profile(order, scale * k))
                .collect()
        })
        .collect();
    let low_passes = (j_min..=j_max + 1)
        .map(|j| {
            let scale = 2.0f64.powi(-j);
            grid.wavenumbers()
                .iter()
                .map(|&k| low_pass_profile(order, scale * k))
                .collect()
        })
        .collect();
    let bank = FilterBank {
        grid: grid.clone(),
        j_min,
        j_max,
        order,
        bands,
        low_passes,
    };
    let residual = bank.partition_of_unity_residual();
    if residual > PARTITION_TOL {
        return Err(CoreError::InvalidParameter(format!(
            "partition of unity fails with residual {residual:.3e}"
        )));
    }
    Ok(bank)
}

impl FilterBank {
    /// Range derived from the grid: bottom band at ~4 grid wavenumbers,
    /// top band at a quarter of the Nyquist wavenumber.
    pub fn auto(grid: &Grid) -> Result<FilterBank> {
        let dk = 2.0 * std::f64::consts::PI / grid.length();
        let k_nyq = std::f64::consts::PI * grid.n() as f64 / grid.length();
        let j_min = (4.0 * dk).log2().round() as i32;
        let j_max = (k_nyq / 4.0).log2().floor() as i32;
        build_filter_bank(grid, j_min, j_max, SmoothstepOrder::Quintic)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn order(&self) -> SmoothstepOrder {
        self.order
    }

    fn band_multiplier(&self, j: i32) -> &[f64] {
        &self.bands[(j - self.j_min) as usize]
    }

    fn low_pass_multiplier(&self, j: i32) -> &[f64] {
        &self.low_passes[(j - self.j_min) as usize]
    }

    /// Max over resolved wavenumbers `|k| ≤ 2^{j_max}` of
    /// `|φ₀(2^{-j_min}k) + Σ_j ψ₀(2^{-j}k) - 1|`.
    pub fn partition_of_unity_residual(&self) -> f64 {
        let top = 2.0f64.powi(self.j_max);
        let mut worst = 0.0f64;
        for (bin, &k) in self.grid.wavenumbers().iter().enumerate() {
            if k.abs() > top {
                continue;
            }
            let mut sum = self.low_passes[0][bin];
            for band in &self.bands {
                sum += band[bin];
            }
            worst = worst.max((sum - 1.0).abs());
        }
        worst
    }

    /// Fraction of the coefficient energy above the resolved range
    /// `|k| > 2^{j_max}` (mean excluded).
    pub fn unresolved_energy_fraction(&self, f: &Field) -> f64 {
        let s = f.to_spectral();
        let top = 2.0f64.powi(self.j_max);
        let mut inside = 0.0;
        let mut outside = 0.0;
        for (bin, &k) in self.grid.wavenumbers().iter().enumerate() {
            if bin == 0 {
                continue;
            }
            let e = s.coeffs()[bin].norm_sqr();
            if k.abs() > top {
                outside += e;
            } else {
                inside += e;
            }
        }
        if inside + outside == 0.0 {
            0.0
        } else {
            outside / (inside + outside)
        }
    }
}

/// Apply `Δ_j` or `S_j`. Band projections are mean-free by construction.
pub fn lp_project(f: &Field, bank: &FilterBank, j: i32, kind: ProjectionKind) -> Result<Field> {
    let valid = match kind {
        ProjectionKind::Band => (bank.j_min..=bank.j_max).contains(&j),
        ProjectionKind::LowPass => (bank.j_min..=bank.j_max + 1).contains(&j),
    };
    if !valid {
        return Err(CoreError::InvalidParameter(format!(
            "j = {j} outside the bank range [{}, {}]",
            bank.j_min, bank.j_max
        )));
    }
    if !f.grid().same_as(&bank.grid) {
        return Err(CoreError::GridMismatch("field vs filter bank".into()));
    }
    let mult = match kind {
        ProjectionKind::Band => bank.band_multiplier(j),
        ProjectionKind::LowPass => bank.low_pass_multiplier(j),
    };
    let mut s = f.to_spectral();
    for (c, &m) in s.coeffs_mut().iter_mut().zip(mult) {
        *c *= m;
    }
    Ok(s.to_physical())
}

// ---------------------------------------------------------------------------
// Weighted Sobolev norms
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub enum NormRoute<'a> {
    /// Quadrature of `w·|Λ^s f|²`.
    Multiplier,
    /// `Σ_j 2^{2js} ‖Δ_j f‖²_{L²_w}` over the bank's bands.
    LpSum(&'a FilterBank),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    Homogeneous,
    Inhomogeneous,
}

#[derive(Clone, Copy, Debug)]
pub struct NormResult {
    pub value: f64,
    /// Set when a fractional `s` with `|s| ≥ 1/2` is used against a
    /// non-trivial weight; the weighted fractional scale is only validated
    /// for `|s| < 1/2` (integer orders are plain derivative bookkeeping).
    pub s_flagged: bool,
}

/// `‖f‖_{H^s_w}` (or the homogeneous seminorm) by the requested route.
///
/// The multiplier route is the quadrature of `w·|Λ^s f|²`; the LP route sums
/// `2^{2js}‖Δ_j f‖²_{L²_w}` over the bank's bands with modes below the bottom
/// band folded into the low-pass block (counted at the `2^{j_min}` scale and
/// modulo constants for the homogeneous seminorm).
pub fn weighted_sobolev_norm(
    f: &Field,
    s: f64,
    w: &Weight,
    route: NormRoute<'_>,
    homogeneity: Homogeneity,
) -> Result<NormResult> {
    let ws = w.sample(f.grid());
    let s_flagged = !w.is_unit() && s.abs() >= 0.5 && s.fract() != 0.0;

    let (hom_sq, inhom_sq) = match route {
        NormRoute::Multiplier => {
            let lam_sq = fractional_laplacian_any_order(f, s).weighted_l2_sq(&ws);
            (lam_sq, f.weighted_l2_sq(&ws) + lam_sq)
        }
        NormRoute::LpSum(bank) => {
            let mut band_sq = 0.0;
            for j in bank.j_min..=bank.j_max {
                let block = lp_project(f, bank, j, ProjectionKind::Band)?;
                band_sq += 2.0f64.powi(2 * j).powf(s) * block.weighted_l2_sq(&ws);
            }
            let mean = f.mean();
            let low_osc =
                lp_project(&f.map(|v| v - mean), bank, bank.j_min, ProjectionKind::LowPass)?;
            let low_full = lp_project(f, bank, bank.j_min, ProjectionKind::LowPass)?;
            let hom =
                band_sq + 2.0f64.powi(2 * bank.j_min).powf(s) * low_osc.weighted_l2_sq(&ws);
            let inhom = band_sq + low_full.weighted_l2_sq(&ws);
            (hom, inhom)
        }
    };

    let value = match homogeneity {
        Homogeneity::Homogeneous => hom_sq.sqrt(),
        Homogeneity::Inhomogeneous => inhom_sq.sqrt(),
    };
    Ok(NormResult { value, s_flagged })
}

// ---------------------------------------------------------------------------
// Bernstein check
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct BernsteinReport {
    pub s: f64,
    /// `(j, ‖Λ^s Δ_j f‖_{L²_w} / (2^{js} ‖Δ_j f‖_{L²_w}))` per active band.
    pub ratios: Vec<(i32, f64)>,
    pub is_empty: bool,
}

pub const BERNSTEIN_NOISE_FLOOR: f64 = 1e-10;

/// Per-band derivative-cost ratios; the annulus support pins them to
/// `[2^{-s}, 2^{s}]` up to the weight's distortion.
pub fn bernstein_check(
    bank: &FilterBank,
    f: &Field,
    s: f64,
    w: &Weight,
) -> Result<BernsteinReport> {
    let ws = w.sample(f.grid());
    let total = f.weighted_l2_sq(&ws).sqrt();
    let mut ratios = Vec::new();
    for j in bank.j_min..=bank.j_max {
        let block = lp_project(f, bank, j, ProjectionKind::Band)?;
        let denom = block.weighted_l2_sq(&ws).sqrt();
        if denom <= BERNSTEIN_NOISE_FLOOR * total {
            continue;
        }
        let num = fractional_laplacian_any_order(&block, s).weighted_l2_sq(&ws).sqrt();
        ratios.push((j, num / (2.0f64.powi(j).powf(s) * denom)));
    }
    Ok(BernsteinReport {
        s,
        is_empty: ratios.is_empty(),
        ratios,
    })
}

/// `|k|^s` multiplier without the `[0,2)` restriction (bands never touch the
/// zero mode, so negative orders are safe here).
fn fractional_laplacian_any_order(f: &Field, s: f64) -> Field {
    let mut sp = f.to_spectral();
    let ks: Vec<f64> = sp.grid().wavenumbers().to_vec();
    for (c, &k) in sp.coeffs_mut().iter_mut().zip(&ks) {
        *c *= if k == 0.0 { 0.0 } else { k.abs().powf(s) };
    }
    sp.to_physical()
}

// ---------------------------------------------------------------------------
// Paraproduct
// ---------------------------------------------------------------------------

/// Split `f·g` into the two paraproduct half-sums
/// `Σ_q S_{q+1}f Δ_q g` and `Σ_j Δ_j f S_j g`, with the low×low block
/// `S_{j_min}f·S_{j_min}g` folded into the first. The two parts sum back to
/// the pointwise product exactly when both spectra fit inside the bank.
pub fn paraproduct_split(f: &Field, g: &Field, bank: &FilterBank) -> Result<(Field, Field)> {
    const RANGE_TOL: f64 = 1e-10;
    for (name, field) in [("f", f), ("g", g)] {
        let frac = bank.unresolved_energy_fraction(field);
        if frac > RANGE_TOL {
            return Err(CoreError::BankRange(format!(
                "{name} has {frac:.3e} of its energy above 2^{}",
                bank.j_max
            )));
        }
    }
    let low_f = lp_project(f, bank, bank.j_min, ProjectionKind::LowPass)?;
    let low_g = lp_project(g, bank, bank.j_min, ProjectionKind::LowPass)?;
    let mut first = low_f.mul(&low_g);
    for q in bank.j_min..=bank.j_max {
        let s_next = lp_project(f, bank, q + 1, ProjectionKind::LowPass)?;
        let band_g = lp_project(g, bank, q, ProjectionKind::Band)?;
        first = first.add(&s_next.mul(&band_g));
    }
    let mut second = Field::zeros(f.grid());
    for j in bank.j_min..=bank.j_max {
        let band_f = lp_project(f, bank, j, ProjectionKind::Band)?;
        let s_g = lp_project(g, bank, j, ProjectionKind::LowPass)?;
        second = second.add(&band_f.mul(&s_g));
    }
    Ok((first, second))
}

/// Per-band energies `(j, ‖Δ_j f‖²_{L²}, ‖Δ_j f‖²_{L²_w})` for export.
pub fn band_energies(f: &Field, bank: &FilterBank, w: &Weight) -> Result<Vec<(i32, f64, f64)>> {
    let ws = w.sample(f.grid());
    let mut out = Vec::new();
    for j in bank.j_min..=bank.j_max {
        let block = lp_project(f, bank, j, ProjectionKind::Band)?;
        out.push((j, block.l2_norm_sq(), block.weighted_l2_sq(&ws)));
    }
    Ok(out)
}
