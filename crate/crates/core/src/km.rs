//! Kirchhoff migration and its tunable rational transformation.
//!
//! The KM image is `I(y) = Σ_n d_nᴴ a_n(y)` with `a_n(y)` the round-trip phase
//! vector over all `2M-1` frequencies. The modified functional works with the
//! unit-normalised projections `z_n(y) = d̂_nᴴ â_n(y)`: their mean
//! `Z(y) = N⁻¹ Σ_n z_n(y)` is the normalised KM image, `|Z| ≤ 1`, and
//!
//! ```text
//! I_ε(y) = ε |Σ_n (1 - (1-ε) ζ_n(y))|⁻² = ε / (N² |1 - (1-ε) ζ(y)|²)
//! ```
//!
//! where `ζ` is `Z` (complex form) or `|Z|` (magnitude form), optionally
//! divided by the largest `|Z|` on the grid so that the region peak attains
//! exact cancellation. On a noiseless single target `ζ = 1` at the target and
//! `I_ε` reaches its ceiling `1 / (N² ε)`.
//!
//! The magnitude form is the default. The complex form keeps the carrier phase
//! `exp(i 4π Δr / λ0)` of `Z`, so its main lobe is set by `ε λ0` instead of
//! `√ε` times the KM resolution cell; it is kept for comparison.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::DataMatrix;
use crate::geometry::{ImagingGrid, Vec3};
use crate::raster::{ImageRaster, Method};
use crate::subspace::{check_eps, phase_vector};
use crate::DENOMINATOR_FLOOR;

/// `F_ε(f) = ε / (1 - (1-ε) f)` for `f ∈ [0, 1]`, `ε ∈ (0, 1]`.
pub fn f_eps(f: f64, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::Parameter(format!("f must lie in [0, 1] (got {f})")));
    }
    Ok(eps / ((1.0 - f) + eps * f))
}

/// KM illumination vector `a_n(y)` over all `2M-1` frequencies.
pub fn km_illumination(data: &DataMatrix, n: usize, y: &Vec3) -> Vec<Complex64> {
    let acq = &data.acquisition;
    phase_vector(
        &acq.freq,
        acq.freq.len(),
        (acq.path.positions[n] - y).norm(),
        acq.radar.c,
    )
}

fn km_sum(data: &DataMatrix, y: &Vec3) -> Complex64 {
    (0..data.n_positions())
        .map(|n| {
            let a = km_illumination(data, n, y);
            data.values.column(n).iter().zip(&a).map(|(d, a)| d.conj() * a).sum::<Complex64>()
        })
        .sum()
}

/// Complex KM value `Σ_n d_nᴴ a_n(y)` at one point.
pub fn km_value(data: &DataMatrix, y: &Vec3) -> Complex64 {
    km_sum(data, y)
}

/// `|I_KM(y)|` over the grid. All-zero data gives a degenerate raster (no peak).
pub fn km_image(data: &DataMatrix, grid: &ImagingGrid) -> Result<ImageRaster> {
    let values: Vec<f64> = (0..grid.len()).into_par_iter().map(|i| km_sum(data, &grid.point(i)).norm()).collect();
    ImageRaster::new(*grid, Method::Km, None, values)
}

/// Unit-normalised data columns `d̂_n`.
#[derive(Debug, Clone)]
pub struct KmVectors<'a> {
    data: &'a DataMatrix,
    /// `1 / (‖d_n‖ √(2M-1))`, folding the `â_n` normalisation in.
    scale: Vec<f64>,
}

impl<'a> KmVectors<'a> {
    /// Fails with the index of the first all-zero column.
    pub fn new(data: &'a DataMatrix) -> Result<Self> {
        let root_f = (data.n_frequencies() as f64).sqrt();
        let scale = (0..data.n_positions())
            .map(|n| {
                let norm = data.values.column(n).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 {
                    Err(Error::Degenerate(format!("data column {n} is zero; d_n cannot be normalised")))
                } else {
                    Ok(1.0 / (norm * root_f))
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self { data, scale })
    }

    pub fn n_positions(&self) -> usize {
        self.scale.len()
    }

    pub fn d_hat(&self, n: usize) -> Vec<Complex64> {
        let s = self.scale[n] * (self.data.n_frequencies() as f64).sqrt();
        self.data.values.column(n).iter().map(|v| v * s).collect()
    }

    pub fn a_hat(&self, n: usize, y: &Vec3) -> Vec<Complex64> {
        let s = 1.0 / (self.data.n_frequencies() as f64).sqrt();
        km_illumination(self.data, n, y).into_iter().map(|v| v * s).collect()
    }

    /// `z_n(y) = d̂_nᴴ â_n(y)` for one position.
    pub fn projection(&self, n: usize, y: &Vec3) -> Complex64 {
        let a = km_illumination(self.data, n, y);
        let dot: Complex64 = self.data.values.column(n).iter().zip(&a).map(|(d, a)| d.conj() * a).sum();
        dot * self.scale[n]
    }

    /// All `z_n(y)`, in position order.
    pub fn projections(&self, y: &Vec3) -> Vec<Complex64> {
        (0..self.n_positions()).map(|n| self.projection(n, y)).collect()
    }

    /// Normalised KM value `Z(y) = N⁻¹ Σ_n z_n(y)`.
    pub fn normalized_km(&self, y: &Vec3) -> Complex64 {
        (0..self.n_positions()).map(|n| self.projection(n, y)).sum::<Complex64>() / self.n_positions() as f64
    }
}

/// Whether `ζ` keeps the phase of the normalised KM value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionForm {
    #[default]
    Magnitude,
    Complex,
}

/// What `|Z|` is divided by before the rational transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CancellationReference {
    /// `ζ = Z`: exact cancellation only where every `z_n = 1`.
    Unit,
    /// `ζ = Z / max_grid |Z|`: the grid peak always cancels exactly.
    #[default]
    RegionPeak,
}

/// Parameters of the tunable KM functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModifiedKm {
    pub eps: f64,
    #[serde(default)]
    pub form: ProjectionForm,
    #[serde(default)]
    pub reference: CancellationReference,
}

impl ModifiedKm {
    pub fn new(eps: f64) -> Result<Self> {
        check_eps(eps)?;
        Ok(Self { eps, form: ProjectionForm::default(), reference: CancellationReference::default() })
    }

    pub fn with_form(mut self, form: ProjectionForm) -> Self {
        self.form = form;
        self
    }

    pub fn with_reference(mut self, reference: CancellationReference) -> Self {
        self.reference = reference;
        self
    }

    /// Value from a normalised KM sample `Z` and reference magnitude.
    pub fn evaluate(&self, z: Complex64, reference: f64, n_positions: usize) -> f64 {
        let zeta = match self.form {
            ProjectionForm::Magnitude => Complex64::new(z.norm() / reference, 0.0),
            ProjectionForm::Complex => z / reference,
        };
        let n = n_positions as f64;
        // 1 - (1-ε)ζ written so that ζ = 1 cancels to exactly ε.
        let denom = (n * ((1.0 - zeta) + self.eps * zeta)).norm_sqr();
        self.eps / denom.max(DENOMINATOR_FLOOR)
    }

    /// `1 / (N² ε)`, the value at exact cancellation.
    pub fn ceiling(&self, n_positions: usize) -> f64 {
        1.0 / ((n_positions * n_positions) as f64 * self.eps)
    }

    pub fn image(&self, data: &DataMatrix, grid: &ImagingGrid) -> Result<ImageRaster> {
        check_eps(self.eps)?;
        let vectors = KmVectors::new(data)?;
        let z: Vec<Complex64> =
            (0..grid.len()).into_par_iter().map(|i| vectors.normalized_km(&grid.point(i))).collect();
        let reference = match self.reference {
            CancellationReference::Unit => 1.0,
            CancellationReference::RegionPeak => {
                let peak = z.iter().map(|v| v.norm()).fold(0.0, f64::max);
                if peak == 0.0 {
                    return Err(Error::Degenerate("normalised KM image is zero on the whole grid".into()));
                }
                peak
            }
        };
        let n = vectors.n_positions();
        let values = z.iter().map(|&v| self.evaluate(v, reference, n)).collect();
        ImageRaster::new(*grid, Method::KmEps, Some(self.eps), values)
    }
}

/// Tunable KM image with the default magnitude form and region-peak reference.
pub fn modified_km_image(data: &DataMatrix, grid: &ImagingGrid, eps: f64) -> Result<ImageRaster> {
    ModifiedKm::new(eps)?.image(data, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_eps_endpoints() {
        for eps in [1e-6, 1e-3, 0.5, 1.0] {
            assert!((f_eps(1.0, eps).unwrap() - 1.0).abs() < 1e-15);
            assert!((f_eps(0.0, eps).unwrap() - eps).abs() < 1e-18);
        }
        assert!(f_eps(1.1, 0.1).is_err());
        assert!(f_eps(-0.1, 0.1).is_err());
        assert!(f_eps(0.5, 0.0).is_err());
        assert!(f_eps(0.5, 1.5).is_err());
    }

    #[test]
    fn f_eps_half_max_of_quadratic() {
        // f(x) = 1 - β²x², β = 2, ε = 0.01: bisect F_ε(x) = 1/2 on (0, 1/β).
        let (beta, eps) = (2.0f64, 0.01);
        let g = |x: f64| f_eps(1.0 - beta * beta * x * x, eps).unwrap() - 0.5;
        let (mut lo, mut hi) = (0.0, 0.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - 0.050252).abs() < 1e-6, "crossing at {lo}");
        assert!((2.0 * lo - 0.100504).abs() < 1e-6);
        let closed = eps.sqrt() / (beta * (1.0 - eps).sqrt());
        assert!((lo - closed).abs() < 1e-12);
    }

    #[test]
    fn evaluate_bounds() {
        let mk = ModifiedKm::new(1e-3).unwrap();
        let top = mk.evaluate(Complex64::new(1.0, 0.0), 1.0, 10);
        assert!((top / mk.ceiling(10) - 1.0).abs() < 1e-12);
        let lower = mk.evaluate(Complex64::new(0.3, 0.4), 1.0, 10);
        assert!(lower > 0.0 && lower < top);
        let cplx = mk.with_form(ProjectionForm::Complex);
        assert!(cplx.evaluate(Complex64::new(0.0, 1.0), 1.0, 10) < top);
    }
}
