//! MUSIC for SAR: Prony (Hankel) rearrangement of each data column, signal
//! subspace extraction by SVD, and the classical and ε-weighted MUSIC images.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::{target_amplitude, Acquisition, DataMatrix};
use std::f64::consts::PI;

use crate::geometry::{round_trip_cycles, FrequencyGrid, ImagingGrid, Scene, Vec3};
use crate::raster::{ImageRaster, Method};
use crate::DENOMINATOR_FLOOR;

/// `M x M` Hankel matrix built from one length-`2M-1` data column.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelData {
    pub matrix: DMatrix<Complex64>,
    pub source_column: Option<usize>,
}

/// Hankel rearrangement: entry `(i, j)` is `d[i + j]`.
pub fn prony_rearrange(d: &[Complex64], m: usize) -> Result<HankelData> {
    if m == 0 || d.len() != 2 * m - 1 {
        return Err(Error::Shape(format!("need 2M-1 = {} samples for M = {m}, got {}", 2 * m.max(1) - 1, d.len())));
    }
    Ok(HankelData { matrix: DMatrix::from_fn(m, m, |i, j| d[i + j]), source_column: None })
}

/// Hankel matrix of data column `n`.
pub fn prony_column(data: &DataMatrix, n: usize) -> Result<HankelData> {
    let m = data.acquisition.freq.subspace_dim();
    let mut h = prony_rearrange(&data.column(n), m)?;
    h.source_column = Some(n);
    Ok(h)
}

/// Explicit sum of per-target outer products `Σ_k s_k u_k v_kᴴ` for position `n`.
///
/// `u_k` carries the first `M` round-trip phases and `v_k` the conjugate
/// phase steps `exp(-i 2 j Δω r / c)`. Built independently of the data
/// synthesis path so it can serve as an oracle for it.
pub fn outer_product_model(scene: &Scene, acquisition: &Acquisition, n: usize) -> Result<DMatrix<Complex64>> {
    let m = acquisition.freq.subspace_dim();
    let x = acquisition
        .path
        .positions
        .get(n)
        .ok_or_else(|| Error::Shape(format!("position index {n} out of range")))?;
    let c = acquisition.radar.c;
    let mut out = DMatrix::<Complex64>::zeros(m, m);
    for t in &scene.targets {
        let s = target_amplitude(x, &t.position, t.reflectivity)?;
        let r = (x - t.position).norm();
        let freq = &acquisition.freq;
        let u = DVector::from_fn(m, |i, _| freq.phasor(i, r, c));
        let step = round_trip_cycles(freq.delta_f_hz, r, c);
        let v = DVector::from_fn(m, |j, _| {
            let cyc = j as f64 * step;
            Complex64::from_polar(1.0, -2.0 * PI * (cyc - cyc.round()))
        });
        out += (u * v.adjoint()).map(|e| e * s);
    }
    Ok(out)
}

/// How many leading singular vectors span the signal subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RankRule {
    /// Known number of targets.
    Fixed(usize),
    /// Keep `σ_k > δ σ_1`.
    Threshold(f64),
}

impl Default for RankRule {
    fn default() -> Self {
        RankRule::Threshold(0.1)
    }
}

/// Orthonormal basis `Ũ` (`M x K`) of the signal subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    pub basis: DMatrix<Complex64>,
    /// All `M` singular values, descending.
    pub singular_values: Vec<f64>,
    pub rank: usize,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// `P_signal = Ũ Ũᴴ`
    pub fn signal_projector(&self) -> DMatrix<Complex64> {
        &self.basis * self.basis.adjoint()
    }

    /// `P_noise = I - Ũ Ũᴴ`
    pub fn noise_projector(&self) -> DMatrix<Complex64> {
        DMatrix::identity(self.dim(), self.dim()) - self.signal_projector()
    }

    /// `|Ũᴴ a|²`
    pub fn signal_energy(&self, a: &[Complex64]) -> f64 {
        self.coefficients(a).iter().map(|v| v.norm_sqr()).sum()
    }

    /// `‖P_noise a‖²`, evaluated from the explicit residual `a - Ũ Ũᴴ a`.
    pub fn noise_energy(&self, a: &[Complex64]) -> f64 {
        let coeffs = self.coefficients(a);
        (0..self.dim())
            .map(|i| {
                let proj: Complex64 = (0..self.rank).map(|k| self.basis[(i, k)] * coeffs[k]).sum();
                (a[i] - proj).norm_sqr()
            })
            .sum()
    }

    fn coefficients(&self, a: &[Complex64]) -> Vec<Complex64> {
        (0..self.rank)
            .map(|k| (0..self.dim()).map(|i| self.basis[(i, k)].conj() * a[i]).sum())
            .collect()
    }
}

/// SVD of the Hankel matrix; keeps the leading left singular vectors.
pub fn subspace_decompose(h: &HankelData, rule: RankRule) -> Result<SubspaceBasis> {
    let m = h.matrix.nrows();
    let svd = h.matrix.clone().svd(true, false);
    let u = svd.u.ok_or_else(|| Error::Degenerate("SVD did not return U".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let rank = match rule {
        RankRule::Fixed(k) => {
            if k == 0 || k >= m {
                return Err(Error::Rank(format!("signal rank must satisfy 1 <= K < M = {m} (got {k})")));
            }
            k
        }
        RankRule::Threshold(delta) => {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Error::Parameter(format!("threshold must lie in (0, 1) (got {delta})")));
            }
            let top = singular_values[0];
            if top == 0.0 {
                return Err(Error::Degenerate("all singular values are zero".into()));
            }
            let k = singular_values.iter().filter(|&&s| s > delta * top).count();
            if k >= m {
                return Err(Error::Rank(format!("threshold {delta} keeps all {m} singular vectors")));
            }
            k
        }
    };
    let basis = DMatrix::from_fn(m, rank, |i, k| u[(i, order[k])]);
    Ok(SubspaceBasis { basis, singular_values, rank })
}

/// `exp(i 2 ω_m d / c)` for the first `count` frequencies of `freq`.
pub fn phase_vector(freq: &FrequencyGrid, count: usize, distance: f64, c: f64) -> Vec<Complex64> {
    let base = round_trip_cycles(freq.f_start_hz, distance, c);
    let step = round_trip_cycles(freq.delta_f_hz, distance, c);
    (0..count)
        .map(|m| {
            let cyc = base + m as f64 * step;
            Complex64::from_polar(1.0, 2.0 * PI * (cyc - cyc.round()))
        })
        .collect()
}

/// Illumination vector over the first `M` frequencies.
pub fn illumination_vector(acquisition: &Acquisition, platform: &Vec3, y: &Vec3) -> Vec<Complex64> {
    let freq = &acquisition.freq;
    phase_vector(
        freq,
        freq.subspace_dim(),
        (platform - y).norm(),
        acquisition.radar.c,
    )
}

/// Signal subspaces for every platform position.
pub fn position_bases(data: &DataMatrix, rule: RankRule) -> Result<Vec<SubspaceBasis>> {
    (0..data.n_positions())
        .into_par_iter()
        .map(|n| subspace_decompose(&prony_column(data, n)?, rule))
        .collect()
}

/// Classical MUSIC image `I(y) = [Σ_n ‖P_noise a_n(y)‖²]⁻¹`.
pub fn music_image(data: &DataMatrix, grid: &ImagingGrid, rule: RankRule) -> Result<ImageRaster> {
    let bases = position_bases(data, rule)?;
    let acq = &data.acquisition;
    let sums: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let y = grid.point(idx);
            acq.path
                .positions
                .iter()
                .zip(&bases)
                .map(|(x, b)| b.noise_energy(&illumination_vector(acq, x, &y)))
                .sum()
        })
        .collect();
    if sums.iter().all(|&s| s < DENOMINATOR_FLOOR) {
        return Err(Error::Degenerate("noise-subspace projections vanish everywhere".into()));
    }
    let values = sums.iter().map(|&s| 1.0 / s.max(DENOMINATOR_FLOOR)).collect();
    ImageRaster::new(*grid, Method::Music, None, values)
}

/// ε-weighted MUSIC image
/// `I_ε(y) = ε [Σ_n (1 - (1-ε) |Ũᴴa_n|²/‖a_n‖²) ‖a_n‖²]⁻¹`.
///
/// The bracket is evaluated as `‖P_noise a‖² + ε |Ũᴴ a|²`, which is the same
/// quantity without the cancellation near targets.
pub fn music_eps_image(data: &DataMatrix, grid: &ImagingGrid, rule: RankRule, eps: f64) -> Result<ImageRaster> {
    check_eps(eps)?;
    let bases = position_bases(data, rule)?;
    let acq = &data.acquisition;
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let y = grid.point(idx);
            let denom: f64 = acq
                .path
                .positions
                .iter()
                .zip(&bases)
                .map(|(x, b)| {
                    let a = illumination_vector(acq, x, &y);
                    b.noise_energy(&a) + eps * b.signal_energy(&a)
                })
                .sum();
            eps / denom.max(DENOMINATOR_FLOOR)
        })
        .collect();
    ImageRaster::new(*grid, Method::MusicEps, Some(eps), values)
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("eps must lie in (0, 1] (got {eps})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::simulate_data;
    use crate::geometry::SystemSpec;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hankel_examples() {
        let h = prony_rearrange(&[c(1.0), c(2.0), c(3.0)], 2).unwrap();
        assert_eq!(h.matrix, DMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(3.0)]));
        let ones = prony_rearrange(&[c(1.0); 9], 5).unwrap();
        assert!(ones.matrix.iter().all(|v| *v == c(1.0)));
        let sv = ones.matrix.singular_values();
        let mut s: Vec<f64> = sv.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        assert!(s[1] / s[0] < 1e-12);
        assert!(matches!(prony_rearrange(&[c(1.0); 4], 2), Err(Error::Shape(_))));
    }

    #[test]
    fn outer_product_ranks() {
        let acq = Acquisition::from_system(&SystemSpec::gotcha()).unwrap();
        let zero = outer_product_model(&Scene::default(), &acq, 0).unwrap();
        assert!(zero.iter().all(|v| v.norm() == 0.0));
        let one = outer_product_model(&Scene::single_target(), &acq, 5).unwrap();
        let s = sorted_sv(&one);
        assert!(s[1] / s[0] < 1e-12);
        let three = outer_product_model(&Scene::three_targets(), &acq, 60).unwrap();
        let s = sorted_sv(&three);
        assert!(s[2] / s[0] > 1e-6);
        assert!(s[3] / s[0] < 1e-10, "sigma4/sigma1 = {}", s[3] / s[0]);
    }

    fn sorted_sv(m: &DMatrix<Complex64>) -> Vec<f64> {
        let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    #[test]
    fn decompose_trivial_basis() {
        let h = prony_rearrange(&[c(1.0), c(0.0), c(0.0)], 2).unwrap();
        let b = subspace_decompose(&h, RankRule::Fixed(1)).unwrap();
        assert!((b.basis[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert!(b.basis[(1, 0)].norm() < 1e-14);
        assert!(matches!(subspace_decompose(&h, RankRule::Fixed(2)), Err(Error::Rank(_))));
        assert!(matches!(subspace_decompose(&h, RankRule::Fixed(0)), Err(Error::Rank(_))));
    }

    #[test]
    fn threshold_rule_counts() {
        // singular values 1, 0.5, 1e-9, 1e-12
        let m = 4;
        let sv = [1.0, 0.5, 1e-9, 1e-12];
        let matrix = DMatrix::from_fn(m, m, |i, j| if i + j == m - 1 { c(sv[i]) } else { c(0.0) });
        let h = HankelData { matrix, source_column: None };
        let b = subspace_decompose(&h, RankRule::Threshold(0.1)).unwrap();
        assert_eq!(b.rank, 2);
        assert_eq!(b.singular_values.len(), 4);
        assert!(b.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn illumination_has_unit_entries() {
        let acq = Acquisition::from_system(&SystemSpec::gotcha()).unwrap();
        let x = acq.path.positions[0];
        let a = illumination_vector(&acq, &x, &Vec3::new(0.3, -2.0, 0.0));
        let norm2: f64 = a.iter().map(|v| v.norm_sqr()).sum();
        assert!((norm2 - 31.0).abs() < 1e-12);
        let same = illumination_vector(&acq, &x, &x);
        assert!(same.iter().all(|v| (v - c(1.0)).norm() < 1e-15));
    }

    #[test]
    fn eps_range_is_checked() {
        let acq = Acquisition::from_system(&SystemSpec::gotcha()).unwrap();
        let data = simulate_data(&Scene::single_target(), &acq).unwrap();
        let grid = ImagingGrid::square(Vec3::new(1.0, 1.0, 0.0), 0.1, 3).unwrap();
        for eps in [0.0, -1.0, 1.5] {
            assert!(matches!(music_eps_image(&data, &grid, RankRule::Fixed(1), eps), Err(Error::Parameter(_))));
        }
    }
}
