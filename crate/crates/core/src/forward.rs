//! Frequency-domain point-target data synthesis and noise injection.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FlightPath, FrequencyGrid, RadarConfig, Scene, SystemSpec, Vec3};
use crate::subspace::phase_vector;

/// Radar, frequency samples and flight path of one collection.
#[derive(Debug, Clone, PartialEq)]
pub struct Acquisition {
    pub radar: RadarConfig,
    pub freq: FrequencyGrid,
    pub path: FlightPath,
}

impl Acquisition {
    pub fn new(radar: RadarConfig, path: FlightPath) -> Result<Self> {
        let freq = FrequencyGrid::new(&radar)?;
        Ok(Self { radar, freq, path })
    }

    pub fn from_system(system: &SystemSpec) -> Result<Self> {
        Self::new(system.radar, system.flight_path()?)
    }

    pub fn lambda0(&self) -> f64 {
        self.radar.lambda0()
    }
}

/// Provenance of additive noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseMeta {
    pub snr_db_requested: f64,
    pub snr_db_achieved: f64,
    pub seed: u64,
}

/// The `(2M-1) x N` measurement matrix; column `n` is the spectrum at platform position `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    pub values: DMatrix<Complex64>,
    pub acquisition: Acquisition,
    pub noise: Option<NoiseMeta>,
}

impl DataMatrix {
    pub fn new(values: DMatrix<Complex64>, acquisition: Acquisition, noise: Option<NoiseMeta>) -> Result<Self> {
        let (rows, cols) = values.shape();
        if rows != acquisition.freq.len() || cols != acquisition.path.len() {
            return Err(Error::Shape(format!(
                "data is {rows}x{cols} but acquisition has {} frequencies x {} positions",
                acquisition.freq.len(),
                acquisition.path.len()
            )));
        }
        Ok(Self { values, acquisition, noise })
    }

    pub fn n_frequencies(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_positions(&self) -> usize {
        self.values.ncols()
    }

    pub fn column(&self, n: usize) -> Vec<Complex64> {
        self.values.column(n).iter().copied().collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.values)
    }

    /// Entrywise product with a complex scalar; metadata is kept.
    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self { values: self.values.map(|v| v * alpha), ..self.clone() }
    }
}

fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Point-target amplitude `ρ / (4π |x - y|)²`.
pub fn target_amplitude(platform: &Vec3, target: &Vec3, reflectivity: f64) -> Result<f64> {
    let distance = (platform - target).norm();
    if distance == 0.0 {
        return Err(Error::Domain(format!("target at {target:?} coincides with a platform position")));
    }
    Ok(reflectivity / (4.0 * PI * distance).powi(2))
}

/// Noiseless Born-approximation data for a point-target scene.
pub fn simulate_data(scene: &Scene, acquisition: &Acquisition) -> Result<DataMatrix> {
    scene.validate()?;
    let rows = acquisition.freq.len();
    let columns: Vec<Vec<Complex64>> = acquisition
        .path
        .positions
        .par_iter()
        .map(|x| {
            let mut col = vec![Complex64::new(0.0, 0.0); rows];
            for t in &scene.targets {
                let s = target_amplitude(x, &t.position, t.reflectivity)?;
                let r = (x - t.position).norm();
                let freq = &acquisition.freq;
                let phases = phase_vector(freq, rows, r, acquisition.radar.c);
                for (entry, p) in col.iter_mut().zip(phases) {
                    *entry += s * p;
                }
            }
            Ok(col)
        })
        .collect::<Result<_>>()?;
    let values = DMatrix::from_fn(rows, columns.len(), |m, n| columns[n][m]);
    DataMatrix::new(values, acquisition.clone(), None)
}

/// Adds circularly-symmetric complex Gaussian noise scaled so that
/// `10 log10(‖D‖²_F / ‖W‖²_F)` equals `snr_db` exactly.
///
/// `snr_db = +inf` means noiseless and returns the input unchanged. The noise
/// stream is ChaCha8 seeded with `seed`, drawn column-major, real part first.
pub fn add_noise(data: &DataMatrix, snr_db: f64, seed: u64) -> Result<DataMatrix> {
    if snr_db == f64::INFINITY {
        return Ok(data.clone());
    }
    if !snr_db.is_finite() {
        return Err(Error::Parameter(format!("SNR must be finite or +inf (got {snr_db})")));
    }
    if data.noise.is_some() {
        return Err(Error::Parameter("data already carries noise".into()));
    }
    let signal = data.frobenius_norm();
    if signal == 0.0 {
        return Err(Error::Degenerate("SNR is undefined for all-zero data".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rows, cols) = data.values.shape();
    let mut noise = DMatrix::<Complex64>::zeros(rows, cols);
    for v in noise.iter_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *v = Complex64::new(re, im);
    }
    let scale = signal / (frobenius(&noise) * 10f64.powf(snr_db / 20.0));
    let noisy_values = &data.values + noise.map(|w| w * scale);
    let achieved = snr_between(&data.values, &noisy_values)?;
    Ok(DataMatrix {
        values: noisy_values,
        acquisition: data.acquisition.clone(),
        noise: Some(NoiseMeta { snr_db_requested: snr_db, snr_db_achieved: achieved, seed }),
    })
}

/// `10 log10(‖clean‖² / ‖noisy - clean‖²)`; `+inf` when the two are identical.
pub fn measure_snr(clean: &DataMatrix, noisy: &DataMatrix) -> Result<f64> {
    snr_between(&clean.values, &noisy.values)
}

fn snr_between(clean: &DMatrix<Complex64>, noisy: &DMatrix<Complex64>) -> Result<f64> {
    if clean.shape() != noisy.shape() {
        return Err(Error::Shape(format!("{:?} vs {:?}", clean.shape(), noisy.shape())));
    }
    let signal: f64 = clean.iter().map(|v| v.norm_sqr()).sum();
    let residual: f64 = clean.iter().zip(noisy.iter()).map(|(a, b)| (b - a).norm_sqr()).sum();
    if residual == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / residual).log10())
}
