//! Physical configuration: radar system, flight path, targets and imaging grids.
//!
//! Coordinates follow the usual stripmap convention: `x` is cross-range,
//! `y` is range and `z` is height. Imaging grids live in a constant-`z`
//! plane (the ground, `z = 0`, unless stated otherwise).

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Radar system parameters.
///
/// `m` is the subspace dimension: the measurement uses `2m - 1` frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarConfig {
    #[serde(rename = "f0_hz")]
    pub f0: f64,
    #[serde(rename = "bandwidth_hz")]
    pub bandwidth: f64,
    pub m: usize,
    #[serde(rename = "c_m_per_s")]
    pub c: f64,
}

impl RadarConfig {
    pub const SPEED_OF_LIGHT: f64 = 3.0e8;

    pub fn new(f0: f64, bandwidth: f64, m: usize, c: f64) -> Result<Self> {
        let cfg = Self { f0, bandwidth, m, c };
        cfg.validate()?;
        Ok(cfg)
    }

    /// X-band system modelled on the GOTCHA collection: 9.6 GHz, 622 MHz, M = 31.
    pub fn gotcha() -> Self {
        Self { f0: 9.6e9, bandwidth: 622.0e6, m: 31, c: Self::SPEED_OF_LIGHT }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f0.is_finite() && self.f0 > 0.0) {
            return Err(Error::config(format!("f0 must be > 0 (got {})", self.f0)));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0 && self.bandwidth < 2.0 * self.f0) {
            return Err(Error::config(format!(
                "bandwidth must satisfy 0 < B < 2*f0 (got B = {}, f0 = {})",
                self.bandwidth, self.f0
            )));
        }
        if self.m < 2 {
            return Err(Error::config(format!("m must be >= 2 (got {})", self.m)));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::config(format!("c must be > 0 (got {})", self.c)));
        }
        Ok(())
    }

    /// Number of measured frequencies, `2m - 1`.
    pub fn n_frequencies(&self) -> usize {
        2 * self.m - 1
    }

    pub fn lambda0(&self) -> f64 {
        self.c / self.f0
    }

    pub fn with_bandwidth(mut self, bandwidth: f64) -> Result<Self> {
        self.bandwidth = bandwidth;
        self.validate()?;
        Ok(self)
    }
}

/// Uniformly spaced angular frequencies spanning the full bandwidth.
///
/// Round-trip phases `2 ω_m d / c` reach ~10⁷ rad at the standoffs of
/// interest, where an `f64` phase carries only ~1e-9 rad of absolute
/// precision. [`FrequencyGrid::cycles`] instead evaluates them in cycles,
/// reduced modulo 1 with error-free products, so independent evaluations of
/// the same phase agree to ~1e-15 rad.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub omegas: Vec<f64>,
    pub delta_omega: f64,
    pub f_start_hz: f64,
    pub delta_f_hz: f64,
}

impl FrequencyGrid {
    /// `2M - 1` samples over `[2π(f0 - B/2), 2π(f0 + B/2)]`.
    pub fn new(cfg: &RadarConfig) -> Result<Self> {
        cfg.validate()?;
        let count = cfg.n_frequencies();
        let f_start_hz = cfg.f0 - 0.5 * cfg.bandwidth;
        let delta_f_hz = cfg.bandwidth / (count - 1) as f64;
        let omega_min = 2.0 * PI * f_start_hz;
        let delta_omega = 2.0 * PI * delta_f_hz;
        let omegas = (0..count).map(|m| omega_min + m as f64 * delta_omega).collect();
        Ok(Self { omegas, delta_omega, f_start_hz, delta_f_hz })
    }

    /// Round-trip phase `2 f_m d / c` of sample `m`, in cycles, reduced to `[-1/2, 1/2]`.
    pub fn cycles(&self, m: usize, distance: f64, c: f64) -> f64 {
        let base = round_trip_cycles(self.f_start_hz, distance, c);
        let step = round_trip_cycles(self.delta_f_hz, distance, c);
        reduce_cycles(base + m as f64 * step)
    }

    /// `exp(i 2 ω_m d / c)`.
    pub fn phasor(&self, m: usize, distance: f64, c: f64) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.cycles(m, distance, c))
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Subspace dimension `M` such that `len() == 2M - 1`.
    pub fn subspace_dim(&self) -> usize {
        self.omegas.len().div_ceil(2)
    }

    /// The first `M` frequencies, used by the MUSIC illumination vectors.
    pub fn leading(&self) -> &[f64] {
        &self.omegas[..self.subspace_dim()]
    }
}

fn reduce_cycles(x: f64) -> f64 {
    x - x.round()
}

/// `2 f d / c` modulo 1, in `[-1/2, 1/2]`, accurate to a few ulps of 1.
pub fn round_trip_cycles(f: f64, distance: f64, c: f64) -> f64 {
    let two_f = 2.0 * f;
    let p = two_f * distance;
    let p_err = two_f.mul_add(distance, -p);
    let q = p / c;
    // The division remainder p - q c is exact under fma.
    let q_err = ((-q).mul_add(c, p) + p_err) / c;
    reduce_cycles(reduce_cycles(q) + q_err)
}

/// Linear flight path at constant range offset and height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightPath {
    pub positions: Vec<Vec3>,
    #[serde(rename = "aperture_m")]
    pub aperture: f64,
    #[serde(rename = "range_offset_m")]
    pub range_offset: f64,
    #[serde(rename = "height_m")]
    pub height: f64,
}

impl FlightPath {
    /// `N` positions `(x_n, R, H)` with `x_n = -a/2 + a(n-1)/(N-1)`.
    pub fn linear(aperture: f64, range_offset: f64, height: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::config(format!("flight path needs N >= 2 positions (got {n})")));
        }
        if !(aperture.is_finite() && aperture > 0.0) {
            return Err(Error::config(format!("aperture must be > 0 (got {aperture})")));
        }
        if !(range_offset.is_finite() && height.is_finite()) {
            return Err(Error::config("range offset and height must be finite"));
        }
        let positions = (0..n)
            .map(|i| {
                let x = -0.5 * aperture + aperture * i as f64 / (n - 1) as f64;
                Vec3::new(x, range_offset, height)
            })
            .collect();
        Ok(Self { positions, aperture, range_offset, height })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn center(&self) -> Vec3 {
        Vec3::new(0.0, self.range_offset, self.height)
    }

    /// Distance from the path center to the scene origin, `L = sqrt(R² + H²)`.
    pub fn standoff(&self) -> f64 {
        self.center().norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointTarget {
    #[serde(rename = "position_m")]
    pub position: Vec3,
    pub reflectivity: f64,
}

impl PointTarget {
    pub fn new(position: Vec3, reflectivity: f64) -> Result<Self> {
        if !(reflectivity.is_finite() && reflectivity >= 0.0) {
            return Err(Error::config(format!("reflectivity must be >= 0 (got {reflectivity})")));
        }
        Ok(Self { position, reflectivity })
    }

    pub fn unit(x: f64, y: f64, z: f64) -> Self {
        Self { position: Vec3::new(x, y, z), reflectivity: 1.0 }
    }
}

/// A collection of point targets.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub targets: Vec<PointTarget>,
}

impl Scene {
    pub fn new(targets: Vec<PointTarget>) -> Self {
        Self { targets }
    }

    /// One unit target at `(1 m, 1 m, 0)`.
    pub fn single_target() -> Self {
        Self::new(vec![PointTarget::unit(1.0, 1.0, 0.0)])
    }

    /// Three identical targets used for the multi-target experiments.
    pub fn three_targets() -> Self {
        Self::new(vec![
            PointTarget::unit(-1.4, -0.5, 0.0),
            PointTarget::unit(-0.6, -1.2, 0.0),
            PointTarget::unit(1.2, 1.1, 0.0),
        ])
    }

    pub fn validate(&self) -> Result<()> {
        for (k, t) in self.targets.iter().enumerate() {
            if !t.position.iter().all(|v| v.is_finite()) {
                return Err(Error::config(format!("target {k}: position must be finite")));
            }
            if !(t.reflectivity.is_finite() && t.reflectivity >= 0.0) {
                return Err(Error::config(format!("target {k}: reflectivity must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Rectangular pixel grid in a constant-`z` plane.
///
/// Pixel `(ix, iy)` sits at
/// `x = cx - hx + ix * 2hx/(nx-1)`, `y = cy - hy + iy * 2hy/(ny-1)`, `z = cz`,
/// so the first and last pixel centers lie on the region edges and the center
/// pixel (odd counts) lies on `center`. Pixel storage is row-major in `y`:
/// linear index `iy * nx + ix`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImagingGrid {
    #[serde(rename = "center_m")]
    pub center: Vec3,
    #[serde(rename = "half_width_x_m")]
    pub half_width_x: f64,
    #[serde(rename = "half_width_y_m")]
    pub half_width_y: f64,
    pub nx: usize,
    pub ny: usize,
}

impl ImagingGrid {
    pub fn new(center: Vec3, half_width_x: f64, half_width_y: f64, nx: usize, ny: usize) -> Result<Self> {
        let grid = Self { center, half_width_x, half_width_y, nx, ny };
        grid.validate()?;
        Ok(grid)
    }

    pub fn square(center: Vec3, half_width: f64, n: usize) -> Result<Self> {
        Self::new(center, half_width, half_width, n, n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::config(format!(
                "grid needs at least 2x2 pixels (got {}x{})",
                self.nx, self.ny
            )));
        }
        if !(self.half_width_x > 0.0 && self.half_width_y > 0.0)
            || !self.half_width_x.is_finite()
            || !self.half_width_y.is_finite()
        {
            return Err(Error::config("grid half widths must be positive and finite"));
        }
        if !self.center.iter().all(|v| v.is_finite()) {
            return Err(Error::config("grid center must be finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pitch_x(&self) -> f64 {
        2.0 * self.half_width_x / (self.nx - 1) as f64
    }

    pub fn pitch_y(&self) -> f64 {
        2.0 * self.half_width_y / (self.ny - 1) as f64
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.center.x - self.half_width_x + ix as f64 * self.pitch_x()
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.center.y - self.half_width_y + iy as f64 * self.pitch_y()
    }

    pub fn pixel(&self, ix: usize, iy: usize) -> Vec3 {
        Vec3::new(self.x(ix), self.y(iy), self.center.z)
    }

    /// Position of the pixel with linear index `idx`.
    pub fn point(&self, idx: usize) -> Vec3 {
        self.pixel(idx % self.nx, idx / self.nx)
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (p.x - self.center.x).abs() <= self.half_width_x * (1.0 + 1e-12)
            && (p.y - self.center.y).abs() <= self.half_width_y * (1.0 + 1e-12)
    }

    /// Nearest pixel `(ix, iy)` to `p`, clamped to the grid.
    pub fn nearest_pixel(&self, p: &Vec3) -> (usize, usize) {
        let fx = ((p.x - self.center.x + self.half_width_x) / self.pitch_x()).round();
        let fy = ((p.y - self.center.y + self.half_width_y) / self.pitch_y()).round();
        let ix = fx.clamp(0.0, (self.nx - 1) as f64) as usize;
        let iy = fy.clamp(0.0, (self.ny - 1) as f64) as usize;
        (ix, iy)
    }
}

/// Geometry of a linear-aperture collection: radar plus flight-path layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub radar: RadarConfig,
    #[serde(rename = "aperture_m")]
    pub aperture: f64,
    #[serde(rename = "range_offset_m")]
    pub range_offset: f64,
    #[serde(rename = "height_m")]
    pub height: f64,
    pub n_positions: usize,
}

impl SystemSpec {
    /// GOTCHA-like collection: a = 130 m, R = 7.1 km, H = 7.3 km, N = 124.
    pub fn gotcha() -> Self {
        Self {
            radar: RadarConfig::gotcha(),
            aperture: 130.0,
            range_offset: 7100.0,
            height: 7300.0,
            n_positions: 124,
        }
    }

    pub fn flight_path(&self) -> Result<FlightPath> {
        FlightPath::linear(self.aperture, self.range_offset, self.height, self.n_positions)
    }

    pub fn frequencies(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(&self.radar)
    }

    pub fn scales(&self) -> Result<DerivedScales> {
        Ok(derived_scales(&self.radar, &self.flight_path()?))
    }
}

/// Resolution scales implied by a radar/flight-path pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    pub lambda0: f64,
    pub standoff: f64,
    /// `c / B`
    pub range_scale: f64,
    /// `λ0 L / a`
    pub crossrange_scale: f64,
}

pub fn derived_scales(cfg: &RadarConfig, path: &FlightPath) -> DerivedScales {
    let lambda0 = cfg.lambda0();
    let standoff = path.standoff();
    DerivedScales {
        lambda0,
        standoff,
        range_scale: cfg.c / cfg.bandwidth,
        crossrange_scale: lambda0 * standoff / path.aperture,
    }
}
