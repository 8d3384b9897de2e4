//! Point-target synthetic aperture radar laboratory.
//!
//! Simulates frequency-domain measurements along a linear flight path and
//! forms images with Kirchhoff migration (KM), the tunable modified KM
//! functional, classical MUSIC and ε-weighted MUSIC. The [`resolution`]
//! module measures point-spread-function widths and runs the resolution
//! sweeps; [`io`], [`cli`] and [`service`] expose the file formats, command
//! drivers and HTTP API.

pub mod cli;
pub mod error;
pub mod forward;
pub mod geometry;
pub mod imaging;
pub mod io;
pub mod km;
pub mod raster;
pub mod resolution;
pub mod service;
pub mod subspace;

pub use error::{Error, Result};
pub use forward::{add_noise, measure_snr, simulate_data, target_amplitude, Acquisition, DataMatrix, NoiseMeta};
pub use geometry::{
    derived_scales, DerivedScales, FlightPath, FrequencyGrid, ImagingGrid, PointTarget, RadarConfig, Scene,
    SystemSpec, Vec3,
};
pub use km::{f_eps, km_image, modified_km_image, CancellationReference, KmVectors, ModifiedKm, ProjectionForm};
pub use imaging::{form_image, ImagingParams};
pub use raster::{ImageRaster, Method, Peak};
pub use resolution::{compare_rasters, fwhm_1d, fwhm_2d, peak_offset_study, sweep_aperture, sweep_bandwidth, sweep_epsilon};
pub use subspace::{
    illumination_vector, music_eps_image, music_image, outer_product_model, prony_rearrange, subspace_decompose,
    HankelData, RankRule, SubspaceBasis,
};

/// Denominators below this are clamped before taking reciprocals.
pub const DENOMINATOR_FLOOR: f64 = 1e-300;
