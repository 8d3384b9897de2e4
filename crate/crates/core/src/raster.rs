//! Pixel rasters produced by the imaging functionals.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ImagingGrid, Vec3};

/// Imaging functional that produced a raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "km")]
    Km,
    #[serde(rename = "km-eps")]
    KmEps,
    #[serde(rename = "music")]
    Music,
    #[serde(rename = "music-eps")]
    MusicEps,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Km => "km",
            Method::KmEps => "km-eps",
            Method::Music => "music",
            Method::MusicEps => "music-eps",
        }
    }

    pub fn needs_eps(&self) -> bool {
        matches!(self, Method::KmEps | Method::MusicEps)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "km" => Ok(Method::Km),
            "km-eps" => Ok(Method::KmEps),
            "music" => Ok(Method::Music),
            "music-eps" => Ok(Method::MusicEps),
            other => Err(Error::Parameter(format!(
                "unknown method '{other}' (expected km, km-eps, music or music-eps)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub ix: usize,
    pub iy: usize,
    pub position: Vec3,
    pub value: f64,
}

/// Real, non-negative pixel values over an [`ImagingGrid`].
///
/// `values` is row-major (`iy * nx + ix`). `peak` is `None` when the raster is
/// degenerate (every pixel zero).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRaster {
    pub grid: ImagingGrid,
    pub method: Method,
    pub eps: Option<f64>,
    pub values: Vec<f64>,
    pub peak: Option<Peak>,
}

impl ImageRaster {
    pub fn new(grid: ImagingGrid, method: Method, eps: Option<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!("{} values for a {}x{} grid", values.len(), grid.nx, grid.ny)));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Degenerate(format!("pixel {bad} has non-finite or negative value {}", values[bad])));
        }
        let peak = find_peak(&grid, &values);
        Ok(Self { grid, method, eps, values, peak })
    }

    pub fn is_degenerate(&self) -> bool {
        self.peak.is_none()
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.nx + ix]
    }

    /// Samples along `x` (cross-range) through row `iy`.
    pub fn row(&self, iy: usize) -> &[f64] {
        let nx = self.grid.nx;
        &self.values[iy * nx..(iy + 1) * nx]
    }

    /// Samples along `y` (range) through column `ix`.
    pub fn column(&self, ix: usize) -> Vec<f64> {
        (0..self.grid.ny).map(|iy| self.at(ix, iy)).collect()
    }

    fn peak_or_err(&self) -> Result<&Peak> {
        self.peak.as_ref().ok_or_else(|| Error::Degenerate("raster has no peak (all zero)".into()))
    }

    /// Values divided by the raster peak.
    pub fn normalized(&self) -> Result<Vec<f64>> {
        let p = self.peak_or_err()?.value;
        Ok(self.values.iter().map(|v| v / p).collect())
    }

    /// `10 log10(value / peak)`; zero pixels map to `-inf`.
    pub fn db(&self) -> Result<Vec<f64>> {
        let p = self.peak_or_err()?.value;
        Ok(self.values.iter().map(|v| 10.0 * (v / p).log10()).collect())
    }
}

fn find_peak(grid: &ImagingGrid, values: &[f64]) -> Option<Peak> {
    let (idx, &value) = values
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, &f64)>, (i, v)| match best {
            Some((_, b)) if *b >= *v => best,
            _ => Some((i, v)),
        })?;
    if value <= 0.0 {
        return None;
    }
    let (ix, iy) = (idx % grid.nx, idx / grid.nx);
    Some(Peak { ix, iy, position: grid.pixel(ix, iy), value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> ImagingGrid {
        ImagingGrid::new(Vec3::zeros(), 1.0, 2.0, 3, 5).unwrap()
    }

    #[test]
    fn peak_is_first_maximum() {
        let mut v = vec![0.0; 15];
        v[7] = 2.0;
        v[11] = 2.0;
        let r = ImageRaster::new(grid(), Method::Km, None, v).unwrap();
        let p = r.peak.unwrap();
        assert_eq!((p.ix, p.iy), (1, 2));
        assert_eq!(p.value, 2.0);
        assert_eq!(r.column(1)[2], 2.0);
        assert_eq!(r.row(2), &[0.0, 2.0, 0.0]);
    }

    #[test]
    fn zero_raster_is_degenerate() {
        let r = ImageRaster::new(grid(), Method::Km, None, vec![0.0; 15]).unwrap();
        assert!(r.is_degenerate());
        assert!(r.db().is_err());
    }

    #[test]
    fn db_view_is_relative_to_peak() {
        let v: Vec<f64> = (1..=15).map(f64::from).collect();
        let r = ImageRaster::new(grid(), Method::Km, None, v.clone()).unwrap();
        let db = r.db().unwrap();
        for (d, x) in db.iter().zip(&v) {
            assert!((d - 10.0 * (x / 15.0).log10()).abs() < 1e-15);
        }
        assert_eq!(db[14], 0.0);
        assert_eq!(r.values, v);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ImageRaster::new(grid(), Method::Km, None, vec![0.0; 14]).is_err());
        let mut v = vec![0.0; 15];
        v[3] = f64::NAN;
        assert!(ImageRaster::new(grid(), Method::Km, None, v).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Km, Method::KmEps, Method::Music, Method::MusicEps] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("kirchhoff".parse::<Method>().is_err());
    }
}
