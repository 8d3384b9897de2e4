//! Single dispatch point from a method name to an imaging functional.
//!
//! The CLI and the HTTP service both go through [`form_image`], so the same
//! inputs give bit-identical rasters on either path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::DataMatrix;
use crate::geometry::ImagingGrid;
use crate::km::{km_image, modified_km_image};
use crate::raster::{ImageRaster, Method};
use crate::subspace::{music_eps_image, music_image, RankRule};

/// Method plus its method-specific parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImagingParams {
    pub method: Method,
    #[serde(default)]
    pub eps: Option<f64>,
    /// Fixed signal rank for the MUSIC methods; the singular-value threshold rule when absent.
    #[serde(default)]
    pub rank: Option<usize>,
}

impl ImagingParams {
    pub fn new(method: Method, eps: Option<f64>, rank: Option<usize>) -> Result<Self> {
        let params = Self { method, eps, rank };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.method.needs_eps() && self.eps.is_none() {
            return Err(Error::Parameter(format!("method {} requires eps", self.method)));
        }
        if !self.method.needs_eps() && self.eps.is_some() {
            return Err(Error::Parameter(format!("method {} takes no eps", self.method)));
        }
        if self.rank.is_some() && !matches!(self.method, Method::Music | Method::MusicEps) {
            return Err(Error::Parameter(format!("method {} takes no rank", self.method)));
        }
        Ok(())
    }

    pub fn rank_rule(&self) -> RankRule {
        self.rank.map(RankRule::Fixed).unwrap_or_default()
    }
}

pub fn form_image(data: &DataMatrix, grid: &ImagingGrid, params: &ImagingParams) -> Result<ImageRaster> {
    params.validate()?;
    match (params.method, params.eps) {
        (Method::Km, _) => km_image(data, grid),
        (Method::KmEps, Some(eps)) => modified_km_image(data, grid, eps),
        (Method::Music, _) => music_image(data, grid, params.rank_rule()),
        (Method::MusicEps, Some(eps)) => music_eps_image(data, grid, params.rank_rule(), eps),
        (m, None) => Err(Error::Parameter(format!("method {m} requires eps"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_applicability() {
        assert!(ImagingParams::new(Method::KmEps, None, None).is_err());
        assert!(ImagingParams::new(Method::Km, Some(0.1), None).is_err());
        assert!(ImagingParams::new(Method::Km, None, Some(1)).is_err());
        assert!(ImagingParams::new(Method::MusicEps, Some(0.1), Some(1)).is_ok());
        assert_eq!(ImagingParams::new(Method::Music, None, Some(2)).unwrap().rank_rule(), RankRule::Fixed(2));
    }
}
