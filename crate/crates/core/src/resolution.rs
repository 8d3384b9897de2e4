//! Point-spread-function width measurement and resolution sweeps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{add_noise, simulate_data, Acquisition};
use crate::geometry::{ImagingGrid, Scene, SystemSpec, Vec3};
use crate::km::ModifiedKm;
use crate::raster::{ImageRaster, Method};

/// Full width at half maximum of a sampled peak.
///
/// Each half-maximum crossing is located by linear interpolation between the
/// two samples that bracket it.
pub fn fwhm_1d(coords: &[f64], samples: &[f64]) -> Result<f64> {
    if coords.len() != samples.len() {
        return Err(Error::Shape(format!("{} coordinates vs {} samples", coords.len(), samples.len())));
    }
    if coords.len() < 3 {
        return Err(Error::Bracket("need at least 3 samples".into()));
    }
    if coords.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("coordinates must be strictly increasing".into()));
    }
    let (peak, &top) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if !(top > 0.0 && top.is_finite()) {
        return Err(Error::Degenerate("peak is not positive".into()));
    }
    if peak == 0 || peak == samples.len() - 1 {
        return Err(Error::Bracket(format!("peak at boundary sample {peak}")));
    }
    let half = 0.5 * top;
    let interp = |j: usize| {
        let (x0, x1, s0, s1) = (coords[j], coords[j + 1], samples[j], samples[j + 1]);
        x0 + (half - s0) / (s1 - s0) * (x1 - x0)
    };
    let left = (0..peak)
        .rev()
        .find(|&j| samples[j] < half)
        .map(interp)
        .ok_or_else(|| Error::Bracket("no half-maximum crossing left of the peak".into()))?;
    let right = (peak + 1..samples.len())
        .find(|&j| samples[j] < half)
        .map(|j| interp(j - 1))
        .ok_or_else(|| Error::Bracket("no half-maximum crossing right of the peak".into()))?;
    Ok(right - left)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Range,
    Crossrange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FwhmReport {
    pub axis: Axis,
    pub width_m: f64,
    pub width_lambda0: f64,
    pub peak: Vec3,
    pub method: Method,
    pub eps: Option<f64>,
}

/// Range and cross-range widths through the raster peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fwhm2d {
    pub range: FwhmReport,
    pub crossrange: FwhmReport,
}

/// Widths along the `y` (range) column and `x` (cross-range) row through the
/// peak pixel, without sub-pixel peak refinement.
pub fn fwhm_2d(raster: &ImageRaster, lambda0: f64) -> Result<Fwhm2d> {
    let peak = raster.peak.ok_or_else(|| Error::Degenerate("raster has no peak".into()))?;
    let g = &raster.grid;
    if peak.ix == 0 || peak.iy == 0 || peak.ix == g.nx - 1 || peak.iy == g.ny - 1 {
        return Err(Error::Bracket(format!("peak pixel ({}, {}) lies on the grid boundary", peak.ix, peak.iy)));
    }
    let ys: Vec<f64> = (0..g.ny).map(|i| g.y(i)).collect();
    let xs: Vec<f64> = (0..g.nx).map(|i| g.x(i)).collect();
    let range = fwhm_1d(&ys, &raster.column(peak.ix))?;
    let cross = fwhm_1d(&xs, raster.row(peak.iy))?;
    let report = |axis, width: f64| FwhmReport {
        axis,
        width_m: width,
        width_lambda0: width / lambda0,
        peak: peak.position,
        method: raster.method,
        eps: raster.eps,
    };
    Ok(Fwhm2d { range: report(Axis::Range, range), crossrange: report(Axis::Crossrange, cross) })
}

/// Peak displacement and FWHM ratios `b / a` between two rasters on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RasterComparison {
    pub peak_offset_m: f64,
    pub range_fwhm_ratio: Option<f64>,
    pub crossrange_fwhm_ratio: Option<f64>,
}

pub fn compare_rasters(a: &ImageRaster, b: &ImageRaster, lambda0: f64) -> Result<RasterComparison> {
    if a.grid != b.grid {
        return Err(Error::Shape("rasters are defined on different grids".into()));
    }
    let (pa, pb) = match (a.peak, b.peak) {
        (Some(pa), Some(pb)) => (pa, pb),
        _ => return Err(Error::Degenerate("cannot compare a raster without a peak".into())),
    };
    let (fa, fb) = (fwhm_2d(a, lambda0).ok(), fwhm_2d(b, lambda0).ok());
    let ratio = |sel: fn(&Fwhm2d) -> f64| match (&fa, &fb) {
        (Some(x), Some(y)) => Some(sel(y) / sel(x)),
        _ => None,
    };
    Ok(RasterComparison {
        peak_offset_m: (pb.position - pa.position).norm(),
        range_fwhm_ratio: ratio(|f| f.range.width_m),
        crossrange_fwhm_ratio: ratio(|f| f.crossrange.width_m),
    })
}

/// Ordinary least-squares line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::Shape("fit needs equally many x and y values".into()));
    }
    let mut distinct = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::Parameter(format!("fit needs at least 4 distinct points (got {})", distinct.len())));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { if ss_res == 0.0 { 1.0 } else { 0.0 } } else { 1.0 - ss_res / ss_tot };
    Ok(LinearFit { slope, intercept, r2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Eps,
    Bandwidth,
    Aperture,
}

impl SweepKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "eps" | "epsilon" => Ok(SweepKind::Eps),
            "bandwidth" => Ok(SweepKind::Bandwidth),
            "aperture" => Ok(SweepKind::Aperture),
            other => Err(Error::Parameter(format!("unknown sweep kind '{other}' (eps, bandwidth, aperture)"))),
        }
    }

    /// Column name and unit of the swept parameter.
    pub fn parameter(&self) -> (&'static str, &'static str) {
        match self {
            SweepKind::Eps => ("eps", "1"),
            SweepKind::Bandwidth => ("bandwidth", "Hz"),
            SweepKind::Aperture => ("aperture", "m"),
        }
    }

    /// Column name and unit of the fit abscissa.
    pub fn abscissa(&self) -> (&'static str, &'static str) {
        match self {
            SweepKind::Eps => ("log10_eps", "1"),
            SweepKind::Bandwidth => ("c_over_b", "m"),
            SweepKind::Aperture => ("lambda0_l_over_a", "m"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub abscissa: f64,
    pub range_fwhm_m: f64,
    pub crossrange_fwhm_m: f64,
    pub lambda0: f64,
}

/// FWHM per swept value plus per-axis fits.
///
/// The epsilon sweep fits `log10 FWHM` against `log10 ε`; the bandwidth and
/// aperture sweeps fit FWHM in meters against `c/B` and `λ0 L/a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow>,
    pub range_fit: LinearFit,
    pub crossrange_fit: LinearFit,
}

/// Close-up window and pixel density used for sweep images.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    /// Window half width in units of the predicted FWHM.
    pub half_width: f64,
    /// Predicted FWHM over pixel pitch (at least 10).
    pub pixels_per_width: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self { half_width: 1.5, pixels_per_width: 20.0 }
    }
}

/// Noiseless modified-KM widths for one configuration, imaged on a grid whose
/// pitch is a fixed fraction of `√ε c/B` (range) and `√ε λ0 L/a` (cross-range).
pub fn measure_point(scene: &Scene, system: &SystemSpec, eps: f64, layout: SweepGrid) -> Result<Fwhm2d> {
    let target = scene
        .targets
        .first()
        .ok_or_else(|| Error::Parameter("sweeps need a scene with at least one target".into()))?
        .position;
    if layout.pixels_per_width < 10.0 || layout.half_width <= 0.5 {
        return Err(Error::Parameter("sweep grid must resolve the FWHM by >= 10 pixels and contain it".into()));
    }
    let acq = Acquisition::from_system(system)?;
    let scales = system.scales()?;
    let data = simulate_data(scene, &acq)?;
    let range = eps.sqrt() * scales.range_scale;
    let cross = eps.sqrt() * scales.crossrange_scale;
    let n = (2.0 * layout.half_width * layout.pixels_per_width).ceil() as usize | 1;
    let grid = ImagingGrid::new(target, layout.half_width * cross, layout.half_width * range, n, n)?;
    let raster = ModifiedKm::new(eps)?.image(&data, &grid)?;
    fwhm_2d(&raster, scales.lambda0)
}

fn check_sweep_values(values: &[f64]) -> Result<()> {
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if values.len() < 4 || !(increasing || decreasing) {
        return Err(Error::Parameter(format!(
            "sweep needs at least 4 strictly monotone values (got {values:?})"
        )));
    }
    Ok(())
}

fn assemble(kind: SweepKind, rows: Vec<SweepRow>) -> Result<SweepTable> {
    let (xs, rs, cs): (Vec<f64>, Vec<f64>, Vec<f64>) = match kind {
        SweepKind::Eps => (
            rows.iter().map(|r| r.abscissa).collect(),
            rows.iter().map(|r| r.range_fwhm_m.log10()).collect(),
            rows.iter().map(|r| r.crossrange_fwhm_m.log10()).collect(),
        ),
        _ => (
            rows.iter().map(|r| r.abscissa).collect(),
            rows.iter().map(|r| r.range_fwhm_m).collect(),
            rows.iter().map(|r| r.crossrange_fwhm_m).collect(),
        ),
    };
    Ok(SweepTable { kind, range_fit: fit_line(&xs, &rs)?, crossrange_fit: fit_line(&xs, &cs)?, rows })
}

fn bracket_context(value: f64, name: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Bracket(msg) => Error::Bracket(format!("{name} = {value}: {msg}")),
        other => other,
    }
}

/// FWHM versus ε with the system fixed.
pub fn sweep_epsilon(scene: &Scene, system: &SystemSpec, eps_list: &[f64], layout: SweepGrid) -> Result<SweepTable> {
    check_sweep_values(eps_list)?;
    let lo = eps_list.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eps_list.iter().copied().fold(0.0, f64::max);
    if hi / lo < 100.0 - 1e-9 {
        return Err(Error::Parameter("epsilon sweep must span at least two decades".into()));
    }
    let lambda0 = system.radar.lambda0();
    let rows = eps_list
        .iter()
        .map(|&eps| {
            let f = measure_point(scene, system, eps, layout).map_err(bracket_context(eps, "eps"))?;
            Ok(SweepRow {
                value: eps,
                abscissa: eps.log10(),
                range_fwhm_m: f.range.width_m,
                crossrange_fwhm_m: f.crossrange.width_m,
                lambda0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(SweepKind::Eps, rows)
}

/// FWHM versus bandwidth at fixed ε.
pub fn sweep_bandwidth(
    scene: &Scene,
    system: &SystemSpec,
    bandwidths: &[f64],
    eps: f64,
    layout: SweepGrid,
) -> Result<SweepTable> {
    check_sweep_values(bandwidths)?;
    let rows = bandwidths
        .iter()
        .map(|&b| {
            let sys = SystemSpec { radar: system.radar.with_bandwidth(b)?, ..*system };
            let f = measure_point(scene, &sys, eps, layout).map_err(bracket_context(b, "bandwidth"))?;
            Ok(SweepRow {
                value: b,
                abscissa: sys.radar.c / b,
                range_fwhm_m: f.range.width_m,
                crossrange_fwhm_m: f.crossrange.width_m,
                lambda0: sys.radar.lambda0(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(SweepKind::Bandwidth, rows)
}

/// FWHM versus synthetic aperture length at fixed ε.
pub fn sweep_aperture(
    scene: &Scene,
    system: &SystemSpec,
    apertures: &[f64],
    eps: f64,
    layout: SweepGrid,
) -> Result<SweepTable> {
    check_sweep_values(apertures)?;
    let rows = apertures
        .iter()
        .map(|&a| {
            let sys = SystemSpec { aperture: a, ..*system };
            let scales = sys.scales()?;
            let f = measure_point(scene, &sys, eps, layout).map_err(bracket_context(a, "aperture"))?;
            Ok(SweepRow {
                value: a,
                abscissa: scales.crossrange_scale,
                range_fwhm_m: f.range.width_m,
                crossrange_fwhm_m: f.crossrange.width_m,
                lambda0: scales.lambda0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(SweepKind::Aperture, rows)
}

/// Close-up window used by the peak-offset study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloseupSpec {
    /// Half width in units of λ0.
    pub half_width_lambda0: f64,
    pub pixels: usize,
}

impl Default for CloseupSpec {
    /// 5λ0 x 5λ0 at λ0/20 pitch.
    fn default() -> Self {
        Self { half_width_lambda0: 2.5, pixels: 101 }
    }
}

impl CloseupSpec {
    pub fn grid(&self, center: Vec3, lambda0: f64) -> Result<ImagingGrid> {
        ImagingGrid::square(center, self.half_width_lambda0 * lambda0, self.pixels)
    }
}

/// Peak displacement from one true target, in units of λ0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetOffset {
    pub trial: usize,
    pub target: usize,
    pub seed: u64,
    pub crossrange: f64,
    pub range: f64,
}

impl TargetOffset {
    pub fn total(&self) -> f64 {
        self.crossrange.hypot(self.range)
    }
}

/// Medians and 90th percentiles of absolute offsets, in λ0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetSummary {
    pub median_total: f64,
    pub p90_total: f64,
    pub median_crossrange: f64,
    pub median_range: f64,
    pub p90_crossrange: f64,
    pub p90_range: f64,
    pub max_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetStudy {
    pub snr_db: f64,
    pub eps: f64,
    pub pixel_pitch_lambda0: f64,
    pub offsets: Vec<TargetOffset>,
    pub summary: OffsetSummary,
}

/// Linear-interpolated percentile (`q` in `[0, 1]`) of unsorted samples.
pub fn percentile(samples: &[f64], q: f64) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

fn summarize(offsets: &[TargetOffset]) -> OffsetSummary {
    let total: Vec<f64> = offsets.iter().map(TargetOffset::total).collect();
    let cross: Vec<f64> = offsets.iter().map(|o| o.crossrange.abs()).collect();
    let range: Vec<f64> = offsets.iter().map(|o| o.range.abs()).collect();
    OffsetSummary {
        median_total: percentile(&total, 0.5),
        p90_total: percentile(&total, 0.9),
        median_crossrange: percentile(&cross, 0.5),
        median_range: percentile(&range, 0.5),
        p90_crossrange: percentile(&cross, 0.9),
        p90_range: percentile(&range, 0.9),
        max_total: total.iter().copied().fold(0.0, f64::max),
    }
}

/// Modified-KM close-ups about every true target over `n_trials` noise draws.
///
/// Trial `t` uses noise seed `seed + t`. `snr_db = +inf` runs noiseless.
pub fn peak_offset_study(
    scene: &Scene,
    system: &SystemSpec,
    snr_db: f64,
    eps: f64,
    n_trials: usize,
    seed: u64,
    closeup: CloseupSpec,
) -> Result<OffsetStudy> {
    if n_trials < 10 {
        return Err(Error::Parameter(format!("offset study needs at least 10 trials (got {n_trials})")));
    }
    if scene.targets.is_empty() {
        return Err(Error::Parameter("offset study needs at least one target".into()));
    }
    let acq = Acquisition::from_system(system)?;
    let lambda0 = acq.lambda0();
    let clean = simulate_data(scene, &acq)?;
    let functional = ModifiedKm::new(eps)?;
    let mut offsets = Vec::with_capacity(n_trials * scene.targets.len());
    for trial in 0..n_trials {
        let trial_seed = seed.wrapping_add(trial as u64);
        let data = add_noise(&clean, snr_db, trial_seed)?;
        for (k, t) in scene.targets.iter().enumerate() {
            let grid = closeup.grid(t.position, lambda0)?;
            let raster = functional.image(&data, &grid)?;
            let peak = raster.peak.ok_or_else(|| Error::Degenerate("close-up has no peak".into()))?;
            offsets.push(TargetOffset {
                trial,
                target: k,
                seed: trial_seed,
                crossrange: (peak.position.x - t.position.x) / lambda0,
                range: (peak.position.y - t.position.y) / lambda0,
            });
        }
    }
    let pitch = 2.0 * closeup.half_width_lambda0 / (closeup.pixels - 1) as f64;
    Ok(OffsetStudy { snr_db, eps, pixel_pitch_lambda0: pitch, summary: summarize(&offsets), offsets })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> (Vec<f64>, Vec<f64>) {
        let n = ((hi - lo) / step).round() as usize + 1;
        let xs: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
        let ys = xs.iter().map(|&x| f(x)).collect();
        (xs, ys)
    }

    #[test]
    fn fwhm_of_inverted_parabola() {
        let (xs, ys) = sample(|x| 1.0 - x * x, -1.0, 1.0, 1e-3);
        let w = fwhm_1d(&xs, &ys).unwrap();
        assert!((w - 2f64.sqrt()).abs() < 2e-3, "{w}");
    }

    #[test]
    fn fwhm_of_gaussian() {
        let (xs, ys) = sample(|x| (-x * x / 2.0).exp(), -5.0, 5.0, 1e-3);
        let w = fwhm_1d(&xs, &ys).unwrap();
        assert!((w - 2.0 * (2.0 * 2f64.ln()).sqrt()).abs() < 1e-5, "{w}");
    }

    #[test]
    fn fwhm_of_rational_transform() {
        let eps: f64 = 1e-4;
        let (xs, ys) = sample(|x| eps / (1.0 - (1.0 - eps) * (1.0 - x * x)), -0.05, 0.05, 1e-6);
        let w = fwhm_1d(&xs, &ys).unwrap();
        let expected = 2.0 * eps.sqrt() / (1.0 - eps).sqrt();
        assert!((expected - 0.020001).abs() < 1e-6);
        assert!((w - expected).abs() < 1e-8, "{w} vs {expected}");
    }

    #[test]
    fn fwhm_brackets() {
        let (xs, ys) = sample(|x| 1.0 - 0.1 * x * x, -1.0, 1.0, 0.1);
        assert!(matches!(fwhm_1d(&xs, &ys), Err(Error::Bracket(_))));
        let (xs, ys) = sample(|x| x + 2.0, -1.0, 1.0, 0.1);
        assert!(matches!(fwhm_1d(&xs, &ys), Err(Error::Bracket(_))));
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x - 1.0).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-14);
        assert!((fit.intercept + 1.0).abs() < 1e-14);
        assert!((fit.r2 - 1.0).abs() < 1e-14);
        assert!(fit_line(&[1.0; 5], &[2.0; 5]).is_err());
    }

    #[test]
    fn sweep_value_checks() {
        assert!(check_sweep_values(&[1e-4; 5]).is_err());
        assert!(check_sweep_values(&[1.0, 2.0, 3.0]).is_err());
        assert!(check_sweep_values(&[1.0, 3.0, 2.0, 4.0]).is_err());
        assert!(check_sweep_values(&[4.0, 3.0, 2.0, 1.0]).is_ok());
        let sys = SystemSpec::gotcha();
        let r = sweep_epsilon(&Scene::single_target(), &sys, &[1e-4, 2e-4, 3e-4, 4e-4], SweepGrid::default());
        assert!(matches!(r, Err(Error::Parameter(_))));
    }

    #[test]
    fn percentiles() {
        let v = [3.0, 1.0, 2.0, 4.0];
        assert_eq!(percentile(&v, 0.5), 2.5);
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 1.0), 4.0);
        assert!((percentile(&v, 0.9) - 3.7).abs() < 1e-12);
    }

    #[test]
    fn sweep_kind_parsing() {
        assert_eq!(SweepKind::parse("eps").unwrap(), SweepKind::Eps);
        assert_eq!(SweepKind::parse("aperture").unwrap(), SweepKind::Aperture);
        assert!(SweepKind::parse("frequency").is_err());
    }
}
