//! Command-line front end: `simulate`, `image`, `closeup`, `sweep`, `offsets`, `serve`.
//!
//! Settings resolve in three layers: built-in defaults, then the `--manifest`
//! file, then individual flags. Relative output directories are placed under
//! `$SARLAB_OUTPUT_ROOT` (current directory when unset).
//!
//! Exit codes: 0 success, 2 usage, 3 data error, 4 numeric degeneracy.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forward::{add_noise, simulate_data, Acquisition, DataMatrix};
use crate::geometry::{ImagingGrid, Vec3};
use crate::imaging::{form_image, ImagingParams};
use crate::io::{
    read_data_matrix, render_png, render_sweep_svg, write_data_matrix, write_raster, write_sweep_table, RasterScale,
    RasterSidecar, RunManifest, SceneDocument,
};
use crate::raster::{ImageRaster, Method};
use crate::resolution::{
    fwhm_2d, peak_offset_study, sweep_aperture, sweep_bandwidth, sweep_epsilon, CloseupSpec, SweepGrid, SweepKind,
    SweepTable,
};
use crate::service::{serve, ServiceConfig};

pub const OUTPUT_ROOT_ENV: &str = "SARLAB_OUTPUT_ROOT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) => EXIT_USAGE,
        Error::Degenerate(_) | Error::Bracket(_) | Error::Rank(_) => EXIT_DEGENERATE,
        _ => EXIT_DATA,
    }
}

#[derive(Debug, Parser)]
#[command(name = "sarlab", version, about = "Point-target SAR imaging lab")]
pub struct Cli {
    /// Root for relative output directories.
    #[arg(long, env = OUTPUT_ROOT_ENV, global = true)]
    pub output_root: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a data matrix for a scene and write it as CSV.
    Simulate(SimulateArgs),
    /// Image a data file over the scene region.
    Image(ImageArgs),
    /// Re-image a small window about a point at fine pitch.
    Closeup(CloseupArgs),
    /// Resolution sweep over eps, bandwidth or aperture.
    Sweep(SweepArgs),
    /// Peak-offset statistics of close-ups over seeded noise draws.
    Offsets(OffsetsArgs),
    /// Run the HTTP imaging service.
    Serve(ServeArgs),
}

/// Flags mirroring [`RunManifest`].
#[derive(Debug, Clone, Default, Args)]
pub struct ManifestArgs {
    /// JSON run manifest; its values override the defaults.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// JSON scene document (system, targets, region).
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// km, km-eps, music or music-eps.
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Signal rank for the MUSIC methods.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Target SNR in dB.
    #[arg(long, conflicts_with = "noiseless")]
    pub snr_db: Option<f64>,
    /// Drop any SNR from the manifest.
    #[arg(long)]
    pub noiseless: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid center `x,y[,z]` in meters.
    #[arg(long, value_parser = parse_point)]
    pub center: Option<Vec3>,
    #[arg(long)]
    pub half_width_x: Option<f64>,
    #[arg(long)]
    pub half_width_y: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// dB floor of rendered images.
    #[arg(long, allow_hyphen_values = true)]
    pub floor_db: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: ManifestArgs,
    /// Output file name inside the output directory.
    #[arg(long, default_value = "data.csv")]
    pub out: String,
}

#[derive(Debug, Clone, Args)]
pub struct ImageArgs {
    #[command(flatten)]
    pub run: ManifestArgs,
    /// Data matrix file written by `simulate`.
    #[arg(long)]
    pub data: PathBuf,
    /// Stem of the output files (defaults to the method name).
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CloseupArgs {
    #[command(flatten)]
    pub run: ManifestArgs,
    #[arg(long)]
    pub data: PathBuf,
    /// Window center `x,y[,z]` in meters.
    #[arg(long = "at", value_parser = parse_point)]
    pub at: Vec3,
    /// Window half width in units of λ0.
    #[arg(long, default_value_t = 2.5)]
    pub half_width_lambda0: f64,
    #[arg(long, default_value_t = 101)]
    pub pixels: usize,
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// eps, bandwidth or aperture.
    #[arg(value_parser = SweepKind::parse)]
    pub kind: SweepKind,
    #[command(flatten)]
    pub run: ManifestArgs,
    /// Comma-separated swept values in SI units (defaults per kind).
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
    /// Close-up half width in predicted FWHMs.
    #[arg(long, default_value_t = 1.5)]
    pub window: f64,
    /// Predicted FWHM over pixel pitch.
    #[arg(long, default_value_t = 20.0)]
    pub pixels_per_width: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OffsetsArgs {
    #[command(flatten)]
    pub run: ManifestArgs,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 2.5)]
    pub half_width_lambda0: f64,
    #[arg(long, default_value_t = 101)]
    pub pixels: usize,
    /// Use the built-in three-target scene instead of the single target.
    #[arg(long)]
    pub three_targets: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    #[arg(long, default_value_t = 256 * 256)]
    pub pixel_budget: usize,
    /// Largest region half width, meters.
    #[arg(long, default_value_t = 500.0)]
    pub max_half_width: f64,
    /// Entries kept per kind before eviction.
    #[arg(long, default_value_t = 64)]
    pub capacity: usize,
}

fn parse_point(s: &str) -> std::result::Result<Vec3, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("'{p}' is not a number")))
        .collect::<std::result::Result<_, _>>()?;
    match parts.as_slice() {
        [x, y] => Ok(Vec3::new(*x, *y, 0.0)),
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(format!("expected x,y or x,y,z (got '{s}')")),
    }
}

impl ManifestArgs {
    /// Defaults, then the manifest file, then flags. `default_eps` fills in ε
    /// when the resolved method needs one and neither layer gave it.
    pub fn resolve(&self, default_method: Method, default_eps: Option<f64>, output_root: Option<&Path>) -> Result<RunManifest> {
        let mut m = match &self.manifest {
            Some(p) => {
                let text = fs::read_to_string(p)?;
                serde_json::from_str::<RunManifest>(&text)?
            }
            None => RunManifest::new(default_method, "out"),
        };
        if let Some(p) = &self.scene {
            m.scene_file = Some(p.clone());
        }
        if let Some(method) = self.method {
            m.method = method;
        }
        if self.eps.is_some() {
            m.eps = self.eps;
        }
        if self.rank.is_some() {
            m.rank = self.rank;
        }
        if self.noiseless {
            m.snr_db = None;
        } else if self.snr_db.is_some() {
            m.snr_db = self.snr_db;
        }
        if let Some(seed) = self.seed {
            m.seed = seed;
        }
        if let Some(floor) = self.floor_db {
            m.floor_db = floor;
        }
        if let Some(dir) = &self.output_dir {
            m.output_dir = dir.clone();
        }
        if let Some(root) = output_root {
            if m.output_dir.is_relative() {
                m.output_dir = root.join(&m.output_dir);
            }
        }
        let grid_flags = self.center.is_some()
            || self.half_width_x.is_some()
            || self.half_width_y.is_some()
            || self.nx.is_some()
            || self.ny.is_some();
        if grid_flags {
            let base = match m.grid {
                Some(g) => g,
                None => m.scene_document()?.region,
            };
            m.grid = Some(ImagingGrid {
                center: self.center.unwrap_or(base.center),
                half_width_x: self.half_width_x.unwrap_or(base.half_width_x),
                half_width_y: self.half_width_y.unwrap_or(base.half_width_y),
                nx: self.nx.unwrap_or(base.nx),
                ny: self.ny.unwrap_or(base.ny),
            });
        }
        if m.method.needs_eps() && m.eps.is_none() {
            m.eps = default_eps;
        }
        m.validate()?;
        Ok(m)
    }
}

fn imaging_params(m: &RunManifest) -> Result<ImagingParams> {
    let eps = if m.method.needs_eps() { m.eps } else { None };
    ImagingParams::new(m.method, eps, m.rank)
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text)
}

/// Files written by [`cmd_simulate`].
#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub data_path: PathBuf,
    pub data: DataMatrix,
}

/// Simulates the manifest's scene; byte-identical output for a given seed.
pub fn cmd_simulate(m: &RunManifest, file_name: &str) -> Result<SimulateOutput> {
    m.validate()?;
    let doc = m.scene_document()?;
    let acq = Acquisition::from_system(&doc.system)?;
    let clean = simulate_data(&doc.scene(), &acq)?;
    let data = match m.snr_db {
        Some(snr) => add_noise(&clean, snr, m.seed)?,
        None => clean,
    };
    let data_path = m.output_dir.join(file_name);
    write_file(&data_path, write_data_matrix(&data))?;
    Ok(SimulateOutput { data_path, data })
}

/// Paths and measurements written by [`cmd_image`] and [`cmd_closeup`].
#[derive(Debug, Clone)]
pub struct ImageOutput {
    pub linear_csv: PathBuf,
    pub db_csv: PathBuf,
    pub png: PathBuf,
    pub sidecar_path: PathBuf,
    pub raster: ImageRaster,
    pub sidecar: RasterSidecar,
}

fn export_raster(m: &RunManifest, raster: ImageRaster, data: &DataMatrix, stem: &str) -> Result<ImageOutput> {
    let dir = &m.output_dir;
    let linear_csv = dir.join(format!("{stem}.linear.csv"));
    let db_csv = dir.join(format!("{stem}.db.csv"));
    let png = dir.join(format!("{stem}.png"));
    let sidecar_path = dir.join(format!("{stem}.json"));
    write_file(&linear_csv, write_raster(&raster, RasterScale::Linear)?)?;
    write_file(&db_csv, write_raster(&raster, RasterScale::Db)?)?;
    fs::create_dir_all(dir)?;
    render_png(&raster, m.floor_db, &png)?;
    let lambda0 = data.acquisition.lambda0();
    let (fwhm, fwhm_error) = match fwhm_2d(&raster, lambda0) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let sidecar = RasterSidecar {
        method: raster.method,
        eps: raster.eps,
        grid: raster.grid,
        pixel_pitch_m: [raster.grid.pitch_x(), raster.grid.pitch_y()],
        peak: raster.peak,
        fwhm,
        fwhm_error,
        snr_db: data.noise.map(|n| n.snr_db_achieved),
        seed: data.noise.map(|n| n.seed),
        lambda0_m: lambda0,
    };
    write_json(&sidecar_path, &sidecar)?;
    Ok(ImageOutput { linear_csv, db_csv, png, sidecar_path, raster, sidecar })
}

/// Images `data` over the manifest grid (or the scene region).
pub fn cmd_image(m: &RunManifest, data: &DataMatrix, stem: Option<&str>) -> Result<ImageOutput> {
    let params = imaging_params(m)?;
    let grid = match m.grid {
        Some(g) => g,
        None => m.scene_document()?.region,
    };
    let raster = form_image(data, &grid, &params)?;
    export_raster(m, raster, data, stem.unwrap_or(m.method.as_str()))
}

/// Close-up result: exported files plus offset of the peak from the nearest true target.
#[derive(Debug, Clone)]
pub struct CloseupOutput {
    pub image: ImageOutput,
    /// `(cross-range, range)` offset in λ0 from the nearest target inside the window.
    pub offset_lambda0: Option<(f64, f64)>,
}

/// Re-images a `2 h λ0` square about `center`, normalized by its own maximum.
pub fn cmd_closeup(
    m: &RunManifest,
    data: &DataMatrix,
    center: Vec3,
    spec: CloseupSpec,
    stem: Option<&str>,
) -> Result<CloseupOutput> {
    let params = imaging_params(m)?;
    let doc = m.scene_document()?;
    let region = m.grid.unwrap_or(doc.region);
    if !region.contains(&center) {
        return Err(Error::Parameter(format!(
            "close-up center ({}, {}) lies outside the imaging region",
            center.x, center.y
        )));
    }
    let lambda0 = data.acquisition.lambda0();
    let grid = spec.grid(center, lambda0)?;
    let raw = form_image(data, &grid, &params)?;
    let raster = ImageRaster::new(grid, raw.method, raw.eps, raw.normalized()?)?;
    let peak = raster.peak.expect("normalized raster has a peak");
    let offset_lambda0 = doc
        .targets
        .iter()
        .filter(|t| grid.contains(&t.position))
        .map(|t| ((peak.position.x - t.position.x) / lambda0, (peak.position.y - t.position.y) / lambda0))
        .min_by(|a, b| a.0.hypot(a.1).total_cmp(&b.0.hypot(b.1)));
    let default_stem = format!("closeup-{}", m.method);
    let image = export_raster(m, raster, data, stem.unwrap_or(&default_stem))?;
    Ok(CloseupOutput { image, offset_lambda0 })
}

/// Default swept values for each kind, in SI units.
pub fn default_sweep_values(kind: SweepKind, doc: &SceneDocument) -> Vec<f64> {
    let factors = [1.0, 0.75, 0.5, 0.375, 0.25];
    match kind {
        SweepKind::Eps => vec![1e-6, 1e-5, 1e-4, 1e-3, 1e-2],
        SweepKind::Bandwidth => factors.iter().map(|f| f * doc.system.radar.bandwidth).collect(),
        SweepKind::Aperture => factors.iter().map(|f| f * doc.system.aperture).collect(),
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub csv: PathBuf,
    pub svg: PathBuf,
    pub table: SweepTable,
}

/// Runs a sweep on the manifest's scene. Non-eps sweeps use the manifest ε (default 1e-4).
pub fn cmd_sweep(m: &RunManifest, kind: SweepKind, values: Option<&[f64]>, layout: SweepGrid) -> Result<SweepOutput> {
    let doc = m.scene_document()?;
    let scene = doc.scene();
    let defaults = default_sweep_values(kind, &doc);
    let values = values.unwrap_or(&defaults);
    let eps = m.eps.unwrap_or(1e-4);
    let table = match kind {
        SweepKind::Eps => sweep_epsilon(&scene, &doc.system, values, layout)?,
        SweepKind::Bandwidth => sweep_bandwidth(&scene, &doc.system, values, eps, layout)?,
        SweepKind::Aperture => sweep_aperture(&scene, &doc.system, values, eps, layout)?,
    };
    let name = kind.parameter().0;
    let csv = m.output_dir.join(format!("sweep-{name}.csv"));
    let svg = m.output_dir.join(format!("sweep-{name}.svg"));
    write_file(&csv, write_sweep_table(&table))?;
    write_file(&svg, render_sweep_svg(&table))?;
    Ok(SweepOutput { csv, svg, table })
}

fn run_inner(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let root = cli.output_root.as_deref();
    match cli.command {
        Command::Simulate(a) => {
            let m = a.run.resolve(Method::Km, None, root)?;
            let r = cmd_simulate(&m, &a.out)?;
            writeln!(out, "wrote {} ({}x{})", r.data_path.display(), r.data.n_frequencies(), r.data.n_positions())?;
            match r.data.noise {
                Some(n) => writeln!(out, "achieved SNR {:.10} dB (seed {})", n.snr_db_achieved, n.seed)?,
                None => writeln!(out, "noiseless")?,
            }
        }
        Command::Image(a) => {
            let m = a.run.resolve(Method::Km, None, root)?;
            let data = read_data_matrix(&a.data)?;
            let r = cmd_image(&m, &data, a.name.as_deref())?;
            report_image(out, &r)?;
        }
        Command::Closeup(a) => {
            let m = a.run.resolve(Method::KmEps, None, root)?;
            let data = read_data_matrix(&a.data)?;
            let spec = CloseupSpec { half_width_lambda0: a.half_width_lambda0, pixels: a.pixels };
            let r = cmd_closeup(&m, &data, a.at, spec, a.name.as_deref())?;
            report_image(out, &r.image)?;
            if let Some((dx, dy)) = r.offset_lambda0 {
                writeln!(out, "offset from target: cross-range {dx:.4} λ0, range {dy:.4} λ0, total {:.4} λ0", dx.hypot(dy))?;
            }
        }
        Command::Sweep(a) => {
            let m = a.run.resolve(Method::KmEps, Some(1e-4), root)?;
            let layout = SweepGrid { half_width: a.window, pixels_per_width: a.pixels_per_width };
            let r = cmd_sweep(&m, a.kind, a.values.as_deref(), layout)?;
            let t = &r.table;
            for row in &t.rows {
                writeln!(
                    out,
                    "{} = {:e}: range {:.6} m ({:.4} λ0), cross-range {:.6} m ({:.4} λ0)",
                    t.kind.parameter().0,
                    row.value,
                    row.range_fwhm_m,
                    row.range_fwhm_m / row.lambda0,
                    row.crossrange_fwhm_m,
                    row.crossrange_fwhm_m / row.lambda0
                )?;
            }
            writeln!(out, "range fit: slope {:.6} intercept {:.6} r2 {:.6}", t.range_fit.slope, t.range_fit.intercept, t.range_fit.r2)?;
            writeln!(
                out,
                "cross-range fit: slope {:.6} intercept {:.6} r2 {:.6}",
                t.crossrange_fit.slope, t.crossrange_fit.intercept, t.crossrange_fit.r2
            )?;
            writeln!(out, "wrote {} and {}", r.csv.display(), r.svg.display())?;
        }
        Command::Offsets(a) => {
            let m = a.run.resolve(Method::KmEps, Some(1e-4), root)?;
            let mut doc = m.scene_document()?;
            if a.three_targets {
                doc.targets = SceneDocument::three_targets().targets;
            }
            let snr = m.snr_db.unwrap_or(f64::INFINITY);
            let eps = m.eps.unwrap_or(1e-4);
            let spec = CloseupSpec { half_width_lambda0: a.half_width_lambda0, pixels: a.pixels };
            let study = peak_offset_study(&doc.scene(), &doc.system, snr, eps, a.trials, m.seed, spec)?;
            let mut csv = String::from("trial,target,seed,crossrange (lambda0),range (lambda0),total (lambda0)\n");
            for o in &study.offsets {
                csv.push_str(&format!("{},{},{},{},{},{}\n", o.trial, o.target, o.seed, o.crossrange, o.range, o.total()));
            }
            let csv_path = m.output_dir.join("offsets.csv");
            let json_path = m.output_dir.join("offsets.json");
            write_file(&csv_path, csv)?;
            write_json(&json_path, &study)?;
            let s = &study.summary;
            writeln!(out, "SNR {snr} dB, eps {eps}, {} trials, pitch {} λ0", a.trials, study.pixel_pitch_lambda0)?;
            writeln!(out, "median offset {:.4} λ0 (cross-range {:.4}, range {:.4})", s.median_total, s.median_crossrange, s.median_range)?;
            writeln!(out, "90th percentile {:.4} λ0, max {:.4} λ0", s.p90_total, s.max_total)?;
            writeln!(out, "wrote {} and {}", csv_path.display(), json_path.display())?;
        }
        Command::Serve(a) => {
            let config = ServiceConfig {
                pixel_budget: a.pixel_budget,
                max_half_width_m: a.max_half_width,
                capacity: a.capacity,
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(serve(a.bind, config))?;
        }
    }
    Ok(())
}

fn report_image(out: &mut dyn Write, r: &ImageOutput) -> Result<()> {
    match r.raster.peak {
        Some(p) => writeln!(out, "peak {:.6e} at ({:.4}, {:.4}) m, pixel ({}, {})", p.value, p.position.x, p.position.y, p.ix, p.iy)?,
        None => writeln!(out, "raster is identically zero")?,
    }
    match (&r.sidecar.fwhm, &r.sidecar.fwhm_error) {
        (Some(f), _) => writeln!(
            out,
            "FWHM range {:.6} m ({:.4} λ0), cross-range {:.6} m ({:.4} λ0)",
            f.range.width_m, f.range.width_lambda0, f.crossrange.width_m, f.crossrange.width_lambda0
        )?,
        (None, Some(e)) => writeln!(out, "FWHM unavailable: {e}")?,
        (None, None) => {}
    }
    writeln!(out, "wrote {}, {}, {}, {}", r.linear_csv.display(), r.db_csv.display(), r.png.display(), r.sidecar_path.display())?;
    Ok(())
}

/// Parses `args` (including the program name), runs and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match run_inner(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("1.2, 1.1").unwrap(), Vec3::new(1.2, 1.1, 0.0));
        assert_eq!(parse_point("1,2,3").unwrap(), Vec3::new(1.0, 2.0, 3.0));
        assert!(parse_point("1").is_err());
        assert!(parse_point("a,b").is_err());
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::Parameter("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::Parse { line: 3, message: "x".into() }), EXIT_DATA);
        assert_eq!(exit_code(&Error::Degenerate("x".into())), EXIT_DEGENERATE);
    }

    #[test]
    fn flags_override_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut base = RunManifest::new(Method::KmEps, "runs");
        base.eps = Some(1e-3);
        base.seed = 5;
        let path = dir.path().join("m.json");
        fs::write(&path, base.to_json().unwrap()).unwrap();
        let args = ManifestArgs { manifest: Some(path), eps: Some(1e-4), nx: Some(33), ..Default::default() };
        let m = args.resolve(Method::Km, None, Some(dir.path())).unwrap();
        assert_eq!(m.method, Method::KmEps);
        assert_eq!(m.eps, Some(1e-4));
        assert_eq!(m.seed, 5);
        assert_eq!(m.output_dir, dir.path().join("runs"));
        let g = m.grid.unwrap();
        assert_eq!((g.nx, g.ny), (33, 97));
    }

    #[test]
    fn unknown_sweep_kind_is_usage_error() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["sarlab", "sweep", "frequency"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run(["sarlab", "frobnicate"], &mut o, &mut e), EXIT_USAGE);
    }
}
