//! File formats: scene documents, data matrices, rasters, sweep tables,
//! run manifests and rendered images.
//!
//! All quantities are SI base units and every float is written with Rust's
//! shortest round-trip formatting, so `parse(write(x)) == x` bit for bit.
//!
//! Data matrix (`.csv`):
//!
//! ```text
//! sarlab-data v1 rows=61 cols=124 f0_hz=9600000000 bandwidth_hz=622000000 c_m_per_s=300000000 aperture_m=130 range_offset_m=7100 height_m=7300 seed=3 snr_db_requested=15.3989 snr_db_achieved=15.3989
//! m,n,re,im
//! 0,0,<re>,<im>
//! ...
//! ```
//!
//! `seed`, `snr_db_requested` and `snr_db_achieved` are omitted for noiseless
//! data. Rows run over `n` then `m` (column-major order of the matrix).
//!
//! Raster (`.csv`):
//!
//! ```text
//! sarlab-raster v1 method=km-eps eps=0.0001 scale=linear nx=97 ny=97 center_x_m=0 center_y_m=0 center_z_m=0 half_width_x_m=2.4 half_width_y_m=2.4
//! ix,iy,x_m,y_m,value
//! ```
//!
//! Pixels are listed row-major (`iy` outer). `scale=db` files hold
//! `10 log10(value / peak)` and are a view only.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{Acquisition, DataMatrix, NoiseMeta};
use crate::geometry::{FlightPath, ImagingGrid, PointTarget, RadarConfig, Scene, SystemSpec, Vec3};
use crate::raster::{ImageRaster, Method};
use crate::resolution::{Fwhm2d, SweepKind, SweepTable};

const DATA_MAGIC: &str = "sarlab-data v1";
const RASTER_MAGIC: &str = "sarlab-raster v1";
const SWEEP_MAGIC: &str = "sarlab-sweep v1";

/// Scene document: system, targets and the default imaging region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneDocument {
    #[serde(default = "SystemSpec::gotcha")]
    pub system: SystemSpec,
    pub targets: Vec<PointTarget>,
    #[serde(default = "default_region")]
    pub region: ImagingGrid,
}

fn default_region() -> ImagingGrid {
    ImagingGrid { center: Vec3::zeros(), half_width_x: 2.4, half_width_y: 2.4, nx: 97, ny: 97 }
}

impl Default for SceneDocument {
    /// GOTCHA-like system, one target at (1 m, 1 m, 0), 4.8 m x 4.8 m region at 5 cm pitch.
    fn default() -> Self {
        Self {
            system: SystemSpec::gotcha(),
            targets: Scene::single_target().targets,
            region: default_region(),
        }
    }
}

impl SceneDocument {
    pub fn three_targets() -> Self {
        Self { targets: Scene::three_targets().targets, ..Self::default() }
    }

    pub fn scene(&self) -> Scene {
        Scene::new(self.targets.clone())
    }

    pub fn validate(&self) -> Result<()> {
        self.system.radar.validate()?;
        self.system.flight_path()?;
        self.scene().validate()?;
        self.region.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

fn header_fields(line: &str, magic: &str, lineno: usize) -> Result<BTreeMap<String, String>> {
    let rest = line
        .strip_prefix(magic)
        .ok_or_else(|| Error::parse(lineno, format!("expected header starting with '{magic}'")))?;
    rest.split_whitespace()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::parse(lineno, format!("malformed header field '{kv}'")))
        })
        .collect()
}

fn field<T: std::str::FromStr>(fields: &BTreeMap<String, String>, key: &str, lineno: usize) -> Result<T> {
    let raw = fields.get(key).ok_or_else(|| Error::parse(lineno, format!("missing header field '{key}'")))?;
    raw.parse().map_err(|_| Error::parse(lineno, format!("bad value '{raw}' for '{key}'")))
}

fn opt_field<T: std::str::FromStr>(fields: &BTreeMap<String, String>, key: &str, lineno: usize) -> Result<Option<T>> {
    match fields.get(key) {
        None => Ok(None),
        Some(_) => field(fields, key, lineno).map(Some),
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, lineno: usize, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::parse(lineno, format!("bad {what} '{s}'")))
}

pub fn write_data_matrix(data: &DataMatrix) -> String {
    let acq = &data.acquisition;
    let mut out = String::new();
    write!(
        out,
        "{DATA_MAGIC} rows={} cols={} f0_hz={} bandwidth_hz={} c_m_per_s={} aperture_m={} range_offset_m={} height_m={}",
        data.n_frequencies(),
        data.n_positions(),
        acq.radar.f0,
        acq.radar.bandwidth,
        acq.radar.c,
        acq.path.aperture,
        acq.path.range_offset,
        acq.path.height,
    )
    .unwrap();
    if let Some(meta) = &data.noise {
        write!(
            out,
            " seed={} snr_db_requested={} snr_db_achieved={}",
            meta.seed, meta.snr_db_requested, meta.snr_db_achieved
        )
        .unwrap();
    }
    out.push_str("\nm,n,re,im\n");
    for n in 0..data.n_positions() {
        for m in 0..data.n_frequencies() {
            let v = data.values[(m, n)];
            writeln!(out, "{m},{n},{},{}", v.re, v.im).unwrap();
        }
    }
    out
}

pub fn parse_data_matrix(text: &str) -> Result<DataMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty data file"))?;
    let f = header_fields(header, DATA_MAGIC, ln)?;
    let rows: usize = field(&f, "rows", ln)?;
    let cols: usize = field(&f, "cols", ln)?;
    if rows.is_multiple_of(2) || rows < 3 {
        return Err(Error::parse(ln, format!("rows must be 2M-1 with M >= 2 (got {rows})")));
    }
    let radar = RadarConfig::new(field(&f, "f0_hz", ln)?, field(&f, "bandwidth_hz", ln)?, rows.div_ceil(2), field(&f, "c_m_per_s", ln)?)
        .map_err(|e| Error::parse(ln, e.to_string()))?;
    let path = FlightPath::linear(field(&f, "aperture_m", ln)?, field(&f, "range_offset_m", ln)?, field(&f, "height_m", ln)?, cols)
        .map_err(|e| Error::parse(ln, e.to_string()))?;
    let seed: Option<u64> = opt_field(&f, "seed", ln)?;
    let noise = match seed {
        Some(seed) => Some(NoiseMeta {
            seed,
            snr_db_requested: field(&f, "snr_db_requested", ln)?,
            snr_db_achieved: field(&f, "snr_db_achieved", ln)?,
        }),
        None => None,
    };
    match lines.next() {
        Some((_, "m,n,re,im")) => {}
        Some((ln, other)) => return Err(Error::parse(ln, format!("expected column header 'm,n,re,im', got '{other}'"))),
        None => return Err(Error::parse(ln + 1, "missing column header")),
    }
    let mut values = DMatrix::<Complex64>::zeros(rows, cols);
    let mut seen = vec![false; rows * cols];
    let mut count = 0;
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::parse(ln, format!("expected 4 fields, got {}", parts.len())));
        }
        let m: usize = parse_num(parts[0], ln, "row index")?;
        let n: usize = parse_num(parts[1], ln, "column index")?;
        if m >= rows || n >= cols {
            return Err(Error::parse(ln, format!("index ({m}, {n}) outside {rows}x{cols}")));
        }
        if std::mem::replace(&mut seen[n * rows + m], true) {
            return Err(Error::parse(ln, format!("duplicate entry ({m}, {n})")));
        }
        values[(m, n)] = Complex64::new(parse_num(parts[2], ln, "real part")?, parse_num(parts[3], ln, "imaginary part")?);
        count += 1;
    }
    if count != rows * cols {
        return Err(Error::parse(text.lines().count(), format!("expected {} entries, found {count}", rows * cols)));
    }
    let acquisition = Acquisition::new(radar, path)?;
    DataMatrix::new(values, acquisition, noise)
}

pub fn read_data_matrix(path: &Path) -> Result<DataMatrix> {
    parse_data_matrix(&fs::read_to_string(path)?)
}

/// Value scale of a written raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterScale {
    Linear,
    Db,
}

pub fn write_raster(raster: &ImageRaster, scale: RasterScale) -> Result<String> {
    let g = &raster.grid;
    let values = match scale {
        RasterScale::Linear => raster.values.clone(),
        RasterScale::Db => raster.db()?,
    };
    let mut out = String::new();
    write!(out, "{RASTER_MAGIC} method={}", raster.method).unwrap();
    if let Some(eps) = raster.eps {
        write!(out, " eps={eps}").unwrap();
    }
    writeln!(
        out,
        " scale={} nx={} ny={} center_x_m={} center_y_m={} center_z_m={} half_width_x_m={} half_width_y_m={}",
        match scale {
            RasterScale::Linear => "linear",
            RasterScale::Db => "db",
        },
        g.nx,
        g.ny,
        g.center.x,
        g.center.y,
        g.center.z,
        g.half_width_x,
        g.half_width_y
    )
    .unwrap();
    out.push_str("ix,iy,x_m,y_m,value\n");
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            writeln!(out, "{ix},{iy},{},{},{}", g.x(ix), g.y(iy), values[iy * g.nx + ix]).unwrap();
        }
    }
    Ok(out)
}

/// Parses a linear-scale raster.
pub fn parse_raster(text: &str) -> Result<ImageRaster> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty raster file"))?;
    let f = header_fields(header, RASTER_MAGIC, ln)?;
    let scale: String = field(&f, "scale", ln)?;
    if scale != "linear" {
        return Err(Error::parse(ln, format!("only linear rasters can be read back (scale={scale})")));
    }
    let method: Method = field::<String>(&f, "method", ln)?.parse().map_err(|e: Error| Error::parse(ln, e.to_string()))?;
    let eps: Option<f64> = opt_field(&f, "eps", ln)?;
    let center = Vec3::new(field(&f, "center_x_m", ln)?, field(&f, "center_y_m", ln)?, field(&f, "center_z_m", ln)?);
    let grid = ImagingGrid::new(
        center,
        field(&f, "half_width_x_m", ln)?,
        field(&f, "half_width_y_m", ln)?,
        field(&f, "nx", ln)?,
        field(&f, "ny", ln)?,
    )
    .map_err(|e| Error::parse(ln, e.to_string()))?;
    match lines.next() {
        Some((_, "ix,iy,x_m,y_m,value")) => {}
        Some((ln, other)) => return Err(Error::parse(ln, format!("unexpected column header '{other}'"))),
        None => return Err(Error::parse(ln + 1, "missing column header")),
    }
    let mut values = vec![f64::NAN; grid.len()];
    let mut count = 0;
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::parse(ln, format!("expected 5 fields, got {}", parts.len())));
        }
        let ix: usize = parse_num(parts[0], ln, "ix")?;
        let iy: usize = parse_num(parts[1], ln, "iy")?;
        if ix >= grid.nx || iy >= grid.ny {
            return Err(Error::parse(ln, format!("pixel ({ix}, {iy}) outside grid")));
        }
        values[iy * grid.nx + ix] = parse_num(parts[4], ln, "value")?;
        count += 1;
    }
    if count != grid.len() {
        return Err(Error::parse(text.lines().count(), format!("expected {} pixels, found {count}", grid.len())));
    }
    ImageRaster::new(grid, method, eps, values)
}

pub fn read_raster(path: &Path) -> Result<ImageRaster> {
    parse_raster(&fs::read_to_string(path)?)
}

/// Sidecar metadata written next to every raster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterSidecar {
    pub method: Method,
    pub eps: Option<f64>,
    pub grid: ImagingGrid,
    pub pixel_pitch_m: [f64; 2],
    pub peak: Option<crate::raster::Peak>,
    pub fwhm: Option<Fwhm2d>,
    pub fwhm_error: Option<String>,
    pub snr_db: Option<f64>,
    pub seed: Option<u64>,
    pub lambda0_m: f64,
}

/// `{param} ({unit})`-style header, one row per swept value, fits in the first line.
pub fn write_sweep_table(table: &SweepTable) -> String {
    let (pname, punit) = table.kind.parameter();
    let (aname, aunit) = table.kind.abscissa();
    let mut out = String::new();
    writeln!(
        out,
        "{SWEEP_MAGIC} kind={} fit={} range_slope={} range_intercept={} range_r2={} crossrange_slope={} crossrange_intercept={} crossrange_r2={}",
        pname,
        if table.kind == SweepKind::Eps { "log10-log10" } else { "linear" },
        table.range_fit.slope,
        table.range_fit.intercept,
        table.range_fit.r2,
        table.crossrange_fit.slope,
        table.crossrange_fit.intercept,
        table.crossrange_fit.r2,
    )
    .unwrap();
    writeln!(
        out,
        "{pname} ({punit}),{aname} ({aunit}),range_fwhm (m),crossrange_fwhm (m),range_fwhm (lambda0),crossrange_fwhm (lambda0)"
    )
    .unwrap();
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.value,
            r.abscissa,
            r.range_fwhm_m,
            r.crossrange_fwhm_m,
            r.range_fwhm_m / r.lambda0,
            r.crossrange_fwhm_m / r.lambda0
        )
        .unwrap();
    }
    out
}

/// SVG scatter of both FWHM series against the fit abscissa, with fit lines.
pub fn render_sweep_svg(table: &SweepTable) -> String {
    let (w, h, pad) = (640.0, 420.0, 60.0);
    let (aname, aunit) = table.kind.abscissa();
    let loglog = table.kind == SweepKind::Eps;
    let ys = |v: f64| if loglog { v.log10() } else { v };
    let xs: Vec<f64> = table.rows.iter().map(|r| r.abscissa).collect();
    let all_y: Vec<f64> = table.rows.iter().flat_map(|r| [ys(r.range_fwhm_m), ys(r.crossrange_fwhm_m)]).collect();
    let (x0, x1) = span(&xs);
    let (y0, y1) = span(&all_y);
    let px = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let py = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <line x1=\"{pad}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{}\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{aname} ({aunit})</text>\n\
         <text x=\"14\" y=\"{}\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\">{}</text>\n",
        h - pad,
        w - pad,
        h - pad,
        h - pad,
        w / 2.0,
        h - 15.0,
        h / 2.0,
        h / 2.0,
        if loglog { "log10 FWHM (m)" } else { "FWHM (m)" },
    );
    for (series, color, fit) in [
        (0usize, "#1f4fbf", &table.range_fit),
        (1, "#c0282d", &table.crossrange_fit),
    ] {
        for r in &table.rows {
            let v = ys(if series == 0 { r.range_fwhm_m } else { r.crossrange_fwhm_m });
            writeln!(svg, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{color}\"/>", px(r.abscissa), py(v)).unwrap();
        }
        writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\"/>",
            px(x0),
            py(fit.intercept + fit.slope * x0),
            px(x1),
            py(fit.intercept + fit.slope * x1)
        )
        .unwrap();
    }
    writeln!(svg, "<text x=\"{}\" y=\"20\" fill=\"#1f4fbf\">range slope {:.4} (r2 {:.4})</text>", pad, table.range_fit.slope, table.range_fit.r2).unwrap();
    writeln!(svg, "<text x=\"{}\" y=\"36\" fill=\"#c0282d\">cross-range slope {:.4} (r2 {:.4})</text>", pad, table.crossrange_fit.slope, table.crossrange_fit.r2).unwrap();
    svg.push_str("</svg>\n");
    svg
}

fn span(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        let m = 0.05 * (hi - lo);
        (lo - m, hi + m)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

/// "Hot" colormap: black → red → yellow → white, monotone in luminance.
pub fn hot_colormap(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let r = (t * 3.0).min(1.0);
    let g = (t * 3.0 - 1.0).clamp(0.0, 1.0);
    let b = (t * 3.0 - 2.0).clamp(0.0, 1.0);
    [(r * 255.0).round() as u8, (g * 255.0).round() as u8, (b * 255.0).round() as u8]
}

/// Renders the dB view clipped at `floor_db` (negative) with [`hot_colormap`].
/// Image row 0 is the largest `y` (range increases upward).
pub fn render_png(raster: &ImageRaster, floor_db: f64, path: &Path) -> Result<()> {
    if floor_db.is_nan() || floor_db >= 0.0 {
        return Err(Error::Parameter(format!("dB floor must be negative (got {floor_db})")));
    }
    let db = raster.db()?;
    let (nx, ny) = (raster.grid.nx as u32, raster.grid.ny as u32);
    let img = image::RgbImage::from_fn(nx, ny, |ix, row| {
        let iy = (ny - 1 - row) as usize;
        let v = db[iy * nx as usize + ix as usize];
        let t = if v.is_finite() { (v - floor_db) / -floor_db } else { 0.0 };
        image::Rgb(hot_colormap(t))
    });
    img.save(path).map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// Parameters of one CLI run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Scene document; the built-in single-target scene when absent.
    #[serde(default)]
    pub scene_file: Option<std::path::PathBuf>,
    /// Overrides the scene document's system when present.
    #[serde(default)]
    pub system: Option<SystemSpec>,
    pub method: Method,
    #[serde(default)]
    pub eps: Option<f64>,
    /// `None` means noiseless.
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Overrides the scene document's region when present.
    #[serde(default)]
    pub grid: Option<ImagingGrid>,
    /// Signal rank for the MUSIC methods; threshold rule when absent.
    #[serde(default)]
    pub rank: Option<usize>,
    pub output_dir: std::path::PathBuf,
    #[serde(default = "default_floor")]
    pub floor_db: f64,
}

fn default_floor() -> f64 {
    -40.0
}

impl RunManifest {
    pub fn new(method: Method, output_dir: impl Into<std::path::PathBuf>) -> Self {
        Self {
            scene_file: None,
            system: None,
            method,
            eps: None,
            snr_db: None,
            seed: 0,
            grid: None,
            rank: None,
            output_dir: output_dir.into(),
            floor_db: default_floor(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.method.needs_eps(), self.eps) {
            (true, None) => {
                return Err(Error::Parameter(format!("method {} requires eps", self.method)));
            }
            (_, Some(eps)) if !(eps > 0.0 && eps <= 1.0) => {
                return Err(Error::Parameter(format!("eps must lie in (0, 1] (got {eps})")));
            }
            _ => {}
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return Err(Error::Parameter("snr_db must be finite; omit it for noiseless data".into()));
            }
        }
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        if self.floor_db.is_nan() || self.floor_db >= 0.0 {
            return Err(Error::Parameter("floor_db must be negative".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Scene document with the manifest's overrides applied.
    pub fn scene_document(&self) -> Result<SceneDocument> {
        let mut doc = match &self.scene_file {
            Some(p) => SceneDocument::read(p)?,
            None => SceneDocument::default(),
        };
        if let Some(sys) = self.system {
            doc.system = sys;
        }
        if let Some(g) = self.grid {
            doc.region = g;
        }
        doc.validate()?;
        Ok(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{add_noise, simulate_data};

    fn small_data(noisy: bool) -> DataMatrix {
        let sys = SystemSpec { n_positions: 5, radar: RadarConfig { m: 3, ..RadarConfig::gotcha() }, ..SystemSpec::gotcha() };
        let acq = Acquisition::from_system(&sys).unwrap();
        let d = simulate_data(&Scene::single_target(), &acq).unwrap();
        if noisy { add_noise(&d, 12.5, 9).unwrap() } else { d }
    }

    #[test]
    fn data_matrix_round_trips() {
        for noisy in [false, true] {
            let d = small_data(noisy);
            let text = write_data_matrix(&d);
            let back = parse_data_matrix(&text).unwrap();
            assert_eq!(back, d);
            assert_eq!(write_data_matrix(&back), text);
            assert_eq!(text.contains("seed="), noisy);
        }
    }

    #[test]
    fn data_parse_errors_carry_line_numbers() {
        let text = write_data_matrix(&small_data(false));
        let mut lines: Vec<&str> = text.lines().collect();
        lines[4] = "0,1,abc,0";
        let err = parse_data_matrix(&lines.join("\n")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{err}");
        let truncated: String = text.lines().take(6).collect::<Vec<_>>().join("\n");
        assert!(matches!(parse_data_matrix(&truncated), Err(Error::Parse { .. })));
        assert!(matches!(parse_data_matrix("hello"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn raster_round_trips() {
        let grid = ImagingGrid::new(Vec3::new(0.1, -0.2, 0.0), 0.3, 0.7, 4, 3).unwrap();
        let values: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37).sin().abs() + 1e-3).collect();
        let r = ImageRaster::new(grid, Method::KmEps, Some(1e-4), values).unwrap();
        let text = write_raster(&r, RasterScale::Linear).unwrap();
        assert_eq!(parse_raster(&text).unwrap(), r);
        let db = write_raster(&r, RasterScale::Db).unwrap();
        assert!(db.contains("scale=db"));
        assert!(parse_raster(&db).is_err());
    }

    #[test]
    fn manifest_round_trips_and_validates() {
        let mut m = RunManifest::new(Method::KmEps, "/tmp/out");
        assert!(m.validate().is_err());
        m.eps = Some(1e-4);
        m.snr_db = Some(15.3989);
        m.seed = 42;
        m.grid = Some(ImagingGrid::square(Vec3::new(1.0, 1.0, 0.0), 0.5, 11).unwrap());
        let text = m.to_json().unwrap();
        assert_eq!(RunManifest::from_json(&text).unwrap(), m);
        let km = RunManifest::new(Method::Km, "/tmp/out");
        assert!(km.validate().is_ok());
    }

    #[test]
    fn scene_document_round_trips() {
        let doc = SceneDocument::three_targets();
        let back = SceneDocument::from_json(&doc.to_json().unwrap()).unwrap();
        assert_eq!(back, doc);
        let bad = doc.to_json().unwrap().replace("622000000.0", "-5.0");
        assert!(SceneDocument::from_json(&bad).is_err());
    }

    #[test]
    fn colormap_is_monotone_in_luminance() {
        let lum = |c: [u8; 3]| 0.2126 * c[0] as f64 + 0.7152 * c[1] as f64 + 0.0722 * c[2] as f64;
        let mut prev = -1.0;
        for i in 0..=100 {
            let l = lum(hot_colormap(i as f64 / 100.0));
            assert!(l >= prev);
            prev = l;
        }
        assert_eq!(hot_colormap(0.0), [0, 0, 0]);
        assert_eq!(hot_colormap(1.0), [255, 255, 255]);
    }
}
