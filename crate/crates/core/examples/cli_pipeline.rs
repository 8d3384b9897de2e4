//! The command drivers chained as a run: simulate, image, close-up, sweep.
//!
//! Files land in `$SARLAB_OUTPUT_ROOT/example-run` (system temp dir when unset).
//! The same steps from a shell:
//!
//! ```text
//! sarlab simulate --snr-db 15.3989 --seed 1 --output-dir example-run
//! sarlab image --data example-run/data.csv --method km-eps --eps 1e-4 --output-dir example-run
//! sarlab closeup --data example-run/data.csv --method km-eps --eps 1e-4 --at 1,1 --output-dir example-run
//! sarlab sweep eps --output-dir example-run
//! ```

use sarlab::cli::{cmd_closeup, cmd_image, cmd_simulate, cmd_sweep, OUTPUT_ROOT_ENV};
use sarlab::io::RunManifest;
use sarlab::resolution::{CloseupSpec, SweepGrid, SweepKind};
use sarlab::{Method, Vec3};

fn main() -> sarlab::Result<()> {
    let root = std::env::var_os(OUTPUT_ROOT_ENV).map(Into::into).unwrap_or_else(std::env::temp_dir);
    let mut manifest = RunManifest::new(Method::KmEps, root.join("example-run"));
    manifest.eps = Some(1e-4);
    manifest.snr_db = Some(15.3989);
    manifest.seed = 1;

    let sim = cmd_simulate(&manifest, "data.csv")?;
    println!("simulate -> {} (achieved {:.4} dB)", sim.data_path.display(), sim.data.noise.unwrap().snr_db_achieved);

    let img = cmd_image(&manifest, &sim.data, None)?;
    let peak = img.raster.peak.unwrap();
    println!("image    -> {} (peak at {:.2}, {:.2} m)", img.png.display(), peak.position.x, peak.position.y);

    let close = cmd_closeup(&manifest, &sim.data, Vec3::new(1.0, 1.0, 0.0), CloseupSpec::default(), None)?;
    let (dx, dy) = close.offset_lambda0.unwrap();
    println!("closeup  -> {} (offset {dx:+.2}, {dy:+.2} λ0)", close.image.sidecar_path.display());

    let sweep = cmd_sweep(&manifest, SweepKind::Eps, None, SweepGrid::default())?;
    println!(
        "sweep    -> {} (slopes {:.3} range, {:.3} cross-range)",
        sweep.csv.display(),
        sweep.table.range_fit.slope,
        sweep.table.crossrange_fit.slope
    );
    Ok(())
}
