//! Resolution of the modified KM versus ε, bandwidth and aperture.
//!
//! ```text
//! cargo run --release --example resolution_sweeps
//! ```

use sarlab::resolution::{SweepGrid, SweepTable};
use sarlab::{sweep_aperture, sweep_bandwidth, sweep_epsilon, Scene, SystemSpec};

fn show(t: &SweepTable) {
    let (name, unit) = t.kind.parameter();
    println!("{name} ({unit})");
    for r in &t.rows {
        println!(
            "  {:>10.4e}: range {:>8.4} λ0, cross-range {:>8.4} λ0",
            r.value,
            r.range_fwhm_m / r.lambda0,
            r.crossrange_fwhm_m / r.lambda0
        );
    }
    println!(
        "  fit slope: range {:.4} (r² {:.6}), cross-range {:.4} (r² {:.6})",
        t.range_fit.slope, t.range_fit.r2, t.crossrange_fit.slope, t.crossrange_fit.r2
    );
}

fn main() -> sarlab::Result<()> {
    let scene = Scene::single_target();
    let sys = SystemSpec::gotcha();
    let layout = SweepGrid::default();
    show(&sweep_epsilon(&scene, &sys, &[1e-6, 1e-5, 1e-4, 1e-3, 1e-2], layout)?);
    let factors = [1.0, 0.75, 0.5, 0.375, 0.25];
    let b: Vec<f64> = factors.iter().map(|f| f * sys.radar.bandwidth).collect();
    show(&sweep_bandwidth(&scene, &sys, &b, 1e-4, layout)?);
    let a: Vec<f64> = factors.iter().map(|f| f * sys.aperture).collect();
    show(&sweep_aperture(&scene, &sys, &a, 1e-4, layout)?);
    Ok(())
}
