//! Peak displacement of modified-KM close-ups under seeded noise.
//!
//! Runs the same scene at a moderate and a low SNR and prints offset
//! statistics in wavelengths.
//!
//! ```text
//! cargo run --release --example peak_offsets [-- --three-targets] [--trials N]
//! ```

use sarlab::resolution::{peak_offset_study, CloseupSpec};
use sarlab::{Scene, SystemSpec};

fn main() -> sarlab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let scene = if args.iter().any(|a| a == "--three-targets") { Scene::three_targets() } else { Scene::single_target() };
    let trials = args
        .iter()
        .position(|a| a == "--trials")
        .and_then(|i| args.get(i + 1))
        .and_then(|v| v.parse().ok())
        .unwrap_or(20);
    let system = SystemSpec::gotcha();
    println!("{} target(s), {trials} trials, eps = 1e-4, 5λ0 x 5λ0 close-ups at λ0/20", scene.targets.len());
    for snr in [15.3989, 4.1217] {
        let study = peak_offset_study(&scene, &system, snr, 1e-4, trials, 1000, CloseupSpec::default())?;
        let s = study.summary;
        println!(
            "SNR {snr:>8} dB: median {:.3} λ0 (cross-range {:.3}, range {:.3}), p90 {:.3} λ0, max {:.3} λ0",
            s.median_total, s.median_crossrange, s.median_range, s.p90_total, s.max_total
        );
    }
    Ok(())
}
