//! Forward model: noiseless and seeded noisy data for the single-target scene.
//!
//! ```text
//! cargo run --release --example simulate
//! ```

use sarlab::{add_noise, measure_snr, simulate_data, Acquisition, Scene, SystemSpec};

fn main() -> sarlab::Result<()> {
    let system = SystemSpec::gotcha();
    let scales = system.scales()?;
    println!("λ0 = {:.5} m, L = {:.3} m", scales.lambda0, scales.standoff);
    println!(
        "c/B = {:.4} m ({:.2} λ0), λ0 L / a = {:.4} m ({:.2} λ0)",
        scales.range_scale,
        scales.range_scale / scales.lambda0,
        scales.crossrange_scale,
        scales.crossrange_scale / scales.lambda0
    );

    let acq = Acquisition::from_system(&system)?;
    let clean = simulate_data(&Scene::single_target(), &acq)?;
    println!("data matrix {} x {}, ‖D‖_F = {:.6e}", clean.n_frequencies(), clean.n_positions(), clean.frobenius_norm());
    println!("d_0(ω_0) = {:.6e}", clean.values[(0, 0)]);

    for (snr, seed) in [(15.3989, 1), (4.1217, 1), (4.1217, 2)] {
        let noisy = add_noise(&clean, snr, seed)?;
        println!("requested {snr} dB, seed {seed}: achieved {:.10} dB", measure_snr(&clean, &noisy)?);
    }
    Ok(())
}
