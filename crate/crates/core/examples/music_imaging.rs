//! MUSIC and ε-weighted MUSIC on the three-target scene.
//!
//! Forms the Prony (Hankel) rearrangement per position, reports its
//! singular values, and images the scene with both subspace functionals.
//!
//! ```text
//! cargo run --release --example music_imaging
//! ```

use sarlab::subspace::{prony_column, subspace_decompose};
use sarlab::{music_eps_image, music_image, simulate_data, Acquisition, ImagingGrid, RankRule, Scene, SystemSpec, Vec3};

fn main() -> sarlab::Result<()> {
    let system = SystemSpec::gotcha();
    let acq = Acquisition::from_system(&system)?;
    let scene = Scene::three_targets();
    let data = simulate_data(&scene, &acq)?;

    let basis = subspace_decompose(&prony_column(&data, 0)?, RankRule::default())?;
    let sv: Vec<String> = basis.singular_values.iter().take(5).map(|s| format!("{s:.3e}")).collect();
    println!("position 0: leading singular values [{}], threshold rank {}", sv.join(", "), basis.rank);

    let grid = ImagingGrid::square(Vec3::zeros(), 2.4, 97)?;
    let music = music_image(&data, &grid, RankRule::Fixed(3))?;
    let weighted = music_eps_image(&data, &grid, RankRule::Fixed(3), 1e-4)?;
    for (name, img) in [("MUSIC", &music), ("ε-MUSIC", &weighted)] {
        let p = img.peak.unwrap();
        println!("{name}: global peak at ({:.2}, {:.2}) m", p.position.x, p.position.y);
        for t in &scene.targets {
            let (ix, iy) = grid.nearest_pixel(&t.position);
            println!(
                "  target ({:>4.1}, {:>4.1}): {:>7.2} dB below peak",
                t.position.x,
                t.position.y,
                10.0 * (p.value / img.at(ix, iy)).log10()
            );
        }
    }
    Ok(())
}
