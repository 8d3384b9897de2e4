//! Writing and reading back every file format.
//!
//! ```text
//! cargo run --release --example file_formats
//! ```

use sarlab::io::{parse_data_matrix, parse_raster, write_data_matrix, write_raster, RasterScale, RunManifest, SceneDocument};
use sarlab::{add_noise, km_image, simulate_data, Acquisition, ImagingGrid, Method, Vec3};

fn main() -> sarlab::Result<()> {
    let doc = SceneDocument::three_targets();
    println!("scene document:\n{}", doc.to_json()?);

    let acq = Acquisition::from_system(&doc.system)?;
    let data = add_noise(&simulate_data(&doc.scene(), &acq)?, 15.3989, 3)?;
    let text = write_data_matrix(&data);
    println!("data file header: {}", text.lines().next().unwrap());
    assert_eq!(parse_data_matrix(&text)?, data);

    let raster = km_image(&data, &ImagingGrid::square(Vec3::zeros(), 2.4, 25)?)?;
    let csv = write_raster(&raster, RasterScale::Linear)?;
    println!("raster file header: {}", csv.lines().next().unwrap());
    assert_eq!(parse_raster(&csv)?, raster);

    let mut manifest = RunManifest::new(Method::MusicEps, "out");
    manifest.eps = Some(1e-3);
    manifest.rank = Some(3);
    assert_eq!(RunManifest::from_json(&manifest.to_json()?)?, manifest);
    println!("manifest:\n{}", manifest.to_json()?);
    println!("all formats round-trip");
    Ok(())
}
