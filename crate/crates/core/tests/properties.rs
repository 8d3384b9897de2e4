use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use sarlab::io::{parse_data_matrix, parse_raster, write_data_matrix, write_raster, RasterScale, RunManifest};
use sarlab::km::km_illumination;
use sarlab::resolution::{fwhm_1d, peak_offset_study, CloseupSpec, SweepGrid};
use sarlab::subspace::prony_column;
use sarlab::{
    add_noise, derived_scales, f_eps, fwhm_2d, km_image, measure_snr, outer_product_model, prony_rearrange,
    simulate_data, subspace_decompose, sweep_epsilon, Acquisition, CancellationReference, FlightPath, FrequencyGrid,
    ImageRaster, ImagingGrid, KmVectors, Method, ModifiedKm, PointTarget, RadarConfig, RankRule, Scene, SystemSpec,
    Vec3,
};

fn small_system(m: usize, n: usize) -> SystemSpec {
    SystemSpec { radar: RadarConfig { m, ..RadarConfig::gotcha() }, n_positions: n, ..SystemSpec::gotcha() }
}

fn rel_frobenius(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).norm() / b.norm()
}

fn target() -> impl Strategy<Value = PointTarget> {
    (-3.0..3.0f64, -3.0..3.0f64, 0.1..2.0f64)
        .prop_map(|(x, y, rho)| PointTarget { position: Vec3::new(x, y, 0.0), reflectivity: rho })
}

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(r, i)| Complex64::new(r, i)), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frequency_spacing_is_uniform(f0 in 1e9..2e10f64, frac in 0.01..0.5f64, m in 2usize..64) {
        let cfg = RadarConfig::new(f0, frac * f0, m, 3e8).unwrap();
        let g = FrequencyGrid::new(&cfg).unwrap();
        for w in g.omegas.windows(2) {
            prop_assert!(((w[1] - w[0]) - g.delta_omega).abs() / g.delta_omega < 1e-12);
        }
    }

    #[test]
    fn flight_path_is_symmetric(a in 1.0..500.0f64, r in 100.0..1e4f64, h in 100.0..1e4f64, n in 2usize..300) {
        let p = FlightPath::linear(a, r, h, n).unwrap();
        for k in 0..n {
            prop_assert!((p.positions[k].x + p.positions[n - 1 - k].x).abs() < 1e-9);
        }
    }

    #[test]
    fn derived_scales_are_pure(a in 1.0..500.0f64, b in 1e7..1e9f64) {
        let sys = SystemSpec { aperture: a, radar: RadarConfig { bandwidth: b, ..RadarConfig::gotcha() }, ..SystemSpec::gotcha() };
        let p = sys.flight_path().unwrap();
        let (s1, s2) = (derived_scales(&sys.radar, &p), derived_scales(&sys.radar, &p));
        prop_assert_eq!(s1.range_scale.to_bits(), s2.range_scale.to_bits());
        prop_assert_eq!(s1.crossrange_scale.to_bits(), s2.crossrange_scale.to_bits());
        prop_assert_eq!(s1.lambda0.to_bits(), s2.lambda0.to_bits());
        prop_assert_eq!(s1.standoff.to_bits(), s2.standoff.to_bits());
    }

    #[test]
    fn forward_model_is_linear(t1 in target(), t2 in target()) {
        let acq = Acquisition::from_system(&small_system(8, 12)).unwrap();
        let both = simulate_data(&Scene::new(vec![t1, t2]), &acq).unwrap();
        let a = simulate_data(&Scene::new(vec![t1]), &acq).unwrap();
        let b = simulate_data(&Scene::new(vec![t2]), &acq).unwrap();
        let sum = &a.values + &b.values;
        prop_assert!(rel_frobenius(&both.values, &sum) < 1e-12);
    }

    #[test]
    fn single_target_phase_steps_are_constant(t in target()) {
        let acq = Acquisition::from_system(&small_system(31, 6)).unwrap();
        let d = simulate_data(&Scene::new(vec![t]), &acq).unwrap();
        for (n, x) in acq.path.positions.iter().enumerate() {
            let step = 2.0 * acq.freq.delta_omega * (x - t.position).norm() / acq.radar.c;
            for m in 0..d.n_frequencies() - 1 {
                let ratio = d.values[(m + 1, n)] / d.values[(m, n)];
                prop_assert!((ratio * Complex64::from_polar(1.0, -step)).arg().abs() < 1e-10);
            }
        }
    }

    #[test]
    fn noise_hits_requested_snr(snr in -10.0..40.0f64, seed in any::<u64>()) {
        let acq = Acquisition::from_system(&small_system(6, 10)).unwrap();
        let clean = simulate_data(&Scene::three_targets(), &acq).unwrap();
        let noisy = add_noise(&clean, snr, seed).unwrap();
        prop_assert!((measure_snr(&clean, &noisy).unwrap() - snr).abs() < 1e-9);
        prop_assert!((noisy.noise.unwrap().snr_db_achieved - snr).abs() < 1e-9);
        prop_assert_eq!(add_noise(&clean, snr, seed).unwrap(), noisy);
    }

    #[test]
    fn hankel_entries_depend_on_index_sum(m in 2usize..12, seed in any::<u64>()) {
        let d: Vec<Complex64> = (0..2 * m - 1)
            .map(|k| Complex64::new(((seed as f64) * 1e-9 + k as f64).sin(), (k as f64 * 1.7).cos()))
            .collect();
        let h = prony_rearrange(&d, m).unwrap();
        for i in 0..m {
            for j in 0..m {
                prop_assert_eq!(h.matrix[(i, j)], d[i + j]);
            }
        }
    }

    #[test]
    fn projectors_form_an_orthogonal_split(d in complex_vec(15), k in 1usize..8, y in (-2.0..2.0f64, -2.0..2.0f64)) {
        let h = prony_rearrange(&d, 8).unwrap();
        let basis = subspace_decompose(&h, RankRule::Fixed(k)).unwrap();
        let (ps, pn) = (basis.signal_projector(), basis.noise_projector());
        let eye = DMatrix::<Complex64>::identity(8, 8);
        prop_assert!((&ps + &pn - &eye).norm() < 1e-10);
        prop_assert!((&ps * &ps - &ps).norm() < 1e-10);
        prop_assert!((&pn * &pn - &pn).norm() < 1e-10);
        prop_assert!((ps.adjoint() - &ps).norm() < 1e-10);
        prop_assert!((pn.adjoint() - &pn).norm() < 1e-10);
        let acq = Acquisition::from_system(&small_system(8, 4)).unwrap();
        let a = sarlab::illumination_vector(&acq, &acq.path.positions[1], &Vec3::new(y.0, y.1, 0.0));
        let norm2: f64 = a.iter().map(|v| v.norm_sqr()).sum();
        prop_assert!((norm2 - 8.0).abs() < 1e-10);
        prop_assert!((basis.signal_energy(&a) + basis.noise_energy(&a) - 8.0).abs() < 1e-10);
    }

    #[test]
    fn hankel_matches_outer_product_model(targets in prop::collection::vec(target(), 1..4)) {
        let acq = Acquisition::from_system(&small_system(10, 9)).unwrap();
        let scene = Scene::new(targets);
        let data = simulate_data(&scene, &acq).unwrap();
        for n in 0..9 {
            let h = prony_column(&data, n).unwrap();
            let oracle = outer_product_model(&scene, &acq, n).unwrap();
            prop_assert!(rel_frobenius(&h.matrix, &oracle) < 1e-10);
        }
    }

    #[test]
    fn f_eps_is_strictly_increasing(eps in 1e-6..0.999f64, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(f_eps(lo, eps).unwrap() < f_eps(hi, eps).unwrap());
    }

    #[test]
    fn modified_km_is_bounded(snr in 0.0..30.0f64, seed in any::<u64>(), eps in 1e-6..1.0f64) {
        let acq = Acquisition::from_system(&small_system(6, 10)).unwrap();
        let data = add_noise(&simulate_data(&Scene::three_targets(), &acq).unwrap(), snr, seed).unwrap();
        let grid = ImagingGrid::square(Vec3::zeros(), 2.0, 9).unwrap();
        for reference in [CancellationReference::Unit, CancellationReference::RegionPeak] {
            let mk = ModifiedKm::new(eps).unwrap().with_reference(reference);
            let img = mk.image(&data, &grid).unwrap();
            let ceiling = mk.ceiling(10);
            for v in &img.values {
                prop_assert!(*v > 0.0 && *v <= ceiling * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn fwhm_invariant_under_scaling_and_shift(width in 0.1..3.0f64, scale in 1e-6..1e6f64, shift in -1e3..1e3f64) {
        let xs: Vec<f64> = (0..401).map(|i| -5.0 + i as f64 * 0.025).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (-(x / width).powi(2)).exp()).collect();
        let base = fwhm_1d(&xs, &ys).unwrap();
        let scaled: Vec<f64> = ys.iter().map(|y| y * scale).collect();
        let shifted: Vec<f64> = xs.iter().map(|x| x + shift).collect();
        prop_assert!((fwhm_1d(&xs, &scaled).unwrap() - base).abs() < 1e-12 * base.max(1.0));
        prop_assert!((fwhm_1d(&shifted, &ys).unwrap() - base).abs() < 1e-9);
    }

    #[test]
    fn data_matrix_file_round_trips(values in complex_vec(5 * 7), noisy in any::<bool>(), seed in any::<u64>(), snr in -20.0..60.0f64) {
        let acq = Acquisition::from_system(&small_system(3, 7)).unwrap();
        let noise = noisy.then_some(sarlab::NoiseMeta { snr_db_requested: snr, snr_db_achieved: snr + 1e-12, seed });
        let d = sarlab::DataMatrix::new(DMatrix::from_vec(5, 7, values), acq, noise).unwrap();
        let text = write_data_matrix(&d);
        prop_assert_eq!(parse_data_matrix(&text).unwrap(), d);
    }

    #[test]
    fn raster_file_round_trips_and_db_matches(values in prop::collection::vec(0.0..1e9f64, 6 * 4), cx in -10.0..10.0f64) {
        prop_assume!(values.iter().any(|v| *v > 0.0));
        let grid = ImagingGrid::new(Vec3::new(cx, 0.5, 0.0), 0.37, 1.1, 6, 4).unwrap();
        let r = ImageRaster::new(grid, Method::MusicEps, Some(3e-3), values).unwrap();
        prop_assert_eq!(parse_raster(&write_raster(&r, RasterScale::Linear).unwrap()).unwrap(), r.clone());
        let peak = r.peak.unwrap().value;
        for (d, v) in r.db().unwrap().iter().zip(&r.values) {
            prop_assert_eq!(d.to_bits(), (10.0 * (v / peak).log10()).to_bits());
        }
    }

    #[test]
    fn manifest_round_trips(eps in prop::option::of(1e-6..1.0f64), snr in prop::option::of(-5.0..40.0f64), seed in any::<u64>(), rank in prop::option::of(1usize..5)) {
        let mut m = RunManifest::new(if eps.is_some() { Method::MusicEps } else { Method::Music }, "runs/x");
        m.eps = eps;
        m.snr_db = snr;
        m.seed = seed;
        m.rank = rank;
        m.system = Some(small_system(5, 9));
        m.grid = Some(ImagingGrid::new(Vec3::new(0.1, 0.2, 0.0), 1.0, 2.0, 11, 13).unwrap());
        prop_assert_eq!(RunManifest::from_json(&m.to_json().unwrap()).unwrap(), m);
    }
}

#[test]
fn signal_overlap_is_locally_quadratic() {
    let sys = SystemSpec::gotcha();
    let acq = Acquisition::from_system(&sys).unwrap();
    let y0 = Vec3::new(1.0, 1.0, 0.0);
    let data = simulate_data(&Scene::new(vec![PointTarget::unit(1.0, 1.0, 0.0)]), &acq).unwrap();
    let m = acq.freq.subspace_dim() as f64;
    let quarter = acq.lambda0() / 4.0;
    for n in [0, 40, 123] {
        let basis = subspace_decompose(&prony_column(&data, n).unwrap(), RankRule::Fixed(1)).unwrap();
        let x = acq.path.positions[n];
        for dir in [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(1.0, 1.0, 0.0).normalize()] {
            let pts: Vec<(f64, f64)> = (1..=20)
                .flat_map(|k| [k as f64, -(k as f64)])
                .map(|k| {
                    let t = k * quarter / 20.0;
                    let a = sarlab::illumination_vector(&acq, &x, &(y0 + dir * t));
                    (t * t, 1.0 - basis.signal_energy(&a) / m)
                })
                .collect();
            // β² by least squares through the origin, then the relative residual.
            let beta2 = pts.iter().map(|(r2, g)| r2 * g).sum::<f64>() / pts.iter().map(|(r2, _)| r2 * r2).sum::<f64>();
            let resid = pts.iter().map(|(r2, g)| (g - beta2 * r2).powi(2)).sum::<f64>().sqrt();
            let scale = pts.iter().map(|(_, g)| g * g).sum::<f64>().sqrt();
            assert!(beta2 > 0.0, "n={n} dir={dir:?}: β² = {beta2}");
            assert!(resid / scale < 0.05, "n={n} dir={dir:?}: residual {}", resid / scale);
        }
    }
}

#[test]
fn km_projection_forms_agree() {
    let acq = Acquisition::from_system(&small_system(12, 16)).unwrap();
    let data = add_noise(&simulate_data(&Scene::three_targets(), &acq).unwrap(), 10.0, 4).unwrap();
    let grid = ImagingGrid::square(Vec3::zeros(), 2.0, 15).unwrap();
    let img = km_image(&data, &grid).unwrap();
    for i in 0..grid.len() {
        let y = grid.point(i);
        let mut double = Complex64::new(0.0, 0.0);
        for n in 0..data.n_positions() {
            let a = km_illumination(&data, n, &y);
            for (m, am) in a.iter().enumerate() {
                double += data.values[(m, n)].conj() * am;
            }
        }
        let vector: Complex64 = (0..data.n_positions())
            .map(|n| {
                let a = nalgebra::DVector::from_vec(km_illumination(&data, n, &y));
                data.values.column(n).dotc(&a)
            })
            .sum();
        assert!((double - vector).norm() <= 1e-10 * double.norm());
        assert!((img.values[i] - double.norm()).abs() <= 1e-10 * double.norm());
    }
}

#[test]
fn modified_km_reaches_ceiling_only_at_exact_cancellation() {
    let acq = Acquisition::from_system(&SystemSpec::gotcha()).unwrap();
    let data = simulate_data(&Scene::single_target(), &acq).unwrap();
    let vectors = KmVectors::new(&data).unwrap();
    let mk = ModifiedKm::new(1e-3).unwrap().with_reference(CancellationReference::Unit);
    let y0 = Vec3::new(1.0, 1.0, 0.0);
    for z in vectors.projections(&y0) {
        assert!((z - 1.0).norm() < 1e-12);
    }
    let at = mk.evaluate(vectors.normalized_km(&y0), 1.0, 124);
    assert!((at / mk.ceiling(124) - 1.0).abs() < 1e-10);
    let off = mk.evaluate(vectors.normalized_km(&Vec3::new(1.0, 1.001, 0.0)), 1.0, 124);
    assert!(off < 0.99 * mk.ceiling(124));
}

#[test]
fn fwhm_grows_with_eps_and_sweeps_are_reproducible() {
    let sys = SystemSpec::gotcha();
    let eps = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2];
    let a = sweep_epsilon(&Scene::single_target(), &sys, &eps, SweepGrid::default()).unwrap();
    let b = sweep_epsilon(&Scene::single_target(), &sys, &eps, SweepGrid::default()).unwrap();
    assert_eq!(a, b);
    for w in a.rows.windows(2) {
        assert!(w[1].range_fwhm_m > w[0].range_fwhm_m);
        assert!(w[1].crossrange_fwhm_m > w[0].crossrange_fwhm_m);
    }
}

#[test]
fn km_and_modified_km_share_argmax() {
    let acq = Acquisition::from_system(&SystemSpec::gotcha()).unwrap();
    let data = simulate_data(&Scene::single_target(), &acq).unwrap();
    let grid = ImagingGrid::square(Vec3::new(1.0, 1.0, 0.0), 0.5, 41).unwrap();
    let km = km_image(&data, &grid).unwrap().peak.unwrap();
    let mk = ModifiedKm::new(1e-4).unwrap().image(&data, &grid).unwrap().peak.unwrap();
    assert_eq!((km.ix, km.iy), (mk.ix, mk.iy));
    assert_eq!((km.ix, km.iy), (20, 20));
}

#[test]
fn offset_study_is_deterministic() {
    let sys = small_system(16, 40);
    let closeup = CloseupSpec { half_width_lambda0: 1.0, pixels: 15 };
    let a = peak_offset_study(&Scene::single_target(), &sys, 5.0, 1e-3, 10, 77, closeup).unwrap();
    let b = peak_offset_study(&Scene::single_target(), &sys, 5.0, 1e-3, 10, 77, closeup).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.offsets.len(), 10);
    assert_eq!(a.offsets[3].seed, 80);
}

#[test]
fn fwhm_2d_reports_both_axes_in_wavelengths() {
    let acq = Acquisition::from_system(&SystemSpec::gotcha()).unwrap();
    let data = simulate_data(&Scene::single_target(), &acq).unwrap();
    let grid = ImagingGrid::new(Vec3::new(1.0, 1.0, 0.0), 0.03, 0.01, 61, 61).unwrap();
    let img = ModifiedKm::new(1e-4).unwrap().image(&data, &grid).unwrap();
    let f = fwhm_2d(&img, acq.lambda0()).unwrap();
    assert!((f.range.width_lambda0 * acq.lambda0() - f.range.width_m).abs() < 1e-15);
    assert!(f.crossrange.width_m > f.range.width_m);
}
