mod common;

use common::*;
use emsource::forward::{add_noise, build_sphere_surface, stacked_norm, synthesize_point_source_data, SourceSet};
use emsource::imaging::{field_value, BaseFunctional, BaseKind, FieldEvaluator, ImagingSpec, OracleBase, SamplingGrid, Variant};
use emsource::io::{has_dominant_component, read_dataset, write_dataset};
use emsource::kernels::{im_green_matrix, WaveContext};
use emsource::reconstruct::{reconstruct_with, ReconstructionParams, SourceMode};
use emsource::{ComplexVec3, RealVec3};
use num_complex::Complex64;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = RealVec3> {
    prop::array::uniform3(-1.5..1.5f64).prop_map(RealVec3::from)
}

fn moment() -> impl Strategy<Value = ComplexVec3> {
    prop::array::uniform6(-5.0..5.0f64)
        .prop_filter("nonzero", |a| a.iter().any(|x| x.abs() > 0.1))
        .prop_map(|a| ComplexVec3::from_fn(|i, _| Complex64::new(a[2 * i], a[2 * i + 1])))
}

/// Both the real and imaginary parts carry a component of size at least 1.
fn balanced_moment() -> impl Strategy<Value = ComplexVec3> {
    (prop::array::uniform3(-5.0..5.0f64), prop::array::uniform3(-5.0..5.0f64))
        .prop_filter("both parts sizeable", |(a, b)| {
            a.iter().any(|x| x.abs() >= 1.0) && b.iter().any(|x| x.abs() >= 1.0)
        })
        .prop_map(|(a, b)| ComplexVec3::from_fn(|i, _| Complex64::new(a[i], b[i])))
}

fn oracle_evaluator(sources: &SourceSet, grid: SamplingGrid) -> FieldEvaluator {
    FieldEvaluator::new(Box::new(OracleBase::new(sources.clone(), k20())), grid).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_nonzero_vector_has_a_dominant_component(p in prop::array::uniform3(-1e3..1e3f64)) {
        let p = RealVec3::from(p);
        prop_assume!(p.norm() > 1e-9);
        prop_assert!(has_dominant_component(&p));
        let i = p.iamax();
        let rest = p.norm_squared() - p[i] * p[i];
        prop_assert!(8.0 * p[i] * p[i] > rest);
    }

    #[test]
    fn im_green_is_symmetric(x in point(), y in point(), k in 1.0..40.0f64) {
        let ctx = WaveContext::new(k).unwrap();
        let a = im_green_matrix(&x, &y, ctx);
        let b = im_green_matrix(&y, &x, ctx);
        prop_assert!((a - b).amax() <= 1e-13 * a.amax().max(1e-300));
        prop_assert!((a - a.transpose()).amax() <= 1e-13 * a.amax().max(1e-300));
    }

    #[test]
    fn noise_has_the_requested_relative_size(
        d1 in 0.0..0.6f64,
        d2 in 0.0..0.6f64,
        seed in any::<u64>(),
        p in moment(),
    ) {
        let surface = build_sphere_surface(RealVec3::zeros(), 3.0, 6, 8).unwrap();
        let data = synthesize_point_source_data(&SourceSet::new(vec![src([0.2, 0.1, -0.3], p)]), &surface, k20()).unwrap();
        let noisy = add_noise(&data, d1, d2, seed).unwrap();
        let diff = |a: &[ComplexVec3], b: &[ComplexVec3]| -> Vec<ComplexVec3> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
        let e = stacked_norm(&diff(&noisy.e, &data.e));
        let c = stacked_norm(&diff(&noisy.curl_e_cross_nu, &data.curl_e_cross_nu));
        prop_assert!((e - d1 * stacked_norm(&data.e)).abs() <= 1e-12 * stacked_norm(&data.e));
        prop_assert!((c - d2 * stacked_norm(&data.curl_e_cross_nu)).abs() <= 1e-12 * stacked_norm(&data.curl_e_cross_nu));
        prop_assert_eq!(&noisy, &add_noise(&data, d1, d2, seed).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dataset_files_round_trip_exactly(
        p in moment(),
        x in prop::array::uniform3(-1.0..1.0f64),
        delta in 0.0..0.5f64,
        seed in any::<u64>(),
    ) {
        let surface = build_sphere_surface(RealVec3::new(0.1, 0.0, -0.2), 2.5, 7, 5).unwrap();
        let data = synthesize_point_source_data(&SourceSet::new(vec![src(x, p)]), &surface, k20()).unwrap();
        let data = add_noise(&data, delta, delta / 2.0, seed).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = write_dataset(&data, dir.path(), "p").unwrap();
        prop_assert_eq!(read_dataset(&files.metadata).unwrap(), data);
    }

    #[test]
    fn scaling_moments_scales_fields_and_moments(c in 0.05..20.0f64, s in 1u32..5) {
        let sources = SourceSet::new(vec![
            src([0.3, -0.2, 0.1], cv([(1.0, -2.0), (3.0, 0.5), (-1.0, 1.0)])),
            src([-0.5, 0.5, -0.4], real([2.0, -1.0, 4.0])),
        ]);
        let scaled = SourceSet::new(
            sources.sources().iter().map(|p| src(p.location.into(), p.moment * Complex64::from(c))).collect(),
        );
        let grid = SamplingGrid::cube(-1.0, 1.0, 21).unwrap();
        let (a, b) = (oracle_evaluator(&sources, grid), oracle_evaluator(&scaled, grid));
        for variant in [Variant::RealPart, Variant::ImagPart, Variant::Modulus] {
            let spec = ImagingSpec::new(BaseKind::Interior, variant, s).unwrap();
            let fa = a.field(&spec, &[], "a").unwrap();
            let fb = b.field(&spec, &[], "b").unwrap();
            for (u, v) in fa.values.iter().zip(&fb.values) {
                prop_assert!((v - c.powi(s as i32) * u).abs() <= 1e-9 * v.abs().max(1e-300));
            }
            prop_assert_eq!(fa.argmax(), fb.argmax());
        }
        let params = ReconstructionParams::default().resolve(k20(), &grid).unwrap();
        let ra = reconstruct_with(&a, BaseKind::Interior, 4, &params, SourceMode::Point).unwrap();
        let rb = reconstruct_with(&b, BaseKind::Interior, 4, &params, SourceMode::Point).unwrap();
        prop_assert_eq!(ra.len(), rb.len());
        for (x, y) in ra.sources.iter().zip(&rb.sources) {
            prop_assert_eq!(x.location, y.location);
            prop_assert!((y.moment - x.moment * Complex64::from(c)).norm() <= 1e-9 * y.moment.norm());
        }
    }

    #[test]
    fn oracle_source_on_a_grid_point_is_recovered_exactly(
        ijk in prop::array::uniform3(3usize..38),
        p in balanced_moment(),
    ) {
        let grid = SamplingGrid::cube(-1.0, 1.0, 41).unwrap();
        let x = grid.point_at(ijk);
        let sources = SourceSet::new(vec![src(x.into(), p)]);
        let ev = oracle_evaluator(&sources, grid);
        let params = ReconstructionParams::default().resolve(k20(), &grid).unwrap();
        let rec = reconstruct_with(&ev, BaseKind::Interior, 4, &params, SourceMode::Point).unwrap();
        prop_assert_eq!(rec.len(), 1);
        prop_assert_eq!(rec.sources[0].location, x);
        prop_assert!(rel(&rec.sources[0].moment, &p) <= 1e-10, "{}", rel(&rec.sources[0].moment, &p));
    }
}

#[test]
fn reconstruction_is_deterministic_across_thread_counts() {
    let surface = build_sphere_surface(RealVec3::zeros(), 3.0, 80, 80).unwrap();
    let sources = SourceSet::new(vec![
        src([0.4, -0.3, 0.2], cv([(1.0, 1.0), (-2.0, 0.0), (0.5, -1.5)])),
        src([-0.5, 0.4, -0.4], real([0.0, 3.0, 1.0])),
    ]);
    let data = add_noise(&synthesize_point_source_data(&sources, &surface, k20()).unwrap(), 0.05, 0.05, 11).unwrap();
    let grid = SamplingGrid::cube(-1.0, 1.0, 33).unwrap();
    let params = ReconstructionParams::default().resolve(k20(), &grid).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            let ev = FieldEvaluator::from_data(&data, BaseKind::Interior, grid).unwrap();
            reconstruct_with(&ev, BaseKind::Interior, 4, &params, SourceMode::Point).unwrap()
        })
    };
    let one = run(1);
    assert_eq!(one.len(), 2);
    assert_eq!(one, run(1));
    assert_eq!(one, run(3));
}

#[test]
fn oracle_field_value_matches_direct_sum() {
    let p = cv([(1.0, 0.5), (-2.0, 0.0), (0.0, 3.0)]);
    let x = RealVec3::new(0.1, 0.2, -0.3);
    let base = OracleBase::new(SourceSet::new(vec![src(x.into(), p)]), k20());
    let z = RealVec3::new(0.15, 0.1, -0.2);
    let v = base.vector(&z).unwrap();
    let m = im_green_matrix(&x, &z, k20());
    for (i, row) in m.row_iter().enumerate() {
        let expect = p.iter().zip(row.iter()).map(|(a, b)| a * b).sum::<Complex64>();
        assert!((v[i] - expect).norm() <= 1e-14 * expect.norm().max(1e-300));
    }
    let d = v.map(|c| c.re);
    assert_eq!(field_value(&d, 2), d.norm_squared());
}
