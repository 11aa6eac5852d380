mod common;

use std::f64::consts::PI;

use common::*;
use emsource::forward::{build_sphere_surface, synthesize_point_source_data, SourceSet};
use emsource::imaging::{BaseFunctional, BaseKind, FieldEvaluator, ImagingSpec, OracleBase, SamplingGrid, Variant};
use emsource::reconstruct::{
    deflation_loop, deflation_loop_with, reconstruct_sources, reconstruct_with, ReconstructionParams, SourceMode,
    StopReason,
};
use emsource::RealVec3;

fn oracle(sources: &SourceSet, grid: SamplingGrid) -> FieldEvaluator {
    FieldEvaluator::new(Box::new(OracleBase::new(sources.clone(), k20())), grid).unwrap()
}

#[test]
fn zero_data_gives_no_rounds_and_no_sources() {
    let surface = build_sphere_surface(RealVec3::zeros(), 4.0, 20, 20).unwrap();
    let data = synthesize_point_source_data(&SourceSet::default(), &surface, k20()).unwrap();
    let grid = SamplingGrid::cube(-1.0, 1.0, 21).unwrap();
    let spec = ImagingSpec::new(BaseKind::Interior, Variant::RealPart, 4).unwrap();
    let part = deflation_loop(&data, &grid, &spec, &ReconstructionParams::default()).unwrap();
    assert!(part.entries.is_empty());
    assert_eq!(part.stop, StopReason::ZeroField);
    let rec = reconstruct_sources(&data, &grid, BaseKind::Interior, 4, &ReconstructionParams::default(), SourceMode::Point)
        .unwrap();
    assert!(rec.is_empty());
    assert!(rec.rounds_re.iter().all(|r| r.accepted.is_empty()));
    assert!(rec.converged());
}

#[test]
fn weak_source_waits_for_the_second_round() {
    let lambda = k20().wavelength();
    let half = 15.0 * lambda;
    let strong = src([-half, 0.0, 0.0], real([10.0, -4.0, 2.0]));
    let weak = src([half, 0.0, 0.0], real([1.0, -0.4, 0.2]));
    let sources = SourceSet::new(vec![strong.clone(), weak.clone()]);
    let grid = SamplingGrid::new(RealVec3::new(-5.0, -0.5, -0.5), RealVec3::new(5.0, 0.5, 0.5), [201, 21, 21]).unwrap();
    let ev = oracle(&sources, grid);
    let params = ReconstructionParams::default().resolve(k20(), &grid).unwrap();
    let spec = ImagingSpec::new(BaseKind::Interior, Variant::RealPart, 4).unwrap();
    let part = deflation_loop_with(&ev, &spec, &params, None).unwrap();
    assert_eq!(part.entries.len(), 2);
    let near = |a: &RealVec3, b: &RealVec3| (a - b).abs().max() <= grid.step().max();
    assert_eq!(part.entries[0].round, 1);
    assert!(near(&part.entries[0].location, &strong.location));
    assert_eq!(part.entries[1].round, 2);
    assert!(near(&part.entries[1].location, &weak.location));
    assert!(part.converged());
}

#[test]
fn deflation_halves_the_field_at_accepted_locations() {
    let sources = three_sources();
    let grid = SamplingGrid::cube(-1.5, 1.5, 101).unwrap();
    let ev = oracle(&sources, grid);
    let params = ReconstructionParams::default().resolve(k20(), &grid).unwrap();
    let rec = reconstruct_with(&ev, BaseKind::Interior, 4, &params, SourceMode::Point).unwrap();
    assert_eq!(rec.len(), 3);
    let mut checked = 0;
    for round in rec.rounds_re.iter().chain(&rec.rounds_im) {
        for (b, a) in round.before.iter().zip(&round.after) {
            assert!(*a <= 0.5 * b, "round {}: {b} -> {a}", round.round);
            checked += 1;
        }
    }
    assert!(checked >= 5);
}

#[test]
fn cross_talk_shrinks_with_distance() {
    let ctx = k20();
    let lambda = ctx.wavelength();
    let p1 = real([1.0, -2.0, 0.5]);
    let p2 = real([2.0, 1.0, -1.0]);
    let x1 = RealVec3::new(0.1, -0.2, 0.3);
    let dir = RealVec3::new(1.0, 0.4, -0.3).normalize();
    // Largest error over one wavelength of separations, to step over the zeros of sin(kr).
    let envelope = |d: f64| {
        (0..40)
            .map(|i| {
                let r = d + lambda * i as f64 / 40.0;
                let x2 = x1 + dir * r;
                let base = OracleBase::new(SourceSet::new(vec![src(x1.into(), p1), src(x2.into(), p2)]), ctx);
                let v = base.vector(&x1).unwrap().scale(6.0 * PI / ctx.k());
                rel(&v, &p1)
            })
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (envelope(20.0 * lambda), envelope(40.0 * lambda));
    assert!(e1 > 0.0 && e1 < 3.0 / (ctx.k() * 20.0 * lambda) * p2.norm() / p1.norm(), "{e1}");
    let ratio = e2 / e1;
    assert!((0.35..0.65).contains(&ratio), "{e1} {e2}");
}

#[test]
fn deflation_recovers_all_six_oracle_sources() {
    let sources = six_sources();
    let grid = SamplingGrid::cube(-1.5, 1.5, 101).unwrap();
    let ev = oracle(&sources, grid);
    let params = ReconstructionParams::default().resolve(k20(), &grid).unwrap();
    let rec = reconstruct_with(&ev, BaseKind::Interior, 4, &params, SourceMode::Point).unwrap();
    assert_eq!(rec.len(), 6);
    for s in sources.sources() {
        let best = rec
            .sources
            .iter()
            .map(|r| (r.location - s.location).abs().max())
            .fold(f64::INFINITY, f64::min);
        assert!(best <= grid.step().max() + 1e-12, "{:?} {best}", s.location);
    }
    assert!(rec.rounds_re.len() > 1, "magnitude spread should need several rounds");
}
