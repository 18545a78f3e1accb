use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::chains::build_chain;
use crate::invlim::{c0_point, fixed_limit_point, zero_point, TailRule};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::from_ratio(n, d)
}

fn two() -> TentMap<BigRational> {
    TentMap::new(q(2, 1)).unwrap()
}

fn bump(a: i64, p: i64, e: i64, h: (i64, i64)) -> DisplacementMap<BigRational> {
    let hat = Hat {
        start: q(a, 1),
        peak: q(p, 1),
        end: q(e, 1),
        height: q(h.0, h.1),
    };
    DisplacementMap::new(vec![hat], &[q(0, 1)]).unwrap()
}

fn random_c0_points(
    map: &TentMap<BigRational>,
    rng: &mut ChaCha8Rng,
    n: usize,
) -> Vec<LimitPoint<BigRational>> {
    let top = map.critical_value().clone();
    (0..n)
        .map(|_| {
            let level = rng.gen_range(0..6);
            let u = top.clone() * q(rng.gen_range(0..=4096), 4096);
            c0_point(map, level, u).unwrap()
        })
        .collect()
}

#[test]
fn interpolates_the_anchor_coordinate() {
    let map = two();
    let h = bump(0, 2, 4, (1, 5));
    let x = c0_point(&map, 4, q(1, 10)).unwrap();
    assert_eq!(h.apply(&map, &x).project(&map, 4), q(11, 100));
    let mid = isotopy_eval(&map, &h, &x, &q(1, 2)).unwrap();
    assert_eq!(mid.project(&map, 4), q(21, 200));
}

#[test]
fn endpoint_identities_are_exact() {
    let map = two();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let h = DisplacementMap::random(&mut rng, 3, 16.0, &[q(0, 1)]).unwrap();
        for x in random_c0_points(&map, &mut rng, 40) {
            assert_eq!(isotopy_eval(&map, &h, &x, &q(0, 1)).unwrap(), x);
            assert_eq!(
                isotopy_eval(&map, &h, &x, &q(1, 1)).unwrap(),
                h.apply(&map, &x)
            );
        }
    }
}

#[test]
fn folding_and_off_composant_points_stay_put() {
    let map = two();
    let h = bump(0, 2, 4, (1, 2));
    let z = zero_point::<BigRational>();
    let p = fixed_limit_point(&map);
    for i in 0..=4 {
        let t = q(i, 4);
        assert_eq!(isotopy_eval(&map, &h, &z, &t).unwrap(), z);
        assert_eq!(isotopy_eval(&map, &h, &p, &t).unwrap(), p);
    }
}

#[test]
fn rejects_times_outside_the_unit_interval() {
    let map = two();
    let x = c0_point(&map, 1, q(1, 3)).unwrap();
    assert!(isotopy_eval(&map, &bump(0, 2, 4, (1, 2)), &x, &q(3, 2)).is_err());
}

#[test]
fn interpolation_is_affine_at_the_chosen_level() {
    let map = TentMap::new(q(3, 2)).unwrap();
    let h = bump(1, 3, 6, (3, 2));
    let x = c0_point(&map, 3, q(1, 2)).unwrap();
    let step = isotopy_step(&map, &h, &x, &q(1, 3)).unwrap();
    let m = step.level;
    let hx = h.apply(&map, &x);
    let (a, b) = (x.project(&map, m), hx.project(&map, m));
    for i in 0..=6 {
        let t = q(i, 6);
        let got = isotopy_eval(&map, &h, &x, &t).unwrap().project(&map, m);
        assert_eq!(got, a.clone() + t * (b.clone() - a.clone()));
    }
}

#[test]
fn time_slices_are_injective() {
    let map = two();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = DisplacementMap::random(&mut rng, 4, 20.0, &[q(0, 1)]).unwrap();
    let mut sample = random_c0_points(&map, &mut rng, 200);
    sample.push(fixed_limit_point(&map));
    for t in [q(0, 1), q(1, 1), q(rng.gen_range(1..1024), 1024)] {
        let report = injectivity_check(&map, &h, &t, &sample).unwrap();
        assert!(
            report.passed(),
            "violations at t = {t}: {:?}",
            report.violations
        );
        assert!(report.checked > 100);
    }
}

#[test]
fn injectivity_check_reports_a_collapse() {
    // Not a valid displacement map: built by hand to force a collision.
    let map = two();
    let h = bump(0, 2, 4, (1, 1));
    let squashed = DisplacementMap {
        hats: vec![Hat {
            height: q(2, 1),
            ..h.hats()[0].clone()
        }],
        bound: q(2, 1),
    };
    let sample = vec![
        c0_point(&map, 1, q(1, 1)).unwrap(),
        c0_point(&map, 2, q(3, 4)).unwrap(),
    ];
    let report = injectivity_check(&map, &squashed, &q(1, 1), &sample).unwrap();
    assert_eq!(report.violations, vec![(0, 1)]);
}

#[test]
fn adjusted_map_is_identity_without_shift() {
    let map = two();
    let chain = build_chain(&map, 2, 2).unwrap();
    let x = c0_point(&map, 4, q(1, 4)).unwrap();
    assert_eq!(adjusted_map(&map, 2, 2, &chain, &chain, 0, &x).unwrap(), x);
}

#[test]
fn adjusted_map_matches_enumerated_ppoint() {
    let map = two();
    let (fine, coarse) = (
        build_chain(&map, 2, 2).unwrap(),
        build_chain(&map, 1, 2).unwrap(),
    );
    let x = c0_point(&map, 4, q(1, 4)).unwrap();
    let got = adjusted_map(&map, 2, 1, &fine, &coarse, 1, &x).unwrap();
    let shifted = x.shift_by(&map, -1);
    assert_eq!(got.c0_position(&map), shifted.c0_position(&map));

    // Oracle: at level 4 the dyadics u = j/32 contain every 1-point; the arc
    // component is found by walking a fine grid outwards from the image.
    let level = 4;
    let y = shifted.reanchor(&map, level);
    let link = coarse.link_of(&map, &y)[0];
    let target = coarse.links()[link].clone();
    let grid = 1 << 14;
    let pos = |u: &BigRational| (u.clone() * q(grid, 1)).to_integer().to_i64().unwrap();
    let start = pos(y.anchor());
    let inside =
        |k: i64| k >= 0 && k <= grid && target.contains(&map.apply_n(&q(k, grid), level - 1));
    let (mut lo, mut hi) = (start, start);
    while inside(lo - 1) {
        lo -= 1;
    }
    while inside(hi + 1) {
        hi += 1;
    }
    let ppoints: Vec<i64> = (0..=32)
        .map(|j| j * grid / 32)
        .filter(|&k| k >= lo && k <= hi)
        .filter(|&k| {
            (2..=level + 2)
                .any(|n| c0_point(&map, level, q(k, grid)).unwrap().project(&map, n) == q(1, 2))
        })
        .collect();
    assert_eq!(ppoints, vec![start]);
    assert_eq!(got.reanchor(&map, level).anchor(), &q(start, grid));
}

#[test]
fn adjusted_map_preconditions() {
    let map = two();
    let chain = build_chain(&map, 2, 2).unwrap();
    let not_q = c0_point(&map, 4, q(1, 5)).unwrap();
    assert!(matches!(
        adjusted_map(&map, 2, 2, &chain, &chain, 0, &not_q),
        Err(Error::Precondition(_))
    ));
    let x = c0_point(&map, 4, q(1, 4)).unwrap();
    assert!(matches!(
        adjusted_map(&map, 1, 2, &chain, &chain, 0, &x),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn hausdorff_examples() {
    let map = two();
    let a = Arc::new(&map, 3, q(1, 10), q(1, 5), TailRule::Left).unwrap();
    let fold_free = Arc::new(&map, 3, q(3, 20), q(1, 5), TailRule::Left).unwrap();
    let b = Arc::new(&map, 3, q(2, 5), q(1, 2), TailRule::Left).unwrap();
    let sa = SampledArc::sample(&map, &a, 33, 30);
    let sb = SampledArc::sample(&map, &b, 33, 30);
    assert_eq!(hausdorff(&sa, &sa, 30).value, 0.0);

    let near = crate::invlim::ambient_metric(&map, &a.point_at(q(1, 5)), &b.point_at(q(2, 5)), 30);
    let d = hausdorff(&sa, &sb, 30);
    assert!(d.value > 0.0 && d.value + d.slack >= near);

    // On an arc where every projection is monotone the midpoint is
    // equidistant from both ends.
    let sf = SampledArc::sample(&map, &fold_free, 33, 30);
    let mid = SampledArc::point(&map, &fold_free.point_at(q(7, 40)), 30);
    let d = hausdorff(&sf, &mid, 30);
    let diameter = crate::invlim::ambient_metric(
        &map,
        &fold_free.point_at(q(3, 20)),
        &fold_free.point_at(q(1, 5)),
        30,
    );
    assert!(
        (d.value - diameter / 2.0).abs() <= d.slack,
        "{} vs {}",
        d.value,
        diameter / 2.0
    );
}

#[test]
fn identity_convergence_is_pointwise() {
    let map = two();
    let omega = map.omega_limit(&q(1, 2), 64, 64, 1e-9).unwrap();
    let target = c0_point(&map, 4, q(1, 5)).unwrap();
    let approach: Vec<_> = (5..=12)
        .map(|n| c0_point(&map, 4, q(1, 5) + q(1, 1 << n)).unwrap())
        .collect();
    let report = arc_convergence_suite(
        &map,
        &DisplacementMap::identity(),
        &target,
        &approach,
        &omega,
        17,
        40,
    )
    .unwrap();
    assert!(!report.folding_target);
    for (z, (d, slack)) in approach
        .iter()
        .zip(report.distances.iter().zip(&report.slack))
    {
        let exact = crate::invlim::ambient_metric(&map, z, &target, 40);
        assert!((d - exact).abs() <= *slack, "{d} vs {exact}");
    }
    assert!(report.strictly_decreasing(), "{:?}", report.distances);
}

#[test]
fn convergence_regimes() {
    let map = two();
    let omega = map.omega_limit(&q(1, 2), 64, 64, 1e-9).unwrap();

    let target = c0_point(&map, 4, q(1, 5)).unwrap();
    // From n = 5 on, z_n stays in the fold-free neighbourhood of the target
    // at level 4; once A_n stays on the rising side of the bump both ends
    // move linearly in 2^{-n}.
    let approach: Vec<_> = (5..=12)
        .map(|n| c0_point(&map, 4, q(1, 5) + q(1, 1 << n)).unwrap())
        .collect();
    let r = arc_convergence_suite(
        &map,
        &bump(2, 4, 6, (1, 1)),
        &target,
        &approach,
        &omega,
        65,
        40,
    )
    .unwrap();
    assert!(!r.folding_target);
    assert!(r.strictly_decreasing(), "{:?}", r.distances);
    for w in r.distances[3..].windows(2) {
        assert!((w[1] / w[0] - 0.5).abs() < 1e-9, "{:?}", r.distances);
    }

    let target = zero_point();
    let approach: Vec<_> = (1..=12)
        .map(|n| c0_point(&map, 0, q(1, 5) * q(1, 1 << n)).unwrap())
        .collect();
    let r = arc_convergence_suite(
        &map,
        &bump(0, 1, 2, (1, 2)),
        &target,
        &approach,
        &omega,
        65,
        40,
    )
    .unwrap();
    assert!(r.folding_target);
    assert!(r.strictly_decreasing(), "{:?}", r.distances);
    assert!(r.last().unwrap() < 1e-2, "{:?}", r.distances);
}

#[test]
fn displacement_bound_examples() {
    let map = two();
    let coarse = build_chain(&map, 3, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sample = random_c0_points(&map, &mut rng, 100);

    let none = displacement_bound_check(&map, 1, 3, &coarse, &DisplacementMap::identity(), &sample)
        .unwrap();
    assert!(none.passed() && none.max() == 0.0);

    let eps = coarse.mesh(&map, 3);
    let d = DisplacementMap::random(&mut rng, 3, 12.0, &[q(0, 1)]).unwrap();
    let d = d
        .with_bound(BigRational::from_f64(eps * 8.0 / 2.0))
        .unwrap_or(d);
    for b in -2..=2 {
        let r = displacement_bound_check(&map, b, 3, &coarse, &d, &sample).unwrap();
        assert!(r.passed(), "b = {b}: {} > {}", r.max(), r.bound);
        assert!((r.bound - (8.0 + 32.0 * eps)).abs() < 1e-12);
    }

    let fixed = displacement_bound_check(&map, 2, 3, &coarse, &d, &[zero_point()]).unwrap();
    assert_eq!(fixed.values, vec![0.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn time_slices_preserve_order(seed in 0u64..1000, t in 0i64..=64) {
        let map = two();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = DisplacementMap::random(&mut rng, 3, 16.0, &[q(0, 1)]).unwrap();
        let pts = random_c0_points(&map, &mut rng, 2);
        let (a, b) = (pts[0].c0_position(&map).unwrap(), pts[1].c0_position(&map).unwrap());
        prop_assume!(a != b);
        let t = q(t, 64);
        let ha = isotopy_eval(&map, &h, &pts[0], &t).unwrap().c0_position(&map).unwrap();
        let hb = isotopy_eval(&map, &h, &pts[1], &t).unwrap().c0_position(&map).unwrap();
        prop_assert_eq!(a < b, ha < hb);
    }
}
