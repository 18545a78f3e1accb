use super::*;
use crate::num::Approx;
use num_rational::BigRational;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::from_ratio(n, d)
}

fn tent(n: i64, d: i64) -> TentMap<BigRational> {
    TentMap::new(q(n, d)).unwrap()
}

fn left(map: &TentMap<BigRational>, level: usize, u: BigRational) -> LimitPoint<BigRational> {
    c0_point(map, level, u).unwrap()
}

fn it(prefix: &str, cycle: &str) -> TailRule {
    text::parse_tail(&format!("IT:{prefix}({cycle})")).unwrap()
}

/// Coordinates of a C_0 point from first principles: `π_n = T^{N−n}(u)` for
/// `n ≤ N` and `u/s^{n−N}` beyond, each computed independently.
fn left_coords_oracle(
    s: &BigRational,
    level: usize,
    u: &BigRational,
    count: usize,
) -> Vec<BigRational> {
    let t = |x: &BigRational| {
        let y = if *x <= q(1, 2) {
            x.clone()
        } else {
            q(1, 1) - x.clone()
        };
        s.clone() * y
    };
    (0..count)
        .map(|n| {
            if n <= level {
                (0..level - n).fold(u.clone(), |v, _| t(&v))
            } else {
                (0..n - level).fold(u.clone(), |v, _| v / s.clone())
            }
        })
        .collect()
}

#[test]
fn projection_examples() {
    let map = tent(2, 1);
    assert_eq!(zero_point::<BigRational>().project(&map, 17), q(0, 1));
    let x = left(&map, 2, q(1, 4));
    assert_eq!(x.project(&map, 0), q(1, 1));
    assert_eq!(x.project(&map, 4), q(1, 16));
}

#[test]
fn c0_point_examples() {
    let map = tent(2, 1);
    let x = left(&map, 3, q(1, 4));
    assert_eq!(
        x.coords(&map, 4),
        vec![q(0, 1), q(1, 1), q(1, 2), q(1, 4), q(1, 8)]
    );
    assert_eq!(left(&map, 0, q(0, 1)), zero_point());

    let map = tent(3, 2);
    let x = left(&map, 1, q(3, 4));
    assert_eq!(x.project(&map, 1), q(3, 4));
    assert_eq!(x.project(&map, 0), map.apply(&q(3, 4)));
    assert!(c0_point(&map, 1, q(4, 5)).is_err());
}

#[test]
fn shift_examples() {
    let map = tent(2, 1);
    let zero = zero_point::<BigRational>();
    assert_eq!(zero.shift().coords(&map, 10), zero.coords(&map, 10));
    assert_eq!(zero.shift_inv(&map).coords(&map, 10), zero.coords(&map, 10));

    let x = left(&map, 2, q(1, 4));
    let y = x.shift();
    assert_eq!((y.level(), y.anchor().clone()), (3, q(1, 4)));
    let old = left_coords_oracle(&q(2, 1), 2, &q(1, 4), 10);
    let mut expected = vec![map.apply(&old[0])];
    expected.extend(old[..9].iter().cloned());
    assert_eq!(y.coords(&map, 9), expected);
    assert_eq!(y.shift_inv(&map), x);

    let map = tent(3, 2);
    let fixed = fixed_limit_point(&map);
    assert_eq!(fixed.shift().coords(&map, 10), fixed.coords(&map, 10));
    assert_eq!(
        fixed.shift_inv(&map).coords(&map, 10),
        fixed.coords(&map, 10)
    );
}

#[test]
fn shift_inv_at_level_zero_reanchors() {
    let map = tent(2, 1);
    let x = left(&map, 0, q(3, 4));
    let y = x.shift_inv(&map);
    assert_eq!(y.coords(&map, 8), x.coords(&map, 9)[1..].to_vec());
    assert_eq!(y.shift().coords(&map, 12), x.coords(&map, 12));
}

#[test]
fn dbar_examples() {
    let map = tent(2, 1);
    let x = left(&map, 3, q(1, 10));
    let y = left(&map, 3, q(1, 5));
    // Independent route: both coordinates at level 6 are u/8.
    let d6 = (x.project(&map, 6) - y.project(&map, 6)).abs() * q(2, 1).pow(6);
    assert_eq!(d6, q(4, 5));
    assert_eq!(dbar(&map, &x, &y).unwrap(), q(4, 5));
    assert_eq!(dbar_at_level(&map, &x, &y, 4).unwrap(), q(4, 5));
    assert_eq!(dbar(&map, &x, &x).unwrap(), q(0, 1));
}

#[test]
fn dbar_needs_a_shared_tail() {
    let map = tent(3, 2);
    let x = left(&map, 0, q(1, 2));
    let p = fixed_limit_point(&map);
    assert!(matches!(
        dbar(&map, &x, &p),
        Err(Error::NotSameComposant(_))
    ));
}

#[test]
fn dbar_on_the_fixed_point_composant() {
    let map = tent(3, 2);
    let p = fixed_limit_point(&map);
    let x = LimitPoint::new(&map, 0, q(1, 2), it("", "R")).unwrap();
    assert_eq!(dbar(&map, &x, &p).unwrap(), q(1, 10));
    for level in 1..6 {
        assert_eq!(dbar_at_level(&map, &x, &p, level).unwrap(), q(1, 10));
    }
    // Independent check at level 5 by projection.
    let d5 = (x.project(&map, 5) - p.project(&map, 5)).abs() * q(3, 2).pow(5);
    assert_eq!(d5, q(1, 10));
}

#[test]
fn tail_validation() {
    let map = tent(3, 2);
    // R-preimage of 1/4 is 5/6 > 3/4.
    assert!(LimitPoint::new(&map, 0, q(1, 4), it("", "R")).is_err());
    assert!(LimitPoint::new(&map, 0, q(1, 2), it("", "R")).is_ok());
    assert!(LimitPoint::new(&map, 0, q(1, 2), TailRule::Fixed).is_err());
    assert!(LimitPoint::new(&map, 0, q(4, 5), TailRule::Left).is_err());
    assert!(TailRule::itinerary(vec![Symbol::L], vec![]).is_err());
}

#[test]
fn canonical_words() {
    use Symbol::{L, R};
    assert_eq!(it("LRR", "LR").canonical_word(), (vec![L, R], vec![R, L]));
    assert_eq!(it("", "LRLR").canonical_word(), (vec![], vec![L, R]));
    assert_eq!(it("LL", "L").normalized(), TailRule::Left);
    assert_eq!(
        it("", "R").canonical_word(),
        TailRule::Fixed.canonical_word()
    );
    assert!(it("RRL", "L").is_eventually_left());
    assert_eq!(it("RRL", "L").preperiod(), 2);
}

#[test]
fn eventually_left_points_are_on_c0() {
    let map = tent(2, 1);
    let x = LimitPoint::new(&map, 1, q(1, 2), it("R", "L")).unwrap();
    // Coordinate 2 is 1 − 1/4 = 3/4, then 3/8, 3/16, ...
    assert_eq!(x.project(&map, 2), q(3, 4));
    assert_eq!(x.c0_position(&map), Some(q(3, 1)));
    let y = c0_at_position(&map, &q(3, 1), 0).unwrap();
    assert_eq!(y.coords(&map, 12), x.coords(&map, 12));
}

#[test]
fn c0_position_round_trip() {
    let map = tent(3, 2);
    for (level, u) in [(0, q(1, 3)), (4, q(3, 4)), (7, q(1, 9)), (2, q(0, 1))] {
        let x = left(&map, level, u);
        let tau = x.c0_position(&map).unwrap();
        let y = c0_at_position(&map, &tau, level).unwrap();
        assert_eq!(y, x.reanchor(&map, y.level()));
        let z = c0_at_position(&map, &tau, 0).unwrap();
        assert_eq!(dbar(&map, &x, &z).unwrap(), q(0, 1));
    }
    assert!(c0_at_position(&map, &q(-1, 2), 0).is_err());
}

#[test]
fn composant_order_follows_position() {
    let map = tent(2, 1);
    let a = left(&map, 3, q(1, 2));
    let b = left(&map, 1, q(1, 1));
    let c = left(&map, 5, q(1, 8));
    assert_eq!(composant_order(&map, &a, &b).unwrap(), Ordering::Greater);
    assert_eq!(composant_order(&map, &b, &c).unwrap(), Ordering::Less);
    assert_eq!(
        composant_order(&map, &c, &c.reanchor(&map, 9)).unwrap(),
        Ordering::Equal
    );
    let p = fixed_limit_point(&map);
    assert!(composant_order(&map, &a, &p).is_err());
}

#[test]
fn arc_between_examples() {
    let map = tent(2, 1);
    let x = left(&map, 3, q(1, 10));
    let arc = arc_between(&map, &x, &x).unwrap();
    assert_eq!((arc.lo().clone(), arc.hi().clone()), (q(1, 10), q(1, 10)));
    assert_eq!(arc.length(&map), q(0, 1));

    let y = left(&map, 3, q(2, 5));
    let arc = arc_between(&map, &y, &x).unwrap();
    assert_eq!(
        arc,
        Arc::new(&map, 3, q(1, 10), q(2, 5), TailRule::Left).unwrap()
    );
    assert_eq!(arc.length(&map), q(12, 5));

    let x2 = left(&map, 2, q(1, 10));
    let arc = arc_between(&map, &x2, &y).unwrap();
    assert_eq!(
        arc,
        Arc::new(&map, 3, q(1, 20), q(2, 5), TailRule::Left).unwrap()
    );
}

#[test]
fn ambient_metric_examples() {
    let map = tent(2, 1);
    let zero = zero_point::<BigRational>();
    assert_eq!(ambient_metric(&map, &zero, &zero, 20), 0.0);
    let x = left(&map, 3, q(1, 4));
    let y = left(&map, 3, q(1, 8));
    // Direct evaluation of the full series through 60 coordinates.
    let cx = left_coords_oracle(&q(2, 1), 3, &q(1, 4), 60);
    let cy = left_coords_oracle(&q(2, 1), 3, &q(1, 8), 60);
    let series: f64 = cx
        .iter()
        .zip(&cy)
        .enumerate()
        .map(|(i, (a, b))| 0.5f64.powi(i as i32) * (a - b).abs().to_f64())
        .sum();
    let m = ambient_metric(&map, &x, &y, 5);
    assert!(m >= series && m - series < 1e-12, "{m} vs {series}");
    let p = fixed_limit_point(&map);
    let loose = ambient_metric(&map, &x, &p, 10);
    assert!(loose >= 0.5f64.powi(10));
}

#[test]
fn p_point_examples() {
    let map = tent(2, 1);
    let arc = Arc::new(&map, 3, q(1, 5), q(3, 10), TailRule::Left).unwrap();
    let pts = p_points_on_arc(&map, &arc, 0);
    // Oracle: scan T^{-(3-n)}(1/2) for n = 1, 2, 3 inside the arc.
    let mut oracle: Vec<(BigRational, usize)> = Vec::new();
    for n in 1..=3 {
        for u in map.preimages(&q(1, 2), 3 - n).unwrap() {
            if q(1, 5) <= u && u <= q(3, 10) {
                oracle.push((u, n));
            }
        }
    }
    assert_eq!(oracle, vec![(q(1, 4), 2)]);
    let got: Vec<_> = pts
        .head
        .iter()
        .map(|p| (p.anchor.clone(), p.fold_level))
        .collect();
    assert_eq!(got, oracle);
    assert!(pts.tail.is_empty());
    assert!(p_points_on_arc(&map, &arc, 2).all().is_empty());
    assert!(p_points_on_arc(&map, &arc, 5).all().is_empty());
}

#[test]
fn tail_p_points_sit_at_the_top_anchor() {
    let map = tent(2, 1);
    let arc = Arc::new(&map, 2, q(3, 4), q(1, 1), TailRule::Left).unwrap();
    let pts = p_points_on_arc(&map, &arc, 2);
    assert!(pts.head.is_empty());
    assert_eq!(
        pts.tail,
        vec![PPoint {
            anchor: q(1, 1),
            fold_level: 3
        }]
    );
}

#[test]
fn adjacent_gaps_for_slope_two_are_tight() {
    let map = tent(2, 1);
    let arc = Arc::new(&map, 2, q(0, 1), q(1, 1), TailRule::Left).unwrap();
    let checks = adjacent_gap_check(&map, &arc, 1, 1e-12);
    // 1-points at level 2: T^j(u) = 1/2 for j = 0 only, i.e. u = 1/2; tail
    // point at u = 1.
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0].gap, 2.0);
    assert_eq!(checks[0].bound, 2.0);
    assert!(checks[0].ok);
}

#[test]
fn minimal_injective_level_examples() {
    let map = tent(2, 1);
    let low = Arc::new(&map, 3, q(1, 10), q(1, 5), TailRule::Left).unwrap();
    // T²(1/8) = 1/2 folds π_1; π_0 = T³ folds there too.
    assert_eq!(low.minimal_injective_level(&map), 1);
    let folded = Arc::new(&map, 3, q(1, 5), q(3, 10), TailRule::Left).unwrap();
    // π_2 = T(u) folds at u = 1/4, so π_2 is the first injective projection.
    assert_eq!(folded.minimal_injective_level(&map), 2);
    let whole = Arc::new(&map, 3, q(0, 1), q(1, 1), TailRule::Left).unwrap();
    assert_eq!(whole.minimal_injective_level(&map), 3);
}

#[test]
fn text_round_trip() {
    let map = tent(3, 2);
    let points = vec![
        left(&map, 3, q(1, 7)),
        fixed_limit_point(&map),
        LimitPoint::new(&map, 2, q(3, 4), it("L", "R")).unwrap(),
    ];
    for p in points {
        let line = p.to_string();
        assert_eq!(parse_point(&map, &line).unwrap(), p, "{line}");
    }
    let arc = Arc::new(&map, 4, q(1, 10), q(2, 5), TailRule::Left).unwrap();
    assert_eq!(arc.to_string(), "arc N=4 a=1/10 b=2/5 tail=L");
    assert_eq!(parse_arc(&map, &arc.to_string()).unwrap(), arc);
    assert_eq!(left(&map, 3, q(1, 4)).to_string(), "point N=3 u=1/4 tail=L");
    assert!(parse_point(&map, "point N=1 u=1/4").is_err());
    assert!(parse_point(&map, "point N=x u=1/4 tail=L").is_err());
    assert!(parse_point(&map, "point N=1 u=1/4 tail=IT:LX(L)").is_err());
    assert!(parse_point(&map, "arc N=1 u=1/4 tail=L").is_err());
}

#[test]
fn float_text_round_trip_is_bit_exact() {
    let map = TentMap::new(Approx::from_f64(std::f64::consts::SQRT_2)).unwrap();
    let p = LimitPoint::new(&map, 5, Approx::from_f64(0.123456789012345), TailRule::Left).unwrap();
    let back = parse_point(&map, &p.to_string()).unwrap();
    assert_eq!(
        back.anchor().value().to_bits(),
        p.anchor().value().to_bits()
    );
}

#[test]
fn float_mode_points_track_error() {
    let map = TentMap::new(Approx::from_f64(std::f64::consts::SQRT_2)).unwrap();
    let x = LimitPoint::new(&map, 10, Approx::from_f64(0.3), TailRule::Left).unwrap();
    let coords = x.coords(&map, 20);
    for n in 0..20 {
        let lhs = map.apply(&coords[n + 1]);
        assert!(lhs.teq(&coords[n]), "n={n}: {lhs:?} vs {:?}", coords[n]);
    }
}

fn slope() -> impl Strategy<Value = BigRational> {
    prop_oneof![
        Just(q(2, 1)),
        Just(q(3, 2)),
        Just(q(8, 5)),
        Just(q(17, 10)),
        Just(q(99, 70))
    ]
}

fn symbol_word(max: usize) -> impl Strategy<Value = Vec<Symbol>> {
    proptest::collection::vec(prop_oneof![Just(Symbol::L), Just(Symbol::R)], 0..=max)
}

fn tail_rule() -> impl Strategy<Value = TailRule> {
    prop_oneof![
        3 => Just(TailRule::Left),
        1 => (symbol_word(3), Just(vec![Symbol::L])).prop_map(|(p, c)| TailRule::Itinerary { prefix: p, cycle: c }),
        1 => (symbol_word(2), Just(vec![Symbol::R])).prop_map(|(p, c)| TailRule::Itinerary { prefix: p, cycle: c }),
        1 => (symbol_word(2), proptest::collection::vec(prop_oneof![Just(Symbol::L), Just(Symbol::R)], 1..=3))
            .prop_map(|(p, c)| TailRule::Itinerary { prefix: p, cycle: c }),
    ]
}

/// A random valid point; the anchor is `k/1024` of the critical value.
fn point() -> impl Strategy<Value = (BigRational, LimitPoint<BigRational>)> {
    (slope(), 0usize..8, 0i64..=1024, tail_rule()).prop_filter_map(
        "invalid tail",
        |(s, level, k, tail)| {
            let map = TentMap::new(s.clone()).unwrap();
            let u = map.critical_value().clone() * q(k, 1024);
            LimitPoint::new(&map, level, u, tail).ok().map(|p| (s, p))
        },
    )
}

proptest! {
    #[test]
    fn coordinates_are_consistent((s, x) in point()) {
        let map = TentMap::new(s).unwrap();
        let coords = x.coords(&map, 20);
        for n in 0..20 {
            prop_assert_eq!(map.apply(&coords[n + 1]), coords[n].clone());
            prop_assert_eq!(x.project(&map, n), coords[n].clone());
            prop_assert!(coords[n] >= q(0, 1) && coords[n] <= *map.critical_value());
        }
    }

    #[test]
    fn reanchoring_preserves_the_point((s, x) in point(), extra in 0usize..6) {
        let map = TentMap::new(s).unwrap();
        let y = x.reanchor(&map, x.level() + extra);
        prop_assert_eq!(y.coords(&map, 16), x.coords(&map, 16));
    }

    #[test]
    fn dbar_is_level_independent(
        s in slope(), level in 0usize..6, a in 0i64..=1024, b in 0i64..=1024, extra in 1usize..6,
    ) {
        let map = TentMap::new(s.clone()).unwrap();
        let x = c0_point(&map, level, map.critical_value().clone() * q(a, 1024)).unwrap();
        let y = c0_point(&map, level, map.critical_value().clone() * q(b, 1024)).unwrap();
        let base = dbar(&map, &x, &y).unwrap();
        let m = level + extra;
        // Independent route: project both points to level m.
        let projected = s.pow(m as i32) * (x.project(&map, m) - y.project(&map, m)).abs();
        prop_assert_eq!(base, projected);
    }

    #[test]
    fn dbar_is_a_metric_on_c0(
        s in slope(),
        pts in proptest::collection::vec((0usize..6, 0i64..=512), 3),
    ) {
        let map = TentMap::new(s).unwrap();
        let pts: Vec<_> = pts
            .into_iter()
            .map(|(l, k)| c0_point(&map, l, map.critical_value().clone() * q(k, 512)).unwrap())
            .collect();
        let d = |i: usize, j: usize| dbar(&map, &pts[i], &pts[j]).unwrap();
        prop_assert_eq!(d(0, 1), d(1, 0));
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2));
        prop_assert!(d(0, 0) == q(0, 1));
    }

    #[test]
    fn p_point_sets_shrink_with_p(s in slope(), level in 1usize..8, a in 0i64..=256, w in 0i64..=256, p in 0usize..6) {
        let map = TentMap::new(s).unwrap();
        let top = map.critical_value().clone();
        let lo = top.clone() * q(a, 512);
        let hi = lo.clone() + top * q(w, 512);
        let arc = Arc::new(&map, level, lo, hi, TailRule::Left).unwrap();
        let coarse = p_points_on_arc(&map, &arc, p).all();
        let fine = p_points_on_arc(&map, &arc, p + 1).all();
        for f in fine {
            prop_assert!(coarse.iter().any(|c| c.anchor == f.anchor));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn shift_and_inverse_cancel((s, x) in point()) {
        let map = TentMap::new(s).unwrap();
        let reference = x.coords(&map, 20);
        prop_assert_eq!(x.shift_inv(&map).shift().coords(&map, 20), reference.clone());
        prop_assert_eq!(x.shift().shift_inv(&map).coords(&map, 20), reference);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn adjacent_p_point_gaps_respect_the_bound(
        s in slope(), a in 0i64..=1024, b in 0i64..=1024, p in 1usize..4,
    ) {
        let map = TentMap::new(s).unwrap();
        let top = map.critical_value().clone();
        let (lo, hi) = (top.clone() * q(a.min(b), 1024), top * q(a.max(b), 1024));
        let arc = Arc::new(&map, 6, lo, hi, TailRule::Left).unwrap();
        for check in adjacent_gap_check(&map, &arc, p, 1e-12) {
            prop_assert!(check.injective);
            prop_assert!(check.ok, "gap {} above bound {}", check.gap, check.bound);
        }
    }
}
