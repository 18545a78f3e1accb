//! Randomised invariant suites behind `verify all`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::chains::{build_chain, refines, Chain};
use crate::error::Result;
use crate::folding::{folding_points, is_folding_point};
use crate::invlim::{
    adjacent_gap_check, c0_point, dbar_at_level, fixed_limit_point, p_points_on_arc, zero_point,
    Arc, LimitPoint, TailRule,
};
use crate::isotopy::{
    adjusted_map, arc_convergence_suite, displacement_bound_check, injectivity_check, isotopy_eval,
    DisplacementMap, Hat,
};
use crate::num::Scalar;
use crate::report::SuiteRow;
use crate::tentmap::{OmegaSet, TentMap};

/// Sizes of the randomised suites.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random points, arcs or pairs per suite.
    pub samples: usize,
    /// Random displacement maps for the isotopy suites.
    pub maps: usize,
    /// Largest chain level in the refinement grid.
    pub grid: usize,
    /// Largest `k` in the mesh sequence `C_{k,k}`.
    pub mesh_levels: usize,
    /// Depth for ω-limits and folding enumeration.
    pub depth: usize,
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            samples: 200,
            maps: 3,
            grid: 3,
            mesh_levels: 6,
            depth: 64,
            tol: 1e-9,
        }
    }
}

/// Suite rows plus the suites that could not run.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub rows: Vec<SuiteRow>,
    /// Suites skipped because `ω(1/2)` is not certified finite.
    pub skipped: Vec<&'static str>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Every suite in turn.
pub fn verify_all<S: Scalar>(map: &TentMap<S>, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let omega = map.omega_limit(&S::half(), cfg.depth, cfg.depth, cfg.tol)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    rows.extend(chain_suite(map)?);
    rows.extend(refinement_suite(map, cfg.grid)?);
    rows.extend(mesh_suite(map, cfg.mesh_levels)?);
    rows.extend(gap_suite(map, &mut rng, cfg.samples, cfg.tol));
    rows.extend(dbar_suite(map, &mut rng, cfg.samples, cfg.tol)?);
    rows.extend(shift_suite(map, &mut rng, cfg.samples, cfg.tol));
    let folding = if omega.certified_finite {
        rows.extend(folding_suite(map, &omega, cfg.depth)?);
        Some(folding_points(map, &omega, cfg.depth)?)
    } else {
        skipped.extend([
            "folding.stable_under_doubling",
            "folding.certified",
            "isotopy.folding_fixed",
        ]);
        None
    };
    let fixed: Vec<S> = folding
        .iter()
        .flatten()
        .filter_map(|x| x.c0_position(map))
        .collect();
    let maps = (0..cfg.maps)
        .map(|_| DisplacementMap::random(&mut rng, 3, 16.0, &fixed))
        .collect::<Result<Vec<_>>>()?;
    let sample = random_c0_points(map, &mut rng, cfg.samples, 6);
    rows.extend(isotopy_suite(
        map,
        folding.as_deref().unwrap_or(&[]),
        &maps,
        &sample,
    )?);
    rows.extend(displacement_suite(map, &maps, &sample)?);
    rows.extend(convergence_suite(map, &omega)?);
    rows.extend(adjusted_suite(map, cfg.grid)?);
    Ok(VerifyReport { rows, skipped })
}

fn slope_json<S: Scalar>(map: &TentMap<S>) -> String {
    map.slope().to_string()
}

/// Uniform dyadic anchor in `[0, s/2]`.
fn random_anchor<S: Scalar>(map: &TentMap<S>, rng: &mut ChaCha8Rng) -> S {
    map.critical_value().clone() * S::from_ratio(rng.gen_range(0..=1 << 16), 1 << 16)
}

/// Random points of `C_0` at levels `0..max_level`.
pub fn random_c0_points<S: Scalar>(
    map: &TentMap<S>,
    rng: &mut ChaCha8Rng,
    count: usize,
    max_level: usize,
) -> Vec<LimitPoint<S>> {
    (0..count)
        .map(|_| {
            let level = rng.gen_range(0..max_level.max(1));
            c0_point(map, level, random_anchor(map, rng)).expect("anchor in [0, s/2]")
        })
        .collect()
}

/// A random arc of `C_0` at a level in `0..max_level`.
pub fn random_c0_arc<S: Scalar>(
    map: &TentMap<S>,
    rng: &mut ChaCha8Rng,
    max_level: usize,
) -> Arc<S> {
    let level = rng.gen_range(0..max_level.max(1));
    let (a, b) = (random_anchor(map, rng), random_anchor(map, rng));
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Arc::new(map, level, lo, hi, TailRule::Left).expect("anchors in [0, s/2]")
}

/// Chain condition and cover of `[0, s/2]` for small chains.
pub fn chain_suite<S: Scalar>(map: &TentMap<S>) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    for k in 0..=2 {
        for r in 0..=2 {
            let chain = build_chain(map, k, r)?;
            let links = chain.links();
            let adjacent = links.windows(2).all(|w| w[0].intersects(&w[1]));
            let separated = links.windows(3).all(|w| !w[0].intersects(&w[2]));
            let first = &links[0];
            let last = &links[links.len() - 1];
            let covers = first.contains(&S::zero()) && last.contains(map.critical_value());
            rows.push(SuiteRow::new(
                "chain.condition",
                json!({"s": slope_json(map), "k": k, "r": r, "links": links.len()}),
                links.len() as f64,
                0.0,
                adjacent && separated && covers,
            ));
        }
    }
    Ok(rows)
}

/// `C_{q,m}` refines `C_{p,n}` for `p ≤ q ≤ grid`, `n ≤ m ≤ grid`.
pub fn refinement_suite<S: Scalar>(map: &TentMap<S>, grid: usize) -> Result<Vec<SuiteRow>> {
    let chains: Vec<Vec<Chain<S>>> = (0..=grid)
        .map(|k| (0..=grid).map(|r| build_chain(map, k, r)).collect())
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for q in 0..=grid {
        for p in 0..=q {
            for m in 0..=grid {
                for n in 0..=m {
                    let r = refines(map, &chains[q][m], &chains[p][n]);
                    let missing = r.witness.iter().filter(|w| w.is_none()).count();
                    rows.push(SuiteRow::new(
                        "chain.refines",
                        json!({"s": slope_json(map), "fine": [q, m], "coarse": [p, n]}),
                        missing as f64,
                        0.0,
                        r.refines() && r.is_total(),
                    ));
                }
            }
        }
    }
    Ok(rows)
}

/// `mesh(C_{k,k})` strictly decreasing in `k`.
pub fn mesh_suite<S: Scalar>(map: &TentMap<S>, levels: usize) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    let mut prev = f64::INFINITY;
    for k in 0..=levels {
        let mesh = build_chain(map, k, k)?.mesh(map, k);
        rows.push(SuiteRow::new(
            "chain.mesh_decreasing",
            json!({"s": slope_json(map), "k": k}),
            mesh,
            prev,
            mesh < prev,
        ));
        prev = mesh;
    }
    Ok(rows)
}

/// Adjacent p-points on random arcs are at most `s^p` apart in `d̄`.
pub fn gap_suite<S: Scalar>(
    map: &TentMap<S>,
    rng: &mut ChaCha8Rng,
    arcs: usize,
    tol: f64,
) -> Vec<SuiteRow> {
    let tol = if S::EXACT { 0.0 } else { tol };
    let arcs: Vec<Arc<S>> = (0..arcs).map(|_| random_c0_arc(map, rng, 8)).collect();
    (0..=4)
        .map(|p| {
            let checks: Vec<_> = arcs
                .iter()
                .flat_map(|a| adjacent_gap_check(map, a, p, tol))
                .collect();
            let worst = checks.iter().map(|c| c.gap).fold(0.0, f64::max);
            SuiteRow::new(
                "invlim.ppoint_gap",
                json!({"s": slope_json(map), "p": p, "pairs": checks.len()}),
                worst,
                map.slope().pow(p as u32).to_f64() + tol,
                checks.iter().all(|c| c.ok),
            )
        })
        .collect()
}

/// `d̄` of same-arc pairs is unchanged at three deeper levels.
pub fn dbar_suite<S: Scalar>(
    map: &TentMap<S>,
    rng: &mut ChaCha8Rng,
    pairs: usize,
    tol: f64,
) -> Result<Vec<SuiteRow>> {
    let mut worst = 0.0f64;
    let mut mismatches = 0;
    for _ in 0..pairs {
        let arc = random_c0_arc(map, rng, 6);
        let (x, y) = arc.endpoints();
        let base = dbar_at_level(map, &x, &y, arc.level())?;
        for extra in 1..=3 {
            let d = dbar_at_level(map, &x, &y, arc.level() + extra)?;
            let diff = (d.clone() - base.clone()).abs().to_f64();
            worst = worst.max(diff);
            if (S::EXACT && d != base) || diff > tol {
                mismatches += 1;
            }
        }
    }
    Ok(vec![SuiteRow::new(
        "invlim.dbar_level_independent",
        json!({"s": slope_json(map), "pairs": pairs, "mismatches": mismatches}),
        worst,
        if S::EXACT { 0.0 } else { tol },
        mismatches == 0,
    )])
}

/// `shift_inv ∘ shift` is the identity on 20-coordinate prefixes; the zero
/// and fixed points are fixed by `shift`.
pub fn shift_suite<S: Scalar>(
    map: &TentMap<S>,
    rng: &mut ChaCha8Rng,
    points: usize,
    tol: f64,
) -> Vec<SuiteRow> {
    let same = |a: &[S], b: &[S]| {
        a.iter().zip(b).all(|(x, y)| {
            if S::EXACT {
                x == y
            } else {
                (x.clone() - y.clone()).abs().to_f64() <= tol
            }
        })
    };
    let sample = random_c0_points(map, rng, points, 10);
    let failures = sample
        .iter()
        .filter(|x| {
            !same(
                &x.shift().shift_inv(map).coords(map, 19),
                &x.coords(map, 19),
            )
        })
        .count();
    let zero = zero_point::<S>();
    let fixed = fixed_limit_point(map);
    let fixed_ok = same(&zero.shift().coords(map, 19), &zero.coords(map, 19))
        && same(&fixed.shift().coords(map, 19), &fixed.coords(map, 19));
    vec![
        SuiteRow::new(
            "invlim.shift_round_trip",
            json!({"s": slope_json(map), "points": points}),
            failures as f64,
            0.0,
            failures == 0,
        ),
        SuiteRow::new(
            "invlim.shift_fixes_zero_and_p",
            json!({"s": slope_json(map)}),
            0.0,
            0.0,
            fixed_ok,
        ),
    ]
}

/// Folding-point enumeration is stable under doubling the path length, and
/// each enumerated point carries a membership certificate.
pub fn folding_suite<S: Scalar>(
    map: &TentMap<S>,
    omega: &OmegaSet<S>,
    depth: usize,
) -> Result<Vec<SuiteRow>> {
    let short = folding_points(map, omega, depth)?;
    let long = folding_points(map, omega, 2 * depth)?;
    let stable = short.len() == long.len()
        && short
            .iter()
            .zip(&long)
            .all(|(a, b)| a.coords(map, 2 * depth) == b.coords(map, 2 * depth));
    let certified = short
        .iter()
        .all(|x| is_folding_point(map, x, omega, 2 * depth, omega.tol).member);
    Ok(vec![
        SuiteRow::new(
            "folding.stable_under_doubling",
            json!({"s": slope_json(map), "depth": depth, "points": short.len()}),
            short.len() as f64,
            long.len() as f64,
            stable && !short.is_empty(),
        ),
        SuiteRow::new(
            "folding.certified",
            json!({"s": slope_json(map), "depth": 2 * depth}),
            short.len() as f64,
            0.0,
            certified,
        ),
    ])
}

fn time_grid<S: Scalar>(steps: i64) -> Vec<S> {
    (0..=steps).map(|i| S::from_ratio(i, steps)).collect()
}

/// Endpoint identities, folding fixity and time-slice injectivity.
pub fn isotopy_suite<S: Scalar>(
    map: &TentMap<S>,
    folding: &[LimitPoint<S>],
    maps: &[DisplacementMap<S>],
    sample: &[LimitPoint<S>],
) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    for (i, h) in maps.iter().enumerate() {
        let mut endpoint_failures = 0;
        for x in sample {
            if isotopy_eval(map, h, x, &S::zero())? != *x {
                endpoint_failures += 1;
            }
            if isotopy_eval(map, h, x, &S::one())? != h.apply(map, x) {
                endpoint_failures += 1;
            }
        }
        rows.push(SuiteRow::new(
            "isotopy.endpoints",
            json!({"s": slope_json(map), "map": i, "points": sample.len()}),
            endpoint_failures as f64,
            0.0,
            endpoint_failures == 0,
        ));
        let mut moved = 0;
        for z in folding {
            for t in time_grid::<S>(4) {
                if isotopy_eval(map, h, z, &t)? != *z {
                    moved += 1;
                }
            }
        }
        if folding.is_empty() {
            continue;
        }
        rows.push(SuiteRow::new(
            "isotopy.folding_fixed",
            json!({"s": slope_json(map), "map": i, "points": folding.len()}),
            moved as f64,
            0.0,
            moved == 0,
        ));
        for t in time_grid::<S>(10) {
            let report = injectivity_check(map, h, &t, sample)?;
            rows.push(SuiteRow::new(
                "isotopy.injective",
                json!({"s": slope_json(map), "map": i, "t": t.to_string(), "pairs": report.checked}),
                report.violations.len() as f64,
                0.0,
                report.passed(),
            ));
        }
    }
    Ok(rows)
}

/// `d̄(shift^{−b}(z), h(z)) ≤ s^q + 4·mesh·s^q` with `q = 3`, `b ∈ {−2, …, 2}`.
pub fn displacement_suite<S: Scalar>(
    map: &TentMap<S>,
    maps: &[DisplacementMap<S>],
    sample: &[LimitPoint<S>],
) -> Result<Vec<SuiteRow>> {
    let q = 3;
    let coarse = build_chain(map, q, q)?;
    let mut rows = Vec::new();
    for (i, h) in maps.iter().enumerate() {
        for b in -2..=2 {
            let r = displacement_bound_check(map, b, q, &coarse, h, sample)?;
            rows.push(SuiteRow::new(
                "isotopy.displacement_bound",
                json!({"s": slope_json(map), "map": i, "q": q, "b": b}),
                r.max(),
                r.bound,
                r.passed(),
            ));
        }
    }
    Ok(rows)
}

/// The two convergence regimes: `A_n → [z, h(z)]` for a non-folding target
/// and `A_n → {z}` at the endpoint of `C_0`.
pub fn convergence_suite<S: Scalar>(
    map: &TentMap<S>,
    omega: &OmegaSet<S>,
) -> Result<Vec<SuiteRow>> {
    let mut rows = Vec::new();
    for (regime, target, approach, h) in convergence_fixtures(map)? {
        let r = arc_convergence_suite(map, &h, &target, &approach, omega, 65, 40)?;
        rows.push(SuiteRow::new(
            "isotopy.arc_convergence",
            json!({"s": slope_json(map), "regime": regime, "folding_target": r.folding_target, "n": approach.len()}),
            r.last().unwrap_or(f64::NAN),
            r.distances.first().copied().unwrap_or(f64::NAN),
            r.strictly_decreasing(),
        ));
    }
    Ok(rows)
}

type Fixture<S> = (
    &'static str,
    LimitPoint<S>,
    Vec<LimitPoint<S>>,
    DisplacementMap<S>,
);

/// Convergence fixtures with `n` running up to 12.
///
/// Non-folding: `z_n = (4, 1/5 + 2^{−n})` from the first `n` for which the
/// arc from the target to `z_n` has no interior fold, with a bump on `[2, 6]`.
/// Folding: `z_n = (0, 2^{−n}/5)` towards the zero point, with a bump starting at `0`.
pub fn convergence_fixtures<S: Scalar>(map: &TentMap<S>) -> Result<Vec<Fixture<S>>> {
    let fifth = S::from_ratio(1, 5);
    let dyadic = |n: usize| S::from_ratio(1, 1i64 << n);
    let target = c0_point(map, 4, fifth.clone())?;
    let start = (1..=12)
        .find(|&n| {
            let hi = fifth.clone() + dyadic(n);
            hi.tle(map.critical_value())
                && Arc::new(map, 4, fifth.clone(), hi, TailRule::Left)
                    .map(|a| a.minimal_injective_level(map) == 0)
                    .unwrap_or(false)
        })
        .unwrap_or(12);
    let approach = (start..=12)
        .map(|n| c0_point(map, 4, fifth.clone() + dyadic(n)))
        .collect::<Result<Vec<_>>>()?;
    let bump = |a: i64, p: i64, e: i64, h: S| {
        DisplacementMap::new(
            vec![Hat {
                start: S::from_ratio(a, 1),
                peak: S::from_ratio(p, 1),
                end: S::from_ratio(e, 1),
                height: h,
            }],
            &[S::zero()],
        )
    };
    let far = bump(2, 4, 6, S::one())?;
    let near = bump(0, 1, 2, S::half())?;
    let towards_zero = (1..=12)
        .map(|n| c0_point(map, 0, fifth.clone() * dyadic(n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![
        ("non_folding", target, approach, far),
        ("folding", zero_point(), towards_zero, near),
    ])
}

/// `h_{q,p} = shift^{−b}` on the q-points of `C_0` for `p ≤ q ≤ grid` and
/// `−2 ≤ b ≤ q − p`, with chains `C_{q,2}` and `C_{p,2}`.
pub fn adjusted_suite<S: Scalar>(map: &TentMap<S>, grid: usize) -> Result<Vec<SuiteRow>> {
    let r = 2;
    let mut rows = Vec::new();
    for q in 0..=grid {
        let fine = build_chain(map, q, r)?;
        let arc = Arc::new(
            map,
            q + 3,
            S::zero(),
            map.critical_value().clone(),
            TailRule::Left,
        )?;
        let points: Vec<LimitPoint<S>> = p_points_on_arc(map, &arc, q)
            .all()
            .into_iter()
            .map(|pt| arc.point_at(pt.anchor))
            .collect();
        for p in 0..=q {
            let coarse = build_chain(map, p, r)?;
            let certified = refines(map, &fine, &coarse).is_total();
            for b in -2..=(q - p) as i64 {
                let mut mismatches = 0;
                for x in &points {
                    let ok = adjusted_map(map, q, p, &fine, &coarse, b, x)
                        .map(|y| same_position(map, &y, &x.shift_by(map, -b)))
                        .unwrap_or(false);
                    if !ok {
                        mismatches += 1;
                    }
                }
                rows.push(SuiteRow::new(
                    "isotopy.adjusted_map",
                    json!({"s": slope_json(map), "q": q, "p": p, "b": b, "r": r, "points": points.len()}),
                    mismatches as f64,
                    0.0,
                    certified && mismatches == 0,
                ));
            }
        }
    }
    Ok(rows)
}

fn same_position<S: Scalar>(map: &TentMap<S>, x: &LimitPoint<S>, y: &LimitPoint<S>) -> bool {
    match (x.c0_position(map), y.c0_position(map)) {
        (Some(a), Some(b)) => a.teq(&b),
        _ => false,
    }
}
