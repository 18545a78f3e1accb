//! Tent-map dynamics on `[0, 1]`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::num::{Approx, Scalar};

/// Slack allowed on the admissible slope range in float mode.
pub const SLOPE_TOL: f64 = 1e-12;

/// `x ↦ s·min(x, 1 − x)` with slope `s ∈ [√2, 2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TentMap<S> {
    slope: S,
    critical_value: S,
    fixed_point: S,
}

impl<S: Scalar> TentMap<S> {
    pub fn new(slope: S) -> Result<Self> {
        let admissible = if S::EXACT {
            let two = S::from_ratio(2, 1);
            slope.clone() * slope.clone() >= two && slope <= two
        } else {
            let s = slope.to_f64();
            let slack = SLOPE_TOL + slope.error_bound();
            s >= std::f64::consts::SQRT_2 - slack && s <= 2.0 + slack
        };
        if !admissible {
            return Err(Error::InadmissibleSlope(slope.to_string()));
        }
        let critical_value = slope.clone() / S::from_ratio(2, 1);
        let fixed_point = slope.clone() / (slope.clone() + S::one());
        Ok(TentMap {
            slope,
            critical_value,
            fixed_point,
        })
    }

    /// The same map in tracked-error floating point.
    pub fn to_approx(&self) -> TentMap<Approx> {
        TentMap {
            slope: self.slope.to_approx(),
            critical_value: self.critical_value.to_approx(),
            fixed_point: self.fixed_point.to_approx(),
        }
    }

    pub fn slope(&self) -> &S {
        &self.slope
    }

    /// `T(1/2) = s/2`, the top of the core.
    pub fn critical_value(&self) -> &S {
        &self.critical_value
    }

    /// The interior fixed point `s/(s+1)`.
    pub fn fixed_point(&self) -> &S {
        &self.fixed_point
    }

    /// `T²(1/2)`, the bottom of the core `[T²(1/2), T(1/2)]`.
    pub fn core_floor(&self) -> S {
        self.apply(&self.critical_value)
    }

    /// True for the end points `s = √2` and `s = 2` of the admissible range.
    pub fn is_boundary(&self) -> bool {
        let two = S::from_ratio(2, 1);
        if S::EXACT {
            self.slope == two
        } else {
            let s = self.slope.to_f64();
            let slack = SLOPE_TOL + self.slope.error_bound();
            (s - 2.0).abs() <= slack || (s - std::f64::consts::SQRT_2).abs() <= slack
        }
    }

    /// Unchecked evaluation.
    pub fn apply(&self, x: &S) -> S {
        if *x <= S::half() {
            self.slope.clone() * x.clone()
        } else {
            self.slope.clone() * (S::one() - x.clone())
        }
    }

    pub fn apply_n(&self, x: &S, n: usize) -> S {
        let mut v = x.clone();
        for _ in 0..n {
            v = self.apply(&v);
        }
        v
    }

    pub fn eval(&self, x: &S) -> Result<S> {
        if x.tlt(&S::zero()) || S::one().tlt(x) {
            return Err(Error::Domain {
                value: x.to_string(),
                domain: "[0, 1]".into(),
            });
        }
        Ok(self.apply(x))
    }

    /// `[x, T(x), …, Tⁿ(x)]`.
    pub fn orbit(&self, x: &S, n: usize) -> Result<Vec<S>> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(x.clone());
        let mut v = x.clone();
        for _ in 0..n {
            v = self.eval(&v)?;
            out.push(v.clone());
        }
        Ok(out)
    }

    fn check_core(&self, y: &S) -> Result<()> {
        if y.tlt(&S::zero()) || self.critical_value.tlt(y) {
            return Err(Error::Domain {
                value: y.to_string(),
                domain: format!("[0, {}]", self.critical_value),
            });
        }
        Ok(())
    }

    /// One step of branch inversion: the preimages of `v` in `[0, 1]`.
    fn invert(&self, v: &S) -> Vec<S> {
        match v.tcmp(&self.critical_value) {
            Ordering::Greater => Vec::new(),
            Ordering::Equal => vec![S::half()],
            Ordering::Less => {
                let left = v.clone() / self.slope.clone();
                let right = S::one() - left.clone();
                vec![left, right]
            }
        }
    }

    /// The sorted set `T^{-j}(y)` in `[0, 1]`.
    ///
    /// Intermediate preimages above `s/2` have no further preimages and drop
    /// out; the final level may contain points above `s/2`.
    pub fn preimages(&self, y: &S, j: usize) -> Result<Vec<S>> {
        self.check_core(y)?;
        let mut level = vec![y.clone()];
        for _ in 0..j {
            let mut next: Vec<S> = level.iter().flat_map(|v| self.invert(v)).collect();
            sort_dedup(&mut next);
            level = next;
        }
        Ok(level)
    }

    /// Itinerary of the critical value: symbol `i` describes `T^i(1/2)`.
    pub fn kneading(&self, n: usize) -> String {
        let half = S::half();
        let mut v = half.clone();
        let mut out = String::with_capacity(n);
        for _ in 0..n {
            v = self.apply(&v);
            out.push(match v.tcmp(&half) {
                Ordering::Less => 'L',
                Ordering::Equal => 'C',
                Ordering::Greater => 'R',
            });
        }
        out
    }

    /// Minimum distance of the critical orbit `T^i(1/2)`, `1 ≤ i ≤ depth`, to
    /// the critical point.
    pub fn nonrecurrence(&self, depth: usize, tol: f64) -> Nonrecurrence {
        let half = S::half();
        let mut v = half.clone();
        let mut gap = f64::INFINITY;
        let mut closest = 0;
        for i in 1..=depth {
            v = self.apply(&v);
            let d = (v.clone() - half.clone()).abs().to_f64();
            if d < gap {
                gap = d;
                closest = i;
            }
        }
        Nonrecurrence {
            nonrecurrent: gap > tol,
            gap,
            depth,
            closest_index: closest,
        }
    }

    /// Approximates `ω(x)` from the orbit segment `T^i(x)`, `burn ≤ i ≤ burn + depth`.
    ///
    /// An orbit that revisits a value (exactly, or within its tracked error in
    /// float mode) is eventually periodic and its cycle is returned with a
    /// finiteness certificate. Otherwise the segment is clustered at `tol` and
    /// the set is certified finite when the cluster count is unchanged after
    /// doubling the depth. Float iteration stops early once the accumulated
    /// error exceeds `tol`.
    pub fn omega_limit(&self, x: &S, burn: usize, depth: usize, tol: f64) -> Result<OmegaSet<S>> {
        if x.tlt(&S::zero()) || S::one().tlt(x) {
            return Err(Error::Domain {
                value: x.to_string(),
                domain: "[0, 1]".into(),
            });
        }
        let burn = burn.max(1);
        let depth = depth.max(1);
        let horizon = burn + 2 * depth;
        let mut orbit = vec![x.clone()];
        let mut approx = vec![x.to_f64()];
        while orbit.len() <= horizon {
            let next = self.apply(orbit.last().expect("nonempty"));
            if next.error_bound() > tol {
                break;
            }
            let f = next.to_f64();
            let slack = next.error_bound() * 2.0 + 1e-300;
            let hit = approx
                .iter()
                .enumerate()
                .filter(|(_, &g)| (g - f).abs() <= slack.max(tol))
                .map(|(i, _)| i)
                .find(|&i| orbit[i].teq(&next));
            if let Some(start) = hit {
                let period = orbit.len() - start;
                let mut points = orbit[start..].to_vec();
                cluster(&mut points, tol);
                return Ok(OmegaSet {
                    points,
                    depth: orbit.len(),
                    tol,
                    certified_finite: true,
                    cycle: Some(Cycle {
                        preperiod: start,
                        period,
                    }),
                });
            }
            orbit.push(next);
            approx.push(f);
        }
        let reached = orbit.len() - 1;
        let start = burn.min(reached);
        let mut short = orbit[start..=(burn + depth).min(reached)].to_vec();
        let mut long = orbit[start..].to_vec();
        cluster(&mut short, tol);
        cluster(&mut long, tol);
        let complete = reached >= horizon;
        Ok(OmegaSet {
            certified_finite: complete && short.len() == long.len(),
            points: long,
            depth: reached,
            tol,
            cycle: None,
        })
    }

    /// Splits `[a, b]` into maximal pieces on which `Tⁿ` is monotone.
    ///
    /// The breakpoints are exactly the `u ∈ (a, b)` with `T^j(u) = 1/2` for some
    /// `j < n`; they are reported (with minimal `j`) together with `a` or `b`
    /// when those hit the critical point.
    pub fn laps(&self, a: &S, b: &S, n: usize) -> Laps<S> {
        let half = S::half();
        let mut laps = vec![Lap {
            lo: a.clone(),
            hi: b.clone(),
            img_lo: a.clone(),
            img_hi: b.clone(),
        }];
        let mut folds = Vec::new();
        let mut a_hit = false;
        let mut b_hit = false;
        for step in 0..n {
            let mut next = Vec::with_capacity(laps.len() + 1);
            let count = laps.len();
            for (idx, lap) in laps.into_iter().enumerate() {
                if idx == 0 && !a_hit && lap.img_lo.teq(&half) {
                    a_hit = true;
                    folds.push(Fold {
                        anchor: lap.lo.clone(),
                        steps: step,
                    });
                }
                if idx + 1 == count && !b_hit && lap.img_hi.teq(&half) {
                    b_hit = true;
                    if !(a_hit && lap.lo.teq(&lap.hi) && count == 1) {
                        folds.push(Fold {
                            anchor: lap.hi.clone(),
                            steps: step,
                        });
                    }
                }
                let (min, max) = if lap.img_lo <= lap.img_hi {
                    (&lap.img_lo, &lap.img_hi)
                } else {
                    (&lap.img_hi, &lap.img_lo)
                };
                if min.tlt(&half) && half.tlt(max) {
                    let cut = lap.inverse(&half);
                    folds.push(Fold {
                        anchor: cut.clone(),
                        steps: step,
                    });
                    next.push(Lap {
                        lo: lap.lo.clone(),
                        hi: cut.clone(),
                        img_lo: lap.img_lo.clone(),
                        img_hi: half.clone(),
                    });
                    next.push(Lap {
                        lo: cut,
                        hi: lap.hi,
                        img_lo: half.clone(),
                        img_hi: lap.img_hi,
                    });
                } else {
                    next.push(lap);
                }
            }
            for lap in &mut next {
                lap.img_lo = self.apply(&lap.img_lo);
                lap.img_hi = self.apply(&lap.img_hi);
            }
            laps = next;
        }
        folds.sort_by(|x, y| x.anchor.partial_cmp(&y.anchor).unwrap_or(Ordering::Equal));
        Laps { laps, folds }
    }

    /// All `u ∈ [a, b]` with `T^j(u) = 1/2` for some `j ≤ max_steps`, sorted,
    /// each with its minimal `j`.
    pub fn fold_points(&self, a: &S, b: &S, max_steps: usize) -> Vec<Fold<S>> {
        self.laps(a, b, max_steps + 1).folds
    }
}

/// Result of [`TentMap::nonrecurrence`]. A positive answer certifies
/// non-recurrence only up to `depth` iterates.
#[derive(Clone, Debug, PartialEq)]
pub struct Nonrecurrence {
    pub nonrecurrent: bool,
    pub gap: f64,
    pub depth: usize,
    pub closest_index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub preperiod: usize,
    pub period: usize,
}

/// Finite approximation of an ω-limit set.
#[derive(Clone, Debug)]
pub struct OmegaSet<S> {
    pub points: Vec<S>,
    pub depth: usize,
    pub tol: f64,
    pub certified_finite: bool,
    pub cycle: Option<Cycle>,
}

impl<S: Scalar> OmegaSet<S> {
    /// Builds a set from explicit points, e.g. a known periodic orbit.
    pub fn from_points(mut points: Vec<S>, tol: f64) -> Self {
        cluster(&mut points, tol);
        OmegaSet {
            points,
            depth: 0,
            tol,
            certified_finite: true,
            cycle: None,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance from `y` to the nearest point of the set (`∞` when empty).
    pub fn distance(&self, y: &S) -> f64 {
        self.points
            .iter()
            .map(|p| (p.clone() - y.clone()).abs().to_f64())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, y: &S) -> bool {
        self.points.iter().any(|p| p.teq(y)) || self.distance(y) <= self.tol
    }

    /// Largest distance from `T(y)` to the set over its points.
    pub fn invariance_defect(&self, map: &TentMap<S>) -> f64 {
        self.points
            .iter()
            .map(|y| self.distance(&map.apply(y)))
            .fold(0.0, f64::max)
    }
}

/// A piece of `[a, b]` on which an iterate of `T` is affine and monotone.
#[derive(Clone, Debug)]
pub struct Lap<S> {
    pub lo: S,
    pub hi: S,
    pub img_lo: S,
    pub img_hi: S,
}

impl<S: Scalar> Lap<S> {
    /// The unique `u` in the lap whose image is `v`.
    pub fn inverse(&self, v: &S) -> S {
        if self.img_lo == self.img_hi {
            return self.lo.clone();
        }
        self.lo.clone()
            + (v.clone() - self.img_lo.clone()) * (self.hi.clone() - self.lo.clone())
                / (self.img_hi.clone() - self.img_lo.clone())
    }

    /// Image of an interior point by affine interpolation.
    pub fn forward(&self, u: &S) -> S {
        if self.lo == self.hi {
            return self.img_lo.clone();
        }
        self.img_lo.clone()
            + (u.clone() - self.lo.clone()) * (self.img_hi.clone() - self.img_lo.clone())
                / (self.hi.clone() - self.lo.clone())
    }
}

#[derive(Clone, Debug)]
pub struct Fold<S> {
    pub anchor: S,
    /// Minimal `j` with `T^j(anchor) = 1/2`.
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct Laps<S> {
    pub laps: Vec<Lap<S>>,
    pub folds: Vec<Fold<S>>,
}

/// Sorts and merges values that are indistinguishable within their error bounds.
pub(crate) fn sort_dedup<S: Scalar>(values: &mut Vec<S>) {
    // Rounding to the nearest double is monotone, so the f64 key orders
    // correctly and exact comparison only breaks ties.
    let mut keyed: Vec<(f64, S)> = values.drain(..).map(|v| (v.to_f64(), v)).collect();
    keyed.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
    });
    values.extend(keyed.into_iter().map(|(_, v)| v));
    values.dedup_by(|a, b| a.teq(b));
}

/// Single-linkage clustering of sorted values with gap `tol`; each cluster is
/// represented by its member closest to the cluster mean.
fn cluster<S: Scalar>(values: &mut Vec<S>, tol: f64) {
    sort_dedup(values);
    let mut out: Vec<S> = Vec::new();
    let mut group: Vec<S> = Vec::new();
    let flush = |group: &mut Vec<S>, out: &mut Vec<S>| {
        if group.is_empty() {
            return;
        }
        let mean = group.iter().map(|v| v.to_f64()).sum::<f64>() / group.len() as f64;
        let rep = group
            .iter()
            .min_by(|a, b| {
                (a.to_f64() - mean)
                    .abs()
                    .partial_cmp(&(b.to_f64() - mean).abs())
                    .unwrap_or(Ordering::Equal)
            })
            .cloned()
            .expect("nonempty group");
        out.push(rep);
        group.clear();
    };
    for v in values.drain(..) {
        if let Some(last) = group.last() {
            if (v.to_f64() - last.to_f64()).abs() > tol {
                flush(&mut group, &mut out);
            }
        }
        group.push(v);
    }
    flush(&mut group, &mut out);
    *values = out;
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    fn exact(n: i64, d: i64) -> TentMap<BigRational> {
        TentMap::new(q(n, d)).unwrap()
    }

    fn float(s: f64) -> TentMap<Approx> {
        TentMap::new(Approx::from_f64(s)).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(exact(2, 1).eval(&q(1, 2)).unwrap(), q(1, 1));
        assert_eq!(exact(2, 1).eval(&q(3, 4)).unwrap(), q(1, 2));
        assert_eq!(exact(3, 2).eval(&q(1, 2)).unwrap(), q(3, 4));
        assert!(exact(2, 1).eval(&q(5, 4)).is_err());
        assert!(exact(2, 1).eval(&q(-1, 4)).is_err());
    }

    #[test]
    fn slope_admissibility() {
        assert!(TentMap::new(q(7, 5)).is_err()); // 1.4 < sqrt 2
        assert!(TentMap::new(q(99, 70)).is_ok()); // just above sqrt 2
        assert!(TentMap::new(q(201, 100)).is_err());
        assert!(TentMap::new(Approx::from_f64(std::f64::consts::SQRT_2)).is_ok());
        assert!(float(std::f64::consts::SQRT_2).is_boundary());
        assert!(exact(2, 1).is_boundary());
        assert!(!exact(3, 2).is_boundary());
    }

    #[test]
    fn derived_constants() {
        let map = exact(3, 2);
        assert_eq!(*map.fixed_point(), q(3, 5));
        assert_eq!(*map.critical_value(), q(3, 4));
        assert_eq!(map.core_floor(), q(3, 8));
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(
            exact(2, 1).orbit(&q(1, 2), 3).unwrap(),
            vec![q(1, 2), q(1, 1), q(0, 1), q(0, 1)]
        );
        assert_eq!(exact(2, 1).orbit(&q(0, 1), 2).unwrap(), vec![q(0, 1); 3]);
        assert_eq!(
            exact(3, 2).orbit(&q(3, 5), 1).unwrap(),
            vec![q(3, 5), q(3, 5)]
        );
    }

    #[test]
    fn preimage_examples() {
        let map = exact(2, 1);
        assert_eq!(map.preimages(&q(1, 2), 1).unwrap(), vec![q(1, 4), q(3, 4)]);
        assert_eq!(
            map.preimages(&q(1, 2), 2).unwrap(),
            vec![q(1, 8), q(3, 8), q(5, 8), q(7, 8)]
        );
        assert_eq!(map.preimages(&q(1, 1), 1).unwrap(), vec![q(1, 2)]);
        assert!(map.preimages(&q(3, 2), 1).is_err());
        assert!(exact(3, 2).preimages(&q(4, 5), 1).is_err());
    }

    #[test]
    fn preimages_skip_points_above_critical_value() {
        // s = 3/2: 1 - (1/2)/(3/2) = 2/3 < 3/4, 1 - (1/3)/(3/2) = 7/9 > 3/4.
        let map = exact(3, 2);
        let level1 = map.preimages(&q(1, 2), 1).unwrap();
        assert_eq!(level1, vec![q(1, 3), q(2, 3)]);
        let level2 = map.preimages(&q(1, 2), 2).unwrap();
        assert_eq!(level2, vec![q(2, 9), q(4, 9), q(5, 9), q(7, 9)]);
        let level3 = map.preimages(&q(1, 2), 3).unwrap();
        // 7/9 > 3/4 has no preimages.
        assert_eq!(level3.len(), 6);
        for u in level3 {
            assert_eq!(map.apply_n(&u, 3), q(1, 2));
        }
    }

    #[test]
    fn kneading_examples() {
        assert_eq!(exact(2, 1).kneading(3), "RLL");
        assert_eq!(exact(3, 2).kneading(2), "RL");
        assert_eq!(float(std::f64::consts::SQRT_2).kneading(3), "RLR");
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert_eq!(float(golden).kneading(3), "RLC");
    }

    #[test]
    fn omega_examples() {
        let w = exact(2, 1).omega_limit(&q(1, 2), 10, 50, 1e-9).unwrap();
        assert_eq!(w.points, vec![q(0, 1)]);
        assert!(w.certified_finite);
        assert_eq!(
            w.cycle,
            Some(Cycle {
                preperiod: 2,
                period: 1
            })
        );

        let sqrt2 = float(std::f64::consts::SQRT_2);
        let w = sqrt2.omega_limit(&Approx::half(), 10, 50, 1e-9).unwrap();
        assert!(w.certified_finite);
        assert_eq!(w.len(), 1);
        assert!((w.points[0].value() - (2.0 - std::f64::consts::SQRT_2)).abs() < 1e-12);

        let w = exact(2, 1).omega_limit(&q(0, 1), 1, 10, 1e-9).unwrap();
        assert_eq!(w.points, vec![q(0, 1)]);
    }

    #[test]
    fn omega_of_critical_orbit_lies_in_core_and_is_invariant() {
        for map in [exact(2, 1)] {
            let w = map.omega_limit(&q(1, 2), 5, 40, 1e-9).unwrap();
            assert_eq!(w.invariance_defect(&map), 0.0);
            for p in &w.points {
                assert!(map.core_floor() <= *p && p <= map.critical_value());
            }
        }
        let map = float(std::f64::consts::SQRT_2);
        let w = map.omega_limit(&Approx::half(), 5, 40, 1e-9).unwrap();
        assert!(w.invariance_defect(&map) <= 1e-9);
        for p in &w.points {
            assert!(map.core_floor().value() - 1e-9 <= p.value());
            assert!(p.value() <= map.critical_value().value() + 1e-9);
        }
    }

    #[test]
    fn nonrecurrence_examples() {
        let r = exact(2, 1).nonrecurrence(100, 1e-9);
        assert!(r.nonrecurrent);
        assert_eq!(r.gap, 0.5);

        let r = float(std::f64::consts::SQRT_2).nonrecurrence(100, 1e-9);
        assert!(r.nonrecurrent);
        assert!((r.gap - (1.5 - std::f64::consts::SQRT_2)).abs() < 1e-9);

        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let r = float(golden).nonrecurrence(10, 1e-9);
        assert!(!r.nonrecurrent);
        assert!(r.gap < 1e-12);
        assert_eq!(r.closest_index, 3);
    }

    #[test]
    fn fold_points_match_brute_force_preimages() {
        let map = exact(3, 2);
        let (a, b) = (q(1, 7), q(5, 7));
        let folds = map.fold_points(&a, &b, 4);
        let mut expected: Vec<(BigRational, usize)> = Vec::new();
        for j in 0..=4 {
            for u in map.preimages(&q(1, 2), j).unwrap() {
                if a <= u && u <= b && !expected.iter().any(|(v, _)| *v == u) {
                    expected.push((u, j));
                }
            }
        }
        expected.sort();
        let got: Vec<(BigRational, usize)> =
            folds.into_iter().map(|f| (f.anchor, f.steps)).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn laps_are_monotone_pieces() {
        let map = exact(2, 1);
        let laps = map.laps(&q(0, 1), &q(1, 1), 3);
        assert_eq!(laps.laps.len(), 8);
        for lap in &laps.laps {
            assert_eq!(map.apply_n(&lap.lo, 3), lap.img_lo);
            assert_eq!(map.apply_n(&lap.hi, 3), lap.img_hi);
            let mid = (lap.lo.clone() + lap.hi.clone()) / q(2, 1);
            assert_eq!(map.apply_n(&mid, 3), lap.forward(&mid));
        }
    }

    #[test]
    fn endpoint_folds_are_reported_once() {
        let map = exact(2, 1);
        let folds = map.fold_points(&q(1, 4), &q(1, 4), 3);
        assert_eq!(folds.len(), 1);
        assert_eq!(folds[0].steps, 1);
        let folds = map.fold_points(&q(1, 4), &q(3, 4), 2);
        let anchors: Vec<_> = folds.iter().map(|f| (f.anchor.clone(), f.steps)).collect();
        assert_eq!(
            anchors,
            vec![
                (q(1, 4), 1),
                (q(3, 8), 2),
                (q(1, 2), 0),
                (q(5, 8), 2),
                (q(3, 4), 1)
            ]
        );
    }
}
