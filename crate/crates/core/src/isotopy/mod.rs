//! The isotopy `H(x, t) = π_m^{-1}|_A[(1 − t)π_m(x) + t π_m(h(x))]`, the
//! adjusted maps `h_{q,p}`, and sample-level checks of their properties.

mod displacement;
mod hausdorff;

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::chains::{arc_component, Chain};
use crate::error::{Error, Result};
use crate::invlim::{
    arc_between, c0_at_position, common_representation, dbar, p_points_on_arc, Arc, LimitPoint,
};
use crate::num::Scalar;
use crate::tentmap::TentMap;

pub use displacement::{DisplacementMap, Hat};
pub use hausdorff::{
    arc_convergence_suite, hausdorff, ConvergenceReport, HausdorffDistance, SampledArc,
};

/// Widening steps tried by [`adjusted_map`] before giving up.
const WINDOW_STEPS: usize = 64;

/// One evaluation of the isotopy with the data used to compute it.
#[derive(Clone, Debug)]
pub struct IsotopyStep<S> {
    pub point: LimitPoint<S>,
    /// Arc from `x` to `h(x)`, absent when `h(x) = x`.
    pub arc: Option<Arc<S>>,
    /// Level `m` at which the arc was linearised.
    pub level: usize,
}

/// `H(x, t)`.
pub fn isotopy_eval<S: Scalar>(
    map: &TentMap<S>,
    h: &DisplacementMap<S>,
    x: &LimitPoint<S>,
    t: &S,
) -> Result<LimitPoint<S>> {
    isotopy_step(map, h, x, t).map(|s| s.point)
}

/// [`isotopy_eval`] together with its arc and level.
pub fn isotopy_step<S: Scalar>(
    map: &TentMap<S>,
    h: &DisplacementMap<S>,
    x: &LimitPoint<S>,
    t: &S,
) -> Result<IsotopyStep<S>> {
    if t.tlt(&S::zero()) || S::one().tlt(t) {
        return Err(Error::Domain {
            value: t.to_string(),
            domain: "[0, 1]".into(),
        });
    }
    let y = h.apply(map, x);
    if y == *x || dbar(map, x, &y).map(|d| d.teq(&S::zero())).unwrap_or(false) {
        let point = if *t == S::one() { y } else { x.clone() };
        return Ok(IsotopyStep {
            point,
            arc: None,
            level: 0,
        });
    }
    let arc = arc_between(map, x, &y)?;
    let m = arc.minimal_injective_level(map);
    let lap = match map
        .laps(arc.lo(), arc.hi(), arc.level() - m)
        .laps
        .as_slice()
    {
        [lap] => lap.clone(),
        _ => return Err(Error::NoInjectiveLevel(arc.level())),
    };
    let point = if *t == S::zero() {
        x.clone()
    } else if *t == S::one() {
        y
    } else {
        let (xa, ya) = common_representation(map, x, &y)?;
        let vx = lap.forward(xa.anchor());
        let vy = lap.forward(ya.anchor());
        let v = (S::one() - t.clone()) * vx + t.clone() * vy;
        arc.point_at(lap.inverse(&v))
    };
    Ok(IsotopyStep {
        point,
        arc: Some(arc),
        level: m,
    })
}

/// `true` when some coordinate `π_n(x)` with `n > p` equals `1/2`.
pub fn is_p_point<S: Scalar>(map: &TentMap<S>, x: &LimitPoint<S>, p: usize) -> bool {
    match Arc::new(
        map,
        x.level(),
        x.anchor().clone(),
        x.anchor().clone(),
        x.tail().clone(),
    ) {
        Ok(arc) => {
            let found = p_points_on_arc(map, &arc, p);
            !found.head.is_empty() || !found.tail.is_empty()
        }
        Err(_) => false,
    }
}

/// `h_{q,p}(x)` for `h = shift^{−b}`: the unique p-point in the arc component
/// of the coarse link containing `h(x)`.
pub fn adjusted_map<S: Scalar>(
    map: &TentMap<S>,
    q: usize,
    p: usize,
    fine: &Chain<S>,
    coarse: &Chain<S>,
    b: i64,
    x: &LimitPoint<S>,
) -> Result<LimitPoint<S>> {
    if fine.k() != q || coarse.k() != p {
        return Err(Error::Precondition(format!(
            "chain levels ({}, {}) do not match (q, p) = ({q}, {p})",
            fine.k(),
            coarse.k()
        )));
    }
    if !x.is_on_c0() {
        return Err(Error::Precondition(format!("{x} is not on C_0")));
    }
    if !is_p_point(map, x, q) {
        return Err(Error::Precondition(format!("{x} is not a {q}-point")));
    }
    let image = x.shift_by(map, -b);
    let tau = image.c0_position(map).expect("shifts preserve C_0");
    let top = map.critical_value().clone();
    let mut level = image.level().max(p + 1);
    let mut last = None;
    for _ in 0..WINDOW_STEPS {
        let y = c0_at_position(map, &tau, level)?;
        level = y.level();
        let window = Arc::new(map, level, S::zero(), top.clone(), y.tail().clone())?;
        let mut widen = false;
        for link in coarse.link_of(map, &y) {
            let comp = arc_component(map, coarse, link, &window, y.anchor())?;
            if comp.truncated && comp.hi.teq(&top) {
                widen = true;
                break;
            }
            let piece = window.sub_arc(comp.lo.clone(), comp.hi.clone());
            let inside: Vec<_> = p_points_on_arc(map, &piece, p)
                .all()
                .into_iter()
                .filter(|pt| comp.contains(&pt.anchor))
                .collect();
            if let [only] = inside.as_slice() {
                return LimitPoint::new(map, level, only.anchor.clone(), y.tail().clone());
            }
            last.get_or_insert((link, inside.len()));
        }
        if !widen {
            break;
        }
        level += 1;
    }
    let (link, count) = last.unwrap_or((0, 0));
    Err(Error::Ambiguous { link, count })
}

/// Outcome of [`injectivity_check`].
#[derive(Clone, Debug)]
pub struct InjectivityReport {
    pub checked: usize,
    /// Index pairs into the sample whose images coincide or swap order.
    pub violations: Vec<(usize, usize)>,
}

impl InjectivityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `H(·, t)` is injective on `sample`, and order preserving on `C_0`.
pub fn injectivity_check<S: Scalar>(
    map: &TentMap<S>,
    h: &DisplacementMap<S>,
    t: &S,
    sample: &[LimitPoint<S>],
) -> Result<InjectivityReport> {
    let images = sample
        .par_iter()
        .map(|x| isotopy_eval(map, h, x, t))
        .collect::<Result<Vec<_>>>()?;
    let mut on_c0: Vec<(usize, S, S)> = sample
        .iter()
        .zip(&images)
        .enumerate()
        .filter_map(|(i, (x, y))| Some((i, x.c0_position(map)?, y.c0_position(map)?)))
        .collect();
    on_c0.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal));
    let mut violations = Vec::new();
    let mut checked = 0;
    for w in on_c0.windows(2) {
        if w[0].1 == w[1].1 {
            continue;
        }
        checked += 1;
        if w[0].2.tcmp(&w[1].2) != Ordering::Less {
            violations.push((w[0].0, w[1].0));
        }
    }
    let others: Vec<usize> = (0..sample.len())
        .filter(|&i| !sample[i].is_on_c0())
        .collect();
    for (a, &i) in others.iter().enumerate() {
        for &j in &others[a + 1..] {
            if same_point(map, &sample[i], &sample[j]) {
                continue;
            }
            checked += 1;
            if same_point(map, &images[i], &images[j]) {
                violations.push((i, j));
            }
        }
    }
    Ok(InjectivityReport {
        checked,
        violations,
    })
}

fn same_point<S: Scalar>(map: &TentMap<S>, x: &LimitPoint<S>, y: &LimitPoint<S>) -> bool {
    match common_representation(map, x, y) {
        Ok((a, b)) => a.anchor().teq(b.anchor()),
        Err(_) => false,
    }
}

/// Outcome of [`displacement_bound_check`].
#[derive(Clone, Debug)]
pub struct DisplacementReport {
    /// `d̄(shift^{−b}(z), h(z))` per sample point.
    pub values: Vec<f64>,
    pub bound: f64,
    pub mesh: f64,
}

impl DisplacementReport {
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.values.iter().all(|v| *v <= self.bound)
    }
}

/// Checks `d̄(shift^{−b}(z), h(z)) ≤ s^q + 4·mesh·s^q` for `h = D ∘ shift^{−b}`.
pub fn displacement_bound_check<S: Scalar>(
    map: &TentMap<S>,
    b: i64,
    q: usize,
    coarse: &Chain<S>,
    d: &DisplacementMap<S>,
    sample: &[LimitPoint<S>],
) -> Result<DisplacementReport> {
    let mesh = coarse.mesh(map, coarse.k());
    let sq = map.slope().pow(q as u32).to_f64();
    let bound = sq + 4.0 * mesh * sq;
    let values = sample
        .par_iter()
        .map(|z| {
            if !z.is_on_c0() {
                return Err(Error::Precondition(format!("{z} is not on C_0")));
            }
            let shifted = z.shift_by(map, -b);
            let moved = d.apply(map, &shifted);
            let v = dbar(map, &shifted, &moved)?;
            Ok(v.to_f64() + v.error_bound())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DisplacementReport {
        values,
        bound,
        mesh,
    })
}

#[cfg(test)]
mod tests;
