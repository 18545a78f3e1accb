//! Sampled Hausdorff distances between arcs of `K`.

use rayon::prelude::*;

use super::DisplacementMap;
use crate::error::Result;
use crate::folding::is_folding_point;
use crate::invlim::{arc_between, Arc, LimitPoint};
use crate::num::Scalar;
use crate::tentmap::{OmegaSet, TentMap};

/// Coordinate prefixes of finitely many points of an arc.
#[derive(Clone, Debug)]
pub struct SampledArc {
    coords: Vec<Vec<f64>>,
    /// Every point of the sampled set is within this ambient distance of a sample.
    resolution: f64,
    slope: f64,
}

impl SampledArc {
    /// `count` points equally spaced in `d̄` along `arc`, with `depth + 1` coordinates each.
    pub fn sample<S: Scalar>(map: &TentMap<S>, arc: &Arc<S>, count: usize, depth: usize) -> Self {
        let count = count.max(2);
        let span = arc.hi().clone() - arc.lo().clone();
        let steps = S::from_ratio(count as i64 - 1, 1);
        let coords = (0..count)
            .into_par_iter()
            .map(|i| {
                let u =
                    arc.lo().clone() + span.clone() * S::from_ratio(i as i64, 1) / steps.clone();
                prefix(map, &arc.point_at(u), depth)
            })
            .collect();
        let s = map.slope().to_f64();
        let spacing = arc.length(map).to_f64() / (count - 1) as f64;
        SampledArc {
            coords,
            resolution: spacing / 2.0 * lipschitz(s),
            slope: s,
        }
    }

    /// The singleton `{x}`.
    pub fn point<S: Scalar>(map: &TentMap<S>, x: &LimitPoint<S>, depth: usize) -> Self {
        SampledArc {
            coords: vec![prefix(map, x, depth)],
            resolution: 0.0,
            slope: map.slope().to_f64(),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn depth(&self) -> usize {
        self.coords.first().map_or(0, |c| c.len().saturating_sub(1))
    }
}

/// Ambient-metric Lipschitz constant of `d̄` along an arc: `Σ (2s)^{−i}`.
fn lipschitz(s: f64) -> f64 {
    2.0 * s / (2.0 * s - 1.0)
}

fn prefix<S: Scalar>(map: &TentMap<S>, x: &LimitPoint<S>, depth: usize) -> Vec<f64> {
    x.coords(map, depth).iter().map(Scalar::to_f64).collect()
}

/// A sampled Hausdorff distance and the slack separating it from the true one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HausdorffDistance {
    pub value: f64,
    /// Sampling resolutions of both sets plus the truncated tail of the metric.
    pub slack: f64,
}

fn truncated(a: &[f64], b: &[f64], depth: usize) -> f64 {
    let mut w = 1.0;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b).take(depth + 1) {
        sum += w * (x - y).abs();
        w *= 0.5;
    }
    sum
}

fn directed(a: &SampledArc, b: &SampledArc, depth: usize) -> f64 {
    a.coords
        .par_iter()
        .map(|p| {
            b.coords
                .iter()
                .map(|q| truncated(p, q, depth))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff distance of two samples under the ambient metric truncated at `depth`.
pub fn hausdorff(a: &SampledArc, b: &SampledArc, depth: usize) -> HausdorffDistance {
    let depth = depth.min(a.depth()).min(b.depth());
    let value = directed(a, b, depth).max(directed(b, a, depth));
    let s = a.slope.max(b.slope);
    HausdorffDistance {
        value,
        slack: a.resolution + b.resolution + 0.5f64.powi(depth as i32) * s / 2.0,
    }
}

/// Distances `hausdorff(A_n, A)` along an approach `z_n → target`.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    /// The target is a folding point, so the limit set is `{target}`.
    pub folding_target: bool,
    pub distances: Vec<f64>,
    pub slack: Vec<f64>,
}

impl ConvergenceReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.distances.windows(2).all(|w| w[1] < w[0])
    }

    pub fn last(&self) -> Option<f64> {
        self.distances.last().copied()
    }
}

fn arc_sample<S: Scalar>(
    map: &TentMap<S>,
    x: &LimitPoint<S>,
    y: &LimitPoint<S>,
    samples: usize,
    depth: usize,
) -> Result<SampledArc> {
    if x == y {
        return Ok(SampledArc::point(map, x, depth));
    }
    let arc = arc_between(map, x, y)?;
    if arc.lo() == arc.hi() {
        return Ok(SampledArc::point(map, x, depth));
    }
    Ok(SampledArc::sample(map, &arc, samples, depth))
}

/// Builds `A_n = [z_n, h(z_n)]` and measures its distance to the limit set:
/// `{target}` for a folding target, otherwise `[target, h(target)]`.
pub fn arc_convergence_suite<S: Scalar>(
    map: &TentMap<S>,
    h: &DisplacementMap<S>,
    target: &LimitPoint<S>,
    approach: &[LimitPoint<S>],
    omega: &OmegaSet<S>,
    samples: usize,
    depth: usize,
) -> Result<ConvergenceReport> {
    let folding_target = is_folding_point(map, target, omega, depth, omega.tol).member;
    let limit = if folding_target {
        SampledArc::point(map, target, depth)
    } else {
        arc_sample(map, target, &h.apply(map, target), samples, depth)?
    };
    let mut distances = Vec::with_capacity(approach.len());
    let mut slack = Vec::with_capacity(approach.len());
    for z in approach {
        let a = arc_sample(map, z, &h.apply(map, z), samples, depth)?;
        let d = hausdorff(&a, &limit, depth);
        distances.push(d.value);
        slack.push(d.slack);
    }
    Ok(ConvergenceReport {
        folding_target,
        distances,
        slack,
    })
}
