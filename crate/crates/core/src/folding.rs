//! Folding points: points of `K` all of whose coordinates lie in `ω(1/2)`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::invlim::{LimitPoint, Symbol, TailRule};
use crate::num::Scalar;
use crate::tentmap::{OmegaSet, TentMap};

/// Cap on extra coordinates scanned to exhibit a non-member coordinate.
const WITNESS_SCAN: usize = 4096;

/// How a certificate reached its verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// Only the first `depth` coordinates were examined.
    Scan,
    /// The point has finitely many distinct coordinates and all were examined.
    FiniteCoordinates,
    /// The point has infinitely many distinct coordinates, so it cannot lie
    /// in a finite `ω`.
    InfiniteCoordinates,
}

#[derive(Clone, Debug)]
pub struct FoldingCertificate<S> {
    pub point: LimitPoint<S>,
    /// Number of leading coordinates examined.
    pub depth: usize,
    /// Largest distance from an examined coordinate to `ω`.
    pub max_gap: f64,
    pub member: bool,
    pub basis: Basis,
}

fn max_gap<S: Scalar>(omega: &OmegaSet<S>, coords: &[S]) -> f64 {
    coords.iter().map(|c| omega.distance(c)).fold(0.0, f64::max)
}

/// Tests `π_n(x) ∈ ω` for the coordinates of `x`.
///
/// Points whose tail settles exactly on a periodic backward orbit have finitely
/// many coordinates and are decided outright. Other eventually periodic points
/// have infinitely many distinct coordinates; against a certified finite `ω`
/// they are rejected, with the scan extended until a coordinate farther than
/// `tol` from `ω` is found.
pub fn is_folding_point<S: Scalar>(
    map: &TentMap<S>,
    x: &LimitPoint<S>,
    omega: &OmegaSet<S>,
    depth: usize,
    tol: f64,
) -> FoldingCertificate<S> {
    let depth = depth.max(1);
    let (prefix, cycle) = x.tail().canonical_word();
    let settled = x.reanchor(map, x.level() + prefix.len());
    let start = settled.level();
    let coords = settled.coords(map, start + cycle.len());
    let periodic = coords[start + cycle.len()].teq(&coords[start]);
    if periodic {
        let gap = max_gap(omega, &coords);
        return FoldingCertificate {
            point: x.clone(),
            depth: coords.len(),
            max_gap: gap,
            member: gap <= tol,
            basis: Basis::FiniteCoordinates,
        };
    }
    let mut coords = x.coords(map, depth - 1);
    let mut gap = max_gap(omega, &coords);
    if !omega.certified_finite {
        return FoldingCertificate {
            point: x.clone(),
            depth,
            max_gap: gap,
            member: gap <= tol,
            basis: Basis::Scan,
        };
    }
    if gap <= tol {
        let mut v = coords.last().cloned().unwrap_or_else(S::zero);
        let mut n = coords.len();
        while gap <= tol && n < depth + WITNESS_SCAN {
            v = if n <= x.level() {
                x.project(map, n)
            } else {
                map.branch(&v, x.tail().symbol(n - x.level() - 1))
            };
            gap = gap.max(omega.distance(&v));
            coords.push(v.clone());
            n += 1;
        }
    }
    FoldingCertificate {
        point: x.clone(),
        depth: coords.len(),
        max_gap: gap,
        member: false,
        basis: Basis::InfiniteCoordinates,
    }
}

/// A backward path `y_0 ← y_1 ← …` inside `ω` with `T(y_{i+1}) = y_i`.
#[derive(Clone, Debug)]
pub struct FoldingPath<S> {
    /// Indices into the ω point list.
    pub states: Vec<usize>,
    /// The exact point when the path is periodic from its first repeated state on.
    pub point: Option<LimitPoint<S>>,
}

/// Enumerates the backward paths of `length` coordinates within a finite `ω`.
pub fn enumerate_folding<S: Scalar>(
    map: &TentMap<S>,
    omega: &OmegaSet<S>,
    length: usize,
) -> Result<Vec<FoldingPath<S>>> {
    if !omega.certified_finite {
        return Err(Error::OmegaNotFinite);
    }
    let pts = &omega.points;
    let preimages: Vec<Vec<usize>> = pts
        .iter()
        .map(|y| {
            (0..pts.len())
                .filter(|&j| {
                    let image = map.apply(&pts[j]);
                    image.teq(y) || (image - y.clone()).abs().to_f64() <= omega.tol
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    if length == 0 {
        return Ok(out);
    }
    let mut stack: Vec<Vec<usize>> = (0..pts.len()).rev().map(|i| vec![i]).collect();
    while let Some(path) = stack.pop() {
        if path.len() == length {
            let point = promote(map, pts, &path);
            out.push(FoldingPath {
                states: path,
                point,
            });
            continue;
        }
        let last = *path.last().expect("nonempty path");
        for &next in preimages[last].iter().rev() {
            let mut p = path.clone();
            p.push(next);
            stack.push(p);
        }
    }
    Ok(out)
}

/// Distinct points among the promoted paths.
pub fn folding_points<S: Scalar>(
    map: &TentMap<S>,
    omega: &OmegaSet<S>,
    length: usize,
) -> Result<Vec<LimitPoint<S>>> {
    let mut out: Vec<LimitPoint<S>> = Vec::new();
    for path in enumerate_folding(map, omega, length)? {
        if let Some(p) = path.point {
            if !out.iter().any(|q| same_point(map, q, &p)) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

fn same_point<S: Scalar>(map: &TentMap<S>, a: &LimitPoint<S>, b: &LimitPoint<S>) -> bool {
    let level = a.level().max(b.level());
    let (a, b) = (a.reanchor(map, level), b.reanchor(map, level));
    a.anchor().teq(b.anchor()) && a.tail().canonical_word() == b.tail().canonical_word()
}

/// Builds the exact point of a path that is periodic from its first repeat on.
fn promote<S: Scalar>(map: &TentMap<S>, pts: &[S], path: &[usize]) -> Option<LimitPoint<S>> {
    let (start, period) = (0..path.len()).find_map(|i| {
        let j = path[i + 1..].iter().position(|&s| s == path[i])?;
        Some((i, j + 1))
    })?;
    if (start + period..path.len()).any(|m| path[m] != path[m - period]) {
        return None;
    }
    let half = S::half();
    let cycle: Vec<Symbol> = (start + 1..=start + period)
        .map(|m| match pts[path[m]].tcmp(&half) {
            Ordering::Greater => Symbol::R,
            _ => Symbol::L,
        })
        .collect();
    let anchor = pts[path[start]].clone();
    let tail = TailRule::itinerary(Vec::new(), cycle).ok()?.normalized();
    let tail = if tail.canonical_word() == TailRule::Fixed.canonical_word()
        && anchor.teq(map.fixed_point())
    {
        TailRule::Fixed
    } else {
        tail
    };
    let anchor = match tail {
        TailRule::Fixed => map.fixed_point().clone(),
        _ => anchor,
    };
    LimitPoint::new(map, start, anchor, tail).ok()
}
