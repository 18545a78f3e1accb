//! Chain covers `C_{k,r}` of the inverse limit.
//!
//! A link is `π_k^{-1}(I)` for an interval `I ⊆ [0, s/2]`; only `(k, I)` is
//! stored. The intervals come from the partition of `[0, s/2]` by the
//! preimages of the critical point of order at most `k + r + 1`.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::invlim::{p_points_on_arc, Arc, LimitPoint};
use crate::num::{Approx, Scalar};
use crate::tentmap::{sort_dedup, TentMap};

/// Default bound on the number of preimages enumerated for a partition.
pub const DEFAULT_PARTITION_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq)]
pub struct Chain<S> {
    k: usize,
    r: usize,
    partition: Vec<S>,
    links: Vec<Interval<S>>,
}

/// Builds `C_{k,r}` with the default partition cap.
pub fn build_chain<S: Scalar>(map: &TentMap<S>, k: usize, r: usize) -> Result<Chain<S>> {
    build_chain_capped(map, k, r, DEFAULT_PARTITION_CAP)
}

pub fn build_chain_capped<S: Scalar>(
    map: &TentMap<S>,
    k: usize,
    r: usize,
    cap: usize,
) -> Result<Chain<S>> {
    let exponent = (k + r + 2) as u32;
    if exponent >= usize::BITS || (1usize << exponent) > cap {
        return Err(Error::PartitionCap { exponent, cap });
    }
    let top = map.critical_value().clone();
    let mut level = vec![S::half()];
    let mut partition = level.clone();
    for _ in 0..=k + r {
        let mut next = Vec::with_capacity(2 * level.len());
        for v in &level {
            match v.tcmp(&top) {
                Ordering::Greater => {}
                Ordering::Equal => next.push(S::half()),
                Ordering::Less => {
                    let w = v.clone() / map.slope().clone();
                    next.push(S::one() - w.clone());
                    next.push(w);
                }
            }
        }
        next.retain(|v| v.tle(&top));
        partition.extend(next.iter().cloned());
        level = next;
    }
    sort_dedup(&mut partition);
    Chain::from_partition(k, r, partition, top)
}

impl<S: Scalar> Chain<S> {
    fn from_partition(k: usize, r: usize, partition: Vec<S>, top: S) -> Result<Self> {
        let t = partition.len();
        if t < 3 {
            return Err(Error::DegenerateChain(format!(
                "partition has {t} points, need at least 3"
            )));
        }
        if let Some(w) = partition.windows(2).find(|w| !w[0].tlt(&w[1])) {
            return Err(Error::DegenerateChain(format!(
                "partition points {} and {} coincide",
                w[0], w[1]
            )));
        }
        let mut links = Vec::with_capacity(t);
        links.push(Interval::new(S::zero(), partition[1].clone(), true, false));
        for j in 1..t - 1 {
            links.push(Interval::open(
                partition[j - 1].clone(),
                partition[j + 1].clone(),
            ));
        }
        links.push(Interval::new(partition[t - 2].clone(), top, false, true));
        Ok(Chain {
            k,
            r,
            partition,
            links,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn partition(&self) -> &[S] {
        &self.partition
    }

    pub fn links(&self) -> &[Interval<S>] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// Indices (0-based) of the links whose interval contains `v`.
    pub fn links_containing(&self, v: &S) -> Vec<usize> {
        let idx = self.partition.partition_point(|x| x < v);
        let lo = idx.saturating_sub(1);
        let hi = (idx + 1).min(self.links.len() - 1);
        (lo..=hi).filter(|&j| self.links[j].contains(v)).collect()
    }

    /// Links whose closure may contain `v`; a superset used to seed containment searches.
    fn candidate_links(&self, v: &S) -> std::ops::RangeInclusive<usize> {
        let idx = self.partition.partition_point(|x| x < v);
        idx.saturating_sub(2)..=(idx + 2).min(self.links.len() - 1)
    }

    /// Links containing `x`, i.e. those whose interval contains `π_k(x)`.
    pub fn link_of(&self, map: &TentMap<S>, x: &LimitPoint<S>) -> Vec<usize> {
        self.links_containing(&x.project(map, self.k))
    }

    /// `T^d` applied to every link interval.
    pub fn forward_images(&self, map: &TentMap<S>, d: usize) -> Vec<Interval<S>> {
        self.links.par_iter().map(|l| l.image_n(map, d)).collect()
    }

    /// Upper bound on the largest ambient diameter of a link.
    ///
    /// For coordinates `n ≤ k` the link projects into `T^{k−n}(I)`; for
    /// `k < n ≤ tail_depth` into the hull of the preimages of `I`. Coordinates
    /// deeper than `max(k, tail_depth)` contribute at most `2^{-n}·s/2` each.
    /// Widths are evaluated in tracked-error arithmetic and rounded up.
    pub fn mesh(&self, map: &TentMap<S>, tail_depth: usize) -> f64 {
        let map = map.to_approx();
        let links: Vec<Interval<Approx>> = self
            .links
            .iter()
            .map(|l| Interval::new(l.lo.to_approx(), l.hi.to_approx(), l.lo_closed, l.hi_closed))
            .collect();
        mesh_bound(&map, &links, self.k, tail_depth)
    }
}

fn mesh_bound(
    map: &TentMap<Approx>,
    links: &[Interval<Approx>],
    k: usize,
    tail_depth: usize,
) -> f64 {
    let depth = k.max(tail_depth);
    let top = map.critical_value().to_f64();
    let rest = 0.5f64.powi(depth as i32) * top;
    let worst = links
        .par_iter()
        .map(|link| {
            let mut sum = 0.0;
            let mut cur = link.clone();
            for c in 0..=k {
                sum += 0.5f64.powi((k - c) as i32) * width_bound(&cur);
                if c < k {
                    cur = cur.image(map);
                }
            }
            let mut hull = link.clone();
            for n in k + 1..=depth {
                hull = preimage_hull(map, &hull);
                sum += 0.5f64.powi(n as i32) * width_bound(&hull);
            }
            sum
        })
        .reduce(|| 0.0, f64::max);
    // Outward margin for f64 accumulation.
    (worst + rest) * (1.0 + 8.0 * (depth as f64 + 2.0) * f64::EPSILON)
}

fn width_bound<S: Scalar>(i: &Interval<S>) -> f64 {
    let w = i.width();
    w.to_f64() + w.error_bound()
}

/// Smallest interval containing the preimage of `i` in `[0, s/2]`.
fn preimage_hull<S: Scalar>(map: &TentMap<S>, i: &Interval<S>) -> Interval<S> {
    let pieces = i.preimage(map);
    let lo = pieces
        .iter()
        .map(|p| p.lo.clone())
        .reduce(|a, b| S::min_of(&a, &b));
    let hi = pieces
        .iter()
        .map(|p| p.hi.clone())
        .reduce(|a, b| S::max_of(&a, &b));
    match (lo, hi) {
        (Some(lo), Some(hi)) => Interval::closed(lo, hi),
        _ => Interval::closed(S::zero(), S::zero()),
    }
}

/// Outcome of a refinement certification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refinement {
    /// For each fine link, a coarse link certified to contain it.
    pub witness: Vec<Option<usize>>,
    /// First fine link that fits in no coarse link.
    pub counterexample: Option<usize>,
}

impl Refinement {
    pub fn refines(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn is_total(&self) -> bool {
        self.witness.iter().all(Option::is_some)
    }
}

/// Certifies that every link of `fine` lies inside some link of `coarse`.
///
/// For `q ≥ p` a fine link `π_q^{-1}(I)` lies in `π_p^{-1}(J)` when
/// `T^{q−p}(I) ⊆ J`. For `q < p` every point of `π_q^{-1}(I)` has its `p`-th
/// coordinate in `T^{−(p−q)}(I) ∩ [0, s/2]`, which must fit in a single `J`.
pub fn refines<S: Scalar>(map: &TentMap<S>, fine: &Chain<S>, coarse: &Chain<S>) -> Refinement {
    if fine.k >= coarse.k {
        let images = fine.forward_images(map, fine.k - coarse.k);
        refines_with_images(&images, coarse)
    } else {
        let d = coarse.k - fine.k;
        let witness: Vec<Option<usize>> = fine
            .links
            .par_iter()
            .map(|link| {
                let pieces = link.preimage_n(map, d);
                let first = pieces.first()?;
                coarse.candidate_links(&first.lo).find(|&j| {
                    pieces
                        .iter()
                        .all(|piece| coarse.links[j].contains_interval(piece))
                })
            })
            .collect();
        finish(witness)
    }
}

/// Refinement check from precomputed images `T^{q−p}(I)` of the fine links.
pub fn refines_with_images<S: Scalar>(images: &[Interval<S>], coarse: &Chain<S>) -> Refinement {
    let witness = images
        .par_iter()
        .map(|img| {
            coarse
                .candidate_links(&img.lo)
                .find(|&j| coarse.links[j].contains_interval(img))
        })
        .collect();
    finish(witness)
}

fn finish(witness: Vec<Option<usize>>) -> Refinement {
    let counterexample = witness.iter().position(Option::is_none);
    Refinement {
        witness,
        counterexample,
    }
}

/// The part of an arc whose `π_k`-image stays in one link.
#[derive(Clone, Debug)]
pub struct ArcComponent<S> {
    pub link: usize,
    pub lo: S,
    pub hi: S,
    pub lo_closed: bool,
    pub hi_closed: bool,
    /// The component reaches an end of the arc, so it may continue beyond it.
    pub truncated: bool,
}

impl<S: Scalar> ArcComponent<S> {
    pub fn contains(&self, u: &S) -> bool {
        Interval::new(
            self.lo.clone(),
            self.hi.clone(),
            self.lo_closed,
            self.hi_closed,
        )
        .contains(u)
    }
}

/// Component of `{u ∈ [a, b] : T^{N−k}(u) ∈ link}` containing `u0`.
pub fn arc_component<S: Scalar>(
    map: &TentMap<S>,
    chain: &Chain<S>,
    link: usize,
    arc: &Arc<S>,
    u0: &S,
) -> Result<ArcComponent<S>> {
    let k = chain.k;
    if arc.level() < k {
        return Err(Error::Precondition(format!(
            "arc level {} is below the chain level {k}",
            arc.level()
        )));
    }
    let target = &chain.links[link];
    let laps = map.laps(arc.lo(), arc.hi(), arc.level() - k).laps;
    let start = laps
        .iter()
        .position(|l| l.lo.tle(u0) && u0.tle(&l.hi))
        .ok_or_else(|| Error::Precondition(format!("{u0} is not on the arc")))?;
    if !target.contains(&laps[start].forward(u0)) {
        return Err(Error::Precondition(format!(
            "point {u0} is not in link {link}"
        )));
    }
    let crossing = |lap: &crate::tentmap::Lap<S>, outside: &S| -> (S, bool) {
        if outside.tlt(&target.lo) || (outside.teq(&target.lo) && !target.lo_closed) {
            (lap.inverse(&target.lo), target.lo_closed)
        } else {
            (lap.inverse(&target.hi), target.hi_closed)
        }
    };
    let mut hi = None;
    for lap in &laps[start..] {
        if !target.contains(&lap.img_hi) {
            hi = Some(crossing(lap, &lap.img_hi));
            break;
        }
    }
    let mut lo = None;
    for lap in laps[..=start].iter().rev() {
        if !target.contains(&lap.img_lo) {
            lo = Some(crossing(lap, &lap.img_lo));
            break;
        }
    }
    let truncated = hi.is_none() || lo.is_none();
    let (hi, hi_closed) = hi.unwrap_or((arc.hi().clone(), true));
    let (lo, lo_closed) = lo.unwrap_or((arc.lo().clone(), true));
    Ok(ArcComponent {
        link,
        lo,
        hi,
        lo_closed,
        hi_closed,
        truncated,
    })
}

/// Per-p-point outcome of [`unique_ppoint_check`].
#[derive(Clone, Debug)]
pub struct PPointComponent<S> {
    pub anchor: S,
    /// `(link, number of p-points in the arc component)` for each link containing the point.
    pub counts: Vec<(usize, usize)>,
    pub truncated: bool,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct UniquePPointReport<S> {
    pub points: Vec<PPointComponent<S>>,
}

impl<S: Scalar> UniquePPointReport<S> {
    pub fn holds(&self) -> bool {
        self.points.iter().all(|p| p.ok)
    }

    pub fn violations(&self) -> impl Iterator<Item = &PPointComponent<S>> {
        self.points.iter().filter(|p| !p.ok)
    }
}

/// For every p-point of `arc`, counts the p-points in the arc component of
/// each link containing it; the property holds when some link gives exactly one.
pub fn unique_ppoint_check<S: Scalar>(
    map: &TentMap<S>,
    chain: &Chain<S>,
    p: usize,
    arc: &Arc<S>,
) -> Result<UniquePPointReport<S>> {
    if p != chain.k {
        return Err(Error::Precondition(format!(
            "p = {p} must equal the chain level k = {}",
            chain.k
        )));
    }
    if arc.level() <= chain.k {
        return Err(Error::Precondition(format!(
            "arc level {} must exceed k = {}",
            arc.level(),
            chain.k
        )));
    }
    let ppoints = p_points_on_arc(map, arc, p).all();
    let mut points = Vec::with_capacity(ppoints.len());
    for pt in &ppoints {
        let value = arc.point_at(pt.anchor.clone()).project(map, chain.k);
        let mut counts = Vec::new();
        let mut truncated = false;
        for link in chain.links_containing(&value) {
            let comp = arc_component(map, chain, link, arc, &pt.anchor)?;
            truncated |= comp.truncated;
            let count = ppoints.iter().filter(|q| comp.contains(&q.anchor)).count();
            counts.push((link, count));
        }
        let ok = counts.iter().any(|&(_, c)| c == 1);
        points.push(PPointComponent {
            anchor: pt.anchor.clone(),
            counts,
            truncated,
            ok,
        });
    }
    Ok(UniquePPointReport { points })
}
