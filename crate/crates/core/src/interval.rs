use std::cmp::Ordering;
use std::fmt;

use crate::num::Scalar;
use crate::tentmap::TentMap;

/// A real interval whose endpoints may each be open or closed.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval<S> {
    pub lo: S,
    pub hi: S,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: S, hi: S, lo_closed: bool, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    pub fn closed(lo: S, hi: S) -> Self {
        Interval::new(lo, hi, true, true)
    }

    pub fn open(lo: S, hi: S) -> Self {
        Interval::new(lo, hi, false, false)
    }

    pub fn width(&self) -> S {
        self.hi.clone() - self.lo.clone()
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.tcmp(&self.hi) {
            Ordering::Less => false,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Greater => true,
        }
    }

    pub fn contains(&self, x: &S) -> bool {
        let above = match self.lo.tcmp(x) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Greater => false,
        };
        let below = match x.tcmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    /// `true` when `other` is a subset of `self`, honouring endpoint types.
    pub fn contains_interval(&self, other: &Interval<S>) -> bool {
        if other.is_empty() {
            return true;
        }
        let lo_ok = match self.lo.tcmp(&other.lo) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed || !other.lo_closed,
            Ordering::Greater => false,
        };
        let hi_ok = match other.hi.tcmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed || !other.hi_closed,
            Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }

    /// `true` when the two intervals share at least one point.
    pub fn intersects(&self, other: &Interval<S>) -> bool {
        let (lo, lo_closed) = match self.lo.tcmp(&other.lo) {
            Ordering::Less => (&other.lo, other.lo_closed),
            Ordering::Greater => (&self.lo, self.lo_closed),
            Ordering::Equal => (&self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.tcmp(&other.hi) {
            Ordering::Less => (&self.hi, self.hi_closed),
            Ordering::Greater => (&other.hi, other.hi_closed),
            Ordering::Equal => (&self.hi, self.hi_closed && other.hi_closed),
        };
        !Interval::new(lo.clone(), hi.clone(), lo_closed, hi_closed).is_empty()
    }

    /// Exact image under the tent map (which is continuous, so the image of an
    /// interval is an interval).
    pub fn image(&self, map: &TentMap<S>) -> Interval<S> {
        let half = S::half();
        let t_lo = map.apply(&self.lo);
        let t_hi = map.apply(&self.hi);
        // In float mode an endpoint within error of 1/2 is treated as straddling
        // it, which can only enlarge the computed image.
        let left_of_fold = match self.hi.tcmp(&half) {
            Ordering::Less => true,
            Ordering::Equal => S::EXACT,
            Ordering::Greater => false,
        };
        if left_of_fold {
            return Interval::new(t_lo, t_hi, self.lo_closed, self.hi_closed);
        }
        let right_of_fold = match self.lo.tcmp(&half) {
            Ordering::Greater => true,
            Ordering::Equal => S::EXACT,
            Ordering::Less => false,
        };
        if right_of_fold {
            return Interval::new(t_hi, t_lo, self.hi_closed, self.lo_closed);
        }
        // The critical point lies inside: the top of the image is the critical value.
        let (bottom, bottom_closed) = match t_lo.tcmp(&t_hi) {
            Ordering::Less => (t_lo, self.lo_closed),
            Ordering::Greater => (t_hi, self.hi_closed),
            Ordering::Equal => (S::min_of(&t_lo, &t_hi), self.lo_closed || self.hi_closed),
        };
        Interval::new(bottom, map.critical_value().clone(), bottom_closed, true)
    }

    /// Image under `T^n`.
    pub fn image_n(&self, map: &TentMap<S>, n: usize) -> Interval<S> {
        let mut cur = self.clone();
        for _ in 0..n {
            cur = cur.image(map);
        }
        cur
    }

    /// Full preimage under the tent map, restricted to `[0, s/2]` (the space
    /// every inverse-limit coordinate lives in). At most two pieces.
    pub fn preimage(&self, map: &TentMap<S>) -> Vec<Interval<S>> {
        let s = map.slope();
        let top = map.critical_value();
        let core = Interval::closed(S::zero(), top.clone());
        let mut out = Vec::with_capacity(2);
        let left = Interval::new(
            self.lo.clone() / s.clone(),
            self.hi.clone() / s.clone(),
            self.lo_closed,
            self.hi_closed,
        );
        let right = Interval::new(
            S::one() - self.hi.clone() / s.clone(),
            S::one() - self.lo.clone() / s.clone(),
            self.hi_closed,
            self.lo_closed,
        );
        for piece in [left, right] {
            if let Some(clipped) = piece.intersect(&core) {
                out.push(clipped);
            }
        }
        out
    }

    /// Preimage under `T^n` restricted to `[0, s/2]`.
    pub fn preimage_n(&self, map: &TentMap<S>, n: usize) -> Vec<Interval<S>> {
        let mut cur = vec![self.clone()];
        for _ in 0..n {
            cur = cur.iter().flat_map(|piece| piece.preimage(map)).collect();
        }
        cur
    }

    pub fn intersect(&self, other: &Interval<S>) -> Option<Interval<S>> {
        let (lo, lo_closed) = match self.lo.tcmp(&other.lo) {
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.tcmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        let out = Interval::new(lo, hi, lo_closed, hi_closed);
        (!out.is_empty()).then_some(out)
    }
}

impl<S: Scalar> fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}
