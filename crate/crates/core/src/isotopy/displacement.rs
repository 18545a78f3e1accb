//! Displacement maps: homeomorphisms of `K` that slide points of `C_0` along
//! the composant and fix everything else.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::invlim::{c0_at_position, LimitPoint};
use crate::num::Scalar;
use crate::tentmap::TentMap;

/// Denominator of the dyadic grid used for random parameters.
const GRID: i64 = 1 << 20;

/// A piecewise-linear bump of `φ` on `[start, end]` with value `height` at `peak`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hat<S> {
    pub start: S,
    pub peak: S,
    pub end: S,
    pub height: S,
}

impl<S: Scalar> Hat<S> {
    fn value(&self, tau: &S) -> S {
        if *tau <= self.start || *tau >= self.end {
            S::zero()
        } else if *tau <= self.peak {
            self.height.clone() * (tau.clone() - self.start.clone())
                / (self.peak.clone() - self.start.clone())
        } else {
            self.height.clone() * (self.end.clone() - tau.clone())
                / (self.end.clone() - self.peak.clone())
        }
    }
}

/// `h(x) = g(τ + φ(τ))` for `x = g(τ) ∈ C_0`, identity elsewhere; `φ` is a
/// sum of disjoint hats with slopes above `−1`, so `h` preserves order.
#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementMap<S> {
    pub(super) hats: Vec<Hat<S>>,
    pub(super) bound: S,
}

impl<S: Scalar> DisplacementMap<S> {
    pub fn identity() -> Self {
        DisplacementMap {
            hats: Vec::new(),
            bound: S::zero(),
        }
    }

    /// Validates the hats and checks `φ = 0` at each position in `fixed`.
    pub fn new(mut hats: Vec<Hat<S>>, fixed: &[S]) -> Result<Self> {
        hats.sort_by(|a, b| {
            a.start
                .partial_cmp(&b.start)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for h in &hats {
            if h.start < S::zero() || !(h.start < h.peak && h.peak < h.end) {
                return Err(Error::Precondition(format!(
                    "hat needs 0 ≤ start < peak < end, got {}, {}, {}",
                    h.start, h.peak, h.end
                )));
            }
            let rise = h.peak.clone() - h.start.clone();
            let fall = h.end.clone() - h.peak.clone();
            let steepest = S::min_of(&rise, &fall);
            if h.height.abs() >= steepest {
                return Err(Error::Precondition(format!(
                    "hat height {} would reverse order on a piece of length {steepest}",
                    h.height
                )));
            }
        }
        if let Some(w) = hats.windows(2).find(|w| w[1].start < w[0].end) {
            return Err(Error::Precondition(format!(
                "hats overlap at {}",
                w[1].start
            )));
        }
        let bound = hats
            .iter()
            .map(|h| h.height.abs())
            .fold(S::zero(), |a, b| S::max_of(&a, &b));
        let map = DisplacementMap { hats, bound };
        if let Some(tau) = fixed.iter().find(|t| !map.phi(t).teq(&S::zero())) {
            return Err(Error::Precondition(format!(
                "displacement does not vanish at fixed position {tau}"
            )));
        }
        Ok(map)
    }

    /// Random hats on `[0, span]` with dyadic parameters; each hat keeps
    /// `|height|` below 90% of its half-width.
    pub fn random<R: Rng>(rng: &mut R, hats: usize, span: f64, fixed: &[S]) -> Result<Self> {
        let dyadic = |x: f64| S::from_ratio((x * GRID as f64).round() as i64, GRID);
        let slot = span / hats.max(1) as f64;
        let mut out = Vec::with_capacity(hats);
        for i in 0..hats {
            let base = i as f64 * slot;
            let a = base + rng.gen_range(0.0..0.25) * slot;
            let b = base + rng.gen_range(0.5..1.0) * slot;
            let half = (b - a) / 2.0;
            let height = rng.gen_range(-0.9..0.9) * half;
            out.push(Hat {
                start: dyadic(a),
                peak: dyadic(a + half),
                end: dyadic(b),
                height: dyadic(height),
            });
        }
        // Hats that touch a fixed position are dropped rather than reshaped.
        out.retain(|h| fixed.iter().all(|t| !(h.start < *t && *t < h.end)));
        DisplacementMap::new(out, fixed)
    }

    /// [`DisplacementMap::random`] driven by a ChaCha8 stream from `seed`.
    pub fn seeded(seed: u64, hats: usize, span: f64, fixed: &[S]) -> Result<Self> {
        DisplacementMap::random(&mut ChaCha8Rng::seed_from_u64(seed), hats, span, fixed)
    }

    pub fn hats(&self) -> &[Hat<S>] {
        &self.hats
    }

    /// `sup |φ|`.
    pub fn bound(&self) -> &S {
        &self.bound
    }

    pub fn phi(&self, tau: &S) -> S {
        self.hats
            .iter()
            .map(|h| h.value(tau))
            .fold(S::zero(), |a, b| a + b)
    }

    /// Uniformly rescaled heights, so that `sup |φ| = bound`; fails if that
    /// would break order preservation.
    pub fn with_bound(&self, bound: S) -> Result<Self> {
        if self.bound == S::zero() {
            return Ok(self.clone());
        }
        let factor = bound / self.bound.clone();
        let hats = self
            .hats
            .iter()
            .map(|h| Hat {
                height: h.height.clone() * factor.clone(),
                ..h.clone()
            })
            .collect();
        DisplacementMap::new(hats, &[])
    }

    pub fn apply(&self, map: &TentMap<S>, x: &LimitPoint<S>) -> LimitPoint<S> {
        match x.c0_position(map) {
            Some(tau) => {
                let moved = tau.clone() + self.phi(&tau);
                c0_at_position(map, &moved, x.level())
                    .expect("order-preserving displacement stays nonnegative")
            }
            None => x.clone(),
        }
    }
}
