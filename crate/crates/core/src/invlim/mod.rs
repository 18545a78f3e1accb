//! Points and arcs of the inverse limit `K = lim←(T)`.
//!
//! A point is stored as an anchor coordinate `u = π_N` at a level `N` plus a
//! rule generating the deeper coordinates. Shallower coordinates follow by
//! forward iteration, so shifts are exact re-labellings of the level.

mod text;

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::tentmap::TentMap;

pub use text::{parse_arc, parse_point};

/// Upper bound on re-anchoring steps when searching for a common representation.
pub const REANCHOR_LIMIT: usize = 256;

/// Number of cycle repetitions walked explicitly when validating a periodic tail.
const CYCLE_CHECKS: usize = 64;

/// Deepest tail coordinate searched for the value `1/2`.
const TAIL_PPOINT_DEPTH: usize = 64;

/// Branch of `T` used to step one coordinate deeper.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// `v ↦ v/s`, landing in `[0, 1/2]`.
    L,
    /// `v ↦ 1 − v/s`, landing in `[1/2, 1]`.
    R,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::L => 'L',
            Symbol::R => 'R',
        }
    }
}

/// Rule producing the coordinates deeper than the anchor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TailRule {
    /// `π_{N+j} = u/s^j`; the points of the endpoint composant `C_0`.
    Left,
    /// Every deeper coordinate equals the fixed point `s/(s+1)`; requires `u` to be it.
    Fixed,
    /// Eventually periodic branch word `prefix · cycle^∞`.
    Itinerary {
        prefix: Vec<Symbol>,
        cycle: Vec<Symbol>,
    },
}

impl TailRule {
    pub fn itinerary(prefix: Vec<Symbol>, cycle: Vec<Symbol>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidTail("empty cycle".into()));
        }
        Ok(TailRule::Itinerary { prefix, cycle })
    }

    /// Symbol used to reach coordinate `N + 1 + j`.
    pub fn symbol(&self, j: usize) -> Symbol {
        match self {
            TailRule::Left => Symbol::L,
            TailRule::Fixed => Symbol::R,
            TailRule::Itinerary { prefix, cycle } => {
                if j < prefix.len() {
                    prefix[j]
                } else {
                    cycle[(j - prefix.len()) % cycle.len()]
                }
            }
        }
    }

    /// The rule seen from one level deeper.
    pub fn advance(&self) -> TailRule {
        match self {
            TailRule::Left | TailRule::Fixed => self.clone(),
            TailRule::Itinerary { prefix, cycle } => {
                if prefix.is_empty() {
                    let mut cycle = cycle.clone();
                    cycle.rotate_left(1);
                    TailRule::Itinerary {
                        prefix: Vec::new(),
                        cycle,
                    }
                } else {
                    TailRule::Itinerary {
                        prefix: prefix[1..].to_vec(),
                        cycle: cycle.clone(),
                    }
                }
            }
        }
    }

    /// Minimal `(prefix, primitive cycle)` describing the symbol stream.
    pub fn canonical_word(&self) -> (Vec<Symbol>, Vec<Symbol>) {
        match self {
            TailRule::Left => (Vec::new(), vec![Symbol::L]),
            TailRule::Fixed => (Vec::new(), vec![Symbol::R]),
            TailRule::Itinerary { prefix, cycle } => {
                let n = cycle.len();
                let period = (1..=n)
                    .find(|&d| n % d == 0 && (0..n).all(|i| cycle[i] == cycle[i % d]))
                    .unwrap_or(n);
                let mut cycle = cycle[..period].to_vec();
                let mut prefix = prefix.clone();
                while prefix.last().is_some_and(|s| Some(s) == cycle.last()) {
                    prefix.pop();
                    cycle.rotate_right(1);
                }
                (prefix, cycle)
            }
        }
    }

    /// Replaces a periodic word equal to `L^∞` by [`TailRule::Left`].
    pub fn normalized(&self) -> TailRule {
        match self {
            TailRule::Itinerary { .. } => {
                let (prefix, cycle) = self.canonical_word();
                if prefix.is_empty() && cycle == [Symbol::L] {
                    TailRule::Left
                } else {
                    TailRule::Itinerary { prefix, cycle }
                }
            }
            _ => self.clone(),
        }
    }

    /// Length of the non-periodic part of the canonical word.
    pub fn preperiod(&self) -> usize {
        self.canonical_word().0.len()
    }

    /// True when the symbol stream is eventually `L^∞`.
    pub fn is_eventually_left(&self) -> bool {
        self.canonical_word().1 == [Symbol::L]
    }
}

impl fmt::Display for TailRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailRule::Left => write!(f, "L"),
            TailRule::Fixed => write!(f, "FIX"),
            TailRule::Itinerary { prefix, cycle } => {
                let word = |w: &[Symbol]| w.iter().map(|s| s.as_char()).collect::<String>();
                write!(f, "IT:{}({})", word(prefix), word(cycle))
            }
        }
    }
}

impl<S: Scalar> TentMap<S> {
    /// One coordinate deeper along `symbol`.
    pub fn branch(&self, v: &S, symbol: Symbol) -> S {
        let w = v.clone() / self.slope().clone();
        match symbol {
            Symbol::L => w,
            Symbol::R => S::one() - w,
        }
    }

    fn check_anchor(&self, u: &S) -> Result<()> {
        if u.tlt(&S::zero()) || self.critical_value().tlt(u) {
            return Err(Error::Domain {
                value: u.to_string(),
                domain: format!("[0, {}]", self.critical_value()),
            });
        }
        Ok(())
    }

    /// Checks that `tail` produces a valid backward orbit from `u`.
    pub fn validate_tail(&self, u: &S, tail: &TailRule) -> Result<()> {
        self.check_anchor(u)?;
        let floor = self.core_floor();
        let step = |v: &S, sym: Symbol| -> Result<S> {
            if sym == Symbol::R && v.tlt(&floor) {
                return Err(Error::InvalidTail(format!(
                    "right branch preimage of {v} exceeds the critical value"
                )));
            }
            Ok(self.branch(v, sym))
        };
        match tail {
            TailRule::Left => Ok(()),
            TailRule::Fixed => {
                if u.teq(self.fixed_point()) {
                    Ok(())
                } else {
                    Err(Error::InvalidTail(format!(
                        "fixed tail needs anchor {}, got {u}",
                        self.fixed_point()
                    )))
                }
            }
            TailRule::Itinerary { prefix, cycle } => {
                if cycle.is_empty() {
                    return Err(Error::InvalidTail("empty cycle".into()));
                }
                let mut v = u.clone();
                for &sym in prefix {
                    v = step(&v, sym)?;
                }
                let target = self.cycle_fixed_point(cycle);
                let mut w = target.clone();
                for &sym in cycle {
                    w = step(&w, sym)?;
                }
                for _ in 0..CYCLE_CHECKS {
                    if v.teq(&target) {
                        break;
                    }
                    for &sym in cycle {
                        v = step(&v, sym)?;
                    }
                }
                Ok(())
            }
        }
    }

    /// Fixed point of the affine map obtained by composing the branches of `cycle`.
    fn cycle_fixed_point(&self, cycle: &[Symbol]) -> S {
        let (alpha, beta) = self.affine_word(cycle);
        beta / (S::one() - alpha)
    }

    /// `(α, β)` with `branch_word(v) = α v + β`.
    fn affine_word(&self, word: &[Symbol]) -> (S, S) {
        let mut alpha = S::one();
        let mut beta = S::zero();
        for &sym in word {
            alpha = alpha / self.slope().clone();
            beta = beta / self.slope().clone();
            if sym == Symbol::R {
                alpha = -alpha;
                beta = S::one() - beta;
            }
        }
        (alpha, beta)
    }
}

/// A point of `K`: anchor `u = π_N` at level `N` plus a tail rule.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitPoint<S> {
    level: usize,
    anchor: S,
    tail: TailRule,
}

impl<S: Scalar> LimitPoint<S> {
    pub fn new(map: &TentMap<S>, level: usize, anchor: S, tail: TailRule) -> Result<Self> {
        map.validate_tail(&anchor, &tail)?;
        Ok(LimitPoint {
            level,
            anchor,
            tail,
        })
    }

    pub(crate) fn from_parts(level: usize, anchor: S, tail: TailRule) -> Self {
        LimitPoint {
            level,
            anchor,
            tail,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn anchor(&self) -> &S {
        &self.anchor
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    /// The coordinate `π_n`.
    pub fn project(&self, map: &TentMap<S>, n: usize) -> S {
        if n <= self.level {
            return map.apply_n(&self.anchor, self.level - n);
        }
        let depth = n - self.level;
        match &self.tail {
            TailRule::Left => self.anchor.clone() / map.slope().pow(depth as u32),
            TailRule::Fixed => self.anchor.clone(),
            tail => {
                let mut v = self.anchor.clone();
                for j in 0..depth {
                    v = map.branch(&v, tail.symbol(j));
                }
                v
            }
        }
    }

    /// `[π_0, …, π_upto]`.
    pub fn coords(&self, map: &TentMap<S>, upto: usize) -> Vec<S> {
        let top = self.level.min(upto);
        let mut out = vec![S::zero(); upto + 1];
        let mut v = self.project(map, top);
        out[top] = v.clone();
        for i in (0..top).rev() {
            v = map.apply(&v);
            out[i] = v.clone();
        }
        let mut v = self.anchor.clone();
        for (j, n) in (self.level + 1..=upto).enumerate() {
            v = map.branch(&v, self.tail.symbol(j));
            out[n] = v.clone();
        }
        out
    }

    /// Prepends `T(π_0)`.
    pub fn shift(&self) -> Self {
        LimitPoint {
            level: self.level + 1,
            anchor: self.anchor.clone(),
            tail: self.tail.clone(),
        }
    }

    /// Drops `π_0`.
    pub fn shift_inv(&self, map: &TentMap<S>) -> Self {
        let base = if self.level == 0 {
            self.reanchor(map, 1)
        } else {
            self.clone()
        };
        LimitPoint {
            level: base.level - 1,
            anchor: base.anchor,
            tail: base.tail,
        }
    }

    /// `shift^k` for `k ≥ 0`, `shift_inv^{−k}` otherwise.
    pub fn shift_by(&self, map: &TentMap<S>, k: i64) -> Self {
        if k >= 0 {
            LimitPoint {
                level: self.level + k as usize,
                ..self.clone()
            }
        } else {
            let back = (-k) as usize;
            let base = if self.level < back {
                self.reanchor(map, back)
            } else {
                self.clone()
            };
            LimitPoint {
                level: base.level - back,
                ..base
            }
        }
    }

    /// The same point represented at a level `≥` the current one.
    pub fn reanchor(&self, map: &TentMap<S>, level: usize) -> Self {
        if level <= self.level {
            return self.clone();
        }
        let depth = level - self.level;
        match &self.tail {
            TailRule::Left => LimitPoint {
                level,
                anchor: self.anchor.clone() / map.slope().pow(depth as u32),
                tail: TailRule::Left,
            },
            TailRule::Fixed => LimitPoint {
                level,
                ..self.clone()
            },
            _ => {
                let mut v = self.anchor.clone();
                let mut tail = self.tail.clone();
                for _ in 0..depth {
                    v = map.branch(&v, tail.symbol(0));
                    tail = tail.advance();
                }
                LimitPoint {
                    level,
                    anchor: v,
                    tail: tail.normalized(),
                }
            }
        }
    }

    /// Position `τ = s^N u` along `C_0` (the `d̄`-distance to the endpoint), or
    /// `None` when the point is not on `C_0`.
    pub fn c0_position(&self, map: &TentMap<S>) -> Option<S> {
        if !self.tail.is_eventually_left() {
            return None;
        }
        let at = self.reanchor(map, self.level + self.tail.preperiod());
        Some(map.slope().pow(at.level as u32) * at.anchor)
    }

    pub fn is_on_c0(&self) -> bool {
        self.tail.is_eventually_left()
    }
}

impl<S: Scalar> fmt::Display for LimitPoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "point N={} u={} tail={}",
            self.level, self.anchor, self.tail
        )
    }
}

/// The endpoint `(0, 0, 0, …)`.
pub fn zero_point<S: Scalar>() -> LimitPoint<S> {
    LimitPoint::from_parts(0, S::zero(), TailRule::Left)
}

/// The constant point `(p, p, p, …)`.
pub fn fixed_limit_point<S: Scalar>(map: &TentMap<S>) -> LimitPoint<S> {
    LimitPoint::from_parts(0, map.fixed_point().clone(), TailRule::Fixed)
}

/// The point `(N = n, u = x, LeftTail)` of `C_0`.
pub fn c0_point<S: Scalar>(map: &TentMap<S>, n: usize, x: S) -> Result<LimitPoint<S>> {
    LimitPoint::new(map, n, x, TailRule::Left)
}

/// The point of `C_0` at position `τ`, represented at the smallest level
/// `≥ min_level` whose anchor fits in `[0, s/2]`.
pub fn c0_at_position<S: Scalar>(
    map: &TentMap<S>,
    tau: &S,
    min_level: usize,
) -> Result<LimitPoint<S>> {
    if tau.tlt(&S::zero()) {
        return Err(Error::Domain {
            value: tau.to_string(),
            domain: "[0, ∞)".into(),
        });
    }
    let tau = S::max_of(tau, &S::zero());
    let mut scale = map.slope().pow(min_level as u32);
    let mut level = min_level;
    loop {
        let u = tau.clone() / scale.clone();
        if u.tle(map.critical_value()) {
            let u = S::min_of(&u, map.critical_value());
            return Ok(LimitPoint::from_parts(level, u, TailRule::Left));
        }
        scale = scale * map.slope().clone();
        level += 1;
        if level > min_level + 4 * REANCHOR_LIMIT {
            return Err(Error::Domain {
                value: tau.to_string(),
                domain: "representable positions".into(),
            });
        }
    }
}

/// Re-anchors `x` and `y` at the least common level where their tails agree.
pub fn common_representation<S: Scalar>(
    map: &TentMap<S>,
    x: &LimitPoint<S>,
    y: &LimitPoint<S>,
) -> Result<(LimitPoint<S>, LimitPoint<S>)> {
    let (px, cx) = x.tail.canonical_word();
    let (py, cy) = y.tail.canonical_word();
    let lcm = num_integer::lcm(cx.len(), cy.len());
    let bound = (px.len() + py.len() + lcm + 2).min(REANCHOR_LIMIT);
    let base = x.level.max(y.level);
    for k in 0..=bound {
        let xa = x.reanchor(map, base + k);
        let ya = y.reanchor(map, base + k);
        if xa.tail.canonical_word() == ya.tail.canonical_word() {
            return Ok((xa, ya));
        }
    }
    Err(Error::NotSameComposant(bound))
}

/// Composant distance `d̄(x, y) = s^L |π_L(x) − π_L(y)|` at a common level `L`.
pub fn dbar<S: Scalar>(map: &TentMap<S>, x: &LimitPoint<S>, y: &LimitPoint<S>) -> Result<S> {
    let (xa, ya) = common_representation(map, x, y)?;
    Ok(map.slope().pow(xa.level as u32) * (xa.anchor - ya.anchor).abs())
}

/// Same as [`dbar`] evaluated after re-anchoring both points to `level`.
pub fn dbar_at_level<S: Scalar>(
    map: &TentMap<S>,
    x: &LimitPoint<S>,
    y: &LimitPoint<S>,
    level: usize,
) -> Result<S> {
    let (xa, ya) = common_representation(map, x, y)?;
    let level = level.max(xa.level);
    let (xa, ya) = (xa.reanchor(map, level), ya.reanchor(map, level));
    Ok(map.slope().pow(level as u32) * (xa.anchor - ya.anchor).abs())
}

/// Order along `C_0`, which increases away from the endpoint.
pub fn composant_order<S: Scalar>(
    map: &TentMap<S>,
    x: &LimitPoint<S>,
    y: &LimitPoint<S>,
) -> Result<Ordering> {
    match (x.c0_position(map), y.c0_position(map)) {
        (Some(a), Some(b)) => Ok(a.tcmp(&b)),
        _ => Err(Error::Precondition(
            "composant order is only available on C_0".into(),
        )),
    }
}

/// `Σ_{i ≤ D} 2^{−i}|π_i(x) − π_i(y)|` plus a bound on the rest of the series.
///
/// When both points share a tail at level `L` the rest is summed in closed
/// form with `D = max(depth, L)`; otherwise it is bounded by `2^{−depth}·s/2`.
pub fn ambient_metric<S: Scalar>(
    map: &TentMap<S>,
    x: &LimitPoint<S>,
    y: &LimitPoint<S>,
    depth: usize,
) -> f64 {
    let shared = common_representation(map, x, y).ok();
    let d = match &shared {
        Some((xa, _)) => depth.max(xa.level),
        None => depth,
    };
    let cx = x.coords(map, d);
    let cy = y.coords(map, d);
    let mut sum = 0.0;
    let mut weight = 1.0;
    for (a, b) in cx.iter().zip(&cy) {
        sum += weight * (a.clone() - b.clone()).abs().to_f64();
        weight *= 0.5;
    }
    let s = map.slope().to_f64();
    let rest = match shared {
        Some((xa, ya)) => {
            let delta = (xa.anchor - ya.anchor).abs().to_f64();
            let ratio = 1.0 / (2.0 * s);
            delta * s.powi(xa.level as i32) * ratio.powi(d as i32 + 1) / (1.0 - ratio)
        }
        None => 0.5f64.powi(depth as i32) * s / 2.0,
    };
    let total = sum + rest;
    // Rounding of the f64 accumulation is covered by a relative ulp margin.
    total * (1.0 + 4.0 * (d as f64 + 2.0) * f64::EPSILON)
}

/// `{(N, u, tail) : u ∈ [lo, hi]}`; `π_N` is a bijection onto `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Arc<S> {
    level: usize,
    lo: S,
    hi: S,
    tail: TailRule,
}

impl<S: Scalar> Arc<S> {
    pub fn new(map: &TentMap<S>, level: usize, lo: S, hi: S, tail: TailRule) -> Result<Self> {
        if hi.tlt(&lo) {
            return Err(Error::Precondition(format!(
                "arc bounds out of order: {lo} > {hi}"
            )));
        }
        map.validate_tail(&lo, &tail)?;
        map.validate_tail(&hi, &tail)?;
        Ok(Arc {
            level,
            lo,
            hi,
            tail,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn lo(&self) -> &S {
        &self.lo
    }

    pub fn hi(&self) -> &S {
        &self.hi
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    pub fn point_at(&self, u: S) -> LimitPoint<S> {
        LimitPoint::from_parts(self.level, u, self.tail.clone())
    }

    pub fn endpoints(&self) -> (LimitPoint<S>, LimitPoint<S>) {
        (
            self.point_at(self.lo.clone()),
            self.point_at(self.hi.clone()),
        )
    }

    /// `d̄`-length `s^N (b − a)`.
    pub fn length(&self, map: &TentMap<S>) -> S {
        map.slope().pow(self.level as u32) * (self.hi.clone() - self.lo.clone())
    }

    pub fn contains_anchor(&self, u: &S) -> bool {
        self.lo.tle(u) && u.tle(&self.hi)
    }

    /// The same arc represented at a deeper level.
    pub fn reanchor(&self, map: &TentMap<S>, level: usize) -> Self {
        let (a, b) = self.endpoints();
        let (a, b) = (a.reanchor(map, level), b.reanchor(map, level));
        let (lo, hi) = if a.anchor <= b.anchor {
            (a.anchor, b.anchor)
        } else {
            (b.anchor, a.anchor)
        };
        Arc {
            level: a.level,
            lo,
            hi,
            tail: a.tail,
        }
    }

    /// Sub-arc with anchors in `[lo, hi]`.
    pub fn sub_arc(&self, lo: S, hi: S) -> Self {
        Arc {
            level: self.level,
            lo,
            hi,
            tail: self.tail.clone(),
        }
    }

    /// Smallest `m` such that `π_m` is injective on the arc.
    pub fn minimal_injective_level(&self, map: &TentMap<S>) -> usize {
        if self.level == 0 {
            return 0;
        }
        map.fold_points(&self.lo, &self.hi, self.level - 1)
            .iter()
            .filter(|f| self.lo.tlt(&f.anchor) && f.anchor.tlt(&self.hi))
            .map(|f| self.level - f.steps)
            .max()
            .unwrap_or(0)
    }
}

impl<S: Scalar> fmt::Display for Arc<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "arc N={} a={} b={} tail={}",
            self.level, self.lo, self.hi, self.tail
        )
    }
}

/// The arc of the composant joining `x` and `y`.
pub fn arc_between<S: Scalar>(
    map: &TentMap<S>,
    x: &LimitPoint<S>,
    y: &LimitPoint<S>,
) -> Result<Arc<S>> {
    let (xa, ya) = common_representation(map, x, y)?;
    let (lo, hi) = if xa.anchor <= ya.anchor {
        (xa.anchor, ya.anchor)
    } else {
        (ya.anchor, xa.anchor)
    };
    Ok(Arc {
        level: xa.level,
        lo,
        hi,
        tail: xa.tail,
    })
}

/// A point with `π_n = 1/2` for some `n > p`.
#[derive(Clone, Debug, PartialEq)]
pub struct PPoint<S> {
    pub anchor: S,
    /// The deepest `n` with `π_n = 1/2`.
    pub fold_level: usize,
}

/// p-points of an arc, split by where the critical value occurs.
#[derive(Clone, Debug)]
pub struct PPoints<S> {
    /// Points with `π_n = 1/2` at some level `p < n ≤ N`, sorted by anchor.
    pub head: Vec<PPoint<S>>,
    /// Points whose `1/2` lies in the tail (`n > N`).
    pub tail: Vec<PPoint<S>>,
}

impl<S: Scalar> PPoints<S> {
    /// Both channels merged and sorted by anchor.
    pub fn all(&self) -> Vec<PPoint<S>> {
        let mut out: Vec<PPoint<S>> = Vec::with_capacity(self.head.len() + self.tail.len());
        for p in self.head.iter().chain(&self.tail) {
            match out.iter_mut().find(|q| q.anchor.teq(&p.anchor)) {
                Some(q) => q.fold_level = q.fold_level.max(p.fold_level),
                None => out.push(p.clone()),
            }
        }
        out.sort_by(|a, b| a.anchor.partial_cmp(&b.anchor).unwrap_or(Ordering::Equal));
        out
    }
}

/// The p-points of `arc`.
pub fn p_points_on_arc<S: Scalar>(map: &TentMap<S>, arc: &Arc<S>, p: usize) -> PPoints<S> {
    let n_top = arc.level;
    let head = if n_top > p {
        map.fold_points(&arc.lo, &arc.hi, n_top - p - 1)
            .into_iter()
            .map(|f| PPoint {
                anchor: f.anchor,
                fold_level: n_top - f.steps,
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut tail: Vec<PPoint<S>> = Vec::new();
    let half = S::half();
    let mut alpha = S::one();
    let mut beta = S::zero();
    for j in 1..=TAIL_PPOINT_DEPTH {
        alpha = alpha / map.slope().clone();
        beta = beta / map.slope().clone();
        if arc.tail.symbol(j - 1) == Symbol::R {
            alpha = -alpha;
            beta = S::one() - beta;
        }
        if n_top + j <= p {
            continue;
        }
        let u = (half.clone() - beta.clone()) / alpha.clone();
        if arc.contains_anchor(&u) {
            match tail.iter_mut().find(|q| q.anchor.teq(&u)) {
                Some(q) => q.fold_level = n_top + j,
                None => tail.push(PPoint {
                    anchor: u,
                    fold_level: n_top + j,
                }),
            }
        }
    }
    tail.sort_by(|a, b| a.anchor.partial_cmp(&b.anchor).unwrap_or(Ordering::Equal));
    PPoints { head, tail }
}

/// One adjacent pair of p-points on an arc.
#[derive(Clone, Debug)]
pub struct GapCheck<S> {
    pub left: S,
    pub right: S,
    pub gap: f64,
    pub bound: f64,
    /// `π_p` is injective on the sub-arc between the pair.
    pub injective: bool,
    pub ok: bool,
}

/// Compares `d̄` between consecutive p-points of `arc` with `s^p`.
pub fn adjacent_gap_check<S: Scalar>(
    map: &TentMap<S>,
    arc: &Arc<S>,
    p: usize,
    tol: f64,
) -> Vec<GapCheck<S>> {
    let points = p_points_on_arc(map, arc, p).all();
    let bound = map.slope().pow(p as u32).to_f64();
    let scale = map.slope().pow(arc.level as u32);
    points
        .windows(2)
        .map(|pair| {
            let (a, b) = (pair[0].anchor.clone(), pair[1].anchor.clone());
            let gap = (scale.clone() * (b.clone() - a.clone())).to_f64();
            let injective = arc
                .sub_arc(a.clone(), b.clone())
                .minimal_injective_level(map)
                <= p;
            GapCheck {
                left: a,
                right: b,
                gap,
                bound,
                injective,
                ok: injective && gap <= bound + tol,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests;
