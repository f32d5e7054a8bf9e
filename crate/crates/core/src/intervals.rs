//! Exact set algebra over finite unions of extended-real intervals.
//!
//! An [`IntervalSet`] is always kept in canonical form: components sorted,
//! pairwise disjoint and non-adjacent, with endpoint-inclusion flags tracked
//! exactly. Canonical form is unique, so structural equality is set equality.
//!
//! Expansion is the Minkowski sum with the closed ε-ball (`A ⊕ [-ε, ε]`) and
//! contraction is its dual, `((Aᶜ)^ε)ᶜ`: the points whose closed ε-ball lies
//! in `A`. Both are computed with plain float arithmetic on the endpoints and
//! no merge tolerance. Callers that need to absorb rounding slivers use
//! [`IntervalSet::snap`].

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    /// Builds an interval; infinite endpoints are forced open.
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Interval { lo, hi, lo_closed: lo_closed && lo.is_finite(), hi_closed: hi_closed && hi.is_finite() }
    }

    /// Like [`Interval::new`] but rejects empty or malformed intervals.
    pub fn try_new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        let iv = Interval::new(lo, hi, lo_closed, hi_closed);
        if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY || iv.is_empty() {
            return Err(Error::InvalidArgument(format!("malformed interval {iv}")));
        }
        Ok(iv)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Interval::new(lo, hi, false, false)
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval::new(lo, hi, true, true)
    }

    pub fn point(x: f64) -> Self {
        Interval::new(x, x, true, true)
    }

    pub fn real_line() -> Self {
        Interval::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi || (self.lo == self.hi && self.lo_closed && self.hi_closed))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi && !self.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn length(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn midpoint(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lo < x && x < self.hi) || (x == self.lo && self.lo_closed) || (x == self.hi && self.hi_closed)
    }

    /// Minkowski sum with `[-eps, eps]`.
    pub fn expand(&self, eps: f64) -> Interval {
        Interval::new(self.lo - eps, self.hi + eps, self.lo_closed, self.hi_closed)
    }

    pub fn closure(&self) -> Interval {
        Interval::new(self.lo, self.hi, true, true)
    }

    pub fn interior(&self) -> Interval {
        Interval::new(self.lo, self.hi, false, false)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", fmt_bound(self.lo), fmt_bound(self.hi))
    }
}

fn fmt_bound(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Bound {
    Num(f64),
    Text(String),
}

impl Bound {
    fn from_f64(x: f64) -> Bound {
        if x == f64::INFINITY {
            Bound::Text("inf".into())
        } else if x == f64::NEG_INFINITY {
            Bound::Text("-inf".into())
        } else {
            Bound::Num(x)
        }
    }

    fn to_f64<E: de::Error>(&self) -> std::result::Result<f64, E> {
        match self {
            Bound::Num(x) => Ok(*x),
            Bound::Text(s) => match s.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(E::custom(format!("bad interval bound `{other}`"))),
            },
        }
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(4)?;
        t.serialize_element(&Bound::from_f64(self.lo))?;
        t.serialize_element(&Bound::from_f64(self.hi))?;
        t.serialize_element(&self.lo_closed)?;
        t.serialize_element(&self.hi_closed)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (lo, hi, lc, hc): (Bound, Bound, bool, bool) = Deserialize::deserialize(d)?;
        Interval::try_new(lo.to_f64()?, hi.to_f64()?, lc, hc).map_err(de::Error::custom)
    }
}

/// Canonical finite union of intervals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

/// Membership of a set sampled at a sorted list of critical points and on the
/// open segments between them. Every endpoint of the represented set must be
/// one of the critical points.
struct Profile {
    points: Vec<f64>,
    at: Vec<bool>,
    between: Vec<bool>,
}

impl Profile {
    fn of(set: &IntervalSet, points: &[f64]) -> Profile {
        // `set` may be an unsorted raw list here, so no binary search.
        let at = points.iter().map(|&x| set.intervals.iter().any(|iv| iv.contains(x))).collect();
        let mut between = Vec::with_capacity(points.len() + 1);
        for k in 0..=points.len() {
            let lo = if k == 0 { f64::NEG_INFINITY } else { points[k - 1] };
            let hi = if k == points.len() { f64::INFINITY } else { points[k] };
            between.push(set.intervals.iter().any(|iv| iv.lo <= lo && hi <= iv.hi));
        }
        Profile { points: points.to_vec(), at, between }
    }

    fn into_set(self) -> IntervalSet {
        // Walk seg0, pt0, seg1, pt1, ..., seg_n and emit maximal runs.
        let n = self.points.len();
        let mut out = Vec::new();
        let mut start: Option<(f64, bool)> = None;
        for k in 0..=n {
            let seg_lo = if k == 0 { f64::NEG_INFINITY } else { self.points[k - 1] };
            if self.between[k] {
                if start.is_none() {
                    start = Some((seg_lo, false));
                }
            } else if let Some((lo, lc)) = start.take() {
                out.push(Interval::new(lo, seg_lo, lc, true));
            }
            if k == n {
                break;
            }
            let x = self.points[k];
            if self.at[k] {
                if start.is_none() {
                    start = Some((x, true));
                }
            } else if let Some((lo, lc)) = start.take() {
                out.push(Interval::new(lo, x, lc, false));
            }
        }
        if let Some((lo, lc)) = start {
            out.push(Interval::new(lo, f64::INFINITY, lc, false));
        }
        IntervalSet { intervals: out }
    }
}

fn critical_points<'a>(sets: impl IntoIterator<Item = &'a IntervalSet>) -> Vec<f64> {
    let mut pts: Vec<f64> = sets
        .into_iter()
        .flat_map(|s| s.intervals.iter().flat_map(|iv| [iv.lo, iv.hi]))
        .filter(|x| x.is_finite())
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn real_line() -> Self {
        IntervalSet { intervals: vec![Interval::real_line()] }
    }

    pub fn from_interval(iv: Interval) -> Self {
        Self::from_intervals(vec![iv])
    }

    /// Canonical union of arbitrary (possibly overlapping or empty) intervals.
    pub fn from_intervals(ivs: Vec<Interval>) -> Self {
        let raw = IntervalSet { intervals: ivs.into_iter().filter(|iv| !iv.is_empty()).collect() };
        let pts = critical_points([&raw]);
        Profile::of(&raw, &pts).into_set()
    }

    /// Union of open intervals `(lo, hi)`.
    pub fn open_union(pairs: &[(f64, f64)]) -> Self {
        Self::from_intervals(pairs.iter().map(|&(a, b)| Interval::open(a, b)).collect())
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_real_line(&self) -> bool {
        self.intervals.len() == 1 && self.intervals[0].lo == f64::NEG_INFINITY && self.intervals[0].hi == f64::INFINITY
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        self.intervals.len()
    }

    pub fn contains(&self, x: f64) -> bool {
        // Components are sorted; find the last one starting at or before x.
        let idx = self.intervals.partition_point(|iv| iv.lo <= x);
        idx > 0 && self.intervals[idx - 1].contains(x)
    }

    fn combine(&self, other: &IntervalSet, op: impl Fn(bool, bool) -> bool) -> IntervalSet {
        let pts = critical_points([self, other]);
        let a = Profile::of(self, &pts);
        let b = Profile::of(other, &pts);
        Profile {
            at: a.at.iter().zip(&b.at).map(|(&x, &y)| op(x, y)).collect(),
            between: a.between.iter().zip(&b.between).map(|(&x, &y)| op(x, y)).collect(),
            points: pts,
        }
        .into_set()
    }

    pub fn complement(&self) -> IntervalSet {
        let pts = critical_points([self]);
        let mut p = Profile::of(self, &pts);
        p.at.iter_mut().for_each(|b| *b = !*b);
        p.between.iter_mut().for_each(|b| *b = !*b);
        p.into_set()
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn sym_diff(&self, other: &IntervalSet) -> IntervalSet {
        self.combine(other, |a, b| a != b)
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    /// `A^ε = A ⊕ [-ε, ε]`.
    pub fn expand(&self, eps: f64) -> IntervalSet {
        assert!(eps >= 0.0, "expansion radius must be non-negative");
        if eps == 0.0 {
            return self.clone();
        }
        Self::from_intervals(self.intervals.iter().map(|iv| iv.expand(eps)).collect())
    }

    /// `A^{-ε} = ((Aᶜ)^ε)ᶜ`.
    pub fn contract(&self, eps: f64) -> IntervalSet {
        self.complement().expand(eps).complement()
    }

    pub fn closure(&self) -> IntervalSet {
        Self::from_intervals(self.intervals.iter().map(Interval::closure).collect())
    }

    pub fn interior(&self) -> IntervalSet {
        Self::from_intervals(self.intervals.iter().map(Interval::interior).collect())
    }

    /// Finite endpoints of the components, as a set of single points.
    pub fn boundary(&self) -> IntervalSet {
        Self::from_intervals(self.finite_endpoints().into_iter().map(Interval::point).collect())
    }

    pub fn finite_endpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.intervals.iter().flat_map(|iv| [iv.lo, iv.hi]).filter(|x| x.is_finite()).collect();
        v.dedup();
        v
    }

    /// Sum of component lengths; `+inf` when a component is unbounded.
    pub fn lebesgue_length(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    /// Every component of the set and of its complement is longer than `2ε`.
    pub fn is_regular(&self, eps: f64) -> bool {
        let long = |iv: &Interval| !iv.is_bounded() || iv.length() > 2.0 * eps;
        self.intervals.iter().all(long) && self.complement().intervals.iter().all(long)
    }

    /// Merges components separated by gaps of length at most `delta` and drops
    /// components of length at most `delta` that are isolated points.
    pub fn snap(&self, delta: f64) -> IntervalSet {
        let mut out: Vec<Interval> = Vec::with_capacity(self.intervals.len());
        for iv in &self.intervals {
            match out.last_mut() {
                Some(prev) if iv.lo - prev.hi <= delta => {
                    prev.hi = iv.hi;
                    prev.hi_closed = iv.hi_closed;
                }
                _ => out.push(*iv),
            }
        }
        Self::from_intervals(out)
    }

    /// Smallest interval containing the set, or `None` for the empty set.
    pub fn hull(&self) -> Option<Interval> {
        let first = self.intervals.first()?;
        let last = self.intervals.last()?;
        Some(Interval::new(first.lo, last.hi, first.lo_closed, last.hi_closed))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        for (k, iv) in self.intervals.iter().enumerate() {
            if k > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.intervals.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let ivs: Vec<Interval> = Deserialize::deserialize(d)?;
        Ok(IntervalSet::from_intervals(ivs))
    }
}
