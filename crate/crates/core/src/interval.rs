//! Subintervals of `[0, 1]` with exact endpoints and open/closed flags, and
//! finite unions of them in a unique normal form.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A nonempty subinterval of `[0, 1]`.
///
/// A degenerate interval is always the closed point `[a, a]`; empty sets are
/// never represented by an `Interval`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    /// Returns `None` when the flags and endpoints describe the empty set.
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Option<Interval> {
        match lo.cmp(&hi) {
            Ordering::Greater => None,
            Ordering::Equal if !(lo_closed && hi_closed) => None,
            _ => Some(Interval {
                lo,
                hi,
                lo_closed,
                hi_closed,
            }),
        }
    }

    /// Like [`Interval::new`] but also rejects endpoints outside `[0, 1]`.
    pub fn checked(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Interval> {
        if lo.is_negative() || hi > Rational::one() {
            return Err(Error::input(format!("interval [{lo}, {hi}] leaves [0, 1]")));
        }
        Interval::new(lo.clone(), hi.clone(), lo_closed, hi_closed)
            .ok_or_else(|| Error::input(format!("empty interval with endpoints {lo}, {hi}")))
    }

    pub fn closed(lo: Rational, hi: Rational) -> Interval {
        Interval::new(lo, hi, true, true).expect("closed interval with lo > hi")
    }

    pub fn open(lo: Rational, hi: Rational) -> Interval {
        Interval::new(lo, hi, false, false).expect("empty open interval")
    }

    pub fn closed_open(lo: Rational, hi: Rational) -> Interval {
        Interval::new(lo, hi, true, false).expect("empty half-open interval")
    }

    pub fn open_closed(lo: Rational, hi: Rational) -> Interval {
        Interval::new(lo, hi, false, true).expect("empty half-open interval")
    }

    pub fn point(x: Rational) -> Interval {
        Interval::closed(x.clone(), x)
    }

    pub fn unit() -> Interval {
        Interval::closed(Rational::zero(), Rational::one())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        above
            && match x.cmp(&self.hi) {
                Ordering::Less => true,
                Ordering::Equal => self.hi_closed,
                Ordering::Greater => false,
            }
    }

    /// `self ⊇ other`.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        let lo_ok = match self.lo.cmp(&other.lo) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed || !other.lo_closed,
            Ordering::Greater => false,
        };
        let hi_ok = match self.hi.cmp(&other.hi) {
            Ordering::Greater => true,
            Ordering::Equal => self.hi_closed || !other.hi_closed,
            Ordering::Less => false,
        };
        lo_ok && hi_ok
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, hi, lo_closed, hi_closed)
    }

    pub fn closure(&self) -> Interval {
        Interval::closed(self.lo.clone(), self.hi.clone())
    }

    pub fn midpoint(&self) -> Rational {
        Rational::midpoint(&self.lo, &self.hi)
    }

    /// Smallest-denominator rational inside the interval.
    pub fn simplest_point(&self) -> Rational {
        let candidate = Rational::simplest_between(&self.lo, &self.hi);
        if self.contains(&candidate) {
            candidate
        } else {
            self.midpoint()
        }
    }

    /// Infimum distance between the two sets (zero when they touch).
    pub fn distance(&self, other: &Interval) -> Rational {
        if self.hi < other.lo {
            &other.lo - &self.hi
        } else if other.hi < self.lo {
            &self.lo - &other.hi
        } else {
            Rational::zero()
        }
    }

    /// `B(self, s) ∩ [0, 1]`: the open `s`-neighbourhood, relative to the unit
    /// interval.
    pub fn pad(&self, s: &Rational) -> Interval {
        let lo = &self.lo - s;
        let hi = &self.hi + s;
        let (lo, lo_closed) = if lo.is_negative() {
            (Rational::zero(), true)
        } else {
            (lo, false)
        };
        let (hi, hi_closed) = if hi > Rational::one() {
            (Rational::one(), true)
        } else {
            (hi, false)
        };
        Interval::new(lo, hi, lo_closed, hi_closed).expect("padding a nonempty interval")
    }

    fn sort_key(&self, other: &Interval) -> Ordering {
        self.lo
            .cmp(&other.lo)
            .then_with(|| other.lo_closed.cmp(&self.lo_closed))
            .then_with(|| self.hi.cmp(&other.hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", self.lo);
        }
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

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite union of intervals, stored sorted, pairwise disjoint, and with no
/// two parts whose union is connected. That makes the representation unique,
/// so derived equality is set equality.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn unit() -> Self {
        IntervalSet::from(Interval::unit())
    }

    pub fn from_parts(parts: impl IntoIterator<Item = Interval>) -> Self {
        let mut parts: Vec<Interval> = parts.into_iter().collect();
        normalize_in_place(&mut parts);
        IntervalSet { parts }
    }

    /// Builds from parts already known to be in normal form.
    pub(crate) fn from_sorted_unchecked(parts: Vec<Interval>) -> Self {
        debug_assert!(is_normal(&parts));
        IntervalSet { parts }
    }

    pub fn points(points: impl IntoIterator<Item = Rational>) -> Self {
        IntervalSet::from_parts(points.into_iter().map(Interval::point))
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Interval> {
        self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.parts.len() == 1 && self.parts[0] == Interval::unit()
    }

    pub fn normalize(&self) -> IntervalSet {
        IntervalSet::from_parts(self.parts.iter().cloned())
    }

    pub fn is_normalized(&self) -> bool {
        is_normal(&self.parts)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let idx = self.parts.partition_point(|p| &p.hi < x);
        self.parts[idx..].iter().take(2).any(|p| p.contains(x))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_parts(self.parts.iter().chain(other.parts.iter()).cloned())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        if small.len() * 16 < big.len() {
            let mut out = Vec::new();
            for a in &small.parts {
                let start = big.parts.partition_point(|p| p.hi < a.lo);
                for b in big.parts[start..].iter().take_while(|p| p.lo <= a.hi) {
                    if let Some(c) = a.intersect(b) {
                        out.push(c);
                    }
                }
            }
            return IntervalSet::from_sorted_unchecked(out);
        }
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let a = &self.parts[i];
            let b = &other.parts[j];
            if let Some(c) = a.intersect(b) {
                out.push(c);
            }
            // Advance whichever part ends first.
            let a_first = match a.hi.cmp(&b.hi) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => !a.hi_closed || b.hi_closed,
            };
            if a_first {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::from_parts(out)
    }

    pub fn intersects(&self, other: &IntervalSet) -> bool {
        !self.intersect(other).is_empty()
    }

    pub fn intersect_interval(&self, iv: &Interval) -> IntervalSet {
        self.intersect(&IntervalSet::from(iv.clone()))
    }

    /// `[0, 1] \ self`.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = Rational::zero();
        let mut cursor_closed = true;
        for p in &self.parts {
            if let Some(gap) = Interval::new(cursor.clone(), p.lo.clone(), cursor_closed, !p.lo_closed) {
                out.push(gap);
            }
            cursor = p.hi.clone();
            cursor_closed = !p.hi_closed;
        }
        if let Some(gap) = Interval::new(cursor, Rational::one(), cursor_closed, true) {
            out.push(gap);
        }
        IntervalSet::from_parts(out)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersect(&other.complement())
    }

    /// `self ⊇ other`.
    pub fn contains_set(&self, other: &IntervalSet) -> bool {
        other.parts.iter().all(|q| {
            let idx = self.parts.partition_point(|p| p.hi < q.lo);
            self.parts[idx..].iter().take(2).any(|p| p.contains_interval(q))
        })
    }

    pub fn contains_interval(&self, iv: &Interval) -> bool {
        self.contains_set(&IntervalSet::from(iv.clone()))
    }

    pub fn inf(&self) -> Option<&Rational> {
        self.parts.first().map(|p| &p.lo)
    }

    pub fn sup(&self) -> Option<&Rational> {
        self.parts.last().map(|p| &p.hi)
    }

    /// Closed convex hull.
    pub fn hull(&self) -> Option<Interval> {
        Some(Interval::closed(self.inf()?.clone(), self.sup()?.clone()))
    }

    pub fn diameter(&self) -> Rational {
        match (self.inf(), self.sup()) {
            (Some(a), Some(b)) => b - a,
            _ => Rational::zero(),
        }
    }

    pub fn measure(&self) -> Rational {
        self.parts.iter().fold(Rational::zero(), |acc, p| acc + p.length())
    }

    pub fn closure(&self) -> IntervalSet {
        IntervalSet::from_parts(self.parts.iter().map(Interval::closure))
    }

    /// Whether the closure is all of `[0, 1]`.
    pub fn is_dense(&self) -> bool {
        self.closure().is_unit()
    }

    /// Whether every part is relatively open in `[0, 1]`.
    pub fn is_open(&self) -> bool {
        self.parts.iter().all(|p| {
            (!p.lo_closed || p.lo.is_zero()) && (!p.hi_closed || p.hi == Rational::one()) && !p.is_point()
                || (p.lo.is_zero() && p.hi == Rational::one())
        })
    }

    /// Infimum distance between two nonempty sets.
    pub fn distance(&self, other: &IntervalSet) -> Option<Rational> {
        if self.is_empty() || other.is_empty() {
            return None;
        }
        let mut best: Option<Rational> = None;
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let d = self.parts[i].distance(&other.parts[j]);
            if best.as_ref().is_none_or(|b| &d < b) {
                best = Some(d);
            }
            if self.parts[i].hi <= other.parts[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        best
    }

    pub fn pad(&self, s: &Rational) -> IntervalSet {
        IntervalSet::from_parts(self.parts.iter().map(|p| p.pad(s)))
    }

    /// An interior point of the first part (the point itself for a singleton).
    pub fn pick_point(&self) -> Option<Rational> {
        self.parts.first().map(|p| p.midpoint())
    }

    /// The smallest-denominator rational in the set; ties go left.
    pub fn simplest_point(&self) -> Option<Rational> {
        self.parts
            .iter()
            .map(Interval::simplest_point)
            .min_by(|a, b| a.denom().cmp(b.denom()).then_with(|| a.cmp(b)))
    }
}

impl From<Interval> for IntervalSet {
    fn from(iv: Interval) -> Self {
        IntervalSet { parts: vec![iv] }
    }
}

#[derive(Deserialize)]
struct RawInterval {
    lo: Rational,
    hi: Rational,
    lo_closed: bool,
    hi_closed: bool,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;

    fn try_from(raw: RawInterval) -> Result<Interval> {
        Interval::checked(raw.lo, raw.hi, raw.lo_closed, raw.hi_closed)
    }
}

impl From<Vec<Interval>> for IntervalSet {
    fn from(parts: Vec<Interval>) -> Self {
        IntervalSet::from_parts(parts)
    }
}

impl From<IntervalSet> for Vec<Interval> {
    fn from(set: IntervalSet) -> Self {
        set.parts
    }
}

/// Parses `[a, b)`, `(a, b]`, … and `{a}`; endpoints as in [`Rational`].
impl FromStr for Interval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Interval> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not an interval: {s:?}"));
        if let Some(inner) = s.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
            let x: Rational = inner.parse()?;
            return Interval::checked(x.clone(), x, true, true);
        }
        let mut chars = s.chars();
        let lo_closed = match chars.next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(bad()),
        };
        let hi_closed = match chars.next_back() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(bad()),
        };
        let (lo, hi) = chars.as_str().split_once(',').ok_or_else(bad)?;
        Interval::checked(lo.parse()?, hi.parse()?, lo_closed, hi_closed)
    }
}

/// Parts separated by `∪` or `|`; `∅` or an empty string is the empty set.
impl FromStr for IntervalSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<IntervalSet> {
        let s = s.trim();
        if s.is_empty() || s == "∅" {
            return Ok(IntervalSet::empty());
        }
        s.split(['∪', '|'])
            .map(str::parse::<Interval>)
            .collect::<Result<Vec<_>>>()
            .map(IntervalSet::from_parts)
    }
}

impl FromIterator<Interval> for IntervalSet {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IntervalSet::from_parts(iter)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "∅");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Whether `b` (starting at or after `a`) can be glued onto `a`.
fn connected(a: &Interval, b: &Interval) -> bool {
    match b.lo.cmp(&a.hi) {
        Ordering::Less => true,
        Ordering::Equal => a.hi_closed || b.lo_closed,
        Ordering::Greater => false,
    }
}

fn normalize_in_place(parts: &mut Vec<Interval>) {
    if parts.len() <= 1 {
        return;
    }
    parts.sort_by(|a, b| a.sort_key(b));
    let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
    for p in parts.drain(..) {
        match out.last_mut() {
            Some(last) if connected(last, &p) => match p.hi.cmp(&last.hi) {
                Ordering::Greater => {
                    last.hi = p.hi;
                    last.hi_closed = p.hi_closed;
                }
                Ordering::Equal => last.hi_closed |= p.hi_closed,
                Ordering::Less => {}
            },
            _ => out.push(p),
        }
    }
    *parts = out;
}

fn is_normal(parts: &[Interval]) -> bool {
    parts.windows(2).all(|w| w[0].hi <= w[1].lo && !connected(&w[0], &w[1]))
}
