//! Interval maps: exact piecewise-linear maps, the doubling tower and its
//! limit, and a floating-point logistic family.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::rational::{r, Rational};

/// Piece budget for compositions and powers.
pub const DEFAULT_PIECE_BUDGET: usize = 1_000_000;

/// Continuous piecewise-linear self-map of `[0, 1]` with rational data.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMap {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
}

impl ExactMap {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<ExactMap> {
        if breakpoints.len() < 2 {
            return Err(Error::input("a map needs at least two breakpoints"));
        }
        if breakpoints.len() != values.len() {
            return Err(Error::input(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if !breakpoints[0].is_zero() || breakpoints[breakpoints.len() - 1] != Rational::one() {
            return Err(Error::input("breakpoints must start at 0 and end at 1"));
        }
        if let Some(w) = breakpoints.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::input(format!(
                "breakpoints not strictly increasing at index {}",
                w + 1
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| v.is_negative() || **v > Rational::one())
        {
            return Err(Error::input(format!("value {v} at index {i} leaves [0, 1]")));
        }
        Ok(ExactMap { breakpoints, values })
    }

    /// Convenience constructor from `"p/q"` strings.
    pub fn parse(breakpoints: &[&str], values: &[&str]) -> Result<ExactMap> {
        let parse = |xs: &[&str]| xs.iter().map(|s| s.parse()).collect::<Result<Vec<Rational>>>();
        ExactMap::new(parse(breakpoints)?, parse(values)?)
    }

    pub fn tent() -> ExactMap {
        ExactMap::new(vec![r(0, 1), r(1, 2), r(1, 1)], vec![r(0, 1), r(1, 1), r(0, 1)]).unwrap()
    }

    pub fn identity() -> ExactMap {
        ExactMap::new(vec![r(0, 1), r(1, 1)], vec![r(0, 1), r(1, 1)]).unwrap()
    }

    /// `x ↦ 1 − x`.
    pub fn reflection() -> ExactMap {
        ExactMap::new(vec![r(0, 1), r(1, 1)], vec![r(1, 1), r(0, 1)]).unwrap()
    }

    pub fn constant(c: Rational) -> Result<ExactMap> {
        ExactMap::new(vec![r(0, 1), r(1, 1)], vec![c.clone(), c])
    }

    /// `x ↦ x / 2`.
    pub fn half() -> ExactMap {
        ExactMap::new(vec![r(0, 1), r(1, 1)], vec![r(0, 1), r(1, 2)]).unwrap()
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn pieces(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn to_spec(&self) -> MapSpec {
        MapSpec::Pl {
            breakpoints: self.breakpoints.clone(),
            values: self.values.clone(),
        }
    }

    /// Index of the piece `[b_j, b_{j+1}]` containing `x` (the left one at a
    /// breakpoint).
    fn piece_of(&self, x: &Rational) -> usize {
        let j = self.breakpoints.partition_point(|b| b < x);
        j.saturating_sub(1).min(self.pieces() - 1)
    }

    fn eval_unchecked(&self, x: &Rational) -> Rational {
        let j = self.piece_of(x);
        let (b0, b1) = (&self.breakpoints[j], &self.breakpoints[j + 1]);
        let (v0, v1) = (&self.values[j], &self.values[j + 1]);
        if x == b0 {
            return v0.clone();
        }
        if x == b1 {
            return v1.clone();
        }
        v0 + (v1 - v0) * (x - b0) / (b1 - b0)
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        check_domain(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub fn iterate(&self, x: &Rational, n: usize) -> Result<Rational> {
        check_domain(x)?;
        let mut y = x.clone();
        for _ in 0..n {
            y = self.eval_unchecked(&y);
        }
        Ok(y)
    }

    pub fn slope(&self, piece: usize) -> Rational {
        (&self.values[piece + 1] - &self.values[piece]) / (&self.breakpoints[piece + 1] - &self.breakpoints[piece])
    }

    pub fn image(&self, s: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for part in s.parts() {
            self.image_parts(part, &mut out);
        }
        IntervalSet::from_parts(out)
    }

    pub fn image_interval(&self, iv: &Interval) -> IntervalSet {
        let mut out = Vec::new();
        self.image_parts(iv, &mut out);
        IntervalSet::from_parts(out)
    }

    fn image_parts(&self, part: &Interval, out: &mut Vec<Interval>) {
        let first = self.piece_of(&part.lo);
        for j in first..self.pieces() {
            let dom = Interval::closed(self.breakpoints[j].clone(), self.breakpoints[j + 1].clone());
            if dom.lo > part.hi {
                break;
            }
            let Some(seg) = dom.intersect(part) else { continue };
            let a = self.eval_unchecked(&seg.lo);
            let b = self.eval_unchecked(&seg.hi);
            let iv = match a.cmp(&b) {
                std::cmp::Ordering::Less => Interval::new(a, b, seg.lo_closed, seg.hi_closed),
                std::cmp::Ordering::Greater => Interval::new(b, a, seg.hi_closed, seg.lo_closed),
                std::cmp::Ordering::Equal => Some(Interval::point(a)),
            };
            out.extend(iv);
        }
    }

    pub fn preimage(&self, s: &IntervalSet) -> IntervalSet {
        if s.is_empty() {
            return IntervalSet::empty();
        }
        let parts = s.parts();
        let mut out = Vec::new();
        for j in 0..self.pieces() {
            let (b0, b1) = (&self.breakpoints[j], &self.breakpoints[j + 1]);
            let (v0, v1) = (&self.values[j], &self.values[j + 1]);
            let dom = Interval::closed(b0.clone(), b1.clone());
            if v0 == v1 {
                if s.contains(v0) {
                    out.push(dom);
                }
                continue;
            }
            let (vmin, vmax) = if v0 < v1 { (v0, v1) } else { (v1, v0) };
            let start = parts.partition_point(|p| &p.hi < vmin);
            let slope = (v1 - v0) / (b1 - b0);
            let inv = |y: &Rational| b0 + (y - v0) / &slope;
            for p in &parts[start..] {
                if &p.lo > vmax {
                    break;
                }
                let pre = if slope.is_positive() {
                    Interval::new(inv(&p.lo), inv(&p.hi), p.lo_closed, p.hi_closed)
                } else {
                    Interval::new(inv(&p.hi), inv(&p.lo), p.hi_closed, p.lo_closed)
                };
                if let Some(c) = pre.and_then(|pre| pre.intersect(&dom)) {
                    out.push(c);
                }
            }
        }
        IntervalSet::from_parts(out)
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &ExactMap) -> ExactMap {
        self.compose_budgeted(g, usize::MAX).expect("unbounded composition")
    }

    pub fn compose_budgeted(&self, g: &ExactMap, budget: usize) -> Result<ExactMap> {
        let (breakpoints, values) = compose_raw(self, &g.breakpoints, &g.values, budget)?;
        Ok(ExactMap { breakpoints, values })
    }

    /// `f^n`, built as `f ∘ f^{n−1}` with collinear pieces merged.
    pub fn power(&self, n: usize) -> Result<ExactMap> {
        self.power_budgeted(n, DEFAULT_PIECE_BUDGET)
    }

    pub fn power_budgeted(&self, n: usize, budget: usize) -> Result<ExactMap> {
        let mut acc = ExactMap::identity();
        for _ in 0..n {
            acc = self.compose_budgeted(&acc, budget)?;
        }
        Ok(acc)
    }

    /// `f^{2^k}` by repeated squaring; far cheaper than `power` for large
    /// exponents since only `k` compositions are built.
    pub fn dyadic_power(&self, k: u32, budget: usize) -> Result<ExactMap> {
        let mut acc = self.clone();
        for _ in 0..k {
            acc = acc.compose_budgeted(&acc, budget)?;
        }
        Ok(acc)
    }

    /// `f, f^2, …, f^n` in one pass.
    pub fn powers(&self, n: usize, budget: usize) -> Result<Vec<ExactMap>> {
        let mut out = Vec::with_capacity(n);
        let mut acc = ExactMap::identity();
        for _ in 0..n {
            acc = self.compose_budgeted(&acc, budget)?;
            out.push(acc.clone());
        }
        Ok(out)
    }

    /// Exact solution set of `f(x) = x`.
    pub fn fixed_points(&self) -> IntervalSet {
        let mut out = Vec::new();
        for j in 0..self.pieces() {
            let (b0, b1) = (&self.breakpoints[j], &self.breakpoints[j + 1]);
            let (v0, v1) = (&self.values[j], &self.values[j + 1]);
            let d0 = v0 - b0;
            let d1 = v1 - b1;
            if d0.is_zero() && d1.is_zero() {
                out.push(Interval::closed(b0.clone(), b1.clone()));
            } else if d0.is_zero() {
                out.push(Interval::point(b0.clone()));
            } else if d1.is_zero() {
                out.push(Interval::point(b1.clone()));
            } else if d0.is_negative() != d1.is_negative() {
                // g(x) = f(x) − x changes sign strictly inside the piece.
                let x = b0 + (b1 - b0) * &d0 / (&d0 - &d1);
                out.push(Interval::point(x));
            }
        }
        IntervalSet::from_parts(out)
    }

    /// Exact solution set of `self(g(x)) = x` without materializing the
    /// composition. Sub-branches whose values cannot return to the current
    /// `g`-piece are skipped before any arithmetic.
    pub fn fixed_points_of_composition(&self, g: &ExactMap) -> IntervalSet {
        use rayon::prelude::*;
        let per_piece: Vec<Vec<Interval>> = (0..g.pieces())
            .into_par_iter()
            .map(|j| self.composition_fixed_points_on_piece(g, j))
            .collect();
        IntervalSet::from_parts(per_piece.into_iter().flatten())
    }

    fn composition_fixed_points_on_piece(&self, g: &ExactMap, j: usize) -> Vec<Interval> {
        let (c0, c1) = (&g.breakpoints[j], &g.breakpoints[j + 1]);
        let (u0, u1) = (&g.values[j], &g.values[j + 1]);
        let mut out = Vec::new();
        if u0 == u1 {
            let y = self.eval_unchecked(u0);
            if c0 <= &y && &y <= c1 {
                out.push(Interval::point(y));
            }
            return out;
        }
        let (lo, hi) = if u0 < u1 { (u0, u1) } else { (u1, u0) };
        let first = self.piece_of(lo);
        let scale = (c1 - c0) / (u1 - u0);
        let to_x = |y: &Rational| c0 + (y - u0) * &scale;
        for k in first..self.pieces() {
            let (b0, b1) = (&self.breakpoints[k], &self.breakpoints[k + 1]);
            if b0 >= hi {
                break;
            }
            let (v0, v1) = (&self.values[k], &self.values[k + 1]);
            let (vmin, vmax) = if v0 <= v1 { (v0, v1) } else { (v1, v0) };
            if vmax < c0 || vmin > c1 {
                continue;
            }
            // Sub-branch: y = g(x) ranges over [ya, yb] = [b0, b1] ∩ [lo, hi].
            let ya = Rational::max(b0, lo);
            let yb = Rational::min(b1, hi);
            let (xa, xb) = (to_x(ya), to_x(yb));
            let (fa, fb) = (self.eval_unchecked(ya), self.eval_unchecked(yb));
            let (xl, fl, xr, fr) = if xa <= xb { (xa, fa, xb, fb) } else { (xb, fb, xa, fa) };
            let d0 = &fl - &xl;
            let d1 = &fr - &xr;
            if d0.is_zero() && d1.is_zero() {
                out.push(Interval::new(xl, xr, true, true).unwrap());
            } else if d0.is_zero() {
                out.push(Interval::point(xl));
            } else if d1.is_zero() {
                out.push(Interval::point(xr));
            } else if d0.is_negative() != d1.is_negative() {
                let x = &xl + (&xr - &xl) * &d0 / (&d0 - &d1);
                out.push(Interval::point(x));
            }
        }
        out
    }

    /// The doubling operator `D(g)`: `x + 2/3` on `[0, 1/3]`, the rescaled
    /// copy `g(3x − 2)/3` on `[2/3, 1]`, linear in between.
    pub fn double(&self) -> ExactMap {
        let third = r(1, 3);
        let two_thirds = r(2, 3);
        let mut breakpoints = vec![r(0, 1), third.clone()];
        let mut values = vec![two_thirds.clone(), r(1, 1)];
        for (b, v) in self.breakpoints.iter().zip(&self.values) {
            breakpoints.push(&two_thirds + b * &third);
            values.push(v * &third);
        }
        ExactMap { breakpoints, values }
    }

    /// `f^n` restricted to `dom`, as a piecewise-linear path.
    pub fn restricted_power(&self, dom: &Interval, n: usize, budget: usize) -> Result<PlPath> {
        let mut path = PlPath::identity_on(dom);
        for _ in 0..n {
            path = path.then(self, budget)?;
        }
        Ok(path)
    }
}

impl fmt::Debug for ExactMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactMap[")?;
        for (i, (b, v)) in self.breakpoints.iter().zip(&self.values).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}↦{v}")?;
        }
        write!(f, "]")
    }
}

fn check_domain(x: &Rational) -> Result<()> {
    if x.is_negative() || *x > Rational::one() {
        return Err(Error::input(format!("point {x} outside [0, 1]")));
    }
    Ok(())
}

/// Continuous piecewise-linear function on a closed interval `[b_0, b_m]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PlPath {
    pub breakpoints: Vec<Rational>,
    pub values: Vec<Rational>,
}

impl PlPath {
    pub fn identity_on(dom: &Interval) -> PlPath {
        if dom.is_point() {
            return PlPath {
                breakpoints: vec![dom.lo.clone()],
                values: vec![dom.lo.clone()],
            };
        }
        PlPath {
            breakpoints: vec![dom.lo.clone(), dom.hi.clone()],
            values: vec![dom.lo.clone(), dom.hi.clone()],
        }
    }

    /// `f ∘ self`.
    pub fn then(&self, f: &ExactMap, budget: usize) -> Result<PlPath> {
        if self.breakpoints.len() == 1 {
            return Ok(PlPath {
                breakpoints: self.breakpoints.clone(),
                values: vec![f.eval_unchecked(&self.values[0])],
            });
        }
        let (breakpoints, values) = compose_raw(f, &self.breakpoints, &self.values, budget)?;
        Ok(PlPath { breakpoints, values })
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let j = self.breakpoints.partition_point(|b| b < x);
        if j < self.breakpoints.len() && &self.breakpoints[j] == x {
            return self.values[j].clone();
        }
        let j = j.clamp(1, self.breakpoints.len() - 1);
        let (b0, b1) = (&self.breakpoints[j - 1], &self.breakpoints[j]);
        let (v0, v1) = (&self.values[j - 1], &self.values[j]);
        v0 + (v1 - v0) * (x - b0) / (b1 - b0)
    }

    /// Every `x` in the domain with `self(x) = y`, as a sorted list of points
    /// (constant pieces at level `y` contribute both endpoints).
    pub fn level_points(&self, y: &Rational) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::new();
        let mut push = |x: Rational| {
            if out.last() != Some(&x) {
                out.push(x);
            }
        };
        if self.breakpoints.len() == 1 {
            if &self.values[0] == y {
                push(self.breakpoints[0].clone());
            }
            return out;
        }
        for j in 1..self.breakpoints.len() {
            let (b0, b1) = (&self.breakpoints[j - 1], &self.breakpoints[j]);
            let (v0, v1) = (&self.values[j - 1], &self.values[j]);
            if v0 == y {
                push(b0.clone());
            }
            let crosses = (v0 < y && y < v1) || (v1 < y && y < v0);
            if crosses {
                push(b0 + (b1 - b0) * (y - v0) / (v1 - v0));
            }
            if v1 == y {
                push(b1.clone());
            }
        }
        out
    }

    pub fn range(&self) -> Interval {
        let lo = self.values.iter().min().unwrap().clone();
        let hi = self.values.iter().max().unwrap().clone();
        Interval::closed(lo, hi)
    }
}

/// Composition `f ∘ g` for `g` given by breakpoints/values on its own domain.
fn compose_raw(
    f: &ExactMap,
    g_bp: &[Rational],
    g_vals: &[Rational],
    budget: usize,
) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let mut bp: Vec<Rational> = Vec::with_capacity(g_bp.len());
    let mut vals: Vec<Rational> = Vec::with_capacity(g_bp.len());
    let push = |x: Rational, y: Rational, bp: &mut Vec<Rational>, vals: &mut Vec<Rational>| -> Result<()> {
        let n = bp.len();
        if n >= 2 && collinear(&bp[n - 2], &vals[n - 2], &bp[n - 1], &vals[n - 1], &x, &y) {
            bp[n - 1] = x;
            vals[n - 1] = y;
        } else {
            bp.push(x);
            vals.push(y);
            if bp.len() > budget.saturating_add(1) {
                return Err(Error::budget("piece count of composed map", budget as u64));
            }
        }
        Ok(())
    };
    push(g_bp[0].clone(), f.eval_unchecked(&g_vals[0]), &mut bp, &mut vals)?;
    for j in 1..g_bp.len() {
        let (c0, c1) = (&g_bp[j - 1], &g_bp[j]);
        let (u0, u1) = (&g_vals[j - 1], &g_vals[j]);
        if u0 != u1 {
            let (lo, hi) = if u0 < u1 { (u0, u1) } else { (u1, u0) };
            let start = f.breakpoints.partition_point(|b| b <= lo);
            let end = f.breakpoints.partition_point(|b| b < hi);
            let scale = (c1 - c0) / (u1 - u0);
            let inner: Vec<usize> = if u0 < u1 {
                (start..end).collect()
            } else {
                (start..end).rev().collect()
            };
            for k in inner {
                let b = &f.breakpoints[k];
                let x = c0 + (b - u0) * &scale;
                push(x, f.values[k].clone(), &mut bp, &mut vals)?;
            }
        }
        push(c1.clone(), f.eval_unchecked(u1), &mut bp, &mut vals)?;
    }
    Ok((bp, vals))
}

fn collinear(x0: &Rational, y0: &Rational, x1: &Rational, y1: &Rational, x2: &Rational, y2: &Rational) -> bool {
    (y1 - y0) * (x2 - x1) == (y2 - y1) * (x1 - x0)
}

/// Lazily evaluated limit of the doubling tower started at the zero map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LimitMap {
    pub max_depth: u32,
}

impl Default for LimitMap {
    fn default() -> Self {
        LimitMap { max_depth: 64 }
    }
}

impl LimitMap {
    pub fn new(max_depth: u32) -> Self {
        LimitMap { max_depth }
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        check_domain(x)?;
        let third = r(1, 3);
        let two_thirds = r(2, 3);
        let mut x = x.clone();
        let mut scale = Rational::one();
        for _ in 0..=self.max_depth {
            if x == Rational::one() {
                return Ok(Rational::zero());
            }
            if x <= third {
                return Ok((x + &two_thirds) * scale);
            }
            if x < two_thirds {
                let y = Rational::one() - r(7, 3) * (x - &third);
                return Ok(y * scale);
            }
            x = x * Rational::integer(3) - Rational::integer(2);
            scale = scale * &third;
        }
        Err(Error::Internal(format!(
            "limit-map recursion exceeded depth {}",
            self.max_depth
        )))
    }

    pub fn iterate(&self, x: &Rational, n: usize) -> Result<Rational> {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.eval(&y)?;
        }
        Ok(y)
    }
}

/// `D^m(g_0)` together with the lazily evaluated limit.
#[derive(Clone, Debug)]
pub struct DoublingTower {
    pub stage: u32,
    pub base: ExactMap,
    pub realized: ExactMap,
    pub lazy_limit: LimitMap,
}

impl DoublingTower {
    pub fn new(base: ExactMap, stage: u32) -> Self {
        let mut realized = base.clone();
        for _ in 0..stage {
            realized = realized.double();
        }
        DoublingTower {
            stage,
            base,
            realized,
            lazy_limit: LimitMap::default(),
        }
    }

    /// The tower over the zero map, whose limit is [`LimitMap`].
    pub fn zero_based(stage: u32) -> Self {
        DoublingTower::new(ExactMap::constant(Rational::zero()).unwrap(), stage)
    }

    pub fn tower_eval(&self, x: &Rational) -> Result<Rational> {
        self.lazy_limit.eval(x)
    }
}

/// Floating-point map families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum NumericMap {
    /// `x ↦ λ x (1 − x)`.
    Logistic { lambda: f64 },
}

impl NumericMap {
    pub fn logistic(lambda: f64) -> Result<NumericMap> {
        if !(0.0..=4.0).contains(&lambda) {
            return Err(Error::input(format!("logistic parameter {lambda} outside [0, 4]")));
        }
        Ok(NumericMap::Logistic { lambda })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::input(format!("point {x} outside [0, 1]")));
        }
        let y = match self {
            NumericMap::Logistic { lambda } => lambda * x * (1.0 - x),
        };
        Ok(y.clamp(0.0, 1.0))
    }
}

/// Common interface for orbit-level analyses over exact and floating-point
/// backends.
pub trait Dynamics: Sync {
    type Point: Clone + PartialEq + Send + Sync + fmt::Debug;

    fn apply(&self, x: &Self::Point) -> Result<Self::Point>;

    fn coord(&self, x: &Self::Point) -> f64;

    /// Lift a double into the point type (exactly for rational backends).
    fn point_from_f64(&self, x: f64) -> Result<Self::Point>;

    fn is_exact(&self) -> bool;

    /// Default clustering/closeness tolerance.
    fn default_tol(&self) -> f64 {
        if self.is_exact() {
            2f64.powi(-30)
        } else {
            1e-9
        }
    }

    /// Exact maps expose their piecewise-linear data.
    fn as_exact(&self) -> Option<&ExactMap> {
        None
    }
}

fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_f64(x).ok_or_else(|| Error::input(format!("non-finite point {x}")))
}

impl Dynamics for ExactMap {
    type Point = Rational;

    fn apply(&self, x: &Rational) -> Result<Rational> {
        self.eval(x)
    }

    fn coord(&self, x: &Rational) -> f64 {
        x.to_f64()
    }

    fn point_from_f64(&self, x: f64) -> Result<Rational> {
        rational_from_f64(x)
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn as_exact(&self) -> Option<&ExactMap> {
        Some(self)
    }
}

impl Dynamics for LimitMap {
    type Point = Rational;

    fn apply(&self, x: &Rational) -> Result<Rational> {
        self.eval(x)
    }

    fn coord(&self, x: &Rational) -> f64 {
        x.to_f64()
    }

    fn point_from_f64(&self, x: f64) -> Result<Rational> {
        rational_from_f64(x)
    }

    fn is_exact(&self) -> bool {
        true
    }
}

impl Dynamics for NumericMap {
    type Point = f64;

    fn apply(&self, x: &f64) -> Result<f64> {
        self.eval(*x)
    }

    fn coord(&self, x: &f64) -> f64 {
        *x
    }

    fn point_from_f64(&self, x: f64) -> Result<f64> {
        Ok(x)
    }

    fn is_exact(&self) -> bool {
        false
    }
}

/// On-disk map description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapSpec {
    Pl {
        breakpoints: Vec<Rational>,
        values: Vec<Rational>,
    },
    Tower {
        stage: u32,
        /// Evaluate orbits with the lazy limit instead of the stage map.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        use_limit: bool,
    },
    Logistic {
        lambda: f64,
    },
}

/// A loaded map of any kind.
#[derive(Clone, Debug)]
pub enum MapHandle {
    Exact(ExactMap),
    Tower { tower: DoublingTower, use_limit: bool },
    Numeric(NumericMap),
}

impl MapSpec {
    pub fn build(&self) -> Result<MapHandle> {
        match self {
            MapSpec::Pl { breakpoints, values } => {
                ExactMap::new(breakpoints.clone(), values.clone()).map(MapHandle::Exact)
            }
            MapSpec::Tower { stage, use_limit } => {
                if *stage > 16 {
                    return Err(Error::input(format!("tower stage {stage} too large (max 16)")));
                }
                Ok(MapHandle::Tower {
                    tower: DoublingTower::zero_based(*stage),
                    use_limit: *use_limit,
                })
            }
            MapSpec::Logistic { lambda } => NumericMap::logistic(*lambda).map(MapHandle::Numeric),
        }
    }
}

impl MapHandle {
    /// The exact map that set-valued analyses run on (the stage map for
    /// towers).
    pub fn exact(&self) -> Option<&ExactMap> {
        match self {
            MapHandle::Exact(m) => Some(m),
            MapHandle::Tower { tower, .. } => Some(&tower.realized),
            MapHandle::Numeric(_) => None,
        }
    }

    pub fn spec(&self) -> MapSpec {
        match self {
            MapHandle::Exact(m) => m.to_spec(),
            MapHandle::Tower { tower, use_limit } => MapSpec::Tower {
                stage: tower.stage,
                use_limit: *use_limit,
            },
            MapHandle::Numeric(NumericMap::Logistic { lambda }) => MapSpec::Logistic { lambda: *lambda },
        }
    }
}
