//! Periodic portions `J_k^i` of an infinite ω-limit set, their padded
//! versions, nested limits, adding-machine addresses and the periodic points
//! separating cells.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::map::{Dynamics, ExactMap, DEFAULT_PIECE_BUDGET};
use crate::orbit::{cluster_points, orbit, recurrence_classify};
use crate::rational::{r, Rational};

/// Burn-in, horizon and clustering tolerance of an ω-limit surrogate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OmegaParams {
    pub burn: usize,
    pub horizon: usize,
    pub tol: f64,
}

impl OmegaParams {
    /// `burn = horizon / 4`, `tol = 2^-30`.
    pub fn for_horizon(horizon: usize) -> Self {
        OmegaParams {
            burn: horizon / 4,
            horizon,
            tol: 2f64.powi(-30),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PortionProvenance {
    pub params: OmegaParams,
    pub representatives: usize,
    /// The pad formula evaluated only on index-consecutive cells. Kept for
    /// comparison with the pads actually used.
    pub index_neighbour_pads: Vec<Rational>,
    /// The base orbit's ω-set is taken to be maximal; finite data cannot
    /// confirm this.
    pub maximality: &'static str,
}

/// The family `J_k^i`, `1 ≤ k ≤ K`, `0 ≤ i < 2^k`, of one base orbit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicPortion {
    pub base: Rational,
    pub depth: usize,
    /// `cells[k - 1][i] = J_k^i` (closed).
    pub cells: Vec<Vec<Interval>>,
    /// `pads[k - 1] = s_k`.
    pub pads: Vec<Rational>,
    /// `padded[k - 1][i] = B(J_k^i, s_k) ∩ [0, 1]`.
    pub padded: Vec<Vec<Interval>>,
    /// Sorted ω-surrogate representatives.
    pub omega: Vec<Rational>,
    pub provenance: PortionProvenance,
}

impl PeriodicPortion {
    pub fn cell(&self, k: usize, i: usize) -> &Interval {
        &self.cells[k - 1][i]
    }

    pub fn padded_cell(&self, k: usize, i: usize) -> &Interval {
        &self.padded[k - 1][i]
    }

    pub fn pad(&self, k: usize) -> &Rational {
        &self.pads[k - 1]
    }

    /// Index of the depth-`k` padded cell containing `y`.
    pub fn padded_index(&self, k: usize, y: &Rational) -> Option<usize> {
        self.padded[k - 1].iter().position(|c| c.contains(y))
    }

    /// Smallest distance between two depth-`k` cells.
    pub fn min_gap(&self, k: usize) -> Rational {
        min_pairwise_gap(&self.cells[k - 1])
    }

    /// Smallest distance between two depth-`k` padded cells.
    pub fn min_padded_gap(&self, k: usize) -> Rational {
        min_pairwise_gap(&self.padded[k - 1])
    }

    pub fn omega_hull(&self) -> Interval {
        Interval::closed(self.omega[0].clone(), self.omega[self.omega.len() - 1].clone())
    }

    /// Interval data as `["p/q", "r/s"]` pairs for export.
    pub fn export(&self) -> PortionExport {
        let pair = |iv: &Interval| [iv.lo.to_string(), iv.hi.to_string()];
        PortionExport {
            depth: self.depth,
            base: self.base.to_string(),
            intervals: self.cells.iter().map(|l| l.iter().map(pair).collect()).collect(),
            pads: self.pads.iter().map(|s| s.to_string()).collect(),
            padded: self.padded.iter().map(|l| l.iter().map(pair).collect()).collect(),
            provenance: self.provenance.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PortionExport {
    pub depth: usize,
    pub base: String,
    pub intervals: Vec<Vec<[String; 2]>>,
    pub pads: Vec<String>,
    pub padded: Vec<Vec<[String; 2]>>,
    pub provenance: PortionProvenance,
}

fn min_pairwise_gap(cells: &[Interval]) -> Rational {
    let mut sorted: Vec<&Interval> = cells.iter().collect();
    sorted.sort_by(|a, b| a.lo.cmp(&b.lo));
    sorted
        .windows(2)
        .map(|w| w[0].distance(w[1]))
        .min()
        .unwrap_or_else(Rational::one)
}

/// Builds `J_k^i` as the hull of the orbit tail points with index `≡ i`
/// (mod `2^k`).
pub fn compute_portion<M>(map: &M, x: &Rational, depth: usize, params: OmegaParams) -> Result<PeriodicPortion>
where
    M: Dynamics<Point = Rational>,
{
    if params.burn >= params.horizon {
        return Err(Error::input("burn must be below horizon"));
    }
    if depth > 20 {
        return Err(Error::input(format!("depth {depth} too large")));
    }
    let orb = orbit(map, x, params.horizon)?;
    let tail = orb.tail(params.burn);
    let omega = cluster_points(map, tail, params.burn, params.horizon, params.tol);
    let needed = 3usize << depth;
    if omega.len() < needed {
        return Err(Error::NotInfinite(format!(
            "{} surrogate points, {needed} needed for depth {depth} (burn {}, horizon {})",
            omega.len(),
            params.burn,
            params.horizon
        )));
    }
    let mut cells = Vec::with_capacity(depth);
    let mut pads = Vec::with_capacity(depth);
    let mut padded = Vec::with_capacity(depth);
    let mut index_neighbour_pads = Vec::with_capacity(depth);
    for k in 1..=depth {
        let m = 1usize << k;
        let mut lo: Vec<Option<&Rational>> = vec![None; m];
        let mut hi: Vec<Option<&Rational>> = vec![None; m];
        for (offset, p) in tail.iter().enumerate() {
            let i = (params.burn + offset) % m;
            if lo[i].is_none_or(|l| p < l) {
                lo[i] = Some(p);
            }
            if hi[i].is_none_or(|h| p > h) {
                hi[i] = Some(p);
            }
        }
        let level: Vec<Interval> = (0..m)
            .map(|i| Interval::closed(lo[i].unwrap().clone(), hi[i].unwrap().clone()))
            .collect();
        let cap = r(1, k as i64);
        let gap = min_pairwise_gap(&level);
        if gap.is_zero() {
            return Err(Error::NotInfinite(format!(
                "depth-{k} cells overlap; the orbit is not separated by a periodic portion at this horizon"
            )));
        }
        let s = Rational::min(&cap, &(gap / Rational::integer(4))).clone();
        let consecutive = (0..m - 1).map(|i| level[i].distance(&level[i + 1])).min().unwrap();
        index_neighbour_pads.push(Rational::min(&cap, &(consecutive / Rational::integer(4))).clone());
        padded.push(level.iter().map(|c| c.pad(&s)).collect());
        pads.push(s);
        cells.push(level);
    }
    Ok(PeriodicPortion {
        base: x.clone(),
        depth,
        cells,
        pads,
        padded,
        omega: omega.representatives,
        provenance: PortionProvenance {
            params,
            representatives: omega.coords.len(),
            index_neighbour_pads,
            maximality: "assumed",
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PortionFailure {
    /// 1 covering, 2 disjointness, 3 nesting, 4 periodic points.
    pub property: u8,
    pub k: usize,
    pub i: usize,
    /// The violation is within twice the surrogate tolerance.
    pub ambiguous: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PortionReport {
    pub depth: usize,
    pub covering: bool,
    pub disjoint: bool,
    pub nesting: bool,
    pub periodic: bool,
    pub checks: usize,
    /// One least-period-`2^k` point per cell.
    pub periodic_witnesses: Vec<Vec<Option<Rational>>>,
    pub failures: Vec<PortionFailure>,
}

impl PortionReport {
    pub fn passed(&self) -> bool {
        self.covering && self.disjoint && self.nesting && self.periodic
    }
}

/// Checks the four structural properties of a periodic portion exactly.
pub fn verify_portion(map: &ExactMap, p: &PeriodicPortion) -> Result<PortionReport> {
    let slack = Rational::from_f64(2.0 * p.provenance.params.tol).unwrap_or_else(Rational::zero);
    let mut failures = Vec::new();
    let mut checks = 0;
    let fail = |failures: &mut Vec<PortionFailure>, property, k, i, ambiguous, detail: String| {
        failures.push(PortionFailure {
            property,
            k,
            i,
            ambiguous,
            detail,
        })
    };
    for k in 1..=p.depth {
        let m = 1usize << k;
        for i in 0..m {
            checks += 1;
            let img = map.image_interval(p.cell(k, i));
            let target = IntervalSet::from(p.cell(k, (i + 1) % m).clone());
            if !img.contains_set(&target) {
                let missing = target.difference(&img);
                fail(
                    &mut failures,
                    1,
                    k,
                    i,
                    missing.measure() <= slack,
                    format!("f(J_{k}^{i}) = {img} misses {missing} of J_{k}^{}", (i + 1) % m),
                );
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                checks += 1;
                if let Some(common) = p.cell(k, i).intersect(p.cell(k, j)) {
                    fail(
                        &mut failures,
                        2,
                        k,
                        i,
                        common.length() <= slack,
                        format!("J_{k}^{i} and J_{k}^{j} meet in {common}"),
                    );
                }
            }
        }
        if k < p.depth {
            for i in 0..m {
                checks += 1;
                let parent = p.cell(k, i);
                for child in [p.cell(k + 1, i), p.cell(k + 1, i + m)] {
                    if !parent.contains_interval(child) {
                        fail(
                            &mut failures,
                            3,
                            k,
                            i,
                            false,
                            format!("{child} not inside J_{k}^{i} = {parent}"),
                        );
                    } else if child.lo != parent.lo && child.hi != parent.hi {
                        let off = Rational::min(&(&child.lo - &parent.lo), &(&parent.hi - &child.hi)).clone();
                        fail(
                            &mut failures,
                            3,
                            k,
                            i,
                            off <= slack,
                            format!("{child} shares no endpoint with J_{k}^{i} = {parent}"),
                        );
                    }
                }
            }
        }
    }
    // Property 4: least period 2^k inside each J_k^i, nothing of period 2^{k-1} or less.
    let mut periodic_witnesses = Vec::with_capacity(p.depth);
    let mut prev_fixed = map.fixed_points();
    let mut power = map.clone();
    for k in 1..=p.depth {
        power = power.compose_budgeted(&power, DEFAULT_PIECE_BUDGET)?;
        let fixed = power.fixed_points();
        let least = fixed.difference(&prev_fixed);
        let mut level = Vec::with_capacity(1 << k);
        for i in 0..(1usize << k) {
            checks += 1;
            let cell = IntervalSet::from(p.cell(k, i).clone());
            let inside = least.intersect(&cell);
            let w = inside.simplest_point();
            if w.is_none() {
                fail(
                    &mut failures,
                    4,
                    k,
                    i,
                    false,
                    format!("no point of least period {} in J_{k}^{i}", 1 << k),
                );
            }
            let lower = prev_fixed.intersect(&cell);
            if !lower.is_empty() {
                fail(
                    &mut failures,
                    4,
                    k,
                    i,
                    false,
                    format!("J_{k}^{i} holds points of period dividing {}: {lower}", 1 << (k - 1)),
                );
            }
            level.push(w);
        }
        periodic_witnesses.push(level);
        prev_fixed = fixed;
    }
    let has = |prop: u8| failures.iter().any(|f| f.property == prop);
    Ok(PortionReport {
        depth: p.depth,
        covering: !has(1),
        disjoint: !has(2),
        nesting: !has(3),
        periodic: !has(4),
        checks,
        periodic_witnesses,
        failures,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NestedClass {
    SingletonRegular,
    IntervalTwoStrong,
    IntervalMixed,
    UndeterminedAtDepth,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NestedLimit {
    pub path: Vec<usize>,
    /// `J_K^{i_K}`, the depth-`K` approximation of the nested intersection.
    pub limit: Interval,
    /// Width of `J_k^{i_k}` for each `k`.
    pub widths: Vec<Rational>,
    /// `|f^{2^n}(e) − e|` for `n = 0..` for the left then right endpoint.
    pub return_distances: [Vec<f64>; 2],
    pub classification: NestedClass,
}

/// Follows a path of nested cells and classifies the intersection by
/// endpoint-recurrence proxies.
pub fn nested_limit<M>(map: &M, p: &PeriodicPortion, path: &[usize], horizon: usize) -> Result<NestedLimit>
where
    M: Dynamics<Point = Rational>,
{
    if path.len() != p.depth || path.is_empty() {
        return Err(Error::input(format!(
            "path length {} does not match depth {}",
            path.len(),
            p.depth
        )));
    }
    for (k, &i) in path.iter().enumerate() {
        let level = k + 1;
        if i >= 1 << level {
            return Err(Error::input(format!("index {i} out of range at depth {level}")));
        }
        if k > 0 && i % (1 << k) != path[k - 1] {
            return Err(Error::input(format!(
                "J_{level}^{i} is not a child of J_{k}^{}",
                path[k - 1]
            )));
        }
    }
    let widths: Vec<Rational> = path
        .iter()
        .enumerate()
        .map(|(k, &i)| p.cell(k + 1, i).length())
        .collect();
    let limit = p.cell(p.depth, path[p.depth - 1]).clone();
    let steps = (usize::BITS - 1 - horizon.max(2).leading_zeros()) as usize;
    let returns = |e: &Rational| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(steps + 1);
        let mut y = map.apply(e)?;
        let mut t = 1usize;
        loop {
            out.push((&y - e).abs().to_f64());
            if 2 * t > horizon {
                break;
            }
            // y = f^t(e); advance to f^{2t}(e).
            for _ in 0..t {
                y = map.apply(&y)?;
            }
            t *= 2;
        }
        Ok(out)
    };
    let return_distances = [returns(&limit.lo)?, returns(&limit.hi)?];
    let w_last = widths[widths.len() - 1].to_f64();
    let w_prev = if widths.len() > 1 {
        widths[widths.len() - 2].to_f64()
    } else {
        1.0
    };
    let shrinking = widths.len() > 1 && w_last <= w_prev / 2.0;
    let stable = widths.len() > 1 && (w_prev - w_last) <= 1e-9 * w_prev.max(1e-300);
    let radius = w_last + p.pad(p.depth).to_f64();
    let regular = |d: &Vec<f64>| {
        d.last().is_some_and(|&x| x <= w_last) && d.windows(2).rev().take(2).all(|w| w[1] <= w[0] + 1e-12)
    };
    let classification = if shrinking {
        if regular(&return_distances[0]) {
            NestedClass::SingletonRegular
        } else {
            NestedClass::UndeterminedAtDepth
        }
    } else if stable {
        let flags = [
            recurrence_classify(map, &limit.lo, horizon, radius)?,
            recurrence_classify(map, &limit.hi, horizon, radius)?,
        ];
        let reg = [regular(&return_distances[0]), regular(&return_distances[1])];
        if flags.iter().all(|f| f.strongly_recurrent) && !reg[0] && !reg[1] {
            NestedClass::IntervalTwoStrong
        } else if (reg[0] && !flags[1].recurrent) || (reg[1] && !flags[0].recurrent) {
            NestedClass::IntervalMixed
        } else {
            NestedClass::UndeterminedAtDepth
        }
    } else {
        NestedClass::UndeterminedAtDepth
    };
    Ok(NestedLimit {
        path: path.to_vec(),
        limit,
        widths,
        return_distances,
        classification,
    })
}

/// The open gap between two disjoint intervals.
fn gap_between(a: &Interval, b: &Interval) -> Option<Interval> {
    let (left, right) = if a.hi < b.lo { (a, b) } else { (b, a) };
    if left.hi >= right.lo {
        return None;
    }
    Interval::new(left.hi.clone(), right.lo.clone(), false, false)
}

/// A periodic point strictly between `J_k^{r1}` and `J_k^{r2}`.
///
/// If the cells first separate below the common ancestor `J_j^a`, a point of
/// period `2^j` inside `J_j^a` separates them (for `j = 0`, a fixed point).
pub fn separating_periodic_point(
    map: &ExactMap,
    p: &PeriodicPortion,
    k: usize,
    r1: usize,
    r2: usize,
) -> Result<Rational> {
    if r1 == r2 {
        return Err(Error::input("r1 and r2 must differ"));
    }
    if k == 0 || k > p.depth || r1 >= 1 << k || r2 >= 1 << k {
        return Err(Error::input(format!("cell indices out of range at depth {k}")));
    }
    let gap = gap_between(p.cell(k, r1), p.cell(k, r2))
        .ok_or_else(|| Error::input(format!("J_{k}^{r1} and J_{k}^{r2} are not disjoint")))?;
    let gap = IntervalSet::from(gap);
    let mut j = 0;
    while j + 1 < k && r1 % (1 << (j + 1)) == r2 % (1 << (j + 1)) {
        j += 1;
    }
    let mut power = map.dyadic_power(j as u32, DEFAULT_PIECE_BUDGET)?;
    // The predicted period first, then longer powers of two as a fallback.
    for level in j..=k {
        if level > j {
            power = power.compose_budgeted(&power, DEFAULT_PIECE_BUDGET)?;
        }
        let candidates = power.fixed_points().intersect(&gap);
        if let Some(w) = candidates.simplest_point() {
            return Ok(w);
        }
    }
    Err(Error::NotFound(format!(
        "no point of period up to 2^{k} between J_{k}^{r1} and J_{k}^{r2}"
    )))
}

/// Depth-`K` address of `y`: the padded cell containing it at each level.
pub fn adding_machine_address(p: &PeriodicPortion, y: &Rational, depth: usize) -> Result<Vec<usize>> {
    if depth > p.depth {
        return Err(Error::input(format!("depth {depth} exceeds portion depth {}", p.depth)));
    }
    (1..=depth)
        .map(|k| {
            p.padded_index(k, y)
                .ok_or_else(|| Error::Outside(format!("{y} lies in no padded depth-{k} cell")))
        })
        .collect()
}

/// A periodic point inside `J`, found between the outermost separated cells
/// of three surrogate points in `J`.
pub fn ruette_check(map: &ExactMap, p: &PeriodicPortion, j: &Interval) -> Result<Rational> {
    let inside: Vec<&Rational> = p.omega.iter().filter(|w| j.contains(w)).collect();
    if inside.len() < 3 {
        return Err(Error::precondition(format!(
            "{j} holds {} surrogate points, 3 needed",
            inside.len()
        )));
    }
    let (x1, x3) = (inside[0], inside[inside.len() - 1]);
    for k in 1..=p.depth {
        let (Some(a), Some(b)) = (p.padded_index(k, x1), p.padded_index(k, x3)) else {
            continue;
        };
        if a != b {
            let w = separating_periodic_point(map, p, k, a, b)?;
            if j.contains(&w) {
                return Ok(w);
            }
        }
    }
    Err(Error::NotFound(format!(
        "the extreme surrogate points of {j} share every cell up to depth {}",
        p.depth
    )))
}

/// Where the cyclic itinerary starts holding along a sampled orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Alignment {
    /// First index of the maximal aligned suffix.
    pub start: usize,
    /// `n − index(f^n(y)) mod 2^k` on that suffix.
    pub phase: usize,
}

/// Longest suffix of `points` along which `points[n] ∈ Jpad[k][(n − phase) mod
/// 2^k]` for a single phase.
pub fn itinerary_alignment(p: &PeriodicPortion, points: &[Rational], k: usize) -> Option<Alignment> {
    let m = 1usize << k;
    let n_last = points.len().checked_sub(1)?;
    let phase_at = |n: usize| p.padded_index(k, &points[n]).map(|i| (n + m - i % m) % m);
    let phase = phase_at(n_last)?;
    let mut start = n_last;
    while start > 0 && phase_at(start - 1) == Some(phase) {
        start -= 1;
    }
    Some(Alignment { start, phase })
}
