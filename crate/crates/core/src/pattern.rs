//! Maximal pattern entropy `p*(n)` over a time window, growth-order
//! classification, Smital/Sharkovskii data and the polynomial bound.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use serde::Serialize;

use crate::covers::{join_budgeted, min_subcover, pull_back, OpenCover, DEFAULT_ELEMENT_BUDGET, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::map::ExactMap;
use crate::orbit::orbit;
use crate::rational::Rational;

/// Tuples examined per `n`; past it the row is flagged lower-bound only.
pub const DEFAULT_TUPLE_BUDGET: usize = 50_000;

/// Stable identifier of an exact map, used to pair tables with data.
pub fn map_fingerprint(map: &ExactMap) -> String {
    let mut h = DefaultHasher::new();
    map.hash(&mut h);
    format!("{:016x}", h.finish())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternRow {
    pub n: usize,
    pub p_star: usize,
    /// The lexicographically first maximizing tuple.
    pub tuple: Vec<usize>,
    pub tuples_checked: usize,
    pub tuples_total: u128,
    /// Some tuples were skipped, so `p_star` is only a lower bound.
    pub lb_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternGrowth {
    pub map: String,
    pub cover: OpenCover,
    /// Times are restricted to `0..=window`.
    pub window: usize,
    pub rows: Vec<PatternRow>,
}

impl PatternGrowth {
    pub fn values(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.p_star).collect()
    }

    pub fn lb_only(&self) -> bool {
        self.rows.iter().any(|r| r.lb_only)
    }

    /// Rows as `n,p_star,tuple,bound`; the tuple is space separated.
    pub fn csv(&self, bound: Option<&BoundCheck>) -> String {
        let mut out = String::from("n,p_star,tuple,bound\n");
        for (i, row) in self.rows.iter().enumerate() {
            let tuple: Vec<String> = row.tuple.iter().map(usize::to_string).collect();
            let b = bound
                .and_then(|b| b.bounds.get(i))
                .map_or(String::new(), |v| format!("{v}"));
            out.push_str(&format!("{},{},{},{}\n", row.n, row.p_star, tuple.join(" "), b));
        }
        out
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Advances `t` to the next increasing tuple in `0..=window`.
#[cfg(test)]
fn next_tuple(t: &mut [usize], window: usize) -> bool {
    let n = t.len();
    for i in (0..n).rev() {
        if t[i] < window - (n - 1 - i) {
            t[i] += 1;
            for j in i + 1..n {
                t[j] = t[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `f^{-t} U` for `t = 0..=window`.
fn pullbacks(map: &ExactMap, u: &OpenCover, window: usize) -> Vec<OpenCover> {
    let mut out = vec![u.clone()];
    for _ in 0..window {
        let next = pull_back(map, out.last().unwrap());
        out.push(next);
    }
    out
}

/// `max N(⋁ f^{-t_i} U)` over `0 ≤ t_1 < … < t_n ≤ window`.
pub fn pattern_complexity(map: &ExactMap, u: &OpenCover, n: usize, window: usize) -> Result<PatternRow> {
    let pulls = pullbacks(map, u, window);
    pattern_row(&pulls, n, window, is_onto(map), DEFAULT_TUPLE_BUDGET)
}

/// For onto maps `N(f^{-1} W) = N(W)`, so tuples may start at 0.
fn is_onto(map: &ExactMap) -> bool {
    map.image(&IntervalSet::unit()).is_unit()
}

/// Rows `n = 1..=n_max`, sharing the pulled-back covers.
pub fn pattern_growth(map: &ExactMap, u: &OpenCover, n_max: usize, window: usize) -> Result<PatternGrowth> {
    pattern_growth_budgeted(map, u, n_max, window, DEFAULT_TUPLE_BUDGET)
}

pub fn pattern_growth_budgeted(
    map: &ExactMap,
    u: &OpenCover,
    n_max: usize,
    window: usize,
    tuple_budget: usize,
) -> Result<PatternGrowth> {
    if n_max == 0 || n_max > window + 1 {
        return Err(Error::input(format!("need 1 ≤ n ≤ window + 1 = {}", window + 1)));
    }
    let pulls = pullbacks(map, u, window);
    let onto = is_onto(map);
    let rows = (1..=n_max)
        .map(|n| pattern_row(&pulls, n, window, onto, tuple_budget))
        .collect::<Result<_>>()?;
    Ok(PatternGrowth {
        map: map_fingerprint(map),
        cover: u.clone(),
        window,
        rows,
    })
}

/// Blocks (tuples sharing their first two times) evaluated per parallel batch.
const BATCH: usize = 8;

#[derive(Default)]
struct BlockResult {
    best: Option<(usize, Vec<usize>)>,
    checked: usize,
    skipped: bool,
    capped: bool,
}

struct RowSearch<'a> {
    pulls: &'a [OpenCover],
    n: usize,
    window: usize,
    cap: u128,
}

impl RowSearch<'_> {
    fn block(&self, prefix: &[usize]) -> Result<BlockResult> {
        let mut out = BlockResult::default();
        let mut w = self.pulls[prefix[0]].clone();
        for &t in &prefix[1..] {
            w = join_budgeted(&w, &self.pulls[t], DEFAULT_ELEMENT_BUDGET)?;
        }
        let mut tuple = prefix.to_vec();
        self.descend(&w, &mut tuple, &mut out)?;
        Ok(out)
    }

    fn descend(&self, w: &OpenCover, tuple: &mut Vec<usize>, out: &mut BlockResult) -> Result<()> {
        if out.capped {
            return Ok(());
        }
        if tuple.len() == self.n {
            out.checked += 1;
            match min_subcover(w, DEFAULT_NODE_BUDGET) {
                Ok(s) => {
                    if out.best.as_ref().is_none_or(|(b, _)| s.count > *b) {
                        out.best = Some((s.count, tuple.clone()));
                    }
                    out.capped = s.count as u128 >= self.cap;
                }
                Err(e) if e.is_budget() => out.skipped = true,
                Err(e) => return Err(e),
            }
            return Ok(());
        }
        let last = *tuple.last().unwrap();
        let top = self.window - (self.n - 1 - tuple.len());
        for t in last + 1..=top {
            let next = match join_budgeted(w, &self.pulls[t], DEFAULT_ELEMENT_BUDGET) {
                Ok(j) => j,
                Err(e) if e.is_budget() => {
                    out.skipped = true;
                    continue;
                }
                Err(e) => return Err(e),
            };
            tuple.push(t);
            self.descend(&next, tuple, out)?;
            tuple.pop();
            if out.capped {
                break;
            }
        }
        Ok(())
    }
}

fn pattern_row(pulls: &[OpenCover], n: usize, window: usize, onto: bool, tuple_budget: usize) -> Result<PatternRow> {
    if n == 0 || n > window + 1 {
        return Err(Error::input(format!("need 1 ≤ n ≤ window + 1 = {}", window + 1)));
    }
    let base = min_subcover(&pulls[0], DEFAULT_NODE_BUDGET)?.count;
    // N(U ∨ V) ≤ N(U) N(V) and N(f^{-t} U) ≤ N(U).
    let cap = (base as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let total = binomial(window + 1, n);
    let firsts = if onto { 0..=0 } else { 0..=window + 1 - n };
    let prefixes: Vec<Vec<usize>> = firsts
        .flat_map(|a| {
            if n == 1 {
                vec![vec![a]]
            } else {
                (a + 1..=window + 2 - n).map(|b| vec![a, b]).collect()
            }
        })
        .collect();
    let search = RowSearch { pulls, n, window, cap };
    let mut best: Option<(usize, Vec<usize>)> = None;
    let mut checked = 0usize;
    let mut skipped = false;
    let mut done = 0;
    let mut capped = false;
    'batches: for batch in prefixes.chunks(BATCH) {
        let results: Vec<Result<BlockResult>> = batch.par_iter().map(|p| search.block(p)).collect();
        for res in results {
            let res = match res {
                Ok(r) => r,
                Err(e) if e.is_budget() => BlockResult {
                    skipped: true,
                    ..Default::default()
                },
                Err(e) => return Err(e),
            };
            done += 1;
            checked += res.checked;
            skipped |= res.skipped;
            if let Some((c, t)) = res.best {
                if best.as_ref().is_none_or(|(b, _)| c > *b) {
                    best = Some((c, t));
                }
            }
            if res.capped {
                capped = true;
                break 'batches;
            }
            if checked >= tuple_budget {
                break 'batches;
            }
        }
    }
    // Reaching the cap settles the row; otherwise skipped work leaves a lower bound.
    let lb_only = !capped && (skipped || done < prefixes.len());
    let (p_star, tuple) =
        best.ok_or_else(|| Error::budget("pattern tuples with a finite subcover search", tuple_budget as u64))?;
    Ok(PatternRow {
        n,
        p_star,
        tuple,
        tuples_checked: checked,
        tuples_total: total,
        lb_only,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GrowthClass {
    Bounded {
        value: usize,
    },
    Polynomial {
        degree: f64,
    },
    Exponential {
        rate: f64,
    },
    /// Neither fit wins by the margin.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub class: GrowthClass,
    pub r2_polynomial: f64,
    pub r2_exponential: f64,
    pub margin: f64,
    /// Inherited from the table.
    pub lb_only: bool,
}

pub const R2_MARGIN: f64 = 0.05;

/// Least-squares slope and `R²` of `y` against `x`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

/// Bounded when constant over the second half, otherwise the better of the
/// fits `log p ~ log n` and `log p ~ n`.
pub fn growth_classify(table: &PatternGrowth) -> Result<GrowthReport> {
    let rows = &table.rows;
    if rows.len() < 4 {
        return Err(Error::input(format!(
            "growth classification needs ≥ 4 rows, got {}",
            rows.len()
        )));
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let logn: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let logp: Vec<f64> = rows.iter().map(|r| (r.p_star as f64).ln()).collect();
    let (degree, r2_poly) = linear_fit(&logn, &logp);
    let (rate, r2_exp) = linear_fit(&ns, &logp);
    let tail = &rows[rows.len() / 2..];
    let class = if tail.iter().all(|r| r.p_star == tail[0].p_star) {
        GrowthClass::Bounded { value: tail[0].p_star }
    } else if r2_exp >= r2_poly + R2_MARGIN {
        GrowthClass::Exponential { rate }
    } else if r2_poly >= r2_exp + R2_MARGIN {
        GrowthClass::Polynomial { degree }
    } else {
        GrowthClass::Indeterminate
    };
    Ok(GrowthReport {
        class,
        r2_polynomial: r2_poly,
        r2_exponential: r2_exp,
        margin: R2_MARGIN,
        lb_only: table.lb_only(),
    })
}

/// Finite stand-in for the data of the null-map shadowing lemma.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmitalData {
    pub map: String,
    pub eps: Rational,
    pub pad: Rational,
    pub horizon: usize,
    pub samples: Vec<Rational>,
    /// Reference points `x_1, …, x_k`.
    pub references: Vec<Rational>,
    /// Open neighbourhood of the ω-surrogate.
    pub neighbourhood: IntervalSet,
    /// `K_1, …, K_s`: disjoint pieces of the complement, each of diameter `< ε`.
    pub pieces: Vec<Interval>,
    /// One more than the largest observed number of visits outside `U`.
    pub q: usize,
    pub segments: usize,
}

impl SmitalData {
    pub fn k(&self) -> usize {
        self.references.len()
    }

    pub fn s(&self) -> usize {
        self.pieces.len()
    }

    /// `(k + s)^{2q+1} n^q`.
    pub fn bound(&self, n: usize) -> f64 {
        ((self.k() + self.s()) as f64).powi(2 * self.q as i32 + 1) * (n as f64).powi(self.q as i32)
    }

    /// The code `α_t(x)` over `times`; `None` when some run in `U` has no
    /// shadowing reference within the horizon.
    pub fn itinerary(&self, map: &ExactMap, x: &Rational, times: &[usize]) -> Result<Option<Vec<Symbol>>> {
        let last = times.iter().copied().max().unwrap_or(0);
        let len = self.horizon.max(last + 1);
        let orb = orbit(map, x, len)?.points;
        let inside: Vec<bool> = orb.iter().map(|p| self.neighbourhood.contains(p)).collect();
        let refs = self.reference_orbits(map, len)?;
        let coords: Vec<f64> = orb.iter().map(Rational::to_f64).collect();
        let eps = self.eps.to_f64();
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            if inside[t] {
                let mut a = t;
                while a > 0 && inside[a - 1] {
                    a -= 1;
                }
                let mut b = t;
                while b + 1 < len && inside[b + 1] {
                    b += 1;
                }
                match shadowing_reference(&coords[a..=b], &refs, eps) {
                    Some(i) => out.push(Symbol::Reference(i)),
                    None => return Ok(None),
                }
            } else {
                let j = self
                    .pieces
                    .iter()
                    .position(|k| k.contains(&orb[t]))
                    .ok_or_else(|| Error::Internal("point outside U and every piece".into()))?;
                out.push(Symbol::Piece(j));
            }
        }
        Ok(Some(out))
    }

    fn reference_orbits(&self, map: &ExactMap, len: usize) -> Result<Vec<Vec<f64>>> {
        self.references
            .iter()
            .map(|x| Ok(orbit(map, x, len)?.points.iter().map(Rational::to_f64).collect()))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Symbol {
    Reference(usize),
    Piece(usize),
}

/// First reference whose orbit stays within `eps` of `segment` from time 0.
fn shadowing_reference(segment: &[f64], refs: &[Vec<f64>], eps: f64) -> Option<usize> {
    refs.iter().position(|r| shadows(segment, r, eps))
}

fn shadows(segment: &[f64], reference: &[f64], eps: f64) -> bool {
    segment.iter().zip(reference).all(|(a, b)| (a - b).abs() < eps)
}

/// Maximal runs `[a, b]` of consecutive `true`.
fn runs(inside: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &v) in inside.iter().enumerate() {
        match (v, start) {
            (true, None) => start = Some(i),
            (false, Some(a)) => {
                out.push((a, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        out.push((a, inside.len() - 1));
    }
    out
}

/// Splits a component of the complement into half-open pieces of diameter `< eps`.
fn split_component(iv: &Interval, eps: &Rational) -> Vec<Interval> {
    let len = iv.length();
    let count = (len.clone() / eps.clone()).floor_usize() + 1;
    if count == 1 {
        return vec![iv.clone()];
    }
    let step = len / Rational::integer(count as i64);
    let cut = |i: usize| &iv.lo + &(&step * &Rational::integer(i as i64));
    (0..count)
        .map(|i| {
            let lo_closed = if i == 0 { iv.lo_closed } else { true };
            let hi_closed = if i + 1 == count { iv.hi_closed } else { false };
            let hi = if i + 1 == count { iv.hi.clone() } else { cut(i + 1) };
            Interval::new(cut(i), hi, lo_closed, hi_closed).expect("nonempty piece")
        })
        .collect()
}

/// Heuristic finite construction of the shadowing data.
///
/// The ω-surrogate is the union of the orbit tails `[horizon/2, horizon)` of
/// the samples, `U` its open `pad`-neighbourhood, references a greedy choice
/// of tail points whose orbits ε-shadow every observed run inside `U`.
pub fn smital_data(
    map: &ExactMap,
    eps: &Rational,
    pad: &Rational,
    samples: &[Rational],
    horizon: usize,
) -> Result<SmitalData> {
    if !eps.is_positive() || !pad.is_positive() {
        return Err(Error::input("ε and the padding must be positive"));
    }
    if samples.is_empty() || horizon < 4 {
        return Err(Error::input("need samples and a horizon of at least 4"));
    }
    let orbits: Vec<Vec<Rational>> = samples
        .par_iter()
        .map(|x| orbit(map, x, horizon).map(|o| o.points))
        .collect::<Result<_>>()?;
    let mut tail: Vec<Rational> = orbits.iter().flat_map(|o| o[horizon / 2..].iter().cloned()).collect();
    tail.sort();
    tail.dedup();
    let neighbourhood = IntervalSet::points(tail.iter().cloned()).pad(pad);
    let pieces: Vec<Interval> = neighbourhood
        .complement()
        .parts()
        .iter()
        .flat_map(|c| split_component(c, eps))
        .collect();

    // Distinct tail points modulo `eps / 1000` serve as candidates.
    let fine = eps.to_f64() / 1000.0;
    let mut candidates: Vec<Rational> = Vec::new();
    for p in &tail {
        if candidates.last().is_none_or(|c| p.to_f64() - c.to_f64() > fine) {
            candidates.push(p.clone());
        }
    }
    let cand_orbits: Vec<Vec<f64>> = candidates
        .par_iter()
        .map(|x| orbit(map, x, horizon).map(|o| o.points.iter().map(Rational::to_f64).collect()))
        .collect::<Result<_>>()?;
    let eps_f = eps.to_f64();
    let mut segments: Vec<Vec<f64>> = Vec::new();
    let mut q = 0;
    for o in &orbits {
        let inside: Vec<bool> = o.iter().map(|p| neighbourhood.contains(p)).collect();
        q = q.max(inside.iter().filter(|v| !**v).count());
        for (a, b) in runs(&inside) {
            segments.push(o[a..=b].iter().map(Rational::to_f64).collect());
        }
    }
    // shadow[s] lists the candidates shadowing segment s.
    let shadow: Vec<Vec<usize>> = segments
        .par_iter()
        .map(|seg| {
            (0..candidates.len())
                .filter(|&c| shadows(seg, &cand_orbits[c], eps_f))
                .collect()
        })
        .collect();
    if let Some(s) = shadow.iter().position(Vec::is_empty) {
        return Err(Error::precondition(format!(
            "no reference ε-shadows an observed run of length {} in U (ε or horizon too small)",
            segments[s].len()
        )));
    }
    let mut open: Vec<bool> = vec![true; segments.len()];
    let mut chosen: Vec<usize> = Vec::new();
    while open.iter().any(|&o| o) {
        let mut gain = vec![0usize; candidates.len()];
        for (s, cs) in shadow.iter().enumerate() {
            if open[s] {
                for &c in cs {
                    gain[c] += 1;
                }
            }
        }
        let best = (0..candidates.len())
            .max_by(|a, b| gain[*a].cmp(&gain[*b]).then(b.cmp(a)))
            .expect("candidates exist");
        chosen.push(best);
        for (s, cs) in shadow.iter().enumerate() {
            if cs.contains(&best) {
                open[s] = false;
            }
        }
    }
    chosen.sort_unstable();
    Ok(SmitalData {
        map: map_fingerprint(map),
        eps: eps.clone(),
        pad: pad.clone(),
        horizon,
        samples: samples.to_vec(),
        references: chosen.into_iter().map(|c| candidates[c].clone()).collect(),
        neighbourhood,
        pieces,
        q: q + 1,
        segments: segments.len(),
    })
}

/// Largest `δ` such that every interval shorter than `δ` lies in one element.
pub fn lebesgue_number(u: &OpenCover) -> Rational {
    let comps: Vec<&Interval> = u.elements.iter().flat_map(|e| e.parts()).collect();
    let mut starts: Vec<Rational> = vec![Rational::zero()];
    starts.extend(comps.iter().filter(|c| c.lo.is_positive()).map(|c| c.lo.clone()));
    let one = Rational::one();
    starts
        .iter()
        .filter_map(|a| {
            comps
                .iter()
                .filter(|c| c.contains(a))
                .map(|c| if c.hi == one { one.clone() } else { &c.hi - a })
                .max()
        })
        .min()
        .unwrap_or_else(Rational::zero)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundVerdict {
    Holds,
    Violated { n: usize, p_star: usize, bound: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub verdict: BoundVerdict,
    /// `(k + s)^{2q+1} n^q` per table row.
    pub bounds: Vec<f64>,
    pub k: usize,
    pub s: usize,
    pub q: usize,
    pub lebesgue: Rational,
    /// `q` is an observed maximum, so the verdict is empirical.
    pub empirical: bool,
}

/// `p*(n) ≤ (k+s)^{2q+1} n^q` for every row.
pub fn bound_check(table: &PatternGrowth, data: &SmitalData) -> Result<BoundCheck> {
    if table.map != data.map {
        return Err(Error::input(
            "pattern table and shadowing data come from different maps",
        ));
    }
    let lebesgue = lebesgue_number(&table.cover);
    if data.eps > &lebesgue / &Rational::integer(4) {
        return Err(Error::precondition(format!(
            "ε = {} exceeds a quarter of the cover's Lebesgue number {lebesgue}",
            data.eps
        )));
    }
    let bounds: Vec<f64> = table.rows.iter().map(|r| data.bound(r.n)).collect();
    let verdict = table
        .rows
        .iter()
        .zip(&bounds)
        .find(|(r, b)| r.p_star as f64 > **b)
        .map_or(BoundVerdict::Holds, |(r, b)| BoundVerdict::Violated {
            n: r.n,
            p_star: r.p_star,
            bound: *b,
        });
    Ok(BoundCheck {
        verdict,
        bounds,
        k: data.k(),
        s: data.s(),
        q: data.q,
        lebesgue,
        empirical: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::DoublingTower;
    use crate::rational::r;

    fn cover() -> OpenCover {
        OpenCover::parse(&["[0, 0.6)", "(0.4, 1]"], "U").unwrap()
    }

    /// Independent route: per-element preimages, raw products and subset
    /// enumeration.
    fn naive_p_star(map: &ExactMap, u: &OpenCover, n: usize, window: usize) -> usize {
        let pull = |t: usize| -> Vec<IntervalSet> {
            u.elements
                .iter()
                .map(|e| (0..t).fold(e.clone(), |s, _| map.preimage(&s)))
                .collect()
        };
        let mut best = 0;
        let mut t: Vec<usize> = (0..n).collect();
        loop {
            let mut elems = vec![IntervalSet::unit()];
            for &ti in &t {
                let p = pull(ti);
                elems = elems
                    .iter()
                    .flat_map(|a| p.iter().map(move |b| a.intersect(b)))
                    .filter(|s| !s.is_empty())
                    .collect();
            }
            let m = elems.len();
            let smallest = (1u32..1 << m)
                .filter(|mask| {
                    let union = (0..m)
                        .filter(|i| mask & (1 << i) != 0)
                        .fold(IntervalSet::empty(), |acc, i| acc.union(&elems[i]));
                    union.is_unit()
                })
                .map(u32::count_ones)
                .min()
                .unwrap() as usize;
            best = best.max(smallest);
            if !next_tuple(&mut t, window) {
                break;
            }
        }
        best
    }

    #[test]
    fn reflection_and_tent_tables() {
        let refl = pattern_growth(&ExactMap::reflection(), &cover(), 6, 12).unwrap();
        assert_eq!(refl.values(), vec![2; 6]);
        assert!(!refl.lb_only());
        assert!(matches!(
            growth_classify(&refl).unwrap().class,
            GrowthClass::Bounded { value: 2 }
        ));
        let tent = pattern_growth(&ExactMap::tent(), &cover(), 5, 8).unwrap();
        assert_eq!(tent.values(), vec![2, 4, 8, 16, 32]);
        match growth_classify(&tent).unwrap().class {
            GrowthClass::Exponential { rate } => assert!((rate - 2f64.ln()).abs() < 0.1),
            other => panic!("{other:?}"),
        }
        let id = pattern_growth(&ExactMap::identity(), &cover(), 4, 6).unwrap();
        assert_eq!(id.values(), vec![2; 4]);
    }

    #[test]
    fn naive_enumerator_agrees() {
        let maps = [
            ExactMap::tent(),
            ExactMap::reflection(),
            DoublingTower::zero_based(2).realized,
        ];
        for map in &maps {
            for n in 1..=3 {
                let row = pattern_complexity(map, &cover(), n, 5).unwrap();
                assert_eq!(row.p_star, naive_p_star(map, &cover(), n, 5), "n = {n}");
            }
        }
        let row = pattern_complexity(&ExactMap::tent(), &cover(), 4, 4).unwrap();
        assert_eq!(row.p_star, naive_p_star(&ExactMap::tent(), &cover(), 4, 4));
    }

    #[test]
    fn tables_are_monotone_and_submultiplicative() {
        let map = DoublingTower::zero_based(2).realized;
        let t = pattern_growth(&map, &cover(), 5, 8).unwrap();
        let v = t.values();
        for i in 1..v.len() {
            assert!(v[i] >= v[i - 1]);
        }
        for a in 1..=v.len() {
            for b in 1..=v.len() - a {
                assert!(v[a + b - 1] <= v[a - 1] * v[b - 1]);
            }
        }
        let single = pattern_complexity(&map, &cover(), 1, 8).unwrap();
        assert!(single.p_star <= 2);
    }

    #[test]
    fn budget_flags_lower_bounds() {
        let t = pattern_growth_budgeted(&ExactMap::reflection(), &cover(), 4, 12, 10).unwrap();
        assert!(t.lb_only());
        assert!(growth_classify(&t).unwrap().lb_only);
        assert!(growth_classify(&PatternGrowth {
            rows: t.rows[..3].to_vec(),
            ..t.clone()
        })
        .is_err());
    }

    #[test]
    fn classify_fabricated_tables() {
        let make = |vals: &[usize]| PatternGrowth {
            map: String::new(),
            cover: cover(),
            window: 12,
            rows: vals
                .iter()
                .enumerate()
                .map(|(i, &p)| PatternRow {
                    n: i + 1,
                    p_star: p,
                    tuple: vec![],
                    tuples_checked: 1,
                    tuples_total: 1,
                    lb_only: false,
                })
                .collect(),
        };
        assert!(matches!(
            growth_classify(&make(&[1, 2, 3, 4, 5, 6, 7, 8])).unwrap().class,
            GrowthClass::Polynomial { .. }
        ));
        assert!(matches!(
            growth_classify(&make(&[2, 4, 8, 16, 32, 64, 128, 256])).unwrap().class,
            GrowthClass::Exponential { .. }
        ));
        // Four doubling rows do not separate the two fits.
        assert_eq!(
            growth_classify(&make(&[1, 2, 4, 8])).unwrap().class,
            GrowthClass::Indeterminate
        );
    }

    #[test]
    fn lebesgue_numbers() {
        assert_eq!(lebesgue_number(&cover()), r(1, 5));
        let u = OpenCover::parse(&["[0, 0.7)", "(0.3, 1]"], "W").unwrap();
        assert_eq!(lebesgue_number(&u), r(2, 5));
        assert_eq!(lebesgue_number(&OpenCover::trivial()), r(1, 1));
    }

    fn samples() -> Vec<Rational> {
        (0..=10).map(|i| r(i, 10)).collect()
    }

    #[test]
    fn smital_data_for_the_reflection() {
        let odd: Vec<Rational> = (0..5).map(|i| r(2 * i + 1, 10)).collect();
        let d = smital_data(&ExactMap::reflection(), &r(3, 10), &r(1, 20), &odd, 64).unwrap();
        assert!(d.k() <= 2, "{:?}", d.references);
        assert_eq!(d.q, 1);
        for piece in &d.pieces {
            assert!(piece.length() < r(3, 10));
        }
        let all = d.pieces.iter().fold(d.neighbourhood.clone(), |acc, p| {
            acc.union(&IntervalSet::from(p.clone()))
        });
        assert!(all.is_unit());
        let u = OpenCover::parse(&["[0, 0.7)", "(0.3, 1]"], "W").unwrap();
        let refl = ExactMap::reflection();
        let table = pattern_growth(&refl, &u, 4, 8).unwrap();
        let d = smital_data(&refl, &r(1, 10), &r(1, 20), &samples(), 64).unwrap();
        assert_eq!(bound_check(&table, &d).unwrap().verdict, BoundVerdict::Holds);
    }

    #[test]
    fn smital_data_for_a_tower_stage_and_the_bound() {
        let map = DoublingTower::zero_based(3).realized;
        let d = smital_data(&map, &r(1, 10), &r(1, 20), &samples(), 256).unwrap();
        assert!(d.k() >= 1 && d.q >= 1);
        let u = OpenCover::parse(&["[0, 0.7)", "(0.3, 1]"], "W").unwrap();
        let table = pattern_growth(&map, &u, 5, 10).unwrap();
        let check = bound_check(&table, &d).unwrap();
        assert_eq!(check.verdict, BoundVerdict::Holds);
        assert!(!matches!(
            growth_classify(&table).unwrap().class,
            GrowthClass::Exponential { .. }
        ));
        // Itineraries that agree pin the orbits within 2ε.
        let times = [0, 3, 7, 12, 20];
        let pts: Vec<Rational> = (0..40).map(|i| r(2 * i + 1, 80)).collect();
        let codes: Vec<Option<Vec<Symbol>>> = pts.iter().map(|x| d.itinerary(&map, x, &times).unwrap()).collect();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if let (Some(a), Some(b)) = (&codes[i], &codes[j]) {
                    if a == b {
                        for &t in &times {
                            let fx = map.iterate(&pts[i], t).unwrap();
                            let fy = map.iterate(&pts[j], t).unwrap();
                            assert!((fx - fy).abs() < r(2, 10));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn the_bound_has_teeth_and_checks_its_inputs() {
        let tent = ExactMap::tent();
        let table = pattern_growth(&tent, &cover(), 6, 8).unwrap();
        let fabricated = SmitalData {
            map: table.map.clone(),
            eps: r(1, 20),
            pad: r(1, 20),
            horizon: 8,
            samples: vec![],
            references: vec![r(0, 1)],
            neighbourhood: IntervalSet::unit(),
            pieces: vec![],
            q: 1,
            segments: 0,
        };
        assert!(matches!(
            bound_check(&table, &fabricated).unwrap().verdict,
            BoundVerdict::Violated { .. }
        ));
        let other = SmitalData {
            map: "elsewhere".into(),
            ..fabricated.clone()
        };
        assert!(matches!(bound_check(&table, &other), Err(Error::Input(_))));
        let coarse = SmitalData {
            eps: r(1, 10),
            ..fabricated
        };
        assert!(matches!(bound_check(&table, &coarse), Err(Error::Precondition(_))));
        let generic: Vec<Rational> = (1..=10).map(|i| r(i, 997)).collect();
        assert!(matches!(
            smital_data(&tent, &r(1, 100), &r(1, 200), &generic, 64),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn csv_layout() {
        let t = pattern_growth(&ExactMap::reflection(), &cover(), 2, 3).unwrap();
        let csv = t.csv(None);
        assert!(csv.starts_with("n,p_star,tuple,bound\n1,2,0,\n"));
    }
}
