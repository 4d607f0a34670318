//! Pair and tuple classification: kneading codes, window proxies for
//! proximality and asymptoticity, Banach-density tables, f-nonseparability,
//! regional proximality, n-scrambled searches and scrambled-set comparison.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::map::{Dynamics, ExactMap, DEFAULT_PIECE_BUDGET};
use crate::orbit::orbit;
use crate::portion::{compute_portion, itinerary_alignment, OmegaParams, PeriodicPortion};
use crate::rational::{r, Rational};

/// Identifies the portion a kneading code was read against.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PortionRef {
    pub base: Rational,
    pub depth: usize,
    pub burn: usize,
    pub horizon: usize,
    /// Half the smallest gap between depth-`k` cells, `k = 1..=depth`.
    pub separations: Vec<Rational>,
}

impl PortionRef {
    pub fn of(p: &PeriodicPortion) -> PortionRef {
        PortionRef {
            base: p.base.clone(),
            depth: p.depth,
            burn: p.provenance.params.burn,
            horizon: p.provenance.params.horizon,
            separations: (1..=p.depth).map(|k| p.min_gap(k) / Rational::integer(2)).collect(),
        }
    }
}

/// `c_x(1..=K)`: from time `c_x(k)` on, `f^n(x)` visits the padded cells in
/// cyclic order `J_{k,s_k}^{(n − c_x(k)) mod 2^k}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KneadingCode {
    pub point: Rational,
    pub depth: usize,
    pub horizon: usize,
    /// `entries[k - 1] = c_x(k)`.
    pub entries: Vec<usize>,
    pub portion: PortionRef,
}

impl KneadingCode {
    pub fn get(&self, k: usize) -> usize {
        self.entries[k - 1]
    }

    /// `c_x(k) ≡ c_x(k + 1) (mod 2^k)` for every stored `k`.
    pub fn is_congruent(&self) -> bool {
        self.entries
            .windows(2)
            .enumerate()
            .all(|(i, w)| (w[0] % (1 << (i + 1))) == (w[1] % (1 << (i + 1))))
    }
}

/// Reads the kneading code of `x` off its orbit up to `horizon`.
///
/// Each alignment must start by `horizon / 2` so the itinerary is sampled
/// over at least half the orbit.
pub fn kneading_code<M>(
    map: &M,
    p: &PeriodicPortion,
    x: &Rational,
    depth: usize,
    horizon: usize,
) -> Result<KneadingCode>
where
    M: Dynamics<Point = Rational>,
{
    if depth == 0 || depth > p.depth {
        return Err(Error::input(format!("code depth {depth} outside 1..={}", p.depth)));
    }
    if horizon < 2 {
        return Err(Error::input("horizon must be at least 2"));
    }
    let orb = orbit(map, x, horizon)?;
    let mut entries = Vec::with_capacity(depth);
    for k in 1..=depth {
        let m = 1usize << k;
        let al = itinerary_alignment(p, &orb.points, k)
            .ok_or_else(|| Error::NotAligned(format!("f^{horizon}({x}) lies in no padded depth-{k} cell")))?;
        if al.start > horizon / 2 {
            return Err(Error::NotAligned(format!(
                "depth-{k} itinerary of {x} only aligns from n = {} (horizon {horizon})",
                al.start
            )));
        }
        let c = al.start + (al.phase + m - al.start % m) % m;
        entries.push(c);
    }
    Ok(KneadingCode {
        point: x.clone(),
        depth,
        horizon,
        entries,
        portion: PortionRef::of(p),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CodeVerdict {
    ProximalToDepth {
        depth: usize,
    },
    /// Codes first disagree at depth `k`; the orbits are eventually at least
    /// `delta` apart.
    NotProximal {
        k: usize,
        delta: Rational,
    },
}

impl CodeVerdict {
    pub fn is_proximal(&self) -> bool {
        matches!(self, CodeVerdict::ProximalToDepth { .. })
    }
}

pub fn proximal_by_code(cx: &KneadingCode, cy: &KneadingCode) -> Result<CodeVerdict> {
    if cx.portion != cy.portion {
        return Err(Error::input("kneading codes refer to different portions"));
    }
    if cx.depth != cy.depth {
        return Err(Error::input(format!(
            "code depths differ: {} vs {}",
            cx.depth, cy.depth
        )));
    }
    for k in 1..=cx.depth {
        let m = 1usize << k;
        if cx.get(k) % m != cy.get(k) % m {
            return Ok(CodeVerdict::NotProximal {
                k,
                delta: cx.portion.separations[k - 1].clone(),
            });
        }
    }
    Ok(CodeVerdict::ProximalToDepth { depth: cx.depth })
}

/// Finite-horizon classification of a pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub x: String,
    pub y: String,
    pub horizon: usize,
    pub tol: f64,
    pub delta: f64,
    /// Inclusive window `[horizon / 2, horizon]` the proxies range over.
    pub window: [usize; 2],
    pub liminf_proxy: f64,
    pub limsup_proxy: f64,
    pub proximal: bool,
    pub asymptotic: bool,
    pub scrambled: bool,
    pub delta_scrambled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_verdict: Option<CodeVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonseparable: Option<NonsepVerdict>,
}

fn window_of(horizon: usize) -> (usize, usize) {
    (horizon / 2, horizon)
}

fn coords<M: Dynamics>(map: &M, x: &M::Point, n: usize) -> Result<Vec<f64>> {
    Ok(orbit(map, x, n)?.points.iter().map(|p| map.coord(p)).collect())
}

pub fn classify_pair<M>(map: &M, x: &M::Point, y: &M::Point, horizon: usize, tol: f64, delta: f64) -> Result<PairReport>
where
    M: Dynamics,
    M::Point: fmt::Display,
{
    if horizon == 0 {
        return Err(Error::input("horizon must be at least 1"));
    }
    let ox = coords(map, x, horizon)?;
    let oy = coords(map, y, horizon)?;
    let (a, b) = window_of(horizon);
    let (mut lo, mut hi) = (f64::INFINITY, 0f64);
    for n in a..=b {
        let d = (ox[n] - oy[n]).abs();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    let proximal = lo <= tol;
    let asymptotic = hi <= tol;
    let scrambled = proximal && !asymptotic;
    Ok(PairReport {
        x: x.to_string(),
        y: y.to_string(),
        horizon,
        tol,
        delta,
        window: [a, b],
        liminf_proxy: lo,
        limsup_proxy: hi,
        proximal,
        asymptotic,
        scrambled,
        delta_scrambled: scrambled && hi >= delta,
        code_verdict: None,
        density: None,
        nonseparable: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityRow {
    pub start: usize,
    pub end: usize,
    /// Fraction of `n ∈ [start, end]` with `|f^n x − f^n y| < 1/p`.
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityTable {
    pub p: u32,
    pub rows: Vec<DensityRow>,
    /// `(k, 1 − p/2^k)` for each portion depth `k`.
    pub benchmark: Vec<(usize, f64)>,
}

impl DensityTable {
    pub fn min_fraction(&self) -> f64 {
        self.rows.iter().map(|r| r.fraction).fold(1.0, f64::min)
    }
}

pub fn banach_density_estimate<M: Dynamics>(
    map: &M,
    x: &M::Point,
    y: &M::Point,
    p: u32,
    windows: &[(usize, usize)],
    depth: usize,
) -> Result<DensityTable> {
    if p == 0 {
        return Err(Error::input("p must be positive"));
    }
    if let Some(&(a, b)) = windows.iter().find(|(a, b)| a > b) {
        return Err(Error::input(format!("window [{a}, {b}] is empty")));
    }
    let last = windows.iter().map(|w| w.1).max().unwrap_or(0);
    let ox = coords(map, x, last)?;
    let oy = coords(map, y, last)?;
    let eps = 1.0 / p as f64;
    let rows = windows
        .iter()
        .map(|&(a, b)| {
            let hits = (a..=b).filter(|&n| (ox[n] - oy[n]).abs() < eps).count();
            DensityRow {
                start: a,
                end: b,
                fraction: hits as f64 / (b - a + 1) as f64,
            }
        })
        .collect();
    let benchmark = (1..=depth).map(|k| (k, 1.0 - p as f64 / 2f64.powi(k as i32))).collect();
    Ok(DensityTable { p, rows, benchmark })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonsepParams {
    /// Base point whose ω-surrogate must hold both `u` and `v`.
    pub base: Rational,
    pub omega: OmegaParams,
    /// Periods up to `2^period_exponent` are swept.
    pub period_exponent: u32,
    pub piece_budget: usize,
}

impl NonsepParams {
    pub fn new(base: Rational, omega: OmegaParams, period_exponent: u32) -> Self {
        NonsepParams {
            base,
            omega,
            period_exponent,
            piece_budget: DEFAULT_PIECE_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NonsepVerdict {
    /// No periodic point of period `≤ period_bound` lies in `(u, v)`.
    NonseparableEvidence {
        period_bound: usize,
        surrogate_points: usize,
    },
    Separated {
        witness: Rational,
        period: usize,
    },
    Undetermined {
        reason: String,
    },
}

impl NonsepVerdict {
    pub fn is_evidence(&self) -> bool {
        matches!(self, NonsepVerdict::NonseparableEvidence { .. })
    }
}

pub fn f_nonseparable_test(map: &ExactMap, u: &Rational, v: &Rational, params: &NonsepParams) -> Result<NonsepVerdict> {
    if u >= v {
        return Err(Error::input(format!("need u < v, got u = {u}, v = {v}")));
    }
    let bound = 1usize << params.period_exponent;
    let portion = match compute_portion(map, &params.base, params.period_exponent as usize + 1, params.omega) {
        Ok(p) => p,
        Err(Error::NotInfinite(msg)) => return Ok(NonsepVerdict::Undetermined { reason: msg }),
        Err(e) => return Err(e),
    };
    let tol = params.omega.tol;
    let near = |w: &Rational| {
        let c = w.to_f64();
        portion.omega.iter().any(|o| (o.to_f64() - c).abs() <= tol)
    };
    for (name, w) in [("u", u), ("v", v)] {
        if !near(w) {
            return Ok(NonsepVerdict::Undetermined {
                reason: format!(
                    "{name} = {w} is not within {tol:e} of the ω-surrogate of {}",
                    params.base
                ),
            });
        }
    }
    let gap = IntervalSet::from(Interval::open(u.clone(), v.clone()));
    let mut power = map.clone();
    for n in 1..=bound {
        if n > 1 {
            power = match power.compose_budgeted(map, params.piece_budget) {
                Ok(g) => g,
                Err(e) if e.is_budget() => {
                    return Ok(NonsepVerdict::Undetermined {
                        reason: format!("piece budget exhausted at period {n}: {e}"),
                    })
                }
                Err(e) => return Err(e),
            };
        }
        if let Some(w) = power.fixed_points().intersect(&gap).simplest_point() {
            return Ok(NonsepVerdict::Separated { witness: w, period: n });
        }
    }
    Ok(NonsepVerdict::NonseparableEvidence {
        period_bound: bound,
        surrogate_points: portion.omega.len(),
    })
}

/// Parameters of an exhaustive grid search for n-scrambled tuples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScrambleSearch {
    pub n: usize,
    pub grid_step: Rational,
    /// Grid point `j` is `j·grid_step + (j + 1)·jitter`. A common shift is not
    /// enough: expanding maps send a shifted dyadic grid onto one orbit.
    pub jitter: Rational,
    pub horizon: usize,
    /// `liminf max d ≤ tol` counts as zero.
    pub tol: f64,
    /// `limsup min d ≥ sep` counts as positive.
    pub sep: f64,
}

impl ScrambleSearch {
    /// `jitter = 1/1000003`, `sep = √tol`.
    pub fn new(n: usize, grid_step: Rational, horizon: usize, tol: f64) -> Self {
        ScrambleSearch {
            n,
            grid_step,
            jitter: r(1, 1_000_003),
            horizon,
            tol,
            sep: tol.sqrt(),
        }
    }

    pub fn grid(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let step = &self.grid_step + &self.jitter;
        let mut x = self.jitter.clone();
        while x <= Rational::one() {
            out.push(x.clone());
            x = x + &step;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScrambledTuple {
    pub points: Vec<Rational>,
    pub liminf_max: f64,
    pub limsup_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScrambleResult {
    pub params: ScrambleSearch,
    pub grid_points: usize,
    pub found: Option<ScrambledTuple>,
}

/// Lexicographically first grid tuple whose window proxies satisfy
/// `liminf max ≤ tol` and `limsup min ≥ sep`.
pub fn n_scrambled_search<M>(map: &M, params: &ScrambleSearch) -> Result<ScrambleResult>
where
    M: Dynamics<Point = Rational>,
{
    if params.n < 2 {
        return Err(Error::input("n-scrambled tuples need n ≥ 2"));
    }
    if !params.grid_step.is_positive() {
        return Err(Error::input("grid step must be positive"));
    }
    if params.horizon < 2 {
        return Err(Error::input("horizon must be at least 2"));
    }
    let grid = params.grid();
    let (a, b) = window_of(params.horizon);
    let traces: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|x| coords(map, x, params.horizon).map(|c| c[a..=b].to_vec()))
        .collect::<Result<_>>()?;
    let n = params.n;
    let found = (0..grid.len()).into_par_iter().find_map_first(|first| {
        let mut idx = vec![first];
        search_from(&traces, n, params, &mut idx)
    });
    Ok(ScrambleResult {
        params: params.clone(),
        grid_points: grid.len(),
        found: found.map(|(idx, lo, hi)| ScrambledTuple {
            points: idx.iter().map(|&i| grid[i].clone()).collect(),
            liminf_max: lo,
            limsup_min: hi,
        }),
    })
}

fn search_from(
    traces: &[Vec<f64>],
    n: usize,
    params: &ScrambleSearch,
    idx: &mut Vec<usize>,
) -> Option<(Vec<usize>, f64, f64)> {
    if idx.len() == n {
        let (lo, hi) = tuple_proxies(traces, idx);
        return (lo <= params.tol && hi >= params.sep).then(|| (idx.clone(), lo, hi));
    }
    let next = idx.last().unwrap() + 1;
    for j in next..traces.len() {
        idx.push(j);
        let hit = search_from(traces, n, params, idx);
        idx.pop();
        if hit.is_some() {
            return hit;
        }
    }
    None
}

/// `(min_n max_{i<j} d, max_n min_{i<j} d)` over the stored window.
fn tuple_proxies(traces: &[Vec<f64>], idx: &[usize]) -> (f64, f64) {
    let len = traces[idx[0]].len();
    let (mut lo, mut hi) = (f64::INFINITY, 0f64);
    for t in 0..len {
        let (mut mx, mut mn) = (0f64, f64::INFINITY);
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                let d = (traces[i][t] - traces[j][t]).abs();
                mx = mx.max(d);
                mn = mn.min(d);
            }
        }
        lo = lo.min(mx);
        hi = hi.max(mn);
    }
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RegionalVerdict {
    /// `f^n(B(x, 1/k))` and `f^n(B(y, 1/k))` come within `distance < 1/k`.
    RegionallyProximal {
        k: u32,
        n: usize,
        distance: Rational,
    },
    NotFoundAtDepth {
        k: u32,
        horizon: usize,
    },
}

impl RegionalVerdict {
    pub fn is_proximal(&self) -> bool {
        matches!(self, RegionalVerdict::RegionallyProximal { .. })
    }
}

/// Exact search for `u ∈ B(x, 1/k)`, `v ∈ B(y, 1/k)`, `n ≤ horizon` with
/// `|f^n u − f^n v| < 1/k`, by pushing both balls forward.
pub fn regionally_proximal_test(
    map: &ExactMap,
    x: &Rational,
    y: &Rational,
    k: u32,
    horizon: usize,
) -> Result<RegionalVerdict> {
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    map.eval(x)?;
    map.eval(y)?;
    let radius = r(1, k as i64);
    let mut a = IntervalSet::from(Interval::point(x.clone()).pad(&radius));
    let mut b = IntervalSet::from(Interval::point(y.clone()).pad(&radius));
    for n in 0..=horizon {
        if n > 0 {
            a = map.image(&a);
            b = map.image(&b);
            if a.len() + b.len() > DEFAULT_PIECE_BUDGET {
                return Err(Error::budget(
                    "regional-proximality image parts",
                    DEFAULT_PIECE_BUDGET as u64,
                ));
            }
        }
        let d = a.distance(&b).expect("images of nonempty sets are nonempty");
        if d < radius {
            return Ok(RegionalVerdict::RegionallyProximal { k, n, distance: d });
        }
    }
    Ok(RegionalVerdict::NotFoundAtDepth { k, horizon })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScrambledSetComparison {
    /// `matching[i] = j` pairs `S[i]` with an asymptotic partner `R[j]`.
    EquivalentEvidence { matching: Vec<usize> },
    /// Every cross pair stays at least `delta` apart over the window.
    SeparableEvidence { delta: f64 },
    /// A cross pair that is proximal but has no asymptotic matching.
    Inconsistent {
        s: usize,
        r: usize,
        liminf: f64,
        limsup: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub horizon: usize,
    pub tol: f64,
    pub sizes_differ: bool,
    /// Whether every pair inside `S` and inside `R` classified as scrambled.
    pub inputs_scrambled: [bool; 2],
    pub verdict: ScrambledSetComparison,
}

pub fn compare_scrambled_sets<M: Dynamics>(
    map: &M,
    s: &[M::Point],
    rs: &[M::Point],
    horizon: usize,
    tol: f64,
) -> Result<ComparisonReport> {
    if s.is_empty() || rs.is_empty() || horizon == 0 {
        return Err(Error::input("need nonempty samples and a positive horizon"));
    }
    let (a, b) = window_of(horizon);
    let trace = |x: &M::Point| coords(map, x, horizon).map(|c| c[a..=b].to_vec());
    let ts: Vec<Vec<f64>> = s.iter().map(trace).collect::<Result<_>>()?;
    let tr: Vec<Vec<f64>> = rs.iter().map(trace).collect::<Result<_>>()?;
    let proxies = |u: &[f64], v: &[f64]| {
        u.iter().zip(v).fold((f64::INFINITY, 0f64), |(lo, hi), (p, q)| {
            let d = (p - q).abs();
            (lo.min(d), hi.max(d))
        })
    };
    let all_scrambled = |t: &[Vec<f64>]| {
        (0..t.len()).all(|i| {
            (i + 1..t.len()).all(|j| {
                let (lo, hi) = proxies(&t[i], &t[j]);
                lo <= tol && hi > tol
            })
        })
    };
    let inputs_scrambled = [all_scrambled(&ts), all_scrambled(&tr)];
    let sizes_differ = s.len() != rs.len();
    let cross: Vec<Vec<(f64, f64)>> = ts.iter().map(|u| tr.iter().map(|v| proxies(u, v)).collect()).collect();

    if !sizes_differ {
        let mut used = vec![false; rs.len()];
        let mut matching = Vec::with_capacity(s.len());
        for row in &cross {
            let best = (0..rs.len())
                .filter(|&j| !used[j] && row[j].1 <= tol)
                .min_by(|&i, &j| row[i].1.total_cmp(&row[j].1));
            match best {
                Some(j) => {
                    used[j] = true;
                    matching.push(j);
                }
                None => break,
            }
        }
        if matching.len() == s.len() {
            return Ok(ComparisonReport {
                horizon,
                tol,
                sizes_differ,
                inputs_scrambled,
                verdict: ScrambledSetComparison::EquivalentEvidence { matching },
            });
        }
    }
    let mut delta = f64::INFINITY;
    for (i, row) in cross.iter().enumerate() {
        for (j, &(lo, hi)) in row.iter().enumerate() {
            if lo <= tol {
                return Ok(ComparisonReport {
                    horizon,
                    tol,
                    sizes_differ,
                    inputs_scrambled,
                    verdict: ScrambledSetComparison::Inconsistent {
                        s: i,
                        r: j,
                        liminf: lo,
                        limsup: hi,
                    },
                });
            }
            delta = delta.min(lo);
        }
    }
    Ok(ComparisonReport {
        horizon,
        tol,
        sizes_differ,
        inputs_scrambled,
        verdict: ScrambledSetComparison::SeparableEvidence { delta },
    })
}
