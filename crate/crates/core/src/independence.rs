//! Independence sets: exact certificates, arithmetic progressions for mixing
//! maps, finite-depth IE/IN/IT profiles of pairs, covering-pair sequences of
//! nonseparable pairs and the witness tree built from them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::map::{ExactMap, DEFAULT_PIECE_BUDGET};
use crate::pairs::{f_nonseparable_test, NonsepParams, NonsepVerdict};
use crate::rational::{r, Rational};

/// Largest time set checked pattern by pattern.
pub const DEFAULT_TIME_BUDGET: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternWitness {
    /// `pattern[i]` indexes the target set visited at `times[i]`.
    pub pattern: Vec<usize>,
    pub point: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndependenceCertificate {
    pub targets: Vec<IntervalSet>,
    pub times: Vec<usize>,
    pub verified: bool,
    /// One witness per pattern when verified.
    pub witnesses: Vec<PatternWitness>,
    /// The first pattern (lexicographically) with an empty intersection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_pattern: Option<Vec<usize>>,
    pub patterns_checked: usize,
    pub time_budget: usize,
}

impl IndependenceCertificate {
    /// Re-checks every witness by direct iteration.
    pub fn revalidate(&self, map: &ExactMap) -> Result<bool> {
        if !self.verified {
            return Ok(false);
        }
        let expected = self.targets.len().pow(self.times.len() as u32);
        if self.witnesses.len() != expected {
            return Ok(false);
        }
        for w in &self.witnesses {
            let mut y = w.point.clone();
            let mut now = 0;
            for (&t, &s) in self.times.iter().zip(&w.pattern) {
                y = map.iterate(&y, t - now)?;
                now = t;
                if !self.targets[s].contains(&y) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// `f^t(A)` by repeated exact images.
fn image_n(map: &ExactMap, a: &IntervalSet, t: usize) -> IntervalSet {
    let mut s = a.clone();
    for _ in 0..t {
        s = map.image(&s);
    }
    s
}

/// Some `x ∈ X` with `f^d(x) = y`, given `y ∈ f^d(X)`.
fn pull_point(map: &ExactMap, x: &IntervalSet, d: usize, y: Rational) -> Option<Rational> {
    let mut chain = Vec::with_capacity(d);
    let mut s = x.clone();
    for _ in 0..d {
        let next = map.image(&s);
        chain.push(s);
        s = next;
    }
    let mut y = y;
    for level in chain.iter().rev() {
        y = map
            .preimage(&IntervalSet::points([y]))
            .intersect(level)
            .simplest_point()?;
    }
    Some(y)
}

/// Checks `⋂_{i∈J} f^{-i} A_{s(i)} ≠ ∅` for every `s ∈ {1..k}^J`.
///
/// Pattern sets are tracked forward: with `T_i = f^{t_i}(⋂_{j≤i} f^{-t_j} A_{s_j})`
/// one has `T_{i+1} = f^{t_{i+1} - t_i}(T_i) ∩ A_{s_{i+1}}`, so no preimage of a
/// target is ever formed. Witnesses are pulled back point by point.
pub fn independence_check(map: &ExactMap, targets: &[IntervalSet], times: &[usize]) -> Result<IndependenceCertificate> {
    independence_check_budgeted(map, targets, times, DEFAULT_TIME_BUDGET)
}

pub fn independence_check_budgeted(
    map: &ExactMap,
    targets: &[IntervalSet],
    times: &[usize],
    time_budget: usize,
) -> Result<IndependenceCertificate> {
    if targets.is_empty() {
        return Err(Error::input("need at least one target set"));
    }
    if targets.iter().any(IntervalSet::is_empty) {
        return Err(Error::input("target sets must be nonempty"));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("times must be strictly increasing"));
    }
    if times.len() > time_budget {
        return Err(Error::budget("independence time-set size", time_budget as u64));
    }
    let k = targets.len();
    let total = k.pow(times.len() as u32);
    if times.is_empty() {
        return Ok(IndependenceCertificate {
            targets: targets.to_vec(),
            times: vec![],
            verified: true,
            witnesses: vec![PatternWitness {
                pattern: vec![],
                point: Rational::zero(),
            }],
            failing_pattern: None,
            patterns_checked: 1,
            time_budget,
        });
    }
    let start = image_n(map, &IntervalSet::unit(), times[0]);
    let ctx = WalkContext { map, targets, times };
    let walks: Vec<Walk> = (0..k)
        .into_par_iter()
        .map(|a| {
            let mut walk = Walk::default();
            let t0 = start.intersect(&targets[a]);
            walk.run(&ctx, vec![a], vec![t0]);
            walk
        })
        .collect();
    let mut witnesses = Vec::new();
    let mut failing = None;
    let mut checked = 0;
    for walk in walks {
        checked += walk.checked;
        witnesses.extend(walk.witnesses);
        if failing.is_none() {
            failing = walk.failing;
        }
    }
    let verified = failing.is_none();
    if !verified {
        witnesses.clear();
    }
    Ok(IndependenceCertificate {
        targets: targets.to_vec(),
        times: times.to_vec(),
        verified,
        witnesses,
        failing_pattern: failing,
        patterns_checked: checked.min(total),
        time_budget,
    })
}

struct WalkContext<'a> {
    map: &'a ExactMap,
    targets: &'a [IntervalSet],
    times: &'a [usize],
}

/// Depth-first pattern walk sharing prefix images.
#[derive(Default)]
struct Walk {
    witnesses: Vec<PatternWitness>,
    failing: Option<Vec<usize>>,
    checked: usize,
}

impl Walk {
    fn run(&mut self, ctx: &WalkContext, pattern: Vec<usize>, stack: Vec<IntervalSet>) {
        if self.failing.is_some() {
            return;
        }
        let depth = stack.len();
        let top = stack.last().expect("nonempty stack");
        if top.is_empty() {
            let mut p = pattern;
            p.resize(ctx.times.len(), 0);
            self.failing = Some(p);
            self.checked += 1;
            return;
        }
        if depth == ctx.times.len() {
            self.checked += 1;
            let point = self.witness(ctx, &stack);
            self.witnesses.push(PatternWitness { pattern, point });
            return;
        }
        let moved = image_n(ctx.map, top, ctx.times[depth] - ctx.times[depth - 1]);
        for (a, target) in ctx.targets.iter().enumerate() {
            let mut p = pattern.clone();
            p.push(a);
            let mut s = stack.clone();
            s.push(moved.intersect(target));
            self.run(ctx, p, s);
        }
    }

    fn witness(&self, ctx: &WalkContext, stack: &[IntervalSet]) -> Rational {
        let mut y = stack.last().unwrap().simplest_point().expect("nonempty");
        for i in (1..stack.len()).rev() {
            let d = ctx.times[i] - ctx.times[i - 1];
            y = pull_point(ctx.map, &stack[i - 1], d, y).expect("forward image contains the point");
        }
        pull_point(ctx.map, &IntervalSet::unit(), ctx.times[0], y).expect("forward image contains the point")
    }
}

/// Closed middle half of the longest part of `a`.
fn core_of(a: &IntervalSet) -> Interval {
    let part = a
        .parts()
        .iter()
        .max_by(|p, q| p.length().cmp(&q.length()).then(q.lo.cmp(&p.lo)))
        .expect("nonempty set");
    let quarter = part.length() / Rational::integer(4);
    Interval::closed(&part.lo + &quarter, &part.hi - &quarter)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArithmeticIndependence {
    /// The least `n` with `⋂ f^n V_i ⊇ ⋃ V_i` for the cores `V_i ⊆ A_i`.
    pub n: usize,
    pub cores: Vec<Interval>,
    pub certificate: IndependenceCertificate,
}

/// Finds the step `n` of the mixing argument and verifies `{n, 2n, …, mn}`.
pub fn arithmetic_independence(
    map: &ExactMap,
    targets: &[IntervalSet],
    m: usize,
    n_budget: usize,
) -> Result<ArithmeticIndependence> {
    if targets.is_empty() || targets.iter().any(IntervalSet::is_empty) {
        return Err(Error::input("target sets must be nonempty"));
    }
    if m == 0 {
        return Err(Error::input("progression length must be positive"));
    }
    if targets.iter().any(|a| a.parts().iter().all(Interval::is_point)) {
        return Err(Error::input("target sets need interior"));
    }
    let cores: Vec<Interval> = targets.iter().map(core_of).collect();
    let found = if targets.len() == 1 {
        Some(1)
    } else {
        let union = IntervalSet::from_parts(cores.iter().cloned());
        let mut images: Vec<IntervalSet> = cores.iter().cloned().map(IntervalSet::from).collect();
        (1..=n_budget).find(|_| {
            for img in images.iter_mut() {
                *img = map.image(img);
            }
            images.iter().all(|img| img.contains_set(&union))
        })
    };
    let n = found.ok_or_else(|| Error::NotFound(format!("no n ≤ {n_budget} spreads every core over all of them")))?;
    let times: Vec<usize> = (1..=m).map(|i| i * n).collect();
    let certificate = independence_check(map, targets, &times)?;
    Ok(ArithmeticIndependence { n, cores, certificate })
}

/// Thresholds turning profile lengths into evidence grades.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileThresholds {
    /// Length counted as "long".
    pub long: usize,
    /// Density `|J| / (max J + 1)` counted as positive.
    pub density: f64,
    /// Cap on the length of a greedy set.
    pub cap: usize,
}

impl Default for ProfileThresholds {
    fn default() -> Self {
        ProfileThresholds {
            long: 8,
            density: 0.05,
            cap: DEFAULT_TIME_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileRow {
    pub radius: Rational,
    /// `None` when the balls around `x` and `y` overlap.
    pub times: Option<Vec<usize>>,
    pub length: usize,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairProfile {
    pub x: Rational,
    pub y: Rational,
    pub horizon: usize,
    pub thresholds: ProfileThresholds,
    pub rows: Vec<ProfileRow>,
    /// Long sets at every radius.
    pub in_evidence: bool,
    /// A long set at the smallest radius.
    pub it_evidence: bool,
    /// Long sets of positive density at every radius.
    pub ie_evidence: bool,
}

/// The default radius schedule `2^-3, …, 2^-8`.
pub fn default_radii() -> Vec<Rational> {
    (3..=8).map(Rational::inverse_pow2).collect()
}

/// Greedy independence sets for `(B(x, r), B(y, r))` along a radius schedule.
pub fn pair_independence_profile(
    map: &ExactMap,
    x: &Rational,
    y: &Rational,
    radii: &[Rational],
    horizon: usize,
    thresholds: &ProfileThresholds,
) -> Result<PairProfile> {
    if x == y {
        return Err(Error::input("an essential pair needs x ≠ y"));
    }
    if radii.is_empty() || radii.iter().any(|r| !r.is_positive()) {
        return Err(Error::input("radii must be positive"));
    }
    map.eval(x)?;
    map.eval(y)?;
    let gap = (x - y).abs();
    let rows: Vec<ProfileRow> = radii
        .par_iter()
        .map(|radius| {
            if gap < radius * Rational::integer(2) {
                return ProfileRow {
                    radius: radius.clone(),
                    times: None,
                    length: 0,
                    density: 0.0,
                };
            }
            let a = IntervalSet::from(Interval::point(x.clone()).pad(radius));
            let b = IntervalSet::from(Interval::point(y.clone()).pad(radius));
            let times = best_greedy(map, &[a, b], horizon, thresholds.cap);
            let density = times.last().map_or(0.0, |&t| times.len() as f64 / (t + 1) as f64);
            ProfileRow {
                radius: radius.clone(),
                length: times.len(),
                times: Some(times),
                density,
            }
        })
        .collect();
    let usable: Vec<&ProfileRow> = rows.iter().filter(|r| r.times.is_some()).collect();
    let smallest = rows
        .iter()
        .min_by(|p, q| p.radius.cmp(&q.radius))
        .expect("nonempty schedule");
    let in_evidence =
        !usable.is_empty() && usable.len() == rows.len() && usable.iter().all(|r| r.length >= thresholds.long);
    let ie_evidence = in_evidence && usable.iter().all(|r| r.density >= thresholds.density);
    Ok(PairProfile {
        x: x.clone(),
        y: y.clone(),
        horizon,
        thresholds: thresholds.clone(),
        it_evidence: smallest.length >= thresholds.long,
        rows,
        in_evidence,
        ie_evidence,
    })
}

/// The longest first-fit independence set over a few starting times.
fn best_greedy(map: &ExactMap, targets: &[IntervalSet], horizon: usize, cap: usize) -> Vec<usize> {
    let starts = horizon.min(8);
    (0..=starts)
        .map(|t0| greedy_from(map, targets, t0, horizon, cap))
        .max_by(|p, q| p.len().cmp(&q.len()).then(q.cmp(p)))
        .unwrap_or_default()
}

/// First-fit extension tracking `f^{t_last}` of every pattern set; a time `t`
/// is added when every tracked image meets every target at `t`.
fn greedy_from(map: &ExactMap, targets: &[IntervalSet], t0: usize, horizon: usize, cap: usize) -> Vec<usize> {
    let mut states = vec![image_n(map, &IntervalSet::unit(), t0)];
    let mut times = Vec::new();
    let mut t = t0;
    loop {
        if states.iter().all(|s| targets.iter().all(|a| s.intersects(a))) {
            times.push(t);
            if times.len() >= cap {
                break;
            }
            states = states
                .iter()
                .flat_map(|s| targets.iter().map(move |a| s.intersect(a)))
                .collect();
        }
        if t >= horizon {
            break;
        }
        t += 1;
        states = states.iter().map(|s| map.image(s)).collect();
    }
    times
}

/// Nested closed neighbourhoods `U_n ∋ u`, `V_n ∋ v` (`n = 1..=depth`) and
/// exponents with `f^{2^{k_n}}(U_n) ∩ f^{2^{k_n}}(V_n) ⊇ U_{n+1} ∪ V_{n+1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringSequences {
    pub u: Rational,
    pub v: Rational,
    /// `us[n - 1] = U_n`.
    pub us: Vec<Interval>,
    pub vs: Vec<Interval>,
    /// `ks[n - 1] = k_n`, one fewer than the neighbourhoods.
    pub ks: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringParams {
    /// Radius of `U_1`, `V_1`; defaults to a quarter of `|v − u|`.
    pub first_radius: Option<Rational>,
    /// Each radius is this fraction of the previous one.
    pub shrink: Rational,
    /// Exponents `k ≤ k_max` are tried at each stage.
    pub k_max: u32,
}

impl Default for CoveringParams {
    fn default() -> Self {
        CoveringParams {
            first_radius: None,
            shrink: r(1, 2),
            k_max: 12,
        }
    }
}

impl CoveringSequences {
    pub fn depth(&self) -> usize {
        self.us.len()
    }

    /// Wraps hand-made data after checking every stated property exactly.
    pub fn new(
        map: &ExactMap,
        u: Rational,
        v: Rational,
        us: Vec<Interval>,
        vs: Vec<Interval>,
        ks: Vec<u32>,
    ) -> Result<CoveringSequences> {
        let seq = CoveringSequences { u, v, us, vs, ks };
        seq.verify(map)?;
        Ok(seq)
    }

    pub fn verify(&self, map: &ExactMap) -> Result<()> {
        let n = self.us.len();
        if n == 0 || self.vs.len() != n || self.ks.len() + 1 != n {
            return Err(Error::input("need depth ≥ 1 neighbourhoods and one exponent per step"));
        }
        for i in 0..n {
            let (un, vn) = (&self.us[i], &self.vs[i]);
            if !un.contains(&self.u) || !vn.contains(&self.v) {
                return Err(Error::Construction(format!("U_{0} or V_{0} misses its point", i + 1)));
            }
            if un.intersect(vn).is_some() {
                return Err(Error::Construction(format!("U_{0} and V_{0} intersect", i + 1)));
            }
            if i + 1 < n {
                let (un1, vn1) = (&self.us[i + 1], &self.vs[i + 1]);
                if !un.contains_interval(un1) || !vn.contains_interval(vn1) {
                    return Err(Error::Construction(format!("stage {} is not nested", i + 2)));
                }
                if un1.length() >= un.length() || vn1.length() >= vn.length() {
                    return Err(Error::Construction(format!(
                        "diameters do not decrease at stage {}",
                        i + 2
                    )));
                }
                let steps = 1usize << self.ks[i];
                let fu = image_n(map, &IntervalSet::from(un.clone()), steps);
                let fv = image_n(map, &IntervalSet::from(vn.clone()), steps);
                let need = IntervalSet::from_parts([un1.clone(), vn1.clone()]);
                if !fu.intersect(&fv).contains_set(&need) {
                    return Err(Error::Construction(format!(
                        "f^(2^{})(U_{1}) ∩ f^(2^{0})(V_{1}) misses U_{2} ∪ V_{2}",
                        self.ks[i],
                        i + 1,
                        i + 2
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn anchors(&self) -> Vec<usize> {
        let mut t = vec![0usize];
        for &k in &self.ks {
            t.push(t.last().unwrap() + (1usize << k));
        }
        t
    }
}

/// Covering sequences for a pair with NONSEPARABLE evidence.
pub fn covering_pair_sequences(
    map: &ExactMap,
    u: &Rational,
    v: &Rational,
    depth: usize,
    nonsep: &NonsepParams,
    params: &CoveringParams,
) -> Result<CoveringSequences> {
    match f_nonseparable_test(map, u, v, nonsep)? {
        NonsepVerdict::NonseparableEvidence { .. } => {}
        other => {
            return Err(Error::precondition(format!(
                "({u}, {v}) lacks NONSEPARABLE evidence: {other:?}"
            )))
        }
    }
    build_covering_sequences(map, u, v, depth, params)
}

/// The construction without the nonseparability precondition.
///
/// Stage `n` looks for the least `k ≤ k_max` with `[u, v]`-hull coverage
/// `f^{2^k}(U_n) ∩ f^{2^k}(V_n) ⊇ U_{n+1} ∪ V_{n+1}`; such a `k` exists for
/// nonseparable pairs once the neighbourhoods are fixed.
pub fn build_covering_sequences(
    map: &ExactMap,
    u: &Rational,
    v: &Rational,
    depth: usize,
    params: &CoveringParams,
) -> Result<CoveringSequences> {
    if u >= v {
        return Err(Error::input(format!("need u < v, got {u}, {v}")));
    }
    if depth == 0 {
        return Err(Error::input("depth must be at least 1"));
    }
    if !params.shrink.is_positive() || params.shrink >= Rational::one() {
        return Err(Error::input("shrink factor must lie in (0, 1)"));
    }
    let quarter = (v - u) / Rational::integer(4);
    let mut radius = params.first_radius.clone().unwrap_or(quarter.clone());
    if !radius.is_positive() || radius >= (v - u) / Rational::integer(2) {
        return Err(Error::input("first radius must lie in (0, |v − u| / 2)"));
    }
    let ball = |c: &Rational, rad: &Rational| {
        let lo = Rational::max(&(c - rad), &Rational::zero()).clone();
        let hi = Rational::min(&(c + rad), &Rational::one()).clone();
        Interval::closed(lo, hi)
    };
    let mut us = vec![ball(u, &radius)];
    let mut vs = vec![ball(v, &radius)];
    let mut ks = Vec::new();
    for stage in 1..depth {
        radius = &radius * &params.shrink;
        let (un1, vn1) = (ball(u, &radius), ball(v, &radius));
        let need = IntervalSet::from_parts([un1.clone(), vn1.clone()]);
        let mut fu = IntervalSet::from(us[stage - 1].clone());
        let mut fv = IntervalSet::from(vs[stage - 1].clone());
        let mut done = 0usize;
        let mut found = None;
        for k in 0..=params.k_max {
            let steps = 1usize << k;
            fu = image_n(map, &fu, steps - done);
            fv = image_n(map, &fv, steps - done);
            done = steps;
            if fu.intersect(&fv).contains_set(&need) {
                found = Some(k);
                break;
            }
        }
        let k = found.ok_or_else(|| {
            Error::Stalled(format!(
                "stage {stage}: no k ≤ {} with f^(2^k)(U_{stage}) ∩ f^(2^k)(V_{stage}) ⊇ U_{1} ∪ V_{1}",
                params.k_max,
                stage + 1
            ))
        })?;
        ks.push(k);
        us.push(un1);
        vs.push(vn1);
    }
    Ok(CoveringSequences {
        u: u.clone(),
        v: v.clone(),
        us,
        vs,
        ks,
    })
}

/// Intervals `E_α` for binary words `α` of length `1..=M+1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessTree {
    pub depth: usize,
    /// `t_0 = 0`, `t_m = Σ_{n≤m} 2^{k_n}`.
    pub anchors: Vec<usize>,
    pub delta: Rational,
    pub sequences: CoveringSequences,
    /// Word (as a `0`/`1` string) to `E_α`.
    pub intervals: BTreeMap<String, Interval>,
}

impl WitnessTree {
    pub fn leaves(&self) -> Vec<(&String, &Interval)> {
        self.intervals
            .iter()
            .filter(|(w, _)| w.len() == self.depth + 1)
            .collect()
    }

    /// `W_i` for letter `a` at position `i`: `U_{i+1}` or `V_{i+1}`.
    pub fn target(&self, i: usize, letter: u8) -> &Interval {
        if letter == b'0' {
            &self.sequences.us[i]
        } else {
            &self.sequences.vs[i]
        }
    }

    /// Re-checks (a) nesting, (b) disjointness per level and (c) the
    /// itinerary of every `E_α`.
    pub fn verify(&self, map: &ExactMap) -> Result<()> {
        for len in 1..=self.depth + 1 {
            let mut level: Vec<(&String, &Interval)> = self.intervals.iter().filter(|(w, _)| w.len() == len).collect();
            if level.len() != 1 << len {
                return Err(Error::Construction(format!("level {len} holds {} words", level.len())));
            }
            level.sort_by(|a, b| a.1.lo.cmp(&b.1.lo));
            for pair in level.windows(2) {
                if pair[0].1.intersect(pair[1].1).is_some() {
                    return Err(Error::Construction(format!(
                        "E_{} and E_{} intersect",
                        pair[0].0, pair[1].0
                    )));
                }
            }
        }
        for (word, e) in &self.intervals {
            if word.len() > 1 {
                let parent = &self.intervals[&word[..word.len() - 1]];
                if !parent.contains_interval(e) {
                    return Err(Error::Construction(format!("E_{word} is not inside its parent")));
                }
            }
            check_itinerary(map, word, e, self)?;
        }
        Ok(())
    }
}

fn check_itinerary(map: &ExactMap, word: &str, e: &Interval, tree: &WitnessTree) -> Result<()> {
    let m = word.len() - 1;
    let mut img = IntervalSet::from(e.clone());
    let mut now = 0;
    for (i, letter) in word.bytes().enumerate() {
        img = image_n(map, &img, tree.anchors[i] - now);
        now = tree.anchors[i];
        let w = IntervalSet::from(tree.target(i, letter).clone());
        let ok = if i < m { w.contains_set(&img) } else { img == w };
        if !ok {
            return Err(Error::Construction(format!(
                "f^{}(E_{word}) = {img} fails against W_{i} = {w}",
                tree.anchors[i]
            )));
        }
    }
    Ok(())
}

/// Shortest subinterval `G` of the path's domain with `g(G) = [c, d]`,
/// leftmost among ties.
fn minimal_preimage_interval(path: &crate::map::PlPath, target: &Interval) -> Option<Interval> {
    let mut marks: Vec<(Rational, u8)> = Vec::new();
    for x in path.level_points(&target.lo) {
        marks.push((x, 0));
    }
    for x in path.level_points(&target.hi) {
        marks.push((x, 1));
    }
    marks.sort();
    let mut best: Option<Interval> = None;
    for w in marks.windows(2) {
        if w[0].1 == w[1].1 || w[0].0 == w[1].0 {
            continue;
        }
        let cand = Interval::closed(w[0].0.clone(), w[1].0.clone());
        if best.as_ref().is_none_or(|b| cand.length() < b.length()) {
            best = Some(cand);
        }
    }
    best
}

/// Builds the depth-`M` tree of the Cantor-set construction and verifies it.
pub fn scrambled_witness_tree(map: &ExactMap, seq: &CoveringSequences, depth: usize) -> Result<WitnessTree> {
    if seq.depth() < depth + 1 {
        return Err(Error::precondition(format!(
            "covering sequences of depth {} cannot carry a depth-{depth} tree",
            seq.depth()
        )));
    }
    let anchors = seq.anchors()[..=depth].to_vec();
    let mut tree = WitnessTree {
        depth,
        anchors: anchors.clone(),
        delta: (&seq.v - &seq.u).abs(),
        sequences: seq.clone(),
        intervals: BTreeMap::new(),
    };
    tree.intervals.insert("0".into(), seq.us[0].clone());
    tree.intervals.insert("1".into(), seq.vs[0].clone());
    let mut frontier = vec!["0".to_string(), "1".to_string()];
    for m in 0..depth {
        let step = 1usize << seq.ks[m];
        let mut next = Vec::with_capacity(frontier.len() * 2);
        let built: Vec<Result<Vec<(String, Interval)>>> = frontier
            .par_iter()
            .map(|word| {
                let e = &tree.intervals[word];
                let w_m = tree.target(m, *word.as_bytes().last().unwrap()).clone();
                let to_w = map.restricted_power(&w_m, step, DEFAULT_PIECE_BUDGET)?;
                let to_f = map.restricted_power(e, anchors[m], DEFAULT_PIECE_BUDGET)?;
                b"01"
                    .iter()
                    .map(|&letter| {
                        let child = format!("{word}{}", letter as char);
                        let target = tree.target(m + 1, letter);
                        let f = minimal_preimage_interval(&to_w, target).ok_or_else(|| {
                            Error::Construction(format!("no F ⊆ W_{m} maps onto W_{} for {child}", m + 1))
                        })?;
                        let sub = minimal_preimage_interval(&to_f, &f).ok_or_else(|| {
                            Error::Construction(format!("no subinterval of E_{word} maps onto F for {child}"))
                        })?;
                        Ok((child, sub))
                    })
                    .collect()
            })
            .collect();
        for pair in built {
            for (word, iv) in pair? {
                next.push(word.clone());
                tree.intervals.insert(word, iv);
            }
        }
        frontier = next;
    }
    tree.verify(map)?;
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> IntervalSet {
        s.parse().unwrap()
    }

    fn uv() -> Vec<IntervalSet> {
        vec![set("(0, 1/4)"), set("(3/4, 1)")]
    }

    #[test]
    fn certificate_examples() {
        let t = ExactMap::tent();
        let c = independence_check(&t, &uv(), &[2, 4, 6, 8]).unwrap();
        assert!(c.verified);
        assert_eq!(c.witnesses.len(), 16);
        assert!(c.revalidate(&t).unwrap());
        let refl = independence_check(&ExactMap::reflection(), &uv(), &[1, 2]).unwrap();
        assert!(!refl.verified);
        assert!(refl.failing_pattern.is_some());
        let single = independence_check(&ExactMap::reflection(), &uv()[..1], &[1, 5, 9]).unwrap();
        assert!(single.verified);
        let too_many: Vec<usize> = (1..=13).collect();
        assert!(independence_check(&t, &uv(), &too_many).unwrap_err().is_budget());
    }

    #[test]
    fn subsets_of_verified_times_verify() {
        let t = ExactMap::tent();
        let times = [2, 4, 6, 8];
        assert!(independence_check(&t, &uv(), &times).unwrap().verified);
        for drop in 0..times.len() {
            let sub: Vec<usize> = times
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, &t)| t)
                .collect();
            assert!(independence_check(&t, &uv(), &sub).unwrap().verified);
        }
    }

    #[test]
    fn arithmetic_examples() {
        let t = ExactMap::tent();
        let a = arithmetic_independence(&t, &uv(), 4, 8).unwrap();
        assert!(a.n <= 8);
        assert!(a.certificate.verified);
        assert_eq!(a.certificate.times, vec![a.n, 2 * a.n, 3 * a.n, 4 * a.n]);
        assert!(matches!(
            arithmetic_independence(&ExactMap::reflection(), &uv(), 4, 8),
            Err(Error::NotFound(_))
        ));
        let one = arithmetic_independence(&t, &uv()[..1], 3, 8).unwrap();
        assert_eq!(one.n, 1);
        assert!(one.certificate.verified);
    }

    #[test]
    fn profile_examples() {
        let t = ExactMap::tent();
        let p = pair_independence_profile(
            &t,
            &r(1, 5),
            &r(4, 5),
            &default_radii(),
            128,
            &ProfileThresholds::default(),
        )
        .unwrap();
        assert!(p.ie_evidence && p.in_evidence && p.it_evidence, "{:?}", p.rows);
        for row in &p.rows {
            let times = row.times.as_ref().unwrap();
            let a = IntervalSet::from(Interval::point(r(1, 5)).pad(&row.radius));
            let b = IntervalSet::from(Interval::point(r(4, 5)).pad(&row.radius));
            let c = independence_check(&t, &[a, b], &times[..times.len().min(6)]).unwrap();
            assert!(c.verified);
        }
        let refl = ExactMap::reflection();
        let p = pair_independence_profile(
            &refl,
            &r(1, 5),
            &r(4, 5),
            &[r(1, 10)],
            64,
            &ProfileThresholds::default(),
        )
        .unwrap();
        assert!(p.rows[0].length <= 1);
        assert!(pair_independence_profile(
            &t,
            &r(1, 5),
            &r(1, 5),
            &default_radii(),
            8,
            &ProfileThresholds::default()
        )
        .is_err());
    }

    fn tent_sequences(depth: usize) -> CoveringSequences {
        build_covering_sequences(&ExactMap::tent(), &r(1, 4), &r(3, 4), depth, &CoveringParams::default()).unwrap()
    }

    #[test]
    fn covering_sequences_on_the_tent() {
        let t = ExactMap::tent();
        let seq = tent_sequences(7);
        seq.verify(&t).unwrap();
        for n in 1..seq.depth() {
            assert!(seq.us[n].length() < seq.us[n - 1].length());
        }
        let last = seq.depth();
        assert!(seq.us[last - 1].length() < r(1, last as i64));
        let mut broken = seq.clone();
        broken.ks[0] = 0;
        broken.us[1] = broken.us[0].clone();
        assert!(broken.verify(&t).is_err());
    }

    #[test]
    fn covering_sequences_need_nonseparable_evidence() {
        let t = ExactMap::tent();
        let params = NonsepParams::new(r(1, 3), crate::portion::OmegaParams::for_horizon(64), 2);
        assert!(matches!(
            covering_pair_sequences(&t, &r(1, 4), &r(3, 4), 3, &params, &CoveringParams::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn witness_tree_on_the_tent() {
        let t = ExactMap::tent();
        let seq = tent_sequences(6);
        let tree = scrambled_witness_tree(&t, &seq, 5).unwrap();
        assert_eq!(tree.leaves().len(), 64);
        tree.verify(&t).unwrap();
        // Leaves whose words differ at m land in U_{m+1} and V_{m+1} at t_m.
        for (w1, e1) in tree.leaves() {
            for (w2, e2) in tree.leaves() {
                let Some(m) = w1.bytes().zip(w2.bytes()).position(|(a, b)| a != b) else {
                    continue;
                };
                let p = t.iterate(&e1.simplest_point(), tree.anchors[m]).unwrap();
                let q = t.iterate(&e2.simplest_point(), tree.anchors[m]).unwrap();
                let slack = seq.us[m].length() + seq.vs[m].length();
                assert!((&p - &q).abs() >= &tree.delta - &slack);
            }
        }
        // The anchor times form an independence set for (U_1, V_1).
        let targets = [
            IntervalSet::from(seq.us[0].clone()),
            IntervalSet::from(seq.vs[0].clone()),
        ];
        assert!(independence_check(&t, &targets, &tree.anchors).unwrap().verified);
        let base = scrambled_witness_tree(&t, &seq, 0).unwrap();
        assert_eq!(base.intervals.len(), 2);
        assert_eq!(base.intervals["0"], seq.us[0]);
        assert!(scrambled_witness_tree(&t, &seq, 6).is_err());
    }

    #[test]
    fn minimal_interval_is_leftmost_among_ties() {
        let t = ExactMap::tent();
        let path = t.restricted_power(&Interval::unit(), 1, DEFAULT_PIECE_BUDGET).unwrap();
        let f = minimal_preimage_interval(&path, &Interval::closed(r(0, 1), r(1, 2))).unwrap();
        assert_eq!(f, Interval::closed(r(0, 1), r(1, 4)));
    }
}
