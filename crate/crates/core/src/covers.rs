//! Open covers of `[0, 1]`: joins, pullbacks, exact minimal subcover counts,
//! cover and sequence entropy, the `C(U)` test and strong-mixing certificates.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalSet};
use crate::map::ExactMap;
use crate::rational::{r, Rational};

/// Element budget of a single join.
pub const DEFAULT_ELEMENT_BUDGET: usize = 5000;
/// Total interval parts allowed across the elements of one cover.
pub const DEFAULT_PART_BUDGET: usize = 2_000_000;
/// Search nodes allowed in one minimal-subcover computation.
pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// A finite family of sets whose union is `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenCover {
    pub elements: Vec<IntervalSet>,
    #[serde(default)]
    pub label: String,
}

impl OpenCover {
    /// Checks that elements are nonempty, relatively open and cover `[0, 1]`.
    pub fn new(elements: Vec<IntervalSet>, label: impl Into<String>) -> Result<OpenCover> {
        if let Some(i) = elements.iter().position(IntervalSet::is_empty) {
            return Err(Error::input(format!("cover element {i} is empty")));
        }
        if let Some(e) = elements.iter().find(|e| !e.is_open()) {
            return Err(Error::input(format!("cover element {e} is not open in [0, 1]")));
        }
        let cover = OpenCover {
            elements,
            label: label.into(),
        };
        if let Some(w) = cover.uncovered_point() {
            return Err(Error::input(format!("not a cover: {w} is uncovered")));
        }
        Ok(cover)
    }

    /// Parses each element with [`IntervalSet`]'s string syntax.
    pub fn parse(elements: &[&str], label: impl Into<String>) -> Result<OpenCover> {
        let elements = elements
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<IntervalSet>>>()?;
        OpenCover::new(elements, label)
    }

    /// The trivial cover `{[0, 1]}`.
    pub fn trivial() -> OpenCover {
        OpenCover {
            elements: vec![IntervalSet::unit()],
            label: "I".into(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn parts(&self) -> usize {
        self.elements.iter().map(IntervalSet::len).sum()
    }

    pub fn uncovered_point(&self) -> Option<Rational> {
        let union = self.elements.iter().fold(IntervalSet::empty(), |acc, e| acc.union(e));
        union.complement().pick_point()
    }

    fn from_raw(elements: Vec<IntervalSet>, label: String) -> OpenCover {
        let mut seen = HashSet::with_capacity(elements.len());
        let elements = elements
            .into_iter()
            .filter(|e| !e.is_empty() && seen.insert(e.clone()))
            .collect();
        OpenCover { elements, label }
    }
}

impl fmt::Debug for OpenCover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.elements).finish()
    }
}

/// `U ∨ V`: nonempty pairwise intersections, duplicates merged.
pub fn join(u: &OpenCover, v: &OpenCover) -> OpenCover {
    let elements: Vec<IntervalSet> = u
        .elements
        .par_iter()
        .flat_map_iter(|a| v.elements.iter().map(move |b| a.intersect(b)))
        .collect();
    OpenCover::from_raw(elements, format!("{} ∨ {}", u.label, v.label))
}

/// Like [`join`] but fails once the join holds more than `budget` elements.
pub fn join_budgeted(u: &OpenCover, v: &OpenCover, budget: usize) -> Result<OpenCover> {
    let w = join(u, v);
    if w.len() > budget {
        return Err(Error::budget("join elements", budget as u64));
    }
    Ok(w)
}

/// Elementwise exact preimage; empty preimages are dropped.
pub fn pull_back(map: &ExactMap, u: &OpenCover) -> OpenCover {
    let elements = u.elements.par_iter().map(|e| map.preimage(e)).collect();
    OpenCover::from_raw(elements, format!("f^-1({})", u.label))
}

/// `f^{-t} U`.
pub fn pull_back_n(map: &ExactMap, u: &OpenCover, t: usize) -> Result<OpenCover> {
    let mut w = u.clone();
    for _ in 0..t {
        w = pull_back(map, &w);
        if w.parts() > DEFAULT_PART_BUDGET {
            return Err(Error::budget("pullback interval parts", DEFAULT_PART_BUDGET as u64));
        }
    }
    Ok(w)
}

/// The cover cut into atoms: the points where some element boundary sits and
/// the open gaps between consecutive such points. Every element is a union of
/// atoms, so covering `[0, 1]` is covering every atom.
struct Atoms {
    /// Element indices containing each atom.
    atom_elems: Vec<Vec<u32>>,
    elem_atoms: Vec<Vec<u32>>,
    cuts: Vec<Rational>,
}

impl Atoms {
    fn build(u: &OpenCover) -> Atoms {
        let mut cuts: Vec<Rational> = vec![Rational::zero(), Rational::one()];
        for e in &u.elements {
            for p in e.parts() {
                cuts.push(p.lo.clone());
                cuts.push(p.hi.clone());
            }
        }
        cuts.sort();
        cuts.dedup();
        let n_atoms = 2 * cuts.len() - 1;
        let idx = |x: &Rational| cuts.binary_search(x).expect("endpoint is a cut");
        let mut atom_elems = vec![Vec::new(); n_atoms];
        let mut elem_atoms = Vec::with_capacity(u.len());
        for (ei, e) in u.elements.iter().enumerate() {
            let mut atoms = Vec::new();
            for p in e.parts() {
                let start = 2 * idx(&p.lo) + usize::from(!p.lo_closed);
                let end = 2 * idx(&p.hi) - usize::from(!p.hi_closed);
                for a in start..=end {
                    atoms.push(a as u32);
                    atom_elems[a].push(ei as u32);
                }
            }
            elem_atoms.push(atoms);
        }
        Atoms {
            atom_elems,
            elem_atoms,
            cuts,
        }
    }

    fn witness(&self, atom: usize) -> Rational {
        if atom.is_multiple_of(2) {
            self.cuts[atom / 2].clone()
        } else {
            Rational::midpoint(&self.cuts[atom / 2], &self.cuts[atom / 2 + 1])
        }
    }
}

/// Result of an exact minimal-subcover computation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Subcover {
    pub count: usize,
    /// Indices of one optimal subcover, increasing.
    pub chosen: Vec<usize>,
    pub nodes: usize,
}

/// `N(U)`.
pub fn min_subcover_count(u: &OpenCover) -> Result<usize> {
    min_subcover(u, DEFAULT_NODE_BUDGET).map(|s| s.count)
}

/// Exact minimal subcover by branch and bound on the leftmost uncovered atom.
///
/// Atoms covered by a single element force that element; atoms whose element
/// set contains a neighbour's are dropped; a disjoint packing of atoms gives
/// the lower bound.
pub fn min_subcover(u: &OpenCover, node_budget: usize) -> Result<Subcover> {
    let atoms = Atoms::build(u);
    if let Some(a) = atoms.atom_elems.iter().position(Vec::is_empty) {
        return Err(Error::input(format!("not a cover: {} is uncovered", atoms.witness(a))));
    }
    let n_atoms = atoms.atom_elems.len();
    let mut state = Search {
        atoms: &atoms,
        count: vec![0u32; n_atoms],
        relevant: vec![true; n_atoms],
        chosen: Vec::new(),
        best: Vec::new(),
        best_len: usize::MAX,
        nodes: 0,
        budget: node_budget,
        mark: vec![0u32; u.len()],
        stamp: 0,
    };
    for a in 0..n_atoms {
        if atoms.atom_elems[a].len() == 1 {
            let e = atoms.atom_elems[a][0] as usize;
            if state.count[a] == 0 {
                state.select(e);
            }
        }
    }
    // An open gap is implied by an adjacent point atom whose element set is a
    // subset of its own.
    for a in (1..n_atoms).step_by(2) {
        let subset_of = |p: usize| {
            atoms.atom_elems[p]
                .iter()
                .all(|e| atoms.atom_elems[a].binary_search(e).is_ok())
        };
        if subset_of(a - 1) || (a + 1 < n_atoms && subset_of(a + 1)) {
            state.relevant[a] = false;
        }
    }
    state.greedy_bound();
    state.branch(0)?;
    let mut chosen = state.best.clone();
    chosen.sort_unstable();
    Ok(Subcover {
        count: chosen.len(),
        chosen,
        nodes: state.nodes,
    })
}

struct Search<'a> {
    atoms: &'a Atoms,
    count: Vec<u32>,
    relevant: Vec<bool>,
    chosen: Vec<usize>,
    best: Vec<usize>,
    best_len: usize,
    nodes: usize,
    budget: usize,
    mark: Vec<u32>,
    stamp: u32,
}

impl Search<'_> {
    fn select(&mut self, e: usize) {
        for &a in &self.atoms.elem_atoms[e] {
            self.count[a as usize] += 1;
        }
        self.chosen.push(e);
    }

    fn deselect(&mut self) {
        let e = self.chosen.pop().expect("deselect after select");
        for &a in &self.atoms.elem_atoms[e] {
            self.count[a as usize] -= 1;
        }
    }

    fn open_atom(&self, from: usize) -> Option<usize> {
        (from..self.count.len()).find(|&a| self.relevant[a] && self.count[a] == 0)
    }

    fn gain(&self, e: usize) -> usize {
        self.atoms.elem_atoms[e]
            .iter()
            .filter(|&&a| self.relevant[a as usize] && self.count[a as usize] == 0)
            .count()
    }

    fn candidates(&self, atom: usize) -> Vec<usize> {
        let mut c: Vec<(usize, usize)> = self.atoms.atom_elems[atom]
            .iter()
            .map(|&e| (e as usize, self.gain(e as usize)))
            .collect();
        c.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
        c.into_iter().map(|(e, _)| e).collect()
    }

    /// Leftmost greedy completion, used as the first upper bound.
    fn greedy_bound(&mut self) {
        let base = self.chosen.len();
        let mut from = 0;
        while let Some(a) = self.open_atom(from) {
            let e = self.candidates(a)[0];
            self.select(e);
            from = a;
        }
        self.best = self.chosen.clone();
        self.best_len = self.best.len();
        while self.chosen.len() > base {
            self.deselect();
        }
    }

    /// Open atoms no two of which share an element.
    fn packing_bound(&mut self, from: usize) -> usize {
        self.stamp += 1;
        let stamp = self.stamp;
        let mut packed = 0;
        for a in from..self.count.len() {
            if !self.relevant[a] || self.count[a] != 0 {
                continue;
            }
            let elems = &self.atoms.atom_elems[a];
            if elems.iter().all(|&e| self.mark[e as usize] != stamp) {
                for &e in elems {
                    self.mark[e as usize] = stamp;
                }
                packed += 1;
            }
        }
        packed
    }

    fn branch(&mut self, from: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::budget("minimal-subcover search nodes", self.budget as u64));
        }
        let Some(a) = self.open_atom(from) else {
            if self.chosen.len() < self.best_len {
                self.best = self.chosen.clone();
                self.best_len = self.best.len();
            }
            return Ok(());
        };
        if self.chosen.len() + self.packing_bound(a) >= self.best_len {
            return Ok(());
        }
        for e in self.candidates(a) {
            self.select(e);
            let r = self.branch(a);
            self.deselect();
            r?;
        }
        Ok(())
    }
}

/// One row of an entropy table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyRow {
    pub n: usize,
    /// Elements of the joined cover.
    pub elements: usize,
    pub count: usize,
    /// `(1/n) log N_n`.
    pub slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GrowthVerdict {
    /// `N_n` constant over the second half of the table.
    Stabilizes {
        value: usize,
    },
    Grows {
        last_slope: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// Times `t_0 < t_1 < …` of the pulled-back covers.
    pub times: Vec<usize>,
    pub rows: Vec<EntropyRow>,
    /// `min_m (1/m) log N_m`, an upper estimate of the limit.
    pub upper: f64,
    pub verdict: GrowthVerdict,
    /// Set when a budget cut the table short.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial: Option<String>,
}

impl EntropyEstimate {
    pub fn counts(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.count).collect()
    }

    pub fn last_slope(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.slope)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("n,N_n,slope\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.n, r.count, r.slope));
        }
        out
    }
}

/// `N_n = N(⋁_{i<n} f^{-i} U)` for `n = 1..=n_max`.
pub fn cover_entropy(map: &ExactMap, u: &OpenCover, n_max: usize) -> Result<EntropyEstimate> {
    if n_max < 2 {
        return Err(Error::input("n_max must be at least 2"));
    }
    sequence_entropy(map, u, &(0..n_max).collect::<Vec<_>>(), n_max)
}

/// `N(⋁_{i<n} f^{-t_i} U)` for `n = 1..=n_max`.
pub fn sequence_entropy(map: &ExactMap, u: &OpenCover, times: &[usize], n_max: usize) -> Result<EntropyEstimate> {
    if n_max == 0 || times.len() < n_max {
        return Err(Error::input(format!(
            "need at least n_max = {n_max} times, got {}",
            times.len()
        )));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input("times must be strictly increasing"));
    }
    let times = &times[..n_max];
    let mut rows: Vec<EntropyRow> = Vec::with_capacity(n_max);
    let mut partial = None;
    let mut pulled = u.clone();
    let mut pulled_at = 0;
    let mut joined = OpenCover::trivial();
    for (i, &t) in times.iter().enumerate() {
        let step = (|| -> Result<usize> {
            for _ in pulled_at..t {
                pulled = pull_back(map, &pulled);
                if pulled.parts() > DEFAULT_PART_BUDGET {
                    return Err(Error::budget("pullback interval parts", DEFAULT_PART_BUDGET as u64));
                }
            }
            pulled_at = t;
            joined = join_budgeted(&joined, &pulled, DEFAULT_ELEMENT_BUDGET)?;
            min_subcover_count(&joined)
        })();
        match step {
            Ok(count) => {
                let n = i + 1;
                rows.push(EntropyRow {
                    n,
                    elements: joined.len(),
                    count,
                    slope: (count as f64).ln() / n as f64,
                });
            }
            Err(e) if e.is_budget() => {
                partial = Some(format!("stopped before n = {}: {e}", i + 1));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let upper = rows.iter().map(|r| r.slope).fold(f64::INFINITY, f64::min);
    let verdict = growth_verdict(&rows);
    Ok(EntropyEstimate {
        times: times.to_vec(),
        rows,
        upper: if upper.is_finite() { upper } else { 0.0 },
        verdict,
        partial,
    })
}

fn growth_verdict(rows: &[EntropyRow]) -> GrowthVerdict {
    let Some(last) = rows.last() else {
        return GrowthVerdict::Grows { last_slope: 0.0 };
    };
    let half = &rows[rows.len() / 2..];
    if half.iter().all(|r| r.count == last.count) {
        GrowthVerdict::Stabilizes { value: last.count }
    } else {
        GrowthVerdict::Grows { last_slope: last.slope }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComplexityVerdict {
    /// `N(⋁_{i=1}^{n-1} f^{-i} U) > 2` first at `n`.
    Exceeds2 { n: usize },
    /// Still at most 2 at `n_max`; not a statement about the limit.
    StuckAt2 { n_max: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityReport {
    /// `values[n - 1] = N(⋁_{i=1}^{n-1} f^{-i} U)`.
    pub values: Vec<usize>,
    pub verdict: ComplexityVerdict,
}

/// The `C(U)` test on a cover of two non-dense open sets.
pub fn complexity_cu(map: &ExactMap, u: &OpenCover, n_max: usize) -> Result<ComplexityReport> {
    if u.len() != 2 {
        return Err(Error::precondition(format!(
            "C(U) needs a two-element cover, got {}",
            u.len()
        )));
    }
    if let Some(e) = u.elements.iter().find(|e| e.is_dense()) {
        return Err(Error::precondition(format!("cover element {e} is dense")));
    }
    if n_max < 1 {
        return Err(Error::input("n_max must be at least 1"));
    }
    let mut values = vec![1];
    let mut pulled = u.clone();
    let mut joined = OpenCover::trivial();
    for n in 2..=n_max {
        pulled = pull_back(map, &pulled);
        joined = join_budgeted(&joined, &pulled, DEFAULT_ELEMENT_BUDGET)?;
        let count = min_subcover_count(&joined)?;
        values.push(count);
        if count > 2 {
            return Ok(ComplexityReport {
                values,
                verdict: ComplexityVerdict::Exceeds2 { n },
            });
        }
    }
    Ok(ComplexityReport {
        values,
        verdict: ComplexityVerdict::StuckAt2 { n_max },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MixingVerdict {
    /// `f^n(J) ⊇ [ε, 1 − ε]` for every `n ∈ [n, n_max]`.
    Certified {
        n: usize,
    },
    Failed {
        last_violation: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingCertificate {
    pub interval: Interval,
    pub eps: Rational,
    pub n_max: usize,
    /// `images[n] = f^n(J)`.
    pub images: Vec<IntervalSet>,
    pub verdict: MixingVerdict,
}

pub fn mixing_certificate(map: &ExactMap, j: &Interval, eps: &Rational, n_max: usize) -> Result<MixingCertificate> {
    if j.is_point() {
        return Err(Error::input("J must be nondegenerate"));
    }
    if !eps.is_positive() || eps >= &r(1, 2) {
        return Err(Error::input(format!("ε = {eps} outside (0, 1/2)")));
    }
    let target = Interval::closed(eps.clone(), Rational::one() - eps);
    let mut images = vec![IntervalSet::from(j.clone())];
    for _ in 0..n_max {
        let next = map.image(images.last().unwrap());
        images.push(next);
    }
    let last_violation = (0..=n_max).rev().find(|&n| !images[n].contains_interval(&target));
    let verdict = match last_violation {
        None => MixingVerdict::Certified { n: 0 },
        Some(n) if n < n_max => MixingVerdict::Certified { n: n + 1 },
        Some(n) => MixingVerdict::Failed { last_violation: n },
    };
    Ok(MixingCertificate {
        interval: j.clone(),
        eps: eps.clone(),
        n_max,
        images,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u6() -> OpenCover {
        OpenCover::parse(&["[0, 0.6)", "(0.4, 1]"], "U").unwrap()
    }

    fn set(s: &str) -> IntervalSet {
        s.parse().unwrap()
    }

    /// Smallest subfamily covering `[0, 1]`, by enumeration.
    fn brute_force_count(u: &OpenCover) -> usize {
        let n = u.len();
        assert!(n <= 20);
        (1u32..1 << n)
            .filter(|mask| {
                let union = (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .fold(IntervalSet::empty(), |acc, i| acc.union(&u.elements[i]));
                union.is_unit()
            })
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn join_examples() {
        let u = u6();
        let w = join(&u, &u);
        assert_eq!(w.elements, vec![set("[0, 0.6)"), set("(0.4, 0.6)"), set("(0.4, 1]")]);
        assert_eq!(join(&u, &OpenCover::trivial()).elements, u.elements);
        let refl = pull_back(&ExactMap::reflection(), &u);
        assert_eq!(join(&u, &refl).len(), 3);
    }

    #[test]
    fn pull_back_examples() {
        let u = u6();
        let p = pull_back(&ExactMap::tent(), &u);
        assert_eq!(p.elements, vec![set("[0, 0.3) ∪ (0.7, 1]"), set("(0.2, 0.8)")]);
        assert_eq!(pull_back(&ExactMap::identity(), &u).elements, u.elements);
        let c = ExactMap::constant(r(1, 5)).unwrap();
        assert_eq!(pull_back(&c, &u).elements, vec![IntervalSet::unit()]);
    }

    #[test]
    fn subcover_examples() {
        assert_eq!(min_subcover_count(&u6()).unwrap(), 2);
        let u = OpenCover::parse(&["[0, 1]", "[0, 0.5)"], "").unwrap();
        assert_eq!(min_subcover_count(&u).unwrap(), 1);
        let not_cover = OpenCover {
            elements: vec![set("[0, 0.5)"), set("(0.5, 1]")],
            label: String::new(),
        };
        assert!(matches!(min_subcover_count(&not_cover), Err(Error::Input(_))));
        assert!(OpenCover::parse(&["[0, 0.5)", "(0.5, 1]"], "").is_err());
        assert!(OpenCover::parse(&["[0, 0.5]", "(0.4, 1]"], "").is_err());
    }

    #[test]
    fn subcover_matches_enumeration_on_tent_joins() {
        let t = ExactMap::tent();
        let u = u6();
        let mut w = u.clone();
        let mut pulled = u.clone();
        for _ in 1..6 {
            pulled = pull_back(&t, &pulled);
            w = join(&w, &pulled);
            if w.len() <= 20 {
                assert_eq!(min_subcover_count(&w).unwrap(), brute_force_count(&w), "{w:?}");
            }
        }
    }

    #[test]
    fn unions_need_branching() {
        // The two split elements cover everything between them.
        let u = OpenCover::parse(
            &[
                "[0, 0.3) ∪ (0.6, 0.8)",
                "(0.25, 0.65) ∪ (0.75, 1]",
                "(0.2, 0.9)",
                "[0, 0.21)",
                "(0.85, 1]",
            ],
            "",
        )
        .unwrap();
        assert_eq!(min_subcover_count(&u).unwrap(), brute_force_count(&u));
        assert_eq!(min_subcover_count(&u).unwrap(), 2);
    }

    #[test]
    fn entropy_examples() {
        let id = cover_entropy(&ExactMap::identity(), &u6(), 6).unwrap();
        assert!(id.counts().iter().all(|&c| c == 2));
        let refl = cover_entropy(&ExactMap::reflection(), &u6(), 8).unwrap();
        assert_eq!(refl.verdict, GrowthVerdict::Stabilizes { value: 2 });
        let tent = cover_entropy(
            &ExactMap::tent(),
            &OpenCover::parse(&["[0, 0.51)", "(0.49, 1]"], "").unwrap(),
            8,
        )
        .unwrap();
        assert!(tent.counts().windows(2).all(|w| w[0] <= w[1]));
        assert!(matches!(tent.verdict, GrowthVerdict::Grows { .. }));
        assert!(tent.csv().starts_with("n,N_n,slope\n1,"));
    }

    #[test]
    fn complexity_examples() {
        let tent = complexity_cu(&ExactMap::tent(), &u6(), 6).unwrap();
        assert!(matches!(tent.verdict, ComplexityVerdict::Exceeds2 { n } if n <= 4));
        let refl = complexity_cu(&ExactMap::reflection(), &u6(), 10).unwrap();
        assert_eq!(refl.verdict, ComplexityVerdict::StuckAt2 { n_max: 10 });
        let dense = OpenCover::parse(&["[0, 1]", "(0.4, 0.6)"], "").unwrap();
        assert!(matches!(
            complexity_cu(&ExactMap::tent(), &dense, 4),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sequence_entropy_examples() {
        let t = ExactMap::tent();
        let u = u6();
        let seq = sequence_entropy(&t, &u, &[0, 1, 2, 3, 4], 5).unwrap();
        assert_eq!(seq.counts(), cover_entropy(&t, &u, 5).unwrap().counts());
        let dyadic = sequence_entropy(&t, &u, &[1, 2, 4, 8], 4).unwrap();
        assert!(dyadic.last_slope() > 0.3);
        let refl = sequence_entropy(&ExactMap::reflection(), &u, &[1, 2, 4, 8, 16, 32], 6).unwrap();
        assert!(refl.counts().iter().all(|&c| c <= 3));
        assert!(sequence_entropy(&t, &u, &[2, 1], 2).is_err());
    }

    #[test]
    fn mixing_examples() {
        let t = ExactMap::tent();
        let c = mixing_certificate(&t, &Interval::closed(r(2, 5), r(3, 5)), &r(1, 10), 12).unwrap();
        assert_eq!(c.verdict, MixingVerdict::Certified { n: 4 });
        assert_eq!(c.images[1], set("[4/5, 1]"));
        assert_eq!(c.images[2], set("[0, 2/5]"));
        assert_eq!(c.images[3], set("[0, 4/5]"));
        assert!(c.images[4].is_unit());
        let refl = mixing_certificate(
            &ExactMap::reflection(),
            &Interval::closed(r(2, 5), r(3, 5)),
            &r(1, 10),
            12,
        )
        .unwrap();
        assert!(matches!(refl.verdict, MixingVerdict::Failed { .. }));
        let whole = mixing_certificate(&t, &Interval::unit(), &r(1, 10), 5).unwrap();
        assert_eq!(whole.verdict, MixingVerdict::Certified { n: 0 });
    }
}
