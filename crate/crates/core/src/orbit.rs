//! Orbits, finite-horizon ω-limit surrogates, exact periodic points, the
//! power-of-two period test and recurrence proxies.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::map::{Dynamics, ExactMap, DEFAULT_PIECE_BUDGET};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Orbit<P> {
    pub base: P,
    /// `f^0(x), …, f^n(x)`.
    pub points: Vec<P>,
    pub exact: bool,
}

impl<P: Clone> Orbit<P> {
    /// Number of steps `n` (the orbit holds `n + 1` points).
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn tail(&self, burn: usize) -> &[P] {
        &self.points[burn.min(self.points.len())..]
    }
}

pub fn orbit<M: Dynamics>(map: &M, x: &M::Point, n: usize) -> Result<Orbit<M::Point>> {
    let mut points = Vec::with_capacity(n + 1);
    let mut y = x.clone();
    // Validate the seed even when n = 0.
    map.apply(&y)?;
    points.push(y.clone());
    for _ in 0..n {
        y = map.apply(&y)?;
        points.push(y.clone());
    }
    Ok(Orbit {
        base: x.clone(),
        points,
        exact: map.is_exact(),
    })
}

/// Clustered orbit tail standing in for `ω_f(x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaApprox<P> {
    /// Leftmost point of each cluster, in increasing order.
    pub representatives: Vec<P>,
    pub coords: Vec<f64>,
    /// Rightmost coordinate of each cluster.
    pub cluster_hi: Vec<f64>,
    pub burn: usize,
    pub horizon: usize,
    pub tol: f64,
    /// Set when the window held no points.
    pub underpopulated: bool,
}

impl<P> OmegaApprox<P> {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    /// Whether `c` is within `tol` of some cluster.
    pub fn near(&self, c: f64) -> bool {
        let i = self.cluster_hi.partition_point(|&hi| hi + self.tol < c);
        i < self.coords.len() && self.coords[i] - self.tol <= c
    }

    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((*self.coords.first()?, *self.cluster_hi.last()?))
    }
}

pub fn omega_approx<M: Dynamics>(
    map: &M,
    x: &M::Point,
    burn: usize,
    horizon: usize,
    tol: f64,
) -> Result<OmegaApprox<M::Point>>
where
    M::Point: PartialOrd,
{
    if burn >= horizon {
        return Err(Error::input(format!("burn {burn} must be below horizon {horizon}")));
    }
    if tol.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::input("clustering tolerance must be positive"));
    }
    let orb = orbit(map, x, horizon)?;
    Ok(cluster_points(map, orb.tail(burn), burn, horizon, tol))
}

/// Single-linkage clustering of points sorted left to right.
pub fn cluster_points<M: Dynamics>(
    map: &M,
    points: &[M::Point],
    burn: usize,
    horizon: usize,
    tol: f64,
) -> OmegaApprox<M::Point>
where
    M::Point: PartialOrd,
{
    let mut sorted: Vec<&M::Point> = points.iter().collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut representatives = Vec::new();
    let mut coords = Vec::new();
    let mut cluster_hi: Vec<f64> = Vec::new();
    for p in sorted {
        let c = map.coord(p);
        match cluster_hi.last_mut() {
            Some(hi) if c - *hi <= tol => *hi = hi.max(c),
            _ => {
                representatives.push(p.clone());
                coords.push(c);
                cluster_hi.push(c);
            }
        }
    }
    OmegaApprox {
        underpopulated: representatives.is_empty(),
        representatives,
        coords,
        cluster_hi,
        burn,
        horizon,
        tol,
    }
}

/// Solutions of `f^n(x) = x`, and those of least period exactly `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicPoints {
    pub n: usize,
    pub fixed: IntervalSet,
    pub least: IntervalSet,
}

impl PeriodicPoints {
    /// Smallest-denominator point of least period `n`.
    pub fn witness(&self) -> Option<Rational> {
        self.least.simplest_point()
    }
}

fn divisors(n: usize) -> Vec<usize> {
    (1..n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Fixed-point sets of `f^1, …, f^n`.
fn fixed_sets(map: &ExactMap, n: usize, budget: usize) -> Result<Vec<IntervalSet>> {
    use rayon::prelude::*;
    let powers = map.powers(n, budget)?;
    Ok(powers.par_iter().map(ExactMap::fixed_points).collect())
}

fn least_from_fixed(fixed: &[IntervalSet], n: usize) -> IntervalSet {
    divisors(n)
        .into_iter()
        .fold(fixed[n - 1].clone(), |acc, d| acc.difference(&fixed[d - 1]))
}

pub fn periodic_points(map: &ExactMap, n: usize) -> Result<PeriodicPoints> {
    periodic_points_budgeted(map, n, DEFAULT_PIECE_BUDGET)
}

pub fn periodic_points_budgeted(map: &ExactMap, n: usize, budget: usize) -> Result<PeriodicPoints> {
    if n == 0 {
        return Err(Error::input("period must be at least 1"));
    }
    let fixed = fixed_sets(map, n, budget)?;
    Ok(PeriodicPoints {
        n,
        least: least_from_fixed(&fixed, n),
        fixed: fixed[n - 1].clone(),
    })
}

/// Least periods up to a bound, one verified witness per period.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodSpectrum {
    pub bound: usize,
    pub witnesses: BTreeMap<usize, Rational>,
    /// First `n` whose power exceeded the piece budget (periods ≥ n unchecked).
    pub budget_exhausted_at: Option<usize>,
    pub piece_budget: usize,
}

impl PeriodSpectrum {
    pub fn periods(&self) -> Vec<usize> {
        self.witnesses.keys().copied().collect()
    }

    pub fn checked_up_to(&self) -> usize {
        self.budget_exhausted_at.map_or(self.bound, |n| n - 1)
    }
}

/// Checks `f^p(w) = w` and `f^j(w) ≠ w` for `0 < j < p` by iteration.
pub fn verify_least_period(map: &ExactMap, w: &Rational, p: usize) -> Result<bool> {
    let mut y = w.clone();
    for j in 1..=p {
        y = map.eval(&y)?;
        if &y == w {
            return Ok(j == p);
        }
    }
    Ok(false)
}

pub fn period_spectrum(map: &ExactMap, bound: usize, budget: usize) -> Result<PeriodSpectrum> {
    let mut spectrum = PeriodSpectrum {
        bound,
        witnesses: BTreeMap::new(),
        budget_exhausted_at: None,
        piece_budget: budget,
    };
    let mut fixed: Vec<IntervalSet> = Vec::with_capacity(bound);
    let mut power = ExactMap::identity();
    for n in 1..=bound {
        power = match map.compose_budgeted(&power, budget) {
            Ok(p) => p,
            Err(e) if e.is_budget() => {
                spectrum.budget_exhausted_at = Some(n);
                break;
            }
            Err(e) => return Err(e),
        };
        fixed.push(power.fixed_points());
        let least = least_from_fixed(&fixed, n);
        if let Some(w) = least.simplest_point() {
            if !verify_least_period(map, &w, n)? {
                return Err(Error::Internal(format!("witness {w} fails period-{n} re-check")));
            }
            spectrum.witnesses.insert(n, w);
        }
    }
    Ok(spectrum)
}

/// Outcome of testing the periods `1, 2, 4, …, 2^{m+1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DyadicPeriods {
    /// `(2^j, witness of least period 2^j)` for `j = 0..=m+1`.
    pub levels: Vec<(usize, Option<Rational>)>,
    /// Every `2^j` with `j ≤ m` occurs and `2^{m+1}` does not. By Sharkovskii's
    /// theorem the full period set is then exactly `{1, 2, …, 2^m}`.
    pub exact_period_set: Option<Vec<usize>>,
}

/// Least periods `2^0 … 2^{m+1}`: powers by repeated squaring, the last level
/// solved without materializing the top power.
pub fn dyadic_periods(map: &ExactMap, m: u32, budget: usize) -> Result<DyadicPeriods> {
    let mut fixed: Vec<IntervalSet> = Vec::new();
    let mut power = map.clone();
    for j in 0..=m {
        if j > 0 {
            power = power.compose_budgeted(&power, budget)?;
        }
        fixed.push(power.fixed_points());
    }
    fixed.push(power.fixed_points_of_composition(&power));
    let mut levels = Vec::new();
    for (j, set) in fixed.iter().enumerate() {
        let least = if j == 0 {
            set.clone()
        } else {
            set.difference(&fixed[j - 1])
        };
        let witness = least.simplest_point();
        if let Some(w) = &witness {
            if !verify_least_period(map, w, 1 << j)? {
                return Err(Error::Internal(format!("witness {w} fails period-{} re-check", 1 << j)));
            }
        }
        levels.push((1usize << j, witness));
    }
    let all_low = levels[..=m as usize].iter().all(|(_, w)| w.is_some());
    let exact_period_set =
        (all_low && levels[m as usize + 1].1.is_none()).then(|| (0..=m).map(|j| 1usize << j).collect());
    Ok(DyadicPeriods {
        levels,
        exact_period_set,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntropyCertificate {
    Positive {
        period: usize,
        witness: Rational,
        orbit: Vec<Rational>,
    },
    ConsistentWithZero {
        periods: Vec<usize>,
        checked_up_to: usize,
        /// Set when the dyadic test pinned down the entire period set.
        complete_period_set: bool,
        note: String,
    },
}

impl EntropyCertificate {
    pub fn is_positive(&self) -> bool {
        matches!(self, EntropyCertificate::Positive { .. })
    }
}

/// A least period that is not a power of two certifies positive entropy;
/// otherwise the finite evidence is reported as consistent with zero entropy.
pub fn entropy_classify(map: &ExactMap, max_n: usize) -> Result<EntropyCertificate> {
    entropy_classify_budgeted(map, max_n, DEFAULT_PIECE_BUDGET)
}

pub fn entropy_classify_budgeted(map: &ExactMap, max_n: usize, budget: usize) -> Result<EntropyCertificate> {
    if max_n < 3 {
        return Err(Error::precondition("entropy classification needs max_n ≥ 3"));
    }
    let spectrum = period_spectrum(map, max_n, budget)?;
    if let Some((&p, w)) = spectrum.witnesses.iter().find(|(p, _)| !p.is_power_of_two()) {
        let orbit = orbit(map, w, p - 1)?.points;
        return Ok(EntropyCertificate::Positive {
            period: p,
            witness: w.clone(),
            orbit,
        });
    }
    // No odd factor below max_n. If period 2^{J+1} (the next power of two past
    // max_n) is also absent, Sharkovskii rules out every other period.
    let checked = spectrum.checked_up_to();
    let top = usize::BITS - 1 - max_n.leading_zeros();
    let mut complete = false;
    if spectrum.budget_exhausted_at.is_none() {
        if let Ok(d) = dyadic_periods(map, top, budget) {
            complete = d.levels.last().is_some_and(|(_, w)| w.is_none());
        }
    }
    let note = if complete {
        "no period 2^(J+1) beyond the checked range, so every period is a listed power of two".to_string()
    } else {
        format!("all least periods up to {checked} are powers of two; finite evidence only")
    };
    Ok(EntropyCertificate::ConsistentWithZero {
        periods: spectrum.periods(),
        checked_up_to: checked,
        complete_period_set: complete,
        note,
    })
}

/// Finite-horizon proxies for the recurrence hierarchy with `U = B(x, radius)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceFlags {
    pub horizon: usize,
    pub radius: f64,
    /// Some return to `U` in `[horizon/2, horizon]`.
    pub recurrent: bool,
    /// Returns with every gap (including the final one) at most `horizon/4`.
    pub strongly_recurrent: bool,
    /// Some `N ≤ horizon/4` with `f^{kN}(x) ∈ U` for all `kN ≤ horizon`.
    pub regularly_recurrent: bool,
    pub max_return_gap: Option<usize>,
    pub regular_period: Option<usize>,
}

pub fn recurrence_classify<M: Dynamics>(map: &M, x: &M::Point, horizon: usize, radius: f64) -> Result<RecurrenceFlags> {
    if horizon == 0 {
        return Err(Error::input("horizon must be at least 1"));
    }
    let orb = orbit(map, x, horizon)?;
    let cx = map.coord(x);
    let inside: Vec<bool> = orb.points.iter().map(|p| (map.coord(p) - cx).abs() < radius).collect();
    let returns: Vec<usize> = (1..=horizon).filter(|&n| inside[n]).collect();
    let recurrent = returns.iter().any(|&n| 2 * n >= horizon);
    let max_return_gap = if returns.is_empty() {
        None
    } else {
        let mut prev = 0;
        let mut gap = 0;
        for &n in returns.iter().chain(std::iter::once(&(horizon + 1))) {
            gap = gap.max(n - prev);
            prev = n;
        }
        Some(gap)
    };
    let quarter = (horizon / 4).max(1);
    let strongly_recurrent = recurrent && max_return_gap.is_some_and(|g| g <= quarter);
    let regular_period = (1..=quarter).find(|&n| (n..=horizon).step_by(n).all(|t| inside[t]));
    Ok(RecurrenceFlags {
        horizon,
        radius,
        recurrent,
        strongly_recurrent,
        regularly_recurrent: regular_period.is_some() && strongly_recurrent,
        max_return_gap,
        regular_period,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{DoublingTower, LimitMap, NumericMap};
    use crate::rational::r;

    #[test]
    fn orbit_examples() {
        let o = orbit(&ExactMap::tent(), &r(2, 7), 6).unwrap();
        assert_eq!(
            o.points,
            vec![r(2, 7), r(4, 7), r(6, 7), r(2, 7), r(4, 7), r(6, 7), r(2, 7)]
        );
        let o = orbit(&ExactMap::identity(), &r(3, 11), 5).unwrap();
        assert!(o.points.iter().all(|p| p == &r(3, 11)));
        let o = orbit(&LimitMap::default(), &r(0, 1), 3).unwrap();
        assert_eq!(o.points, vec![r(0, 1), r(2, 3), r(2, 9), r(8, 9)]);
    }

    #[test]
    fn omega_examples() {
        let tent = ExactMap::tent();
        let om = omega_approx(&tent, &r(2, 7), 10, 100, 1e-9).unwrap();
        assert_eq!(om.representatives, vec![r(2, 7), r(4, 7), r(6, 7)]);
        let refl = ExactMap::reflection();
        let x: Rational = "0.2".parse().unwrap();
        let om = omega_approx(&refl, &x, 10, 100, 1e-9).unwrap();
        assert_eq!(om.representatives, vec![r(1, 5), r(4, 5)]);
        let stage3 = DoublingTower::zero_based(3).realized;
        let om = omega_approx(&stage3, &r(1, 7), 200, 1000, 2f64.powi(-30)).unwrap();
        assert_eq!(om.len(), 8);
        assert!(omega_approx(&tent, &r(1, 3), 10, 10, 1e-9).is_err());
    }

    #[test]
    fn omega_of_numeric_cycle() {
        let f = NumericMap::logistic(3.2).unwrap();
        let om = omega_approx(&f, &0.3, 2000, 4000, 1e-9).unwrap();
        assert_eq!(om.len(), 2);
    }

    #[test]
    fn periodic_point_examples() {
        let tent = ExactMap::tent();
        assert_eq!(
            periodic_points(&tent, 1).unwrap().fixed,
            IntervalSet::points([r(0, 1), r(2, 3)])
        );
        let p3 = periodic_points(&tent, 3).unwrap();
        for x in [r(2, 7), r(4, 7), r(6, 7)] {
            assert!(p3.least.contains(&x));
        }
        assert_eq!(p3.witness(), Some(r(2, 7)));
        assert!(periodic_points(&ExactMap::identity(), 1).unwrap().fixed.is_unit());
        assert!(periodic_points(&ExactMap::identity(), 2).unwrap().least.is_empty());
    }

    #[test]
    fn budget_is_reported() {
        let s = period_spectrum(&ExactMap::tent(), 12, 200).unwrap();
        assert_eq!(s.budget_exhausted_at, Some(8));
        assert_eq!(s.checked_up_to(), 7);
    }

    #[test]
    fn entropy_examples() {
        match entropy_classify(&ExactMap::tent(), 3).unwrap() {
            EntropyCertificate::Positive { period, witness, orbit } => {
                assert_eq!(period, 3);
                assert_eq!(witness, r(2, 7));
                assert_eq!(orbit, vec![r(2, 7), r(4, 7), r(6, 7)]);
            }
            other => panic!("{other:?}"),
        }
        let d2 = DoublingTower::zero_based(2).realized;
        match entropy_classify(&d2, 16).unwrap() {
            EntropyCertificate::ConsistentWithZero {
                periods,
                complete_period_set,
                ..
            } => {
                assert_eq!(periods, vec![1, 2, 4]);
                assert!(complete_period_set);
            }
            other => panic!("{other:?}"),
        }
        match entropy_classify(&ExactMap::reflection(), 8).unwrap() {
            EntropyCertificate::ConsistentWithZero { periods, .. } => assert_eq!(periods, vec![1, 2]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dyadic_test_on_small_towers() {
        for m in 1..=4u32 {
            let f = DoublingTower::zero_based(m).realized;
            let d = dyadic_periods(&f, m, DEFAULT_PIECE_BUDGET).unwrap();
            let expect: Vec<usize> = (0..=m).map(|j| 1 << j).collect();
            assert_eq!(d.exact_period_set, Some(expect.clone()));
            // Direct enumeration up to 2^{m+1} agrees.
            let s = period_spectrum(&f, 1 << (m + 1), DEFAULT_PIECE_BUDGET).unwrap();
            assert_eq!(s.periods(), expect);
        }
        let d = dyadic_periods(&ExactMap::tent(), 2, DEFAULT_PIECE_BUDGET).unwrap();
        assert!(d.exact_period_set.is_none());
    }

    #[test]
    fn recurrence_examples() {
        let tent = ExactMap::tent();
        let f = recurrence_classify(&tent, &r(2, 7), 64, 0.01).unwrap();
        assert!(f.recurrent && f.strongly_recurrent && f.regularly_recurrent);
        assert_eq!(f.regular_period, Some(3));
        let f = recurrence_classify(&tent, &r(1, 3), 64, 0.1).unwrap();
        assert!(!f.recurrent && !f.strongly_recurrent && !f.regularly_recurrent);
        let f = recurrence_classify(&LimitMap::default(), &r(0, 1), 1 << 12, 1.0 / 27.0).unwrap();
        assert!(f.regularly_recurrent);
    }
}
