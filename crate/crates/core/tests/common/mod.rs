//! Strategies and property bodies shared by the proptest suite and the
//! acceptance run.
#![allow(dead_code)]

use std::sync::OnceLock;

use intdyn::covers::{join, min_subcover_count, pull_back, OpenCover};
use intdyn::independence::independence_check;
use intdyn::orbit::recurrence_classify;
use intdyn::pairs::kneading_code;
use intdyn::portion::{compute_portion, OmegaParams, PeriodicPortion};
use intdyn::{r, ExactMap, Interval, IntervalSet, LimitMap, Rational};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn rational01(denom: i64) -> impl Strategy<Value = Rational> {
    (0..=denom).prop_map(move |p| r(p, denom))
}

/// Piecewise-linear self-maps with up to five pieces and small denominators.
pub fn pl_map() -> impl Strategy<Value = ExactMap> {
    (
        prop::collection::btree_set(1i64..24, 0..5),
        prop::collection::vec(0i64..=16, 6),
    )
        .prop_map(|(cuts, vals)| {
            let mut breakpoints = vec![r(0, 1)];
            breakpoints.extend(cuts.into_iter().map(|c| r(c, 24)));
            breakpoints.push(r(1, 1));
            let values = vals[..breakpoints.len()].iter().map(|&v| r(v, 16)).collect();
            ExactMap::new(breakpoints, values).unwrap()
        })
}

pub fn interval() -> impl Strategy<Value = Interval> {
    (0i64..=30, 0i64..=30, any::<bool>(), any::<bool>()).prop_map(|(a, b, lc, hc)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        // Degenerate intervals are only representable closed.
        let closed = lo == hi;
        Interval::new(r(lo, 30), r(hi, 30), lc || closed, hc || closed).unwrap()
    })
}

pub fn interval_list() -> impl Strategy<Value = Vec<Interval>> {
    prop::collection::vec(interval(), 0..5)
}

pub fn image_preimage_sound(f: &ExactMap, parts: &[Interval], x: &Rational) -> Result<(), TestCaseError> {
    let s = IntervalSet::from_parts(parts.iter().cloned());
    let fx = f.eval(x).unwrap();
    let pre = f.preimage(&s);
    let img = f.image(&s);
    prop_assert_eq!(pre.contains(x), s.contains(&fx), "preimage membership at {}", x);
    if s.contains(x) {
        prop_assert!(img.contains(&fx), "f({}) = {} missing from the image", x, fx);
    }
    prop_assert!(s.contains_set(&f.image(&pre)), "f(f^-1 S) ⊄ S");
    prop_assert!(f.preimage(&img).contains_set(&s), "S ⊄ f^-1(f S)");
    prop_assert!(pre.is_normalized() && img.is_normalized());
    Ok(())
}

/// `D(g)^2` is conjugate to `g` on both outer thirds.
pub fn doubling_conjugacy(g: &ExactMap, x: &Rational) -> Result<(), TestCaseError> {
    let d = g.double();
    let gx = g.eval(x).unwrap();
    let third = r(1, 3);
    let right = |y: &Rational| r(2, 3) + y * &third;
    let left = |y: &Rational| y * &third;
    prop_assert_eq!(d.iterate(&right(x), 2).unwrap(), right(&gx));
    prop_assert_eq!(d.iterate(&left(x), 2).unwrap(), left(&gx));
    Ok(())
}

pub fn normal_form(a: &[Interval], b: &[Interval], x: &Rational) -> Result<(), TestCaseError> {
    let sa = IntervalSet::from_parts(a.iter().cloned());
    let sb = IntervalSet::from_parts(b.iter().cloned());
    let in_a = a.iter().any(|p| p.contains(x));
    let in_b = b.iter().any(|p| p.contains(x));
    prop_assert!(sa.is_normalized());
    prop_assert_eq!(sa.contains(x), in_a);
    prop_assert_eq!(sa.union(&sb).contains(x), in_a || in_b);
    prop_assert_eq!(sa.intersect(&sb).contains(x), in_a && in_b);
    prop_assert_eq!(sa.complement().contains(x), !in_a);
    prop_assert_eq!(sa.complement().complement(), sa.clone());
    prop_assert_eq!(sa.normalize(), sa);
    Ok(())
}

/// `[0, a) ∪ (b, 1]` with `b < a`.
pub fn two_set_cover() -> impl Strategy<Value = OpenCover> {
    (1i64..20, 1i64..20).prop_filter_map("need b < a", |(a, b)| {
        (b < a).then(|| {
            OpenCover::new(
                vec![
                    IntervalSet::from(Interval::closed_open(r(0, 1), r(a, 20))),
                    IntervalSet::from(Interval::open_closed(r(b, 20), r(1, 1))),
                ],
                "U",
            )
            .unwrap()
        })
    })
}

pub fn submultiplicative(f: &ExactMap, u: &OpenCover, v: &OpenCover) -> Result<(), TestCaseError> {
    let nu = min_subcover_count(u).unwrap();
    let nv = min_subcover_count(v).unwrap();
    prop_assert!(min_subcover_count(&join(u, v)).unwrap() <= nu * nv);
    let pu = pull_back(f, u);
    prop_assert!(min_subcover_count(&pu).unwrap() <= nu);
    prop_assert!(min_subcover_count(&join(u, &pu)).unwrap() <= nu * nu);
    Ok(())
}

/// Verified certificates re-check by iteration; refuted ones name a pattern
/// whose preimage intersection really is empty.
pub fn certificate_revalidates(f: &ExactMap, a: &Interval, b: &Interval, times: &[usize]) -> Result<(), TestCaseError> {
    let targets = [IntervalSet::from(a.clone()), IntervalSet::from(b.clone())];
    let cert = independence_check(f, &targets, times).unwrap();
    if cert.verified {
        prop_assert!(cert.revalidate(f).unwrap());
        prop_assert_eq!(cert.witnesses.len(), 1 << times.len());
        for w in &cert.witnesses {
            for (&t, &s) in times.iter().zip(&w.pattern) {
                prop_assert!(targets[s].contains(&f.iterate(&w.point, t).unwrap()));
            }
        }
    } else {
        let pattern = cert
            .failing_pattern
            .clone()
            .expect("refuted certificates name a pattern");
        let mut meet = IntervalSet::unit();
        for (&t, &s) in times.iter().zip(&pattern) {
            let mut pre = targets[s].clone();
            for _ in 0..t {
                pre = f.preimage(&pre);
            }
            meet = meet.intersect(&pre);
        }
        prop_assert!(meet.is_empty(), "pattern {:?} is realized", pattern);
    }
    Ok(())
}

pub fn limit_portion() -> &'static PeriodicPortion {
    static P: OnceLock<PeriodicPortion> = OnceLock::new();
    P.get_or_init(|| {
        let params = OmegaParams {
            burn: 0,
            horizon: 1024,
            tol: 2f64.powi(-30),
        };
        compute_portion(&LimitMap::default(), &r(0, 1), 6, params).unwrap()
    })
}

/// Codes along the base orbit are congruent and shift with the time offset.
pub fn code_congruence(a: usize) -> Result<(), TestCaseError> {
    let f = LimitMap::default();
    let x = f.iterate(&r(0, 1), a).unwrap();
    let c = kneading_code(&f, limit_portion(), &x, 6, 1024).unwrap();
    prop_assert!(c.is_congruent(), "{:?}", c.entries);
    for k in 1..=6 {
        let m = 1usize << k;
        prop_assert_eq!(c.get(k) % m, (m - a % m) % m);
    }
    Ok(())
}

pub fn flags_monotone(f: &ExactMap, x: &Rational, horizon: usize, radius: f64) -> Result<(), TestCaseError> {
    let flags = recurrence_classify(f, x, horizon, radius).unwrap();
    prop_assert!(!flags.regularly_recurrent || flags.strongly_recurrent);
    prop_assert!(!flags.strongly_recurrent || flags.recurrent);
    Ok(())
}
