//! Shared inputs for the benchmarks.

use intdyn::covers::OpenCover;
use intdyn::{DoublingTower, ExactMap, IntervalSet};

pub fn tent() -> ExactMap {
    ExactMap::tent()
}

pub fn tower(stage: u32) -> ExactMap {
    DoublingTower::zero_based(stage).realized
}

pub fn two_set_cover(overlap_lo: &str, overlap_hi: &str) -> OpenCover {
    OpenCover::parse(&[&format!("[0, {overlap_hi})"), &format!("({overlap_lo}, 1]")], "bench").expect("valid cover")
}

pub fn targets() -> Vec<IntervalSet> {
    vec!["(0, 1/4)".parse().unwrap(), "(3/4, 1)".parse().unwrap()]
}
