//! Exact analysis of one-dimensional interval maps: periodic structure,
//! periodic portions of zero-entropy maps, proximality and scrambled pairs,
//! open-cover entropy, independence sets and maximal pattern entropy.

pub mod covers;
pub mod error;
pub mod independence;
pub mod interval;
pub mod map;
pub mod orbit;
pub mod pairs;
pub mod pattern;
pub mod portion;
pub mod rational;

pub use error::{Error, Result};
pub use interval::{Interval, IntervalSet};
pub use map::{DoublingTower, Dynamics, ExactMap, LimitMap, MapHandle, MapSpec, NumericMap, PlPath};
pub use rational::{r, Rational};
