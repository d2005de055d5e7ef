//! The case-study problems shipped with the crate.

use crate::error::Result;
use crate::ts::Problem;

pub const HOSPITAL: &str = include_str!("../fixtures/hospital.json");
pub const RETIREMENT_V1: &str = include_str!("../fixtures/retirement_v1.json");
pub const RETIREMENT_V2: &str = include_str!("../fixtures/retirement_v2.json");

pub fn hospital() -> Result<Problem> {
    Problem::from_json(HOSPITAL)
}

pub fn retirement_v1() -> Result<Problem> {
    Problem::from_json(RETIREMENT_V1)
}

/// Retirement home with soft constraints 5 and 6 swapped.
pub fn retirement_v2() -> Result<Problem> {
    Problem::from_json(RETIREMENT_V2)
}
