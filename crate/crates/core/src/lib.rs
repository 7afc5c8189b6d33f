pub mod cyclotomic;
pub mod denominator;
pub mod groups;
pub mod hecke;
pub mod monic;
pub mod qseries;
pub mod replication;

pub use cyclotomic::{CycError, CycNum, Rational};
pub use qseries::{BiSeries, Exponent, PuiseuxSeries, SeriesError};

/// Outcome of a verifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    /// The available precision or data does not decide the question.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}
