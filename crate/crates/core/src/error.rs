use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::level::Level;
use crate::rational::Rational;

pub type Result<T> = core::result::Result<T, Error>;

/// One chain candidate that failed the gap check, with the profile values
/// that landed inside `(σ(η), η]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockedCandidate {
    pub index: u64,
    pub eta: Level,
    pub sigma_eta: Level,
    pub blocking: Vec<Rational>,
}

/// Diagnostic for a failed η-search: every chain candidate was blocked.
///
/// Under the stated stability hypothesis this cannot happen, so the usual
/// meaning is that the supplied stability parameter is too small.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaViolation {
    pub chain: Vec<Level>,
    pub blocked: Vec<BlockedCandidate>,
    /// Half-graph for φ_A recovered from the failed search, when the caller
    /// could construct one.
    pub witness: Option<crate::stabilizer::PhiWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("group order {order} exceeds cap {cap}")]
    OrderCap { order: u128, cap: usize },
    #[error("invalid Cayley table: {0}")]
    InvalidTable(String),
    #[error("operands belong to groups of different order ({left} vs {right})")]
    GroupMismatch { left: usize, right: usize },
    #[error("set is not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("search cap exceeded: {0}")]
    CapExceeded(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("theorem check failed: {0}")]
    TheoremViolation(String),
    #[error("η-search failed at every chain candidate ({} blocked)", .0.blocked.len())]
    EtaSearch(Box<EtaViolation>),
    #[error("{what}: observed {observed} exceeds bound {bound}")]
    BoundViolated {
        what: &'static str,
        observed: String,
        bound: String,
    },
    #[error("no ε-net within the size bound {bound}; best verified net has {} points", .best.len())]
    NetUnachievable { bound: usize, best: Vec<usize> },
    #[error("ε-approximation failed up to length cap {cap}; best discrepancy {best}")]
    ApproximationFailed { cap: usize, best: Rational },
    #[error("comparison undecidable at the tracked precision: {0}")]
    Precision(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors that signal a failed theorem check rather than bad input.
    pub fn is_theorem_violation(&self) -> bool {
        matches!(
            self,
            Error::TheoremViolation(_) | Error::EtaSearch(_) | Error::BoundViolated { .. }
        )
    }
}
