use core::fmt;

use crate::node::BatchId;

/// Errors produced by planning, building, committing and proving.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The batch layout cannot describe a tree.
    InvalidPlan(&'static str),
    /// A level, index or batch id falls outside the plan.
    OutOfRange {
        /// What was being looked up.
        what: &'static str,
        /// The offending value.
        value: usize,
        /// Exclusive upper bound.
        bound: usize,
    },
    /// A batch was handed the wrong number of leaves.
    ShapeMismatch {
        /// Batch being built.
        batch: BatchId,
        /// Leaves the plan reserves for it.
        expected: usize,
        /// Leaves supplied.
        actual: usize,
    },
    /// An empty leaf list was given where at least one leaf is required.
    EmptyInput,
    /// Commit was attempted without a result for every planned batch.
    IncompleteCommit {
        /// First batch without a result.
        missing: BatchId,
    },
    /// Two results claim the same batch.
    DuplicateBatch(BatchId),
    /// A result was built against a different plan.
    PlanMismatch(BatchId),
    /// A result's checkpoints disagree with the plan geometry.
    CorruptResult {
        /// Batch the result claims to be.
        batch: BatchId,
        /// Short description of the inconsistency.
        reason: &'static str,
    },
}

/// Crate-wide result alias.
pub type Result<T, E = Error> = core::result::Result<T, E>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidPlan(why) => write!(f, "invalid plan: {why}"),
            Error::OutOfRange { what, value, bound } => {
                write!(f, "{what} {value} out of range (must be < {bound})")
            }
            Error::ShapeMismatch {
                batch,
                expected,
                actual,
            } => write!(f, "batch {batch} expects {expected} leaves, got {actual}"),
            Error::EmptyInput => f.write_str("at least one leaf is required"),
            Error::IncompleteCommit { missing } => {
                write!(f, "cannot commit: no result for batch {missing}")
            }
            Error::DuplicateBatch(b) => write!(f, "duplicate result for batch {b}"),
            Error::PlanMismatch(b) => write!(f, "result for batch {b} was built for another plan"),
            Error::CorruptResult { batch, reason } => {
                write!(f, "corrupt result for batch {batch}: {reason}")
            }
        }
    }
}

impl core::error::Error for Error {}
