//! Per-batch builds.
//!
//! A batch sees only its own leaves; every other leaf is a placeholder with no
//! value. A node is computable by the batch iff every leaf under it is owned
//! by the batch, so placeholders never need to be materialized: ownership of
//! the leaf span decides everything.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{Position, TreePlan};
use crate::hash::{Digest32, Sha256Hasher, TreeHasher};
use crate::node::{BatchId, Node};

/// Output of one batch build: the checkpoints to hand to the commit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchResult {
    /// Batch that produced the checkpoints.
    pub batch_id: BatchId,
    /// Fingerprint of the plan the batch was built against.
    pub plan_fingerprint: Digest32,
    /// Layer checkpoints, ordered by the first leaf each one covers.
    pub checkpoints: Vec<Node>,
    /// Hash evaluations spent, leaf hashes included.
    pub nodes_computed: usize,
    /// Leaves in the batch.
    pub leaf_count: usize,
}

/// Positions of the layer checkpoints of `batch`, left to right.
///
/// These are the maximal nodes whose leaf span lies inside the batch. The
/// result depends only on the plan.
pub fn checkpoint_positions(plan: &TreePlan, batch: BatchId) -> Result<Vec<Position>> {
    let range = plan.batch_range(batch)?;
    let inside = |pos: Position| {
        let span = plan
            .leaf_span(pos)
            .expect("position enumerated from plan widths");
        range.start <= span.start && span.end <= range.end
    };
    let mut out = Vec::new();
    for level in 0..=plan.height() {
        let first = range.start >> level;
        let last = (range.end - 1) >> level;
        for index in first..=last {
            let pos = Position::new(level, index);
            if !inside(pos) {
                continue;
            }
            let parent_inside =
                level < plan.height() && inside(Position::new(level + 1, index / 2));
            if !parent_inside {
                out.push(pos);
            }
        }
    }
    out.sort_by_key(|pos| pos.index << pos.level);
    Ok(out)
}

/// Leaves this batch stands in for with placeholders.
pub fn digest_placeholder_count(plan: &TreePlan, batch: BatchId) -> Result<usize> {
    let range = plan.batch_range(batch)?;
    Ok(plan.total_leaves() - range.len())
}

/// SHA-256 [`build_batch_with`].
pub fn build_batch<L: AsRef<[u8]>>(
    plan: &TreePlan,
    batch: BatchId,
    leaves: &[L],
) -> Result<BatchResult> {
    build_batch_with::<Sha256Hasher, L>(plan, batch, leaves)
}

/// Hashes everything `batch` can compute from `leaves` and returns the
/// resulting layer checkpoints.
///
/// The build climbs level by level over a contiguous window of computed
/// nodes. A parent joins the next window when all of its children are in the
/// current one; nodes left behind are checkpoints.
pub fn build_batch_with<H: TreeHasher, L: AsRef<[u8]>>(
    plan: &TreePlan,
    batch: BatchId,
    leaves: &[L],
) -> Result<BatchResult> {
    let range = plan.batch_range(batch)?;
    if leaves.len() != range.len() {
        return Err(Error::ShapeMismatch {
            batch,
            expected: range.len(),
            actual: leaves.len(),
        });
    }

    let mut checkpoints = Vec::new();
    let mut window_start = range.start;
    let mut window: Vec<Digest32> = leaves.iter().map(|l| H::leaf(l.as_ref())).collect();
    let mut nodes_computed = window.len();

    for level in 0..plan.height() {
        let width = plan.level_widths()[level as usize];
        let window_end = window_start + window.len();
        let mut next = Vec::with_capacity(window.len() / 2 + 1);
        let mut next_start = None;
        let mut consumed = alloc::vec![false; window.len()];

        for parent in window_start / 2..window_end.div_ceil(2) {
            let left = 2 * parent;
            let right = (2 * parent + 1 < width).then_some(2 * parent + 1);
            let last = right.unwrap_or(left);
            if left < window_start || last >= window_end {
                continue;
            }
            let l = left - window_start;
            let digest = match right {
                Some(_) => H::pair(&window[l], &window[l + 1]),
                None => H::promote(&window[l]),
            };
            consumed[l] = true;
            if right.is_some() {
                consumed[l + 1] = true;
            }
            nodes_computed += 1;
            next_start.get_or_insert(parent);
            next.push(digest);
        }

        for (offset, digest) in window.iter().enumerate() {
            if !consumed[offset] {
                let pos = Position::new(level, window_start + offset);
                checkpoints.push(Node::checkpoint(pos, batch, *digest));
            }
        }

        match next_start {
            Some(start) => {
                window_start = start;
                window = next;
            }
            None => {
                window.clear();
                break;
            }
        }
    }
    // Whatever survives to the top level is the root.
    for (offset, digest) in window.iter().enumerate() {
        let pos = Position::new(plan.height(), window_start + offset);
        checkpoints.push(Node::checkpoint(pos, batch, *digest));
    }

    checkpoints.sort_by_key(|n| n.position.index << n.position.level);
    Ok(BatchResult {
        batch_id: batch,
        plan_fingerprint: plan.fingerprint_with::<H>(),
        checkpoints,
        nodes_computed,
        leaf_count: range.len(),
    })
}
